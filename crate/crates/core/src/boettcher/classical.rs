//! The one-variable Böttcher coordinate `lim f^n(x)^{1/d^n}`, computed with dense power series in `w = 1/x`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::numeric::rational::Rational;
use crate::series::{Correspondence, Monomial, SeriesRing, WeightedSeries};

type Dense = Vec<Rational>;

fn dense_mul(a: &[Rational], b: &[Rational], n: usize) -> Dense {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `b^r` for `b_0 = 1`, by the recurrence `m a_m = Σ_{k=1}^m ((r+1)k - m) b_k a_{m-k}`.
fn dense_pow(b: &[Rational], r: &Rational, n: usize) -> Dense {
    let mut a = vec![Rational::zero(); n + 1];
    a[0] = Rational::one();
    let r1 = r + Rational::one();
    for m in 1..=n {
        let mut acc = Rational::zero();
        for k in 1..=m.min(b.len() - 1) {
            if b[k].is_zero() {
                continue;
            }
            let factor = &r1 * Rational::from_integer(BigInt::from(k)) - Rational::from_integer(BigInt::from(m));
            acc += factor * &b[k] * &a[m - k];
        }
        a[m] = acc / Rational::from_integer(BigInt::from(m));
    }
    a
}

/// `p(s)` for a polynomial `p` with coefficients low to high.
fn dense_compose(p: &[Rational], s: &[Rational], n: usize) -> Dense {
    let mut acc = vec![Rational::zero(); n + 1];
    for c in p.iter().rev() {
        acc = dense_mul(&acc, s, n);
        acc[0] += c;
    }
    acc
}

fn valuation(s: &[Rational]) -> Option<usize> {
    s.iter().position(|c| !c.is_zero())
}

/// Coefficients of `ξ(w) = w · Π_k F(w_k)^{-1/d^{k+1}}` up to degree `floor(x)`,
/// where `F(u) = u^d f(1/u)`, `w_0 = w`, `w_{k+1} = w_k^d / F(w_k)`.
pub fn classical_bottcher_dense(f_coeffs: &[Rational], x: &Rational) -> Dense {
    let n = x.floor().to_integer().to_usize().unwrap_or(0);
    let d = f_coeffs.len() - 1;
    let big_f: Dense = f_coeffs.iter().rev().cloned().collect();
    let mut w = vec![Rational::zero(); n + 1];
    if n >= 1 {
        w[1] = Rational::one();
    }
    let mut product = vec![Rational::zero(); n + 1];
    product[0] = Rational::one();
    let mut dk = BigInt::one();
    while let Some(v) = valuation(&w) {
        if v + 1 > n {
            break;
        }
        dk *= d;
        let fw = dense_compose(&big_f, &w, n);
        let factor = dense_pow(&fw, &Rational::new(BigInt::from(-1), dk.clone()), n);
        product = dense_mul(&product, &factor, n);
        let mut power = vec![Rational::zero(); n + 1];
        power[0] = Rational::one();
        for _ in 0..d {
            power = dense_mul(&power, &w, n);
        }
        let inv = dense_pow(&fw, &Rational::from_integer(BigInt::from(-1)), n);
        w = dense_mul(&power, &inv, n);
    }
    let mut xi = vec![Rational::zero(); n + 1];
    for i in 0..n {
        xi[i + 1] = product[i].clone();
    }
    xi
}

/// The classical coordinate as a series in `w_0` for the correspondence `y = f(x)`.
pub fn classical_bottcher_oracle(f_coeffs: &[Rational], x: &Rational) -> WeightedSeries {
    let g = vec![Rational::zero(), Rational::one()];
    let corr = Correspondence::new(f_coeffs.to_vec(), g).expect("monic f");
    let ring = SeriesRing::source(&corr, x);
    let dense = classical_bottcher_dense(f_coeffs, x);
    let terms = dense
        .into_iter()
        .enumerate()
        .map(|(k, c)| (Monomial::from_pairs(&[(0, k as u32)]), c))
        .collect();
    WeightedSeries::from_terms_with(&ring, terms, Some(x), crate::series::RewriteOrder::HighestFirst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    #[test]
    fn power_map_is_identity() {
        let f = vec![int(0), int(0), int(0), int(1)];
        let xi = classical_bottcher_dense(&f, &int(8));
        assert_eq!(xi[1], int(1));
        assert!(xi.iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()));
    }

    #[test]
    fn quadratic_leading_terms() {
        let f = vec![int(1), int(0), int(1)];
        let xi = classical_bottcher_dense(&f, &int(5));
        assert_eq!(&xi[..4], &[int(0), int(1), int(0), rat(-1, 2)]);
    }

    #[test]
    fn recurrence_matches_binomial() {
        // (1 + u)^{1/2}
        let b = vec![int(1), int(1)];
        let a = dense_pow(&b, &rat(1, 2), 3);
        assert_eq!(a, vec![int(1), rat(1, 2), rat(-1, 8), rat(1, 16)]);
    }
}
