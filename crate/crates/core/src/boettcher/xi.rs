use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::numeric::rational::{rational_pow, Rational};
use crate::series::{Correspondence, Monomial, SeriesRing, WeightedSeries};

/// Least `n` with `(d/e)^n + 1 > x`.
pub fn xi_index(e: usize, d: usize, x: &Rational) -> usize {
    let ratio = Rational::new(BigInt::from(d), BigInt::from(e));
    let mut n = 0;
    while rational_pow(&ratio, n as u32) + Rational::one() <= *x {
        n += 1;
    }
    n
}

/// `G(w_{k+1}) / F(w_k)`, the unit in `w_{k+1}^e = w_k^d · U_k`, known to weight `t`.
pub fn relation_unit(ring: &Arc<SeriesRing>, k: usize, t: &Rational) -> WeightedSeries {
    let corr = ring.correspondence();
    let poly = |coeffs: Vec<Rational>, i: usize| {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(j, c)| (Monomial::from_pairs(&[(i, j as u32)]), c))
            .collect();
        WeightedSeries::from_terms(ring, terms)
    };
    let g = poly(corr.reversed_g(), k + 1);
    let f = poly(corr.reversed_f(), k);
    if f.max_index().is_none() {
        return g;
    }
    let f_inv = f.truncate(t).unit_inverse().expect("F has constant term 1");
    g.mul_to(&f_inv, t)
}

/// `ξ_n = w_0 · Π_{k<n} U_k^{e^k / d^{k+1}}`, the `d^n`-th root of `w_n^{e^n}`, modulo weight above `x`.
pub fn compute_xi_n_in(ring: &Arc<SeriesRing>, n: usize, x: &Rational) -> WeightedSeries {
    let (e, d) = (ring.e() as i64, ring.d() as i64);
    let w0 = WeightedSeries::var(ring, 0);
    let unit_weight = x - Rational::one();
    let mut acc = WeightedSeries::one(ring);
    for k in 0..n {
        let u = relation_unit(ring, k, &unit_weight);
        let r = Rational::new(BigInt::from(e).pow(k as u32), BigInt::from(d).pow(k as u32 + 1));
        let factor = u.unit_pow(&r).expect("relation unit has constant term 1");
        acc = acc.mul_to(&factor, &unit_weight);
    }
    w0.mul_to(&acc, x)
}

pub fn compute_xi_n(corr: &Correspondence, n: usize, x: &Rational) -> WeightedSeries {
    compute_xi_n_in(&SeriesRing::source(corr, x), n, x)
}

/// `ξ` modulo weight above `x`, with the index `n` of the `ξ_n` used.
pub fn compute_xi(corr: &Correspondence, x: &Rational) -> (WeightedSeries, usize) {
    let n = xi_index(corr.e(), corr.d(), x);
    (compute_xi_n(corr, n, x), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    #[test]
    fn index_choice() {
        assert_eq!(xi_index(2, 3, &int(12)), 6);
        assert_eq!(xi_index(2, 3, &int(1)), 0);
        assert_eq!(xi_index(1, 2, &int(12)), 4);
        assert_eq!(xi_index(3, 4, &int(12)), 9);
        assert_eq!(xi_index(2, 3, &rat(25, 2)), 7);
    }

    #[test]
    fn trivial_cases() {
        let c = Correspondence::from_ints(&[1, 1, 0, 1], &[1, 0, 1]).unwrap();
        let x = int(12);
        let ring = SeriesRing::source(&c, &x);
        let xi0 = compute_xi_n(&c, 0, &x);
        assert_eq!(xi0.terms().count(), 1);
        assert_eq!(xi0.coeff(&Monomial::var(0)), int(1));
        let b = Correspondence::power_maps(2, 3);
        let xi = compute_xi_n(&b, 4, &x);
        assert!(xi.is_exact());
        assert_eq!(xi, WeightedSeries::var(&SeriesRing::source(&b, &x), 0));
        assert_eq!(ring.levels(), 6);
    }

    #[test]
    fn classical_quadratic_coefficient() {
        let c = Correspondence::from_ints(&[1, 0, 1], &[0, 1]).unwrap();
        let xi = compute_xi_n(&c, 3, &int(5));
        assert_eq!(xi.coeff(&Monomial::var(0)), int(1));
        assert_eq!(xi.coeff(&Monomial::from_pairs(&[(0, 3)])), rat(-1, 2));
    }
}
