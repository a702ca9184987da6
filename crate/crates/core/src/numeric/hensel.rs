use num_bigint::BigInt;
use num_traits::Signed;

use super::local::{eval_poly, LocalElem, PadicError, Valuation};
use super::rational::{rational_valuation, Rational};

fn derivative(poly: &[LocalElem]) -> Vec<LocalElem> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&LocalElem::from_int(i as i64, c.prime(), c.ramification(), c.cap())))
        .collect::<Result<_, _>>()
        .expect("same field")
}

fn newton_budget(x: &LocalElem) -> usize {
    let rel = (x.cap() as u64 * x.ramification()).max(2);
    2 * (64 - rel.leading_zeros() as usize) + 8
}

/// Refines `approx` to a root of `Σ poly[j] x^j` by Newton iteration.
pub fn hensel_lift(poly: &[LocalElem], approx: &LocalElem) -> Result<LocalElem, PadicError> {
    let dp = derivative(poly);
    let value = eval_poly(poly, approx)?;
    if value.is_exact_zero() {
        return Ok(approx.clone());
    }
    let slope = eval_poly(&dp, approx)?;
    let v_slope = slope.valuation().certified().map_err(|_| {
        PadicError::HenselFails("derivative vanishes at the approximation".into())
    })?;
    let v_value = match value.valuation() {
        Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        Valuation::Infinite => unreachable!(),
    };
    if v_value <= &v_slope * Rational::from_integer(BigInt::from(2)) {
        return Err(PadicError::HenselFails(format!(
            "v(P(r)) = {} does not exceed 2 v(P'(r)) = {}",
            v_value,
            &v_slope * Rational::from_integer(BigInt::from(2))
        )));
    }
    let v_slope_pi = slope.val_pi();
    let mut r = approx.inexact();
    for _ in 0..newton_budget(approx) {
        let value = eval_poly(poly, &r)?;
        if value.is_zero() {
            let certified = r.abs_prec_pi().min(value.abs_prec_pi() - v_slope_pi);
            return Ok(r.with_abs_prec(certified));
        }
        let slope = eval_poly(&dp, &r)?;
        r = r.sub(&value.div(&slope)?)?;
    }
    Err(PadicError::PrecisionExhausted("Newton iteration did not stabilize".into()))
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let (mut acc, mut b) = (1u128, base as u128 % p as u128);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Least `r` in `1..p` with `r^n ≡ residue (mod p)`.
fn residue_root(residue: u64, n: u64, p: u64) -> Option<u64> {
    (1..p).find(|&r| mod_pow(r, n, p) == residue)
}

/// Exact rational n-th root, if one exists.
fn rational_root(r: &Rational, n: u32) -> Option<Rational> {
    if r.is_negative() && n % 2 == 0 {
        return None;
    }
    let root = |m: &BigInt| {
        let c = m.abs().nth_root(n);
        (c.pow(n) == m.abs()).then(|| if m.is_negative() { -c } else { c })
    };
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

/// Principal n-th root: the root whose unit residue is the least n-th root of the residue.
pub fn nth_root(a: &LocalElem, n: u64) -> Result<LocalElem, PadicError> {
    let p = a.prime();
    if n == 0 || n % p == 0 {
        return Err(PadicError::Incompatible(format!("root index {n} is not a unit at {p}")));
    }
    if a.is_exact_zero() {
        return Ok(a.clone());
    }
    if a.is_zero() {
        return Err(PadicError::PrecisionExhausted("radicand indistinguishable from zero".into()));
    }
    let s = a.val_pi();
    if s.rem_euclid(n as i64) != 0 {
        return Err(PadicError::NoRootInField(format!(
            "valuation {}/{} is not divisible by {n}",
            s,
            a.ramification()
        )));
    }
    let residue = a.residue().expect("nonzero");
    let seed = residue_root(residue, n, p).ok_or_else(|| {
        PadicError::NoRootInField(format!("residue {residue} is not an {n}-th power mod {p}"))
    })?;
    if let Some(r) = a.exact_value() {
        if let Some(q) = rational_root(r, n as u32) {
            for cand in [q.clone(), -q] {
                let c = LocalElem::from_rational(&cand, p, a.ramification(), a.cap());
                if c.residue() == Some(seed) && rational_valuation(&cand, p).is_some() {
                    return Ok(c);
                }
            }
        }
    }
    let u = a.shift_by_pi(-s).inexact();
    let nn = LocalElem::from_int(n as i64, p, a.ramification(), a.cap());
    let one = LocalElem::from_int(1, p, a.ramification(), a.cap());
    let seed_inv = num_bigint::BigInt::from(seed)
        .modinv(&BigInt::from(p))
        .expect("seed is a unit");
    let mut z = LocalElem::from_rational(&Rational::from_integer(seed_inv), p, a.ramification(), a.cap()).inexact();
    for _ in 0..newton_budget(a) {
        let defect = one.sub(&u.mul(&z.pow(n as i64)?)?)?;
        if defect.is_zero() {
            let root = u.mul(&z.pow(n as i64 - 1)?)?;
            let root = root.with_abs_prec(root.val_pi() + (u.abs_prec_pi() - u.val_pi()));
            return Ok(root.shift_by_pi(s / n as i64));
        }
        z = z.add(&z.mul(&defect)?.div(&nn)?)?;
    }
    Err(PadicError::PrecisionExhausted("root iteration did not stabilize".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::int;
    use num_traits::{ToPrimitive, Zero};

    fn poly(coeffs: &[i64], p: u64, cap: u32) -> Vec<LocalElem> {
        coeffs.iter().map(|&c| LocalElem::from_int(c, p, 1, cap)).collect()
    }

    #[test]
    fn square_root_of_six() {
        let r = hensel_lift(&poly(&[-6, 0, 1], 5, 20), &LocalElem::from_int(1, 5, 1, 20)).unwrap();
        let (v, _) = r.to_integer_mod().unwrap();
        assert_eq!((v % 25u32).to_u64(), Some(16));
        assert_eq!(&r.unit_digits()[..2], &[1, 3]);
    }

    #[test]
    fn linear_is_exact() {
        let a = LocalElem::from_rational(&crate::numeric::rat(3, 7), 5, 1, 10);
        let r = hensel_lift(&[a.neg(), LocalElem::from_int(1, 5, 1, 10)], &a).unwrap();
        assert_eq!(r.exact_value(), a.exact_value());
    }

    #[test]
    fn cube_root_matches_brute_force() {
        let r = hensel_lift(&poly(&[-8, 0, 0, 1], 7, 12), &LocalElem::from_int(1, 7, 1, 12)).unwrap();
        let (v, _) = r.to_integer_mod().unwrap();
        let m = 7u64.pow(4);
        let oracle: Vec<u64> = (0..m).filter(|x| x % 7 == 1 && (x * x % m) * x % m == 8).collect();
        assert_eq!(oracle.len(), 1);
        assert_eq!((v % m).to_u64(), Some(oracle[0]));
    }

    #[test]
    fn dominance_failure() {
        // x^2 - 5 at 0: v(P) = 1, v(P') = ∞
        let err = hensel_lift(&poly(&[-5, 0, 1], 5, 10), &LocalElem::from_int(0, 5, 1, 10).inexact());
        assert!(matches!(err, Err(PadicError::HenselFails(_))));
        let err = hensel_lift(&poly(&[-2, 0, 1], 7, 10), &LocalElem::from_int(1, 7, 1, 10));
        assert!(matches!(err, Err(PadicError::HenselFails(_))));
    }

    #[test]
    fn roots_by_residue_search() {
        let p2 = LocalElem::from_int(25, 5, 1, 10);
        assert_eq!(nth_root(&p2, 2).unwrap().exact_value(), Some(&int(5)));
        let four = LocalElem::from_rational_with_precision(&int(4), 5, 1, 4, 10);
        let r = nth_root(&four, 2).unwrap();
        assert_eq!(r.residue(), Some(2));
        assert!(r.congruent(&LocalElem::from_int(2, 5, 1, 10)));
        assert_eq!(r.abs_precision(), Some(int(4)));
    }

    #[test]
    fn eisenstein_root() {
        let p = LocalElem::from_int(5, 5, 1, 10);
        assert!(matches!(nth_root(&p, 2), Err(PadicError::NoRootInField(_))));
        let p = LocalElem::from_int(5, 5, 2, 10);
        let r = nth_root(&p, 2).unwrap();
        assert!(r.congruent(&LocalElem::uniformizer(5, 2, 10)));
        // 2 is not a square mod 5
        let two = LocalElem::from_int(2, 5, 1, 10);
        assert!(matches!(nth_root(&two, 2), Err(PadicError::NoRootInField(_))));
    }

    #[test]
    fn root_power_round_trip() {
        let pi = LocalElem::uniformizer(7, 3, 8);
        let a = pi.add(&LocalElem::from_int(3, 7, 3, 8)).unwrap().pow(5).unwrap();
        let r = nth_root(&a, 5).unwrap();
        assert!(r.pow(5).unwrap().congruent(&a));
        assert_eq!(r.valuation(), Valuation::Finite(Rational::zero()));
    }
}
