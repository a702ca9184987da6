use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::rational::{format_rational, is_p_integral, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrespondenceError {
    #[error("{0} is not monic")]
    NotMonic(&'static str),
    #[error("{0} has degree zero")]
    Constant(&'static str),
    #[error("not polarized: deg g = {e} is not less than deg f = {d}")]
    NotPolarized { e: usize, d: usize },
    #[error("bad coefficient: {0}")]
    Coefficient(String),
}

/// The correspondence `g(y) = f(x)` with `f`, `g` monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    f: Vec<Rational>,
    g: Vec<Rational>,
}

impl Correspondence {
    /// Coefficients are listed low to high; both polynomials must be monic of positive degree.
    pub fn new(f: Vec<Rational>, g: Vec<Rational>) -> Result<Self, CorrespondenceError> {
        let trim = |mut v: Vec<Rational>| {
            while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
                v.pop();
            }
            v
        };
        let (f, g) = (trim(f), trim(g));
        for (name, p) in [("f", &f), ("g", &g)] {
            if p.len() < 2 {
                return Err(CorrespondenceError::Constant(name));
            }
            if !p.last().unwrap().is_one() {
                return Err(CorrespondenceError::NotMonic(name));
            }
        }
        Ok(Correspondence { f, g })
    }

    /// Like [`Correspondence::new`] but also rejects `deg g ≥ deg f`.
    pub fn polarized(f: Vec<Rational>, g: Vec<Rational>) -> Result<Self, CorrespondenceError> {
        let c = Self::new(f, g)?;
        if !c.is_polarized() {
            return Err(CorrespondenceError::NotPolarized { e: c.e(), d: c.d() });
        }
        Ok(c)
    }

    pub fn from_ints(f: &[i64], g: &[i64]) -> Result<Self, CorrespondenceError> {
        let conv = |v: &[i64]| v.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect();
        Self::new(conv(f), conv(g))
    }

    pub fn from_strings(f: &[String], g: &[String]) -> Result<Self, CorrespondenceError> {
        let conv = |v: &[String]| {
            v.iter()
                .map(|s| parse_rational(s).map_err(|e| CorrespondenceError::Coefficient(e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        };
        Self::new(conv(f)?, conv(g)?)
    }

    /// `f = x^d`, `g = y^e`.
    pub fn power_maps(e: usize, d: usize) -> Self {
        let mono = |n: usize| {
            let mut v = vec![Rational::zero(); n + 1];
            v[n] = Rational::one();
            v
        };
        Correspondence { f: mono(d), g: mono(e) }
    }

    pub fn f_coeffs(&self) -> &[Rational] {
        &self.f
    }

    pub fn g_coeffs(&self) -> &[Rational] {
        &self.g
    }

    pub fn d(&self) -> usize {
        self.f.len() - 1
    }

    pub fn e(&self) -> usize {
        self.g.len() - 1
    }

    pub fn is_polarized(&self) -> bool {
        self.e() < self.d()
    }

    pub fn is_coprime(&self) -> bool {
        self.e().gcd(&self.d()) == 1
    }

    pub fn is_power_maps(&self) -> bool {
        self.f[..self.d()].iter().all(Zero::is_zero) && self.g[..self.e()].iter().all(Zero::is_zero)
    }

    /// All coefficients p-integral.
    pub fn integral_at(&self, p: u64) -> bool {
        self.f.iter().chain(&self.g).all(|c| is_p_integral(c, p))
    }

    pub fn is_integral(&self) -> bool {
        self.f.iter().chain(&self.g).all(|c| c.is_integer())
    }

    /// Coefficients of `u^d f(1/u) = 1 + a_{d-1} u + … + a_0 u^d`, low to high.
    pub fn reversed_f(&self) -> Vec<Rational> {
        self.f.iter().rev().cloned().collect()
    }

    /// Coefficients of `v^e g(1/v)`, low to high.
    pub fn reversed_g(&self) -> Vec<Rational> {
        self.g.iter().rev().cloned().collect()
    }

    pub fn eval_f(&self, x: &Rational) -> Rational {
        self.f.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_g(&self, y: &Rational) -> Rational {
        self.g.iter().rev().fold(Rational::zero(), |acc, c| acc * y + c)
    }

    pub fn to_json(&self) -> CorrespondenceJson {
        CorrespondenceJson {
            f: self.f.iter().map(format_rational).collect(),
            g: self.g.iter().map(format_rational).collect(),
            d: self.d(),
            e: self.e(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub f: Vec<String>,
    pub g: Vec<String>,
    pub d: usize,
    pub e: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn degrees_and_flags() {
        let c = Correspondence::from_ints(&[1, 1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!((c.d(), c.e()), (3, 2));
        assert!(c.is_polarized() && c.is_coprime() && !c.is_power_maps());
        assert!(Correspondence::power_maps(2, 3).is_power_maps());
        assert_eq!(c.reversed_f(), vec![rat(1, 1), rat(0, 1), rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn validation() {
        let ints = |v: &[i64]| v.iter().map(|&c| rat(c, 1)).collect::<Vec<_>>();
        assert_eq!(
            Correspondence::polarized(ints(&[1, 1]), ints(&[0, 0, 1])),
            Err(CorrespondenceError::NotPolarized { e: 2, d: 1 })
        );
        assert_eq!(Correspondence::from_ints(&[1, 2, 1], &[0, 1, 0]).unwrap().e(), 1);
        assert_eq!(Correspondence::from_ints(&[0, 0, 2], &[0, 1]), Err(CorrespondenceError::NotMonic("f")));
        assert_eq!(Correspondence::from_ints(&[3], &[0, 1]), Err(CorrespondenceError::Constant("f")));
    }

    #[test]
    fn integrality() {
        let c = Correspondence::new(vec![rat(0, 1), rat(1, 5), rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        assert!(!c.integral_at(5));
        assert!(c.integral_at(7));
    }
}
