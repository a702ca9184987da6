use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::numeric::hensel::{hensel_lift, nth_root};
use crate::numeric::local::{eval_rational_poly, LocalElem, PadicError, Valuation};
use crate::numeric::newton::newton_polygon;
use crate::numeric::rational::{format_rational, Rational};
use crate::series::{Correspondence, CorrespondenceJson};

/// Largest ramification index the path search will enter.
pub const MAX_RAMIFICATION: u64 = 4096;

/// A finite forward path `(α_0, …, α_n)` with `g(α_{i+1}) = f(α_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    coords: Vec<LocalElem>,
    corr: Correspondence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordJson {
    pub valuation: String,
    pub unit_digits: Vec<u64>,
    pub tower_level: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathJson {
    pub corr: CorrespondenceJson,
    pub prime: u64,
    pub coords: Vec<CoordJson>,
}

impl PathPoint {
    /// Checks the path condition at working precision.
    pub fn new(corr: &Correspondence, coords: Vec<LocalElem>) -> Result<Self, EvalError> {
        if coords.is_empty() {
            return Err(EvalError::PathTooShort { needed: 1, have: 0 });
        }
        for (i, w) in coords.windows(2).enumerate() {
            let lhs = eval_rational_poly(corr.g_coeffs(), &w[1])?;
            let rhs = eval_rational_poly(corr.f_coeffs(), &w[0])?;
            if !lhs.sub(&rhs)?.is_zero() {
                return Err(EvalError::NotAPath(i));
            }
        }
        Ok(PathPoint { coords, corr: corr.clone() })
    }

    pub fn coords(&self) -> &[LocalElem] {
        &self.coords
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn prime(&self) -> u64 {
        self.coords[0].prime()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The shifted path `(α_1, α_2, …)`.
    pub fn shift(&self) -> Result<Self, EvalError> {
        if self.coords.len() < 2 {
            return Err(EvalError::PathTooShort { needed: 2, have: self.coords.len() });
        }
        Ok(PathPoint { coords: self.coords[1..].to_vec(), corr: self.corr.clone() })
    }

    /// `w_i = 1/α_i` for `i < count`.
    pub fn w_coords(&self, count: usize) -> Result<Vec<LocalElem>, EvalError> {
        if count > self.coords.len() {
            return Err(EvalError::PathTooShort { needed: count, have: self.coords.len() });
        }
        self.coords[..count].iter().map(|a| a.inv().map_err(EvalError::from)).collect()
    }

    pub fn to_json(&self) -> PathJson {
        let e = self.corr.e() as u64;
        let coords = self
            .coords
            .iter()
            .map(|a| CoordJson {
                valuation: match a.valuation() {
                    Valuation::Finite(v) => format_rational(&v),
                    Valuation::AtLeast(v) => format!(">={}", format_rational(&v)),
                    Valuation::Infinite => "inf".into(),
                },
                unit_digits: a.unit_digits(),
                tower_level: a.tower_level(e),
            })
            .collect();
        PathJson { corr: self.corr.to_json(), prime: self.prime(), coords }
    }
}

fn level_limit(e: u64) -> u32 {
    if e <= 1 {
        return 0;
    }
    let (mut k, mut acc) = (0, 1u64);
    while acc * e <= MAX_RAMIFICATION {
        acc *= e;
        k += 1;
    }
    k
}

/// Least ramification `E·e^j` making `E·e^j · r` integral, within `max_level` tower steps.
fn ramification_for(r: &Rational, ram: u64, e: u64, max_level: u32) -> Result<u64, EvalError> {
    let mut target = ram;
    let level = |x: u64| {
        if e <= 1 {
            return 0;
        }
        let mut k = 0;
        let mut y = x;
        while y > 1 && y % e == 0 {
            y /= e;
            k += 1;
        }
        k
    };
    loop {
        let scaled = r * Rational::from_integer(BigInt::from(target));
        if scaled.is_integer() {
            return Ok(target);
        }
        if e <= 1 || level(target * e) > max_level || target * e > MAX_RAMIFICATION {
            return Err(EvalError::Padic(PadicError::NoRootInField(format!(
                "root valuation {} needs ramification beyond tower level {max_level}",
                format_rational(r)
            ))));
        }
        target *= e;
    }
}

fn residue_of(c: &LocalElem) -> Result<u64, EvalError> {
    match c.valuation() {
        Valuation::Infinite => Ok(0),
        Valuation::Finite(v) if v.is_positive() => Ok(0),
        Valuation::Finite(_) => Ok(c.residue().unwrap_or(0)),
        Valuation::AtLeast(v) if v.is_positive() => Ok(0),
        Valuation::AtLeast(_) => Err(EvalError::Padic(PadicError::PrecisionExhausted(
            "residue coefficient not determined".into(),
        ))),
    }
}

fn eval_mod(poly: &[u64], x: u64, p: u64) -> u64 {
    poly.iter().rev().fold(0u128, |acc, &c| (acc * x as u128 + c as u128) % p as u128) as u64
}

/// One step of the forward search: a root of `g(y) = f(α)` of the dominant valuation.
fn forward_step(corr: &Correspondence, alpha: &LocalElem, max_level: u32) -> Result<LocalElem, EvalError> {
    let (p, cap) = (alpha.prime(), alpha.cap());
    let e = corr.e();
    let g = corr.g_coeffs();
    let c = eval_rational_poly(corr.f_coeffs(), alpha)?;
    if e == 1 {
        let b0 = LocalElem::from_rational(&g[0], p, alpha.ramification(), cap);
        return Ok(c.sub(&b0)?);
    }
    let ram = alpha.ramification();
    let lift = |x: &Rational, ram: u64| LocalElem::from_rational(x, p, ram, cap);
    let mut poly: Vec<LocalElem> = g.iter().map(|b| lift(b, ram)).collect();
    poly[0] = poly[0].sub(&c)?;
    let polygon = newton_polygon(&poly)?;
    let (slope, _) = polygon
        .dominant()
        .cloned()
        .ok_or_else(|| EvalError::NotDominant("constant equation".into()))?;
    let r = -slope;
    if !r.is_negative() {
        return Err(EvalError::NotDominant(format!(
            "largest root has valuation {} ≥ 0",
            format_rational(&r)
        )));
    }
    let ram2 = ramification_for(&r, ram, e as u64, max_level)?;
    let k = (&r * Rational::from_integer(BigInt::from(ram2))).to_integer().to_i64().expect("small shift");
    let poly: Vec<LocalElem> = poly.iter().map(|c| c.embed(ram2)).collect::<Result<_, _>>()?;
    if g[1..e].iter().all(|b| b.is_zero()) {
        return Ok(nth_root(&poly[0].neg(), e as u64)?);
    }
    let scaled: Vec<LocalElem> = poly
        .iter()
        .enumerate()
        .map(|(i, c)| c.shift_by_pi(k * (i as i64 - e as i64)))
        .collect();
    let residues: Vec<u64> = scaled.iter().map(residue_of).collect::<Result<_, _>>()?;
    let deriv: Vec<u64> = residues.iter().enumerate().skip(1).map(|(i, &c)| (c * i as u64) % p).collect();
    let rho = (1..p)
        .find(|&z| eval_mod(&residues, z, p) == 0 && eval_mod(&deriv, z, p) != 0)
        .ok_or_else(|| {
            EvalError::Padic(PadicError::NoRootInField(format!("residue polynomial {residues:?} has no simple root mod {p}")))
        })?;
    let seed = LocalElem::from_int(rho as i64, p, ram2, cap);
    let z = hensel_lift(&scaled, &seed)?;
    Ok(z.shift_by_pi(k))
}

/// Forward path of `steps` steps from `α_0`, raising the tower level whenever needed.
pub fn forward_path_search(corr: &Correspondence, alpha0: &LocalElem, steps: usize) -> Result<PathPoint, EvalError> {
    forward_path_search_within(corr, alpha0, steps, level_limit(corr.e() as u64))
}

/// As [`forward_path_search`], refusing ramification beyond `e^max_level`.
pub fn forward_path_search_within(
    corr: &Correspondence,
    alpha0: &LocalElem,
    steps: usize,
    max_level: u32,
) -> Result<PathPoint, EvalError> {
    match alpha0.valuation() {
        Valuation::Finite(v) if v.is_negative() => {}
        _ => return Err(EvalError::NotDominant("starting point must satisfy |α_0| > 1".into())),
    }
    let mut coords = vec![alpha0.clone()];
    for _ in 0..steps {
        let next = forward_step(corr, coords.last().unwrap(), max_level)?;
        coords.push(next);
    }
    Ok(PathPoint { coords, corr: corr.clone() })
}

/// `v(α_{i+1})·e = v(α_i)·d`, the valuation of a dominant root.
pub fn predicted_valuation(corr: &Correspondence, v: &Rational) -> Rational {
    v * Rational::new(BigInt::from(corr.d()), BigInt::from(corr.e()))
}
