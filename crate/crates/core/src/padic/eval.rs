use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::path::PathPoint;
use super::EvalError;
use crate::boettcher::compute_xi;
use crate::numeric::local::{LocalElem, Valuation};
use crate::numeric::rational::{format_rational, is_p_integral, rational_valuation, Rational};
use crate::series::{normal_monomials, weight_for, Correspondence, CorrespondenceJson, SeriesRing, WeightedSeries};

/// Good reduction at `p`: integral coefficients and `p ∤ e·d`.
pub fn check_good_reduction(corr: &Correspondence, p: u64) -> bool {
    let coeffs_ok = corr.f_coeffs().iter().chain(corr.g_coeffs()).all(|c| is_p_integral(c, p));
    coeffs_ok && (corr.e() as u64 * corr.d() as u64) % p != 0
}

/// `v_ε`: the series converges wherever `v(w_0) > v_ε`. Zero under good reduction.
pub fn convergence_radius(corr: &Correspondence, p: u64) -> Rational {
    let (e, d) = (corr.e() as i64, corr.d() as i64);
    let mut best = Rational::zero();
    let r = |n: i64, m: i64| Rational::new(BigInt::from(n), BigInt::from(m));
    for (j, a) in corr.f_coeffs().iter().enumerate().take(d as usize) {
        if let Some(v) = rational_valuation(a, p) {
            best = best.max(r(-v, d - j as i64));
        }
    }
    for (j, b) in corr.g_coeffs().iter().enumerate().take(e as usize) {
        if let Some(v) = rational_valuation(b, p) {
            best = best.max(r(-v * e, d * (e - j as i64)));
        }
    }
    best
}

/// Least weight of a normal monomial strictly above `t`.
pub fn least_weight_above(e: usize, d: usize, t: &Rational) -> Rational {
    let top = t.floor() + Rational::from_integer(BigInt::from(1));
    let ring = SeriesRing::target(e, d, &top);
    normal_monomials(&ring, &top)
        .iter()
        .map(|m| weight_for(m, e, d))
        .filter(|w| w > t)
        .min()
        .unwrap_or(top)
}

/// A partial sum with a certified lower bound on the valuation of the omitted tail.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: LocalElem,
    /// `None` when the series is exact and nothing was omitted.
    pub tail_bound: Option<Rational>,
}

impl SeriesValue {
    /// Valuation to which the true value is known: tail and arithmetic precision together.
    pub fn certified_precision(&self) -> Option<Rational> {
        match (&self.tail_bound, self.value.abs_precision()) {
            (Some(t), Some(a)) => Some(t.clone().min(a)),
            (Some(t), None) => Some(t.clone()),
            (None, a) => a,
        }
    }
}

fn finite_valuation(x: &LocalElem) -> Result<Rational, EvalError> {
    match x.valuation() {
        Valuation::Finite(v) => Ok(v),
        _ => Err(EvalError::Padic(crate::numeric::PadicError::PrecisionExhausted(
            "coordinate indistinguishable from zero".into(),
        ))),
    }
}

/// `Σ c(m) m(P)` over the stored terms, with `w_i = 1/α_i`.
pub fn evaluate_series_at_path(s: &WeightedSeries, path: &PathPoint) -> Result<SeriesValue, EvalError> {
    let needed = s.max_index().map_or(1, |i| i + 1);
    if path.len() < needed {
        return Err(EvalError::PathTooShort { needed, have: path.len() });
    }
    let p = path.prime();
    let v_eps = convergence_radius(path.corr(), p);
    let w = path.w_coords(needed)?;
    let v0 = finite_valuation(&w[0])?;
    if v0 <= v_eps {
        return Err(EvalError::DivergenceRegion {
            valuation: format_rational(&v0),
            threshold: format_rational(&v_eps),
        });
    }
    let mut powers: HashMap<(usize, u32), LocalElem> = HashMap::new();
    let mut acc = LocalElem::zero(p, w[0].ramification(), w[0].cap());
    for (m, c) in s.terms() {
        let mut term = LocalElem::from_rational(c, p, w[0].ramification(), w[0].cap());
        for (i, k) in m.pairs() {
            if !powers.contains_key(&(i, k)) {
                powers.insert((i, k), w[i].pow(k as i64)?);
            }
            term = term.mul(&powers[&(i, k)])?;
        }
        acc = acc.add(&term)?;
    }
    let tail_bound = s.truncation().map(|t| {
        let ring = s.ring();
        let xp = least_weight_above(ring.e(), ring.d(), &t);
        &v_eps + xp * (&v0 - &v_eps)
    });
    Ok(SeriesValue { value: acc, tail_bound })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericConjugacyReport {
    pub corr: CorrespondenceJson,
    pub prime: u64,
    #[serde(rename = "X")]
    pub x: String,
    pub path_length: usize,
    /// `v(ξ(σP))`.
    pub valuation_shifted: String,
    /// `v(ξ(P))`.
    pub valuation_base: String,
    /// Certified lower bound on `v((ξ(σP))^e - ξ(P)^d)` from truncation and precision.
    pub bound: String,
    /// Known lower bound on the computed residual; equal to its valuation unless the residual vanishes at precision.
    pub residual_valuation: String,
    pub residual_zero_at_precision: bool,
    pub passed: bool,
}

fn lower_bound(x: &LocalElem) -> Option<Rational> {
    match x.valuation() {
        Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
        Valuation::Infinite => None,
    }
}

fn fmt_opt(x: &Option<Rational>) -> String {
    x.as_ref().map_or_else(|| "inf".to_string(), format_rational)
}

/// Checks `(ξ(σP))^e = ξ(P)^d` for `ξ` already computed.
pub fn verify_numeric_conjugacy_with(
    corr: &Correspondence,
    xi: &WeightedSeries,
    path: &PathPoint,
    x: &Rational,
) -> Result<NumericConjugacyReport, EvalError> {
    let needed = xi.max_index().map_or(1, |i| i + 1) + 1;
    if path.len() < needed {
        return Err(EvalError::PathTooShort { needed, have: path.len() });
    }
    let a = evaluate_series_at_path(xi, &path.shift()?)?;
    let b = evaluate_series_at_path(xi, path)?;
    let (e, d) = (corr.e() as i64, corr.d() as i64);
    let va = finite_valuation(&a.value)?;
    let vb = finite_valuation(&b.value)?;
    let r = |n: i64| Rational::from_integer(BigInt::from(n));
    let bound_a = a.certified_precision().map(|t| r(e - 1) * &va + t);
    let bound_b = b.certified_precision().map(|t| r(d - 1) * &vb + t);
    let bound = match (bound_a, bound_b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    let residual = a.value.pow(e)?.sub(&b.value.pow(d)?)?;
    let got = lower_bound(&residual);
    let passed = match (&got, &bound) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(g), Some(b)) => g >= b,
    };
    Ok(NumericConjugacyReport {
        corr: corr.to_json(),
        prime: path.prime(),
        x: format_rational(x),
        path_length: path.len(),
        valuation_shifted: format_rational(&va),
        valuation_base: format_rational(&vb),
        bound: fmt_opt(&bound),
        residual_valuation: fmt_opt(&got),
        residual_zero_at_precision: residual.is_zero(),
        passed,
    })
}

pub fn verify_numeric_conjugacy(
    corr: &Correspondence,
    path: &PathPoint,
    x: &Rational,
) -> Result<NumericConjugacyReport, EvalError> {
    let (xi, _) = compute_xi(corr, x);
    verify_numeric_conjugacy_with(corr, &xi, path, x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormStep {
    pub index: usize,
    /// `e·min(v(α_{i+1}), 0)`.
    pub lhs: String,
    /// `d·min(v(α_i), 0)`.
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormIdentityReport {
    pub corr: CorrespondenceJson,
    pub prime: u64,
    pub good_reduction: bool,
    pub steps: Vec<NormStep>,
    pub passed: bool,
}

/// `e·min(v(α_{i+1}), 0) = d·min(v(α_i), 0)` along the path.
pub fn verify_norm_identity(corr: &Correspondence, path: &PathPoint) -> NormIdentityReport {
    let p = path.prime();
    let (e, d) = (Rational::from_integer(corr.e().into()), Rational::from_integer(corr.d().into()));
    let clip = |x: &LocalElem| -> Option<Rational> {
        match x.valuation() {
            Valuation::Finite(v) => Some(v.min(Rational::zero())),
            Valuation::Infinite => Some(Rational::zero()),
            Valuation::AtLeast(v) if !v.is_negative() => Some(Rational::zero()),
            Valuation::AtLeast(_) => None,
        }
    };
    let steps: Vec<NormStep> = path
        .coords()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let lhs = clip(&w[1]).map(|v| &e * v);
            let rhs = clip(&w[0]).map(|v| &d * v);
            let holds = lhs.is_some() && lhs == rhs;
            NormStep { index: i, lhs: fmt_opt(&lhs), rhs: fmt_opt(&rhs), holds }
        })
        .collect();
    let passed = steps.iter().all(|s| s.holds);
    NormIdentityReport { corr: corr.to_json(), prime: p, good_reduction: check_good_reduction(corr, p), steps, passed }
}
