use serde::{Deserialize, Serialize};

use super::gamma::compose_with_shifts;
use crate::numeric::rational::{format_rational, is_p_integral, Rational};
use crate::series::{Correspondence, CorrespondenceJson, SeriesRing, TermJson, WeightedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub corr: CorrespondenceJson,
    #[serde(rename = "X")]
    pub x: String,
    pub n_used: Option<usize>,
    /// Weight up to which the residual is known; `"exact"` when nothing was truncated.
    pub verified_weight: String,
    pub residual_terms: Vec<TermJson>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseReport {
    pub corr: CorrespondenceJson,
    #[serde(rename = "X")]
    pub x: String,
    pub verified_weight: String,
    /// `ξ(γ, γ∘τ, …) - z_0`.
    pub residual_terms: Vec<TermJson>,
    pub reverse_verified_weight: String,
    /// `γ(ξ, ξ∘σ, …) - w_0`.
    pub reverse_residual_terms: Vec<TermJson>,
    pub passed: bool,
}

fn verified(s: &WeightedSeries) -> String {
    s.truncation().map_or_else(|| "exact".to_string(), |t| format_rational(&t))
}

/// `(ξ∘σ)^e - ξ^d` in normal form.
pub fn conjugacy_residual(xi: &WeightedSeries) -> WeightedSeries {
    let ring = xi.ring();
    let lhs = xi.shift_substitute().pow(ring.e() as u64);
    let rhs = xi.pow(ring.d() as u64);
    lhs.sub(&rhs)
}

pub fn verify_formal_conjugacy(corr: &Correspondence, xi: &WeightedSeries, x: &Rational) -> ConjugacyReport {
    let residual = conjugacy_residual(xi);
    ConjugacyReport {
        corr: corr.to_json(),
        x: format_rational(x),
        n_used: None,
        verified_weight: verified(&residual),
        residual_terms: residual.to_json().terms,
        passed: residual.is_zero(),
    }
}

/// Both compositions, `ξ(γ, γ∘τ, …) - z_0` and `γ(ξ, ξ∘σ, …) - w_0`.
pub fn inverse_residuals(xi: &WeightedSeries, gamma: &WeightedSeries) -> (WeightedSeries, WeightedSeries) {
    let forward = compose_with_shifts(xi, gamma).sub(&WeightedSeries::var(gamma.ring(), 0));
    let backward = compose_with_shifts(gamma, xi).sub(&WeightedSeries::var(xi.ring(), 0));
    (forward, backward)
}

pub fn verify_formal_inverse(
    corr: &Correspondence,
    xi: &WeightedSeries,
    gamma: &WeightedSeries,
    x: &Rational,
) -> InverseReport {
    let (forward, backward) = inverse_residuals(xi, gamma);
    InverseReport {
        corr: corr.to_json(),
        x: format_rational(x),
        verified_weight: verified(&forward),
        residual_terms: forward.to_json().terms,
        reverse_verified_weight: verified(&backward),
        reverse_residual_terms: backward.to_json().terms,
        passed: forward.is_zero() && backward.is_zero(),
    }
}

/// Every stored coefficient is p-integral.
pub fn coefficients_integral_at(s: &WeightedSeries, p: u64) -> bool {
    s.terms().all(|(_, c)| is_p_integral(c, p))
}

/// Every coefficient's denominator has only prime factors dividing `e·d`.
pub fn denominators_divide_degrees(s: &WeightedSeries) -> bool {
    let ring: &SeriesRing = s.ring();
    let ed = (ring.e() * ring.d()) as u64;
    s.terms().all(|(_, c)| {
        let mut den = c.denom().clone();
        for q in 2..=ed {
            if ed % q == 0 {
                while (&den % q) == num_bigint::BigInt::from(0) {
                    den /= q;
                }
            }
        }
        den == num_bigint::BigInt::from(1)
    })
}
