//! The uniformizing series `ξ`, its inverse `γ`, and their formal checks.

pub mod classical;
pub mod gamma;
pub mod verify;
pub mod xi;

use serde::{Deserialize, Serialize};

pub use classical::{classical_bottcher_dense, classical_bottcher_oracle};
pub use gamma::{compose_with_shifts, compute_gamma, compute_gamma_in, shift_orbit};
pub use verify::{
    coefficients_integral_at, conjugacy_residual, denominators_divide_degrees, inverse_residuals,
    verify_formal_conjugacy, verify_formal_inverse, ConjugacyReport, InverseReport,
};
pub use xi::{compute_xi, compute_xi_n, compute_xi_n_in, relation_unit, xi_index};

use crate::numeric::rational::{format_rational, Rational};
use crate::series::{Correspondence, CorrespondenceJson, SeriesJson, SeriesRing, WeightedSeries};

#[derive(Debug, Clone)]
pub struct BoettcherData {
    pub corr: Correspondence,
    pub xi: WeightedSeries,
    pub gamma: WeightedSeries,
    pub truncation_weight: Rational,
    pub n_used: usize,
}

impl BoettcherData {
    pub fn compute(corr: &Correspondence, x: &Rational) -> Self {
        let (xi, n_used) = compute_xi(corr, x);
        let gamma = compute_gamma_in(&SeriesRing::target_for(corr, x), &xi, x);
        BoettcherData { corr: corr.clone(), xi, gamma, truncation_weight: x.clone(), n_used }
    }

    pub fn to_json(&self) -> BoettcherJson {
        BoettcherJson {
            corr: self.corr.to_json(),
            truncation_weight: format_rational(&self.truncation_weight),
            n_used: self.n_used,
            xi: self.xi.to_json(),
            gamma: self.gamma.to_json(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoettcherJson {
    pub corr: CorrespondenceJson,
    pub truncation_weight: String,
    pub n_used: usize,
    pub xi: SeriesJson,
    pub gamma: SeriesJson,
}
