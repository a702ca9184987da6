use std::sync::Arc;

use crate::numeric::rational::Rational;
use crate::series::{Correspondence, SeriesRing, WeightedSeries};

/// `s, s∘τ, s∘τ², …` for the first `count` shifts.
pub fn shift_orbit(s: &WeightedSeries, count: usize) -> Vec<WeightedSeries> {
    let mut out = Vec::with_capacity(count.max(1));
    let mut cur = s.clone();
    for _ in 0..count.max(1) {
        let next = cur.shift_substitute();
        out.push(cur);
        cur = next;
    }
    out
}

/// `outer(inner, inner∘shift, inner∘shift², …)`.
pub fn compose_with_shifts(outer: &WeightedSeries, inner: &WeightedSeries) -> WeightedSeries {
    let count = outer.max_index().map_or(1, |i| i + 1);
    outer.compose(&shift_orbit(inner, count))
}

/// Solves `ξ(γ, γ∘τ, …) = z_0` for `γ = z_0 + …` in the target ring of weight cap `x`.
///
/// Starting from `γ = z_0`, the whole defect `ξ(γ, …) - z_0` is subtracted
/// each round; the lowest surviving defect weight strictly increases, so the
/// loop ends after finitely many rounds.
pub fn compute_gamma_in(target: &Arc<SeriesRing>, xi: &WeightedSeries, x: &Rational) -> WeightedSeries {
    let z0 = WeightedSeries::var(target, 0);
    let mut gamma = z0.clone();
    let budget = crate::series::normal_monomials(target, x).len() + 2;
    for _ in 0..budget {
        let defect = compose_with_shifts(xi, &gamma).sub(&z0);
        if defect.is_zero() {
            return gamma;
        }
        gamma = gamma.sub(&defect).truncate(x);
    }
    panic!("inverse series did not converge below weight {x}");
}

pub fn compute_gamma(corr: &Correspondence, xi: &WeightedSeries, x: &Rational) -> WeightedSeries {
    compute_gamma_in(&SeriesRing::target_for(corr, x), xi, x)
}
