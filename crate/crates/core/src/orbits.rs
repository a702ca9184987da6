//! Orbit counts for d-adic translation groups on the regular `d`-branching tree, and the prediction pipeline built on them.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::{exponent_matrix, kernel_triviality_cert, verify_cocycle_identity};
use crate::numeric::local::{LocalElem, Valuation};
use crate::numeric::rational::{format_rational, is_p_integral, Rational};
use crate::series::{Correspondence, CorrespondenceJson};

/// Largest group the explicit coset enumeration will walk.
pub const MAX_ENUMERATION: u64 = 1 << 27;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("v(α) = 0: Kummer theory gives no count")]
    ZeroValuation,
    #[error("value group element {0} has a denominator sharing a prime with d")]
    ValueGroup(String),
    #[error("count {0} does not fit in 64 bits")]
    Overflow(String),
    #[error("hypothesis violated: {hypothesis}")]
    HypothesisViolated {
        hypothesis: String,
        checklist: Vec<HypothesisCheck>,
        /// Orbit lower bound at the requested level when the degrees are `y^m = x^{m²}`.
        lower_bound: Option<u64>,
    },
}

fn checked_pow(base: u64, exp: u32) -> Result<u64, OrbitError> {
    base.checked_pow(exp).ok_or_else(|| OrbitError::Overflow(format!("{base}^{exp}")))
}

/// The regular `d`-branching tree to depth `levels`; level-`k` vertices are residues mod `d^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeModel {
    pub branching: u64,
    pub levels: u32,
}

impl TreeModel {
    pub fn new(branching: u64, levels: u32) -> Self {
        assert!(branching >= 1);
        TreeModel { branching, levels }
    }

    pub fn level_size(&self, k: u32) -> u64 {
        self.branching.pow(k)
    }

    /// The vertex below `g` at level `k - 1`.
    pub fn parent(&self, k: u32, g: u64) -> u64 {
        assert!(k >= 1);
        g % self.branching.pow(k - 1)
    }

    pub fn children(&self, k: u32, g: u64) -> Vec<u64> {
        let step = self.branching.pow(k);
        (0..self.branching).map(|c| g + c * step).collect()
    }

    /// `g + t` at level `k`; compatible with [`TreeModel::parent`].
    pub fn translate(&self, k: u32, g: u64, t: u64) -> u64 {
        let n = self.branching.pow(k) as u128;
        ((g as u128 + t as u128) % n) as u64
    }
}

/// The translation subgroup `d^m · Z_d` acting on the ends of the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DadicSubgroupModel {
    pub d: u64,
    pub generator_valuation: u32,
    pub levels: u32,
}

impl DadicSubgroupModel {
    pub fn new(d: u64, generator_valuation: u32, levels: u32) -> Self {
        DadicSubgroupModel { d, generator_valuation, levels }
    }

    /// Order of the image in `Z/d^k`.
    pub fn image_order(&self, k: u32) -> Result<u64, OrbitError> {
        checked_pow(self.d, k.saturating_sub(self.generator_valuation))
    }
}

/// `[Z/d^k : image] = d^{min(k, m)}`.
pub fn dadic_orbits_at_level(model: &DadicSubgroupModel, k: u32) -> Result<u64, OrbitError> {
    checked_pow(model.d, k.min(model.generator_valuation))
}

/// Orbits of `g ↦ g + step` on `Z/n`, by walking the action.
pub fn translation_orbits(n: u64, step: u64) -> u64 {
    assert!(n <= MAX_ENUMERATION, "group of order {n} is too large to enumerate");
    let mut seen = vec![false; n as usize];
    let mut orbits = 0;
    for start in 0..n {
        if seen[start as usize] {
            continue;
        }
        orbits += 1;
        let mut g = start;
        while !seen[g as usize] {
            seen[g as usize] = true;
            g = ((g as u128 + step as u128) % n as u128) as u64;
        }
    }
    orbits
}

/// Coset enumeration oracle for [`dadic_orbits_at_level`].
pub fn dadic_orbits_by_enumeration(model: &DadicSubgroupModel, k: u32) -> u64 {
    let tree = TreeModel::new(model.d, k);
    let step = model.d.pow(model.generator_valuation.min(k)) % tree.level_size(k).max(1);
    translation_orbits(tree.level_size(k), step)
}

/// Outcome of the Kummer count for `v(α) = u / den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerCount {
    pub valuation: String,
    /// Largest `m` with `d^m | u`.
    pub m: u32,
    /// Whether `u / d^m` is prime to `d`.
    pub cofactor_prime_to_d: bool,
    pub level: u32,
    /// `gcd(u, d^level)`, which is `d^{min(level, m)}` in the covered case.
    pub orbits: u64,
}

/// Orbits at `level` of the image of Galois on iterated `d`-th roots of `α`, under the Kummer-generic model.
pub fn kummer_orbit_count(d: u64, v_alpha: &Rational, level: u32) -> Result<KummerCount, OrbitError> {
    if v_alpha.is_zero() {
        return Err(OrbitError::ZeroValuation);
    }
    let db = BigInt::from(d);
    if !v_alpha.denom().gcd(&db).is_one() {
        return Err(OrbitError::ValueGroup(format_rational(v_alpha)));
    }
    let u = v_alpha.numer().abs();
    let mut m = 0u32;
    let mut rest = u.clone();
    if d > 1 {
        while (&rest % &db).is_zero() {
            rest /= &db;
            m += 1;
        }
    }
    let cofactor_prime_to_d = rest.gcd(&db).is_one();
    let dk = db.pow(level);
    let orbits = u.gcd(&dk).to_u64().ok_or_else(|| OrbitError::Overflow(format!("gcd at level {level}")))?;
    Ok(KummerCount { valuation: format_rational(v_alpha), m, cofactor_prime_to_d, level, orbits })
}

/// Orbits forced among level-`n` preimages under `y^m = x^{m²}`: cosets of the `m^n`-th roots of unity in the `m^{2n}`-th.
pub fn noncoprime_lower_bound(m_base: u64, n: u32) -> Result<u64, OrbitError> {
    let small = checked_pow(m_base, n)?;
    let total = m_base.checked_pow(2 * n).filter(|&t| t <= MAX_ENUMERATION && small <= 10_000);
    match total {
        Some(total) => Ok(translation_orbits(total, small)),
        None => Ok(small),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: u32,
    pub orbits: u64,
    /// The count relies on the Kummer-generic model rather than following from the hypotheses alone.
    pub model_dependent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub corr: CorrespondenceJson,
    pub prime: u64,
    pub alpha0_valuation: String,
    pub levels: u32,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Certificates for the exponent-1 reduction of `B_{d,e}`.
    pub iso_certified: bool,
    pub kummer_m: u32,
    pub per_level: Vec<LevelCount>,
    pub ends_orbits: u64,
    pub nearly_transitive: bool,
    pub model_assumptions: Vec<String>,
}

impl OrbitReport {
    pub fn is_monotone(&self) -> bool {
        self.per_level.windows(2).all(|w| w[0].orbits <= w[1].orbits)
    }

    /// Rows `level,orbits,model_dependent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,orbits,model_dependent\n");
        for c in &self.per_level {
            writeln!(out, "{},{},{}", c.level, c.orbits, c.model_dependent).unwrap();
        }
        out
    }
}

pub const HYPOTHESES: [&str; 5] = ["polarized", "good reduction", "unit degrees", "coprime degrees", "non-integral alpha"];

/// The five hypotheses in order; `v(α_0)` is `None` when it is not certified.
pub fn hypothesis_checklist(corr: &Correspondence, v_alpha: Option<&Rational>, p: u64) -> Vec<HypothesisCheck> {
    let (e, d) = (corr.e() as u64, corr.d() as u64);
    let integral = corr.f_coeffs().iter().chain(corr.g_coeffs()).all(|c| is_p_integral(c, p));
    let passes = [
        corr.is_polarized(),
        integral,
        (e * d) % p != 0,
        e.gcd(&d) == 1,
        v_alpha.is_some_and(|v| v.is_negative()),
    ];
    HYPOTHESES.iter().zip(passes).map(|(n, passed)| HypothesisCheck { name: n.to_string(), passed }).collect()
}

/// Orbit structure of Galois on backward paths from `α_0` up to `level`, after checking every hypothesis.
pub fn predicted_orbit_structure(
    corr: &Correspondence,
    alpha0: &LocalElem,
    p: u64,
    level: u32,
) -> Result<OrbitReport, OrbitError> {
    let v = match alpha0.valuation() {
        Valuation::Finite(v) => Some(v),
        _ => None,
    };
    let checklist = hypothesis_checklist(corr, v.as_ref(), p);
    let (e, d) = (corr.e() as u64, corr.d() as u64);
    if let Some(bad) = checklist.iter().find(|h| !h.passed) {
        let lower_bound = match (e > 1 && d == e * e && bad.name == "coprime degrees").then(|| noncoprime_lower_bound(e, level)) {
            Some(Ok(b)) => Some(b),
            _ => None,
        };
        return Err(OrbitError::HypothesisViolated { hypothesis: bad.name.clone(), checklist, lower_bound });
    }
    let v = v.expect("checked above");
    let swapped = exponent_matrix(d, e, level as usize).expect("coprime degrees checked");
    let iso_certified = verify_cocycle_identity(&swapped).passed && kernel_triviality_cert(&swapped).passed;
    let mut per_level = Vec::new();
    let mut kummer_m = 0;
    for k in 0..=level {
        let count = kummer_orbit_count(d, &v, k)?;
        kummer_m = count.m;
        per_level.push(LevelCount { level: k, orbits: count.orbits, model_dependent: count.m > 0 || !count.cofactor_prime_to_d });
    }
    let depth = v.numer().bits() as u32 + 1;
    let ends = kummer_orbit_count(d, &v, depth.max(level))?;
    let model_assumptions = vec![
        "units are infinitely d-divisible after adjoining all (ed)^n-th roots of unity".to_string(),
        "the image of Galois is exactly the d^m translations given by the valuation".to_string(),
    ];
    Ok(OrbitReport {
        corr: corr.to_json(),
        prime: p,
        alpha0_valuation: format_rational(&v),
        levels: level,
        hypotheses: checklist,
        iso_certified,
        kummer_m,
        per_level,
        ends_orbits: ends.orbits,
        nearly_transitive: true,
        model_assumptions,
    })
}
