use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::correspondence::Correspondence;
use super::monomial::Monomial;
use crate::numeric::rational::Rational;

/// Scaled truncation meaning "nothing dropped".
pub(crate) const EXACT: i128 = i128::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariableKind {
    /// `w_i = 1/x_i` subject to the correspondence relation.
    Source,
    /// `z_i` subject to `z_{i+1}^e = z_i^d`.
    Target,
}

/// Which reducible index to rewrite first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteOrder {
    HighestFirst,
    LowestFirst,
}

/// Monomial together with its scaled weight; ordered by weight, then by the tie order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Key {
    pub(crate) w: i128,
    pub(crate) m: Monomial,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.w.cmp(&other.w).then_with(|| self.m.tie_cmp(&other.m))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) type Terms = BTreeMap<Key, Rational>;

/// Truncated series ring attached to a correspondence, with a fixed maximal weight.
///
/// Weights are stored as integers scaled by `e^L`, where `L` is the largest
/// index whose variable weight `(d/e)^L` fits under the cap.
#[derive(Debug)]
pub struct SeriesRing {
    corr: Correspondence,
    kind: VariableKind,
    e: usize,
    d: usize,
    cap_rational: Rational,
    levels: usize,
    scale: i128,
    cap: i128,
    var_weight: Vec<i128>,
    g_rev: Vec<Rational>,
    f_inv: Vec<Rational>,
    f_trivial: bool,
}

impl PartialEq for SeriesRing {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.corr == other.corr && self.cap == other.cap && self.levels == other.levels
    }
}

/// Coefficients of `1/F` up to degree `n`, for `F` with constant term 1.
fn invert_unit_poly(f: &[Rational], n: usize) -> Vec<Rational> {
    let mut inv = vec![Rational::zero(); n + 1];
    inv[0] = Rational::from_integer(BigInt::from(1));
    for k in 1..=n {
        let mut acc = Rational::zero();
        for j in 1..=k.min(f.len() - 1) {
            if !f[j].is_zero() && !inv[k - j].is_zero() {
                acc -= &f[j] * &inv[k - j];
            }
        }
        inv[k] = acc;
    }
    inv
}

impl SeriesRing {
    /// Source ring of `corr` holding every weight up to `cap`.
    pub fn source(corr: &Correspondence, cap: &Rational) -> Arc<Self> {
        Arc::new(Self::build(corr.clone(), VariableKind::Source, cap))
    }

    /// Target ring of the pure power correspondence `y^e = x^d`.
    pub fn target(e: usize, d: usize, cap: &Rational) -> Arc<Self> {
        Arc::new(Self::build(Correspondence::power_maps(e, d), VariableKind::Target, cap))
    }

    /// Target ring with the degrees of `corr`.
    pub fn target_for(corr: &Correspondence, cap: &Rational) -> Arc<Self> {
        Self::target(corr.e(), corr.d(), cap)
    }

    fn build(corr: Correspondence, kind: VariableKind, cap: &Rational) -> Self {
        assert!(corr.is_polarized(), "series ring needs a polarized correspondence");
        assert!(*cap >= Rational::zero(), "negative weight cap");
        let (e, d) = (corr.e(), corr.d());
        let ratio = Rational::new(BigInt::from(d), BigInt::from(e));
        let mut levels = 0;
        let mut pw = ratio.clone();
        while pw <= *cap {
            levels += 1;
            pw *= &ratio;
        }
        let scale = (e as i128).checked_pow(levels as u32).expect("weight scale overflows");
        let var_weight: Vec<i128> = (0..=levels)
            .map(|i| {
                (d as i128).checked_pow(i as u32).unwrap() * (e as i128).checked_pow((levels - i) as u32).unwrap()
            })
            .collect();
        let scaled_cap = (cap * Rational::from_integer(BigInt::from(scale))).floor().to_integer();
        let cap_i = scaled_cap.to_i128().expect("cap fits");
        let max_deg = (cap.floor().to_integer()).to_usize().unwrap_or(0);
        let g_rev = corr.reversed_g();
        let f_rev = corr.reversed_f();
        let f_trivial = f_rev.iter().skip(1).all(Zero::is_zero);
        let f_inv = invert_unit_poly(&f_rev, max_deg);
        SeriesRing {
            corr,
            kind,
            e,
            d,
            cap_rational: cap.clone(),
            levels,
            scale,
            cap: cap_i,
            var_weight,
            g_rev,
            f_inv,
            f_trivial,
        }
    }

    pub fn correspondence(&self) -> &Correspondence {
        &self.corr
    }

    pub fn kind(&self) -> VariableKind {
        self.kind
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> &Rational {
        &self.cap_rational
    }

    /// Largest variable index that can occur below the cap.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub(crate) fn cap_scaled(&self) -> i128 {
        self.cap
    }

    pub(crate) fn var_weight(&self, i: usize) -> Option<i128> {
        self.var_weight.get(i).copied()
    }

    /// Scaled weight, or `None` if it exceeds the cap.
    pub(crate) fn scaled_weight(&self, m: &Monomial) -> Option<i128> {
        let mut w = 0i128;
        for (i, &k) in m.exponents().iter().enumerate() {
            if k == 0 {
                continue;
            }
            w += self.var_weight.get(i)? * k as i128;
            if w > self.cap {
                return None;
            }
        }
        Some(w)
    }

    pub(crate) fn key(&self, m: Monomial) -> Option<Key> {
        self.scaled_weight(&m).map(|w| Key { w, m })
    }

    /// Largest scaled weight not exceeding `x`.
    pub(crate) fn scale_down(&self, x: &Rational) -> i128 {
        let s = (x * Rational::from_integer(BigInt::from(self.scale))).floor().to_integer();
        s.to_i128().unwrap_or(if s.is_zero() { 0 } else { i128::MAX / 2 }).min(self.cap)
    }

    pub(crate) fn unscale(&self, w: i128) -> Rational {
        Rational::new(BigInt::from(w), BigInt::from(self.scale))
    }

    fn rewrite_index(&self, m: &Monomial, order: RewriteOrder) -> Option<usize> {
        let e = self.e as u32;
        let exps = m.exponents();
        let mut hits = (1..exps.len()).filter(|&i| exps[i] >= e);
        match order {
            RewriteOrder::LowestFirst => hits.next(),
            RewriteOrder::HighestFirst => hits.last(),
        }
    }

    /// Rewrites `work` to normal form, dropping everything above `limit`.
    ///
    /// Returns the normal-form terms and whether anything was dropped.
    pub(crate) fn reduce(&self, mut work: Terms, limit: i128, order: RewriteOrder) -> (Terms, bool) {
        let mut out = Terms::new();
        let mut dropped = false;
        let (e, d) = (self.e as u32, self.d as u32);
        let unit_trivial = self.kind == VariableKind::Target || (self.f_trivial && self.g_rev.iter().skip(1).all(Zero::is_zero));
        while let Some((key, c)) = work.pop_first() {
            if c.is_zero() {
                continue;
            }
            if key.w > limit {
                dropped = true;
                continue;
            }
            let Some(i) = self.rewrite_index(&key.m, order) else {
                let slot = out.entry(key).or_insert_with(Rational::zero);
                *slot += c;
                continue;
            };
            let mut base = key.m.clone();
            base.sub_at(i, e);
            base.add_at(i - 1, d);
            let base_w = key.w - self.var_weight[i] * e as i128 + self.var_weight[i - 1] * d as i128;
            if unit_trivial {
                let slot = work.entry(Key { w: base_w, m: base }).or_insert_with(Rational::zero);
                *slot += c;
                continue;
            }
            if !self.f_trivial {
                dropped = true;
            }
            for (a, ga) in self.g_rev.iter().enumerate() {
                if ga.is_zero() {
                    continue;
                }
                let wa = base_w + self.var_weight[i] * a as i128;
                if wa > limit {
                    dropped = true;
                    break;
                }
                let cga = &c * ga;
                for (b, fb) in self.f_inv.iter().enumerate() {
                    let w = wa + self.var_weight[i - 1] * b as i128;
                    if w > limit {
                        dropped = true;
                        break;
                    }
                    if fb.is_zero() {
                        continue;
                    }
                    let mut m = base.clone();
                    m.add_at(i, a as u32);
                    m.add_at(i - 1, b as u32);
                    let slot = work.entry(Key { w, m }).or_insert_with(Rational::zero);
                    *slot += &cga * fb;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        (out, dropped)
    }
}
