use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use super::ring::{Key, RewriteOrder, SeriesRing, Terms, VariableKind, EXACT};
use crate::numeric::rational::{format_rational, parse_rational, Frac, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("constant term is {0}, not 1")]
    NotAUnitSeries(String),
    #[error("series belong to different rings")]
    RingMismatch,
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// Truncated series in normal form, known modulo monomials of weight above the truncation.
#[derive(Clone)]
pub struct WeightedSeries {
    ring: Arc<SeriesRing>,
    terms: Terms,
    trunc: i128,
}

impl PartialEq for WeightedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.trunc == other.trunc && self.terms == other.terms
    }
}

impl fmt::Debug for WeightedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeightedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.ring.kind() == VariableKind::Source { 'w' } else { 'z' };
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·{}", Frac(c), k.m.render(var))?;
        }
        match self.truncation() {
            Some(t) => write!(f, " + O(>{})", Frac(&t)),
            None => Ok(()),
        }
    }
}

fn min_trunc(a: i128, b: i128) -> i128 {
    a.min(b)
}

impl WeightedSeries {
    pub fn zero(ring: &Arc<SeriesRing>) -> Self {
        WeightedSeries { ring: ring.clone(), terms: Terms::new(), trunc: EXACT }
    }

    pub fn constant(ring: &Arc<SeriesRing>, c: Rational) -> Self {
        let mut s = Self::zero(ring);
        if !c.is_zero() {
            s.terms.insert(Key { w: 0, m: Monomial::one() }, c);
        }
        s
    }

    pub fn one(ring: &Arc<SeriesRing>) -> Self {
        Self::constant(ring, Rational::one())
    }

    /// The variable `w_i` (or `z_i`), reduced to normal form.
    pub fn var(ring: &Arc<SeriesRing>, i: usize) -> Self {
        Self::from_terms(ring, vec![(Monomial::var(i), Rational::one())])
    }

    /// Sum of arbitrary monomials, reduced to normal form; nothing above the ring cap is kept.
    pub fn from_terms(ring: &Arc<SeriesRing>, terms: Vec<(Monomial, Rational)>) -> Self {
        Self::from_terms_with(ring, terms, None, RewriteOrder::HighestFirst)
    }

    /// Like [`WeightedSeries::from_terms`] with an explicit truncation and rewriting order.
    pub fn from_terms_with(
        ring: &Arc<SeriesRing>,
        terms: Vec<(Monomial, Rational)>,
        trunc: Option<&Rational>,
        order: RewriteOrder,
    ) -> Self {
        let explicit = trunc.map(|t| ring.scale_down(t));
        let limit = explicit.unwrap_or(ring.cap_scaled());
        let mut work = Terms::new();
        let mut dropped = false;
        for (m, c) in terms {
            match ring.key(m) {
                Some(k) if k.w <= limit => {
                    let slot = work.entry(k).or_insert_with(Rational::zero);
                    *slot += c;
                }
                _ => dropped |= !c.is_zero(),
            }
        }
        let (terms, dropped_more) = ring.reduce(work, limit, order);
        let trunc = match explicit {
            Some(t) => t,
            None if dropped || dropped_more => limit,
            None => EXACT,
        };
        WeightedSeries { ring: ring.clone(), terms, trunc }
    }

    pub fn ring(&self) -> &Arc<SeriesRing> {
        &self.ring
    }

    pub fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring
    }

    fn check(&self, other: &Self) {
        assert!(self.same_ring(other), "{}", SeriesError::RingMismatch);
    }

    /// Truncation weight; `None` when the series is exact.
    pub fn truncation(&self) -> Option<Rational> {
        (self.trunc != EXACT).then(|| self.ring.unscale(self.trunc))
    }

    /// Truncation weight, with exact series reported at the ring cap.
    pub fn effective_truncation(&self) -> Rational {
        self.ring.unscale(self.trunc.min(self.ring.cap_scaled()))
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == EXACT
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term is stored (zero modulo the truncation).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in the canonical order: increasing weight, ties by descending exponents from the top index.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().map(|(k, c)| (&k.m, c))
    }

    pub fn terms_with_weight(&self) -> impl Iterator<Item = (&Monomial, Rational, &Rational)> {
        self.terms.iter().map(|(k, c)| (&k.m, self.ring.unscale(k.w), c))
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        match self.ring.key(m.clone()) {
            Some(k) => self.terms.get(&k).cloned().unwrap_or_else(Rational::zero),
            None => Rational::zero(),
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// Smallest weight of a stored term.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().next().map(|k| self.ring.unscale(k.w))
    }

    pub(crate) fn valuation_scaled(&self) -> i128 {
        self.terms.keys().next().map(|k| k.w).unwrap_or(EXACT)
    }

    /// Highest variable index appearing in any term.
    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().filter_map(|k| k.m.max_index()).max()
    }

    /// Drops terms above `t` and lowers the truncation to `t`.
    pub fn truncate(&self, t: &Rational) -> Self {
        self.truncate_scaled(self.ring.scale_down(t))
    }

    pub(crate) fn truncate_scaled(&self, t: i128) -> Self {
        if t >= self.trunc {
            return self.clone();
        }
        let terms = self.terms.iter().filter(|(k, _)| k.w <= t).map(|(k, c)| (k.clone(), c.clone())).collect();
        WeightedSeries { ring: self.ring.clone(), terms, trunc: t }
    }

    /// Removes terms above `t` but keeps the claimed truncation, giving a deliberately wrong approximation.
    pub fn drop_terms_above(&self, t: &Rational) -> Self {
        let t = self.ring.scale_down(t);
        let terms = self.terms.iter().filter(|(k, _)| k.w <= t).map(|(k, c)| (k.clone(), c.clone())).collect();
        WeightedSeries { ring: self.ring.clone(), terms, trunc: self.trunc }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let trunc = min_trunc(self.trunc, other.trunc);
        let mut terms: Terms = self.terms.iter().filter(|(k, _)| k.w <= trunc).map(|(k, c)| (k.clone(), c.clone())).collect();
        for (k, c) in other.terms.iter().filter(|(k, _)| k.w <= trunc) {
            let slot = terms.entry(k.clone()).or_insert_with(Rational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        WeightedSeries { ring: self.ring.clone(), terms, trunc }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect();
        WeightedSeries { ring: self.ring.clone(), terms, trunc: self.trunc }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return WeightedSeries { ring: self.ring.clone(), terms: Terms::new(), trunc: self.trunc };
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        WeightedSeries { ring: self.ring.clone(), terms, trunc: self.trunc }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_scaled(other, EXACT)
    }

    /// Product known modulo weight above `target`.
    pub fn mul_to(&self, other: &Self, target: &Rational) -> Self {
        self.mul_scaled(other, self.ring.scale_down(target))
    }

    /// The product's truncation is `min(T_a + v(b), T_b + v(a))`, also capped by the ring and `target`.
    pub(crate) fn mul_scaled(&self, other: &Self, target: i128) -> Self {
        self.check(other);
        let (va, vb) = (self.valuation_scaled(), other.valuation_scaled());
        let precise = min_trunc(self.trunc.saturating_add(vb), other.trunc.saturating_add(va));
        let limit = precise.min(target).min(self.ring.cap_scaled());
        if self.terms.is_empty() || other.terms.is_empty() {
            let trunc = if precise == EXACT { EXACT } else { limit };
            return WeightedSeries { ring: self.ring.clone(), terms: Terms::new(), trunc };
        }
        let mut work = Terms::new();
        let mut dropped = false;
        for (ka, ca) in &self.terms {
            if ka.w.saturating_add(vb) > limit {
                dropped = true;
                break;
            }
            for (kb, cb) in &other.terms {
                let w = ka.w + kb.w;
                if w > limit {
                    dropped = true;
                    break;
                }
                let slot = work.entry(Key { w, m: ka.m.mul(&kb.m) }).or_insert_with(Rational::zero);
                *slot += ca * cb;
            }
        }
        let (terms, dropped_more) = self.ring.reduce(work, limit, RewriteOrder::HighestFirst);
        let trunc = if precise == EXACT && !dropped && !dropped_more { EXACT } else { limit };
        WeightedSeries { ring: self.ring.clone(), terms, trunc }
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Every index raised by one (`w_i ↦ w_{i+1}`), then reduced; weights scale by `d/e`.
    pub fn shift_substitute(&self) -> Self {
        let ring = &self.ring;
        let (e, d) = (ring.e() as i128, ring.d() as i128);
        let cap = ring.cap_scaled();
        let shifted_trunc = if self.trunc == EXACT { EXACT } else { (self.trunc * d).div_euclid(e) };
        let limit = shifted_trunc.min(cap);
        let mut work = Terms::new();
        let mut dropped = false;
        for (k, c) in &self.terms {
            match ring.key(k.m.shifted()) {
                Some(key) if key.w <= limit => {
                    work.insert(key, c.clone());
                }
                _ => dropped = true,
            }
        }
        let (terms, dropped_more) = ring.reduce(work, limit, RewriteOrder::HighestFirst);
        let trunc = if shifted_trunc == EXACT && !dropped && !dropped_more { EXACT } else { limit };
        WeightedSeries { ring: ring.clone(), terms, trunc }
    }

    /// `k` applications of [`WeightedSeries::shift_substitute`].
    pub fn shift_by(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.shift_substitute())
    }

    /// `(1 + h)^r` by the binomial series.
    pub fn unit_pow(&self, r: &Rational) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(SeriesError::NotAUnitSeries(format_rational(&c0)));
        }
        let h = self.sub(&Self::one(&self.ring));
        let mut acc = Self::one(&self.ring);
        if h.is_zero() {
            acc.trunc = h.trunc;
            return Ok(acc);
        }
        let limit = self.trunc.min(self.ring.cap_scaled());
        let mut power = Self::one(&self.ring);
        let mut binom = Rational::one();
        let mut k = 0i64;
        loop {
            k += 1;
            binom = binom * (r - Rational::from_integer(BigInt::from(k - 1))) / Rational::from_integer(BigInt::from(k));
            power = power.mul_scaled(&h, limit);
            if binom.is_zero() {
                acc.trunc = acc.trunc.min(self.trunc);
                break;
            }
            acc = acc.add(&power.scale(&binom));
            if power.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Principal `n`-th root of a unit series.
    pub fn unit_root(&self, n: u64) -> Result<Self, SeriesError> {
        self.unit_pow(&Rational::new(BigInt::one(), BigInt::from(n)))
    }

    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        self.unit_pow(&Rational::from_integer(BigInt::from(-1)))
    }

    /// Re-reduces the stored terms with the given rewriting order.
    pub fn reduce_with(&self, order: RewriteOrder) -> Self {
        let work = self.terms.clone();
        let limit = self.trunc.min(self.ring.cap_scaled());
        let (terms, dropped) = self.ring.reduce(work, limit, order);
        let trunc = if self.trunc == EXACT && !dropped { EXACT } else { limit };
        WeightedSeries { ring: self.ring.clone(), terms, trunc }
    }

    /// Substitutes `inputs[i]` for the `i`-th variable.
    ///
    /// Each input must have valuation at least the weight of the variable it
    /// replaces; the result is then known modulo weight above the smallest of
    /// the truncations involved and the target ring's cap.
    pub fn compose(&self, inputs: &[WeightedSeries]) -> Self {
        let target = inputs.first().expect("at least one input").ring.clone();
        let needed = self.max_index().map_or(0, |i| i + 1);
        assert!(inputs.len() >= needed, "composition needs {needed} inputs");
        let mut limit = target.cap_scaled();
        if self.trunc != EXACT {
            limit = limit.min(target.scale_down(&self.ring.unscale(self.trunc)));
        }
        for s in inputs.iter().take(needed) {
            assert!(s.same_ring(&inputs[0]), "{}", SeriesError::RingMismatch);
            limit = limit.min(s.trunc);
        }
        let vals: Vec<i128> = inputs.iter().map(|s| s.valuation_scaled()).collect();
        let mut powers: Vec<Vec<WeightedSeries>> = inputs.iter().map(|_| vec![Self::one(&target)]).collect();
        let terms: Vec<(&Monomial, &Rational)> = self.terms().collect();
        let top = needed.saturating_sub(1);
        let mut out = horner(&target, &terms, top, limit, inputs, &vals, &mut powers);
        let all_exact = self.trunc == EXACT && inputs.iter().take(needed).all(|s| s.trunc == EXACT);
        if !(all_exact && out.trunc == EXACT) {
            out = out.truncate_scaled(limit);
            out.trunc = limit;
        }
        out
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            kind: match self.ring.kind() {
                VariableKind::Source => "source".into(),
                VariableKind::Target => "target".into(),
            },
            truncation_weight: self.truncation().map(|t| format_rational(&t)),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    exponents: k.m.pairs().into_iter().map(|(i, e)| [i as u64, e as u64]).collect(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }

    /// Rebuilds a series from JSON in the given ring.
    pub fn from_json(ring: &Arc<SeriesRing>, json: &SeriesJson) -> Result<Self, SeriesError> {
        let mut terms = Vec::new();
        for t in &json.terms {
            let pairs: Vec<(usize, u32)> = t.exponents.iter().map(|p| (p[0] as usize, p[1] as u32)).collect();
            let c = parse_rational(&t.coeff).map_err(|e| SeriesError::Malformed(e.to_string()))?;
            terms.push((Monomial::from_pairs(&pairs), c));
        }
        let trunc = match &json.truncation_weight {
            Some(t) => Some(parse_rational(t).map_err(|e| SeriesError::Malformed(e.to_string()))?),
            None => None,
        };
        Ok(Self::from_terms_with(ring, terms, trunc.as_ref(), RewriteOrder::HighestFirst))
    }
}

/// Horner evaluation grouped by the exponent of the variable `idx`.
fn horner(
    ring: &Arc<SeriesRing>,
    terms: &[(&Monomial, &Rational)],
    idx: usize,
    limit: i128,
    inputs: &[WeightedSeries],
    vals: &[i128],
    powers: &mut Vec<Vec<WeightedSeries>>,
) -> WeightedSeries {
    let mut groups: BTreeMap<u32, Vec<(&Monomial, &Rational)>> = BTreeMap::new();
    for &(m, c) in terms {
        groups.entry(m.exponent(idx)).or_default().push((m, c));
    }
    let mut acc = WeightedSeries::zero(ring);
    for (k, group) in groups {
        let need = vals[idx].saturating_mul(k as i128);
        if need > limit {
            acc.trunc = acc.trunc.min(limit);
            continue;
        }
        let inner = if idx == 0 {
            let c = group.iter().fold(Rational::zero(), |s, (_, c)| s + *c);
            WeightedSeries::constant(ring, c)
        } else {
            horner(ring, &group, idx - 1, limit - need, inputs, vals, powers)
        };
        if inner.is_zero() && inner.trunc == EXACT {
            continue;
        }
        while powers[idx].len() <= k as usize {
            let next = powers[idx].last().unwrap().mul_scaled(&inputs[idx], limit);
            powers[idx].push(next);
        }
        let term = inner.mul_scaled(&powers[idx][k as usize], limit);
        acc = acc.add(&term);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<[u64; 2]>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub kind: String,
    /// `None` for an exact series.
    pub truncation_weight: Option<String>,
    pub terms: Vec<TermJson>,
}
