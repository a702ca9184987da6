//! Weighted formal series in the path coordinates `w_i`, reduced modulo the correspondence relation.

pub mod correspondence;
pub mod monomial;
pub mod ring;
pub mod weighted;

use std::sync::Arc;

pub use correspondence::{Correspondence, CorrespondenceError, CorrespondenceJson};
pub use monomial::{weight, weight_for, Monomial};
pub use ring::{RewriteOrder, SeriesRing, VariableKind};
pub use weighted::{SeriesError, SeriesJson, TermJson, WeightedSeries};

use crate::numeric::rational::Rational;

/// Re-reduces `s` to normal form; the identity on series already in normal form.
pub fn reduce_normal_form(s: &WeightedSeries) -> WeightedSeries {
    s.reduce_with(RewriteOrder::HighestFirst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

pub fn series_arith(a: &WeightedSeries, b: &WeightedSeries, op: SeriesOp) -> WeightedSeries {
    match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Mul => a.mul(b),
    }
}

pub fn shift_substitute(s: &WeightedSeries) -> WeightedSeries {
    s.shift_substitute()
}

pub fn unit_root_series(u: &WeightedSeries, n: u64) -> Result<WeightedSeries, SeriesError> {
    u.unit_root(n)
}

/// All normal-form monomials of weight at most `x`, in the canonical order.
pub fn normal_monomials(ring: &Arc<SeriesRing>, x: &Rational) -> Vec<Monomial> {
    let limit = ring.scale_down(x);
    let e = ring.e() as u32;
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Vec::<u32>::new(), 0i128)];
    while let Some((i, exps, w)) = stack.pop() {
        let Some(vw) = ring.var_weight(i) else {
            out.push(ring::Key { w, m: Monomial::from_exponents(exps) });
            continue;
        };
        let mut k = 0u32;
        while w + vw * k as i128 <= limit && (i == 0 || k < e) {
            let mut next = exps.clone();
            next.push(k);
            stack.push((i + 1, next, w + vw * k as i128));
            k += 1;
        }
    }
    out.sort();
    out.into_iter().map(|k| k.m).collect()
}
