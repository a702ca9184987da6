use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::correspondence::Correspondence;
use crate::numeric::rational::Rational;

/// Exponent vector `k_0, k_1, …` with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial { exps }
    }

    /// Builds from `(index, exponent)` pairs; repeated indices add up.
    pub fn from_pairs(pairs: &[(usize, u32)]) -> Self {
        let len = pairs.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
        let mut exps = vec![0; len];
        for &(i, k) in pairs {
            exps[i] += k;
        }
        Self::from_exponents(exps)
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Self {
        Self::from_pairs(&[(i, 1)])
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Nonzero `(index, exponent)` pairs in increasing index order.
    pub fn pairs(&self) -> Vec<(usize, u32)> {
        self.exps.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect()
    }

    /// Highest index with a nonzero exponent.
    pub fn max_index(&self) -> Option<usize> {
        self.exps.len().checked_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&k| k as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.exps.len() >= other.exps.len() { (self, other) } else { (other, self) };
        let mut exps = long.exps.clone();
        for (i, k) in short.exps.iter().enumerate() {
            exps[i] += k;
        }
        Monomial { exps }
    }

    /// Every index raised by one.
    pub fn shifted(&self) -> Monomial {
        if self.exps.is_empty() {
            return self.clone();
        }
        let mut exps = Vec::with_capacity(self.exps.len() + 1);
        exps.push(0);
        exps.extend_from_slice(&self.exps);
        Monomial { exps }
    }

    /// Normal form: `k_i < e` for every `i ≥ 1`.
    pub fn is_normal(&self, e: usize) -> bool {
        self.exps.iter().skip(1).all(|&k| (k as usize) < e)
    }

    pub(crate) fn add_at(&mut self, i: usize, k: u32) {
        if k == 0 {
            return;
        }
        if self.exps.len() <= i {
            self.exps.resize(i + 1, 0);
        }
        self.exps[i] += k;
    }

    pub(crate) fn sub_at(&mut self, i: usize, k: u32) {
        self.exps[i] -= k;
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    /// Tie order among equal weights: compared from the highest index down, larger exponent first.
    pub(crate) fn tie_cmp(&self, other: &Monomial) -> Ordering {
        let n = self.exps.len().max(other.exps.len());
        for i in (0..n).rev() {
            match other.exponent(i).cmp(&self.exponent(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn render(&self, var: char) -> String {
        if self.exps.is_empty() {
            return "1".into();
        }
        self.pairs()
            .iter()
            .map(|&(i, k)| if k == 1 { format!("{var}{i}") } else { format!("{var}{i}^{k}") })
            .collect::<Vec<_>>()
            .join("·")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render('w'))
    }
}

/// `Σ k_i (d/e)^i`.
pub fn weight_for(m: &Monomial, e: usize, d: usize) -> Rational {
    let ratio = Rational::new(BigInt::from(d), BigInt::from(e));
    let mut acc = Rational::zero();
    let mut pw = Rational::from_integer(BigInt::from(1));
    for &k in &m.exps {
        acc += &pw * Rational::from_integer(BigInt::from(k));
        pw *= &ratio;
    }
    acc
}

pub fn weight(m: &Monomial, corr: &Correspondence) -> Rational {
    weight_for(m, corr.e(), corr.d())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    #[test]
    fn weights() {
        let c = Correspondence::from_ints(&[1, 1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!(weight(&Monomial::var(0), &c), int(1));
        assert_eq!(weight(&Monomial::var(2), &c), rat(9, 4));
        assert_eq!(weight(&Monomial::from_pairs(&[(0, 2), (1, 1)]), &c), rat(7, 2));
        assert_eq!(weight(&Monomial::one(), &c), int(0));
    }

    #[test]
    fn shape() {
        let m = Monomial::from_exponents(vec![2, 0, 1, 0, 0]);
        assert_eq!(m.exponents(), &[2, 0, 1]);
        assert_eq!(m.shifted().exponents(), &[0, 2, 0, 1]);
        assert!(m.is_normal(2) && !m.shifted().is_normal(2));
        assert_eq!(m.to_string(), "w0^2·w2");
        assert_eq!(m.tie_cmp(&Monomial::from_pairs(&[(0, 5)])), Ordering::Less);
    }
}
