//! The explicit isomorphism `G_{e,d} → G_{e,1}`, `w_i = Π_{j≤i} x_j^{a_{i,j}}`, for coprime `e, d`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest fiber size the label enumeration accepts.
pub const MAX_FIBER: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("gcd({e}, {d}) = {g} is not 1")]
    NotCoprime { e: u64, d: u64, g: u64 },
    #[error("fiber of size {0} is too large to enumerate")]
    FiberTooLarge(String),
    #[error("level {level} exceeds the {levels} levels of the table")]
    LevelOutOfRange { level: usize, levels: usize },
}

/// `s·d + e·t = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutPair {
    pub s: i64,
    pub t: i64,
}

impl BezoutPair {
    /// The solution with `s` in `(-e/2, e/2]`.
    pub fn canonical(e: u64, d: u64) -> Result<Self, IsoError> {
        let g = e.gcd(&d);
        if g != 1 {
            return Err(IsoError::NotCoprime { e, d, g });
        }
        let (e, d) = (e as i64, d as i64);
        let ext = d.extended_gcd(&e);
        let mut s = ext.x.rem_euclid(e);
        if 2 * s > e {
            s -= e;
        }
        let t = (1 - s * d) / e;
        Ok(BezoutPair { s, t })
    }

    /// `(s + e·c, t - d·c)`, another solution.
    pub fn shifted(&self, e: u64, d: u64, c: i64) -> Self {
        BezoutPair { s: self.s + e as i64 * c, t: self.t - d as i64 * c }
    }

    pub fn holds(&self, e: u64, d: u64) -> bool {
        self.s * d as i64 + e as i64 * self.t == 1
    }
}

/// Tables `a_{i,j}` and `b_{i,j}` for `0 ≤ j ≤ i ≤ levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub e: u64,
    pub d: u64,
    pub levels: usize,
    pub bezout: BezoutPair,
    pub a: Vec<Vec<BigInt>>,
    pub b: Vec<Vec<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMatrixJson {
    pub e: u64,
    pub d: u64,
    pub levels: usize,
    pub bezout: BezoutPair,
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
}

/// Builds the tables row by row: `b_{I,0} = 0`, `X = a_{I-1,j} + e·b_{I,j}`, `b_{I,j+1} = sX`, `a_{I,j} = tX`, `a_{I,I} = b_{I,I}`.
pub fn ab_recursion(e: u64, d: u64, levels: usize, bezout: &BezoutPair) -> Result<ExponentMatrix, IsoError> {
    let g = e.gcd(&d);
    if g != 1 {
        return Err(IsoError::NotCoprime { e, d, g });
    }
    assert!(bezout.holds(e, d), "not a Bézout pair for ({e}, {d})");
    let (s, t, eb) = (BigInt::from(bezout.s), BigInt::from(bezout.t), BigInt::from(e));
    let mut a = vec![vec![BigInt::one()]];
    let mut b = vec![vec![BigInt::zero()]];
    for i in 1..=levels {
        let mut arow = vec![BigInt::zero(); i + 1];
        let mut brow = vec![BigInt::zero(); i + 1];
        for j in 0..i {
            let x = &a[i - 1][j] + &eb * &brow[j];
            brow[j + 1] = &s * &x;
            arow[j] = &t * &x;
        }
        arow[i] = brow[i].clone();
        a.push(arow);
        b.push(brow);
    }
    Ok(ExponentMatrix { e, d, levels, bezout: bezout.clone(), a, b })
}

/// [`ab_recursion`] with the canonical Bézout pair.
pub fn exponent_matrix(e: u64, d: u64, levels: usize) -> Result<ExponentMatrix, IsoError> {
    ab_recursion(e, d, levels, &BezoutPair::canonical(e, d)?)
}

impl ExponentMatrix {
    /// Cells `(I, j)` where `b_{I,j+1} d + a_{I,j} e = a_{I-1,j} + e b_{I,j}` fails.
    pub fn recursion_failures(&self) -> Vec<(usize, usize)> {
        let (e, d) = (BigInt::from(self.e), BigInt::from(self.d));
        let mut bad = Vec::new();
        for i in 1..=self.levels {
            for j in 0..i {
                let lhs = &self.b[i][j + 1] * &d + &self.a[i][j] * &e;
                let rhs = &self.a[i - 1][j] + &e * &self.b[i][j];
                if lhs != rhs {
                    bad.push((i, j));
                }
            }
            if !self.b[i][0].is_zero() || self.a[i][i] != self.b[i][i] {
                bad.push((i, i));
            }
        }
        if !self.a[0][0].is_one() || !self.b[0][0].is_zero() {
            bad.push((0, 0));
        }
        bad
    }

    /// Exponent vector of `w_n` in the `x_j`.
    pub fn w_exponents(&self, n: usize) -> TorusMonomial {
        TorusMonomial::new(self.a[n].clone())
    }

    pub fn to_json(&self) -> ExponentMatrixJson {
        let render = |t: &Vec<Vec<BigInt>>| t.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        ExponentMatrixJson {
            e: self.e,
            d: self.d,
            levels: self.levels,
            bezout: self.bezout.clone(),
            a: render(&self.a),
            b: render(&self.b),
        }
    }

    /// Rows `table,i,j,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,i,j,value\n");
        for (name, table) in [("a", &self.a), ("b", &self.b)] {
            for (i, row) in table.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    writeln!(out, "{name},{i},{j},{c}").unwrap();
                }
            }
        }
        out
    }
}

/// `Π x_i^{k_i}` in the coordinate ring of `G_{e,d}`, where `x_{i+1}^e = x_i^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusMonomial {
    exps: Vec<BigInt>,
}

impl TorusMonomial {
    pub fn new(mut exps: Vec<BigInt>) -> Self {
        while exps.last().is_some_and(|c| c.is_zero()) {
            exps.pop();
        }
        TorusMonomial { exps }
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.exps.len().max(other.exps.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        TorusMonomial::new((0..n).map(|i| get(&self.exps, i) + get(&other.exps, i)).collect())
    }

    pub fn pow(&self, k: i64) -> Self {
        TorusMonomial::new(self.exps.iter().map(|c| c * k).collect())
    }

    /// Exponents of `x_i`, `i ≥ 1`, moved into `[0, e)` by trading `x_i^{qe}` for `x_{i-1}^{qd}`, top index first.
    pub fn normal_form(&self, e: u64, d: u64) -> Self {
        let (eb, db) = (BigInt::from(e), BigInt::from(d));
        let mut exps = self.exps.clone();
        for i in (1..exps.len()).rev() {
            let (q, r) = exps[i].div_mod_floor(&eb);
            exps[i] = r;
            exps[i - 1] += q * &db;
        }
        TorusMonomial::new(exps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub e: u64,
    pub d: u64,
    pub levels: usize,
    /// Levels `n` where `w_n^e / w_{n-1}` does not reduce to 1.
    pub failures: Vec<usize>,
    pub recursion_failures: Vec<(usize, usize)>,
    pub passed: bool,
}

/// `w_n^e / w_{n-1} = 1` in normal form for `1 ≤ n ≤ levels`.
pub fn verify_cocycle_identity(m: &ExponentMatrix) -> CocycleReport {
    let failures: Vec<usize> = (1..=m.levels)
        .filter(|&n| {
            let q = m.w_exponents(n).pow(m.e as i64).mul(&m.w_exponents(n - 1).pow(-1));
            !q.normal_form(m.e, m.d).is_one()
        })
        .collect();
    let recursion_failures = m.recursion_failures();
    let passed = failures.is_empty() && recursion_failures.is_empty();
    CocycleReport { e: m.e, d: m.d, levels: m.levels, failures, recursion_failures, passed }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub e: u64,
    pub levels: usize,
    /// `a_{n,n} mod e` for each `n`.
    pub diagonal_residues: Vec<u64>,
    /// Levels where `gcd(a_{n,n}, e) ≠ 1`.
    pub gcd_failures: Vec<usize>,
    /// Levels `n ≥ 1` where `a_{n,n} ≢ s^n (mod e)`.
    pub congruence_failures: Vec<usize>,
    pub passed: bool,
}

/// `gcd(a_{n,n}, e) = 1` for all `n`, together with `a_{n,n} ≡ s^n (mod e)`.
pub fn kernel_triviality_cert(m: &ExponentMatrix) -> KernelReport {
    let e = BigInt::from(m.e);
    let s = BigInt::from(m.bezout.s);
    let mut diagonal_residues = Vec::new();
    let mut gcd_failures = Vec::new();
    let mut congruence_failures = Vec::new();
    let mut s_pow = BigInt::one();
    for n in 0..=m.levels {
        let diag = &m.a[n][n];
        diagonal_residues.push(diag.mod_floor(&e).to_u64().unwrap());
        if !diag.gcd(&e).is_one() {
            gcd_failures.push(n);
        }
        if n >= 1 {
            s_pow *= &s;
            if !(diag - &s_pow).mod_floor(&e).is_zero() {
                congruence_failures.push(n);
            }
        }
    }
    let passed = gcd_failures.is_empty() && congruence_failures.is_empty();
    KernelReport { e: m.e, levels: m.levels, diagonal_residues, gcd_failures, congruence_failures, passed }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    pub e: u64,
    pub d: u64,
    pub level: usize,
    pub fiber_size: usize,
    pub image_size: usize,
    pub image_in_target: bool,
    pub passed: bool,
}

/// Points `(1, x_1, …, x_k)` with `x_{i+1}^e = x_i^{d}`, as exponents `l_i` of a primitive `e^k`-th root of unity.
fn fiber_labels(e: u64, d: u64, k: usize) -> Vec<Vec<u64>> {
    let modulus = e.pow(k as u32);
    let step = if k == 0 { 1 } else { modulus / e };
    let mut out = Vec::new();
    let mut stack = vec![vec![0u64]];
    while let Some(path) = stack.pop() {
        if path.len() == k + 1 {
            out.push(path);
            continue;
        }
        let r = (d as u128 * *path.last().unwrap() as u128 % modulus as u128) as u64;
        if r % e != 0 {
            continue;
        }
        for c in 0..e {
            let mut next = path.clone();
            next.push((r / e + c * step) % modulus);
            stack.push(next);
        }
    }
    out.sort();
    out
}

/// At tree level `k`, checks that `φ` maps the fiber of `G_{e,d}` over `x_0 = 1` bijectively onto that of `G_{e,1}`.
pub fn finite_level_bijection_check(m: &ExponentMatrix, k: usize) -> Result<BijectionReport, IsoError> {
    let size = (m.e as u128).checked_pow(k as u32).filter(|&s| s <= MAX_FIBER as u128);
    let Some(_) = size else {
        return Err(IsoError::FiberTooLarge(format!("{}^{k}", m.e)));
    };
    if k > m.levels {
        return Err(IsoError::LevelOutOfRange { level: k, levels: m.levels });
    }
    let modulus = BigInt::from(m.e.pow(k as u32));
    let source = fiber_labels(m.e, m.d, k);
    let target: BTreeSet<Vec<u64>> = fiber_labels(m.e, 1, k).into_iter().collect();
    let image: BTreeSet<Vec<u64>> = source
        .iter()
        .map(|l| {
            (0..=k)
                .map(|i| {
                    let sum: BigInt = (0..=i).map(|j| &m.a[i][j] * BigInt::from(l[j])).sum();
                    sum.mod_floor(&modulus).to_u64().unwrap()
                })
                .collect()
        })
        .collect();
    let image_in_target = image.is_subset(&target);
    let passed = image_in_target && image.len() == source.len() && image.len() == target.len();
    Ok(BijectionReport {
        e: m.e,
        d: m.d,
        level: k,
        fiber_size: source.len(),
        image_size: image.len(),
        image_in_target,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_pairs() {
        assert_eq!(BezoutPair::canonical(2, 3).unwrap(), BezoutPair { s: 1, t: -1 });
        assert_eq!(BezoutPair::canonical(1, 5).unwrap(), BezoutPair { s: 0, t: 1 });
        assert_eq!(BezoutPair::canonical(3, 4).unwrap(), BezoutPair { s: 1, t: -1 });
        assert_eq!(BezoutPair::canonical(5, 7).unwrap(), BezoutPair { s: -2, t: 3 });
        assert!(matches!(BezoutPair::canonical(2, 4), Err(IsoError::NotCoprime { g: 2, .. })));
    }

    #[test]
    fn first_rows() {
        let m = exponent_matrix(2, 3, 2).unwrap();
        assert_eq!(m.a[1], vec![BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(m.b[1], vec![BigInt::from(0), BigInt::from(1)]);
    }

    #[test]
    fn normal_form_trades_downward() {
        let m = TorusMonomial::new(vec![BigInt::from(-3), BigInt::from(2)]);
        assert!(m.normal_form(2, 3).is_one());
        let n = TorusMonomial::new(vec![BigInt::from(0), BigInt::from(-1)]).normal_form(2, 3);
        assert_eq!(n.exponents(), &[BigInt::from(-3), BigInt::from(1)]);
    }
}
