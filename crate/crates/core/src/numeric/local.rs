//! Capped-precision elements of the totally ramified tower `Q_p(p^{1/E})`.
//!
//! An element is stored as `π^shift · (c_0 + c_1 π + … + c_{E-1} π^{E-1})`
//! with `π^E = p`, integer coefficients, `c_0` a unit, and an absolute
//! precision `abs_prec` in π-adic units: the value is known modulo
//! `π^abs_prec`. Coefficient `c_i` is kept reduced modulo `p^{m_i}` with
//! `m_i = ceil((abs_prec - shift - i) / E)`, which makes the representation
//! canonical. The relative precision is capped at `cap · E` π-adic digits
//! (`cap` base-p digits).
//!
//! Elements built from rationals carry the rational as an exact shadow; ops
//! between two exact elements stay exact, so `1/5 + 4/5` is exactly 1.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::{int_valuation, rational_valuation, Frac, Rational};

/// Stand-in for infinite precision; only exact zero uses it.
pub const INFINITE_PRECISION: i64 = i64::MAX / 4;

/// Default relative precision cap, in base-p digits.
pub const DEFAULT_PRECISION: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no root in field: {0}")]
    NoRootInField(String),
    #[error("Hensel lifting fails: {0}")]
    HenselFails(String),
    #[error("incompatible operands: {0}")]
    Incompatible(String),
}

/// Valuation in units where `v(p) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Finite(Rational),
    /// Indistinguishable from zero: only a lower bound is known.
    AtLeast(Rational),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn certified(self) -> Result<Rational, PadicError> {
        match self {
            Valuation::Finite(v) => Ok(v),
            Valuation::AtLeast(v) => Err(PadicError::PrecisionExhausted(format!(
                "indistinguishable from zero at precision {}",
                Frac(&v)
            ))),
            Valuation::Infinite => Err(PadicError::PrecisionExhausted("exact zero".into())),
        }
    }

    /// Certified lower bound; `None` for exact zero.
    pub fn lower_bound(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Element of `Q_p(π)`, `π^E = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalElem {
    prime: u64,
    ram: u64,
    cap: u32,
    shift: i64,
    unit: Vec<BigInt>,
    abs_prec: i64,
    exact: Option<Rational>,
}

/// Base-field element; the tower at ramification index 1.
pub type PadicScalar = LocalElem;

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) != 0 {
        q + 1
    } else {
        q
    }
}

pub(crate) fn p_pow(p: u64, m: i64) -> BigInt {
    debug_assert!(m >= 0);
    BigInt::from(p).pow(m as u32)
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `a·b` in `Z[π]/(π^E - p)`, reduced modulo `modulus`.
fn poly_mul(a: &[BigInt], b: &[BigInt], p: u64, modulus: &BigInt) -> Vec<BigInt> {
    let e = a.len();
    let mut lo = vec![BigInt::zero(); e];
    let mut hi = vec![BigInt::zero(); e];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let k = i + j;
            if k < e {
                lo[k] += ai * bj;
            } else {
                hi[k - e] += ai * bj;
            }
        }
    }
    let p = BigInt::from(p);
    lo.into_iter()
        .zip(hi)
        .map(|(l, h)| (l + h * &p).mod_floor(modulus))
        .collect()
}

impl LocalElem {
    pub fn zero(prime: u64, ram: u64, cap: u32) -> Self {
        LocalElem {
            prime,
            ram,
            cap,
            shift: INFINITE_PRECISION,
            unit: vec![BigInt::zero(); ram as usize],
            abs_prec: INFINITE_PRECISION,
            exact: Some(Rational::zero()),
        }
    }

    /// Exact embedding of a rational.
    pub fn from_rational(r: &Rational, prime: u64, ram: u64, cap: u32) -> Self {
        assert!(cap >= 1 && ram >= 1, "precision and ramification must be positive");
        let Some(v) = rational_valuation(r, prime) else {
            return Self::zero(prime, ram, cap);
        };
        let modulus = p_pow(prime, cap as i64);
        let scaled = r / Rational::from_integer(BigInt::from(prime)).pow(v as i32);
        let den_inv = scaled
            .denom()
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator is a unit");
        let u = (scaled.numer() * den_inv).mod_floor(&modulus);
        let e = ram as i64;
        let mut unit = vec![BigInt::zero(); ram as usize];
        unit[0] = u;
        let shift = v * e;
        LocalElem {
            prime,
            ram,
            cap,
            shift,
            unit,
            abs_prec: shift + cap as i64 * e,
            exact: Some(r.clone()),
        }
    }

    pub fn from_int(n: i64, prime: u64, ram: u64, cap: u32) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)), prime, ram, cap)
    }

    /// `r + O(p^abs_digits)`, an inexact element.
    pub fn from_rational_with_precision(
        r: &Rational,
        prime: u64,
        ram: u64,
        abs_digits: i64,
        cap: u32,
    ) -> Self {
        Self::from_rational(r, prime, ram, cap)
            .inexact()
            .with_abs_prec(abs_digits * ram as i64)
    }

    /// The uniformizer `π = p^{1/E}`.
    pub fn uniformizer(prime: u64, ram: u64, cap: u32) -> Self {
        let mut one = vec![BigInt::zero(); ram as usize];
        one[0] = BigInt::one();
        Self::normalize(prime, ram, cap, one, 1, 1 + cap as i64 * ram as i64)
    }

    /// Builds the canonical element `π^base_shift · Σ raw_i π^i + O(π^abs_prec)`.
    fn normalize(prime: u64, ram: u64, cap: u32, mut raw: Vec<BigInt>, base_shift: i64, abs_prec: i64) -> Self {
        let e = ram as i64;
        debug_assert_eq!(raw.len(), ram as usize);
        for (i, c) in raw.iter_mut().enumerate() {
            let m = ceil_div(abs_prec - base_shift - i as i64, e);
            if m <= 0 {
                c.set_zero();
            } else if !c.is_zero() {
                *c = c.mod_floor(&p_pow(prime, m));
            }
        }
        let t = raw
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| e * int_valuation(c, prime) as i64 + i as i64)
            .min();
        let Some(t) = t else {
            return LocalElem {
                prime,
                ram,
                cap,
                shift: abs_prec,
                unit: vec![BigInt::zero(); ram as usize],
                abs_prec,
                exact: None,
            };
        };
        let q = t.div_euclid(e);
        let r = t.rem_euclid(e) as usize;
        let mut unit = vec![BigInt::zero(); ram as usize];
        for (i, c) in raw.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i >= r {
                unit[i - r] = c / p_pow(prime, q);
            } else {
                unit[i + ram as usize - r] = c / p_pow(prime, q + 1);
            }
        }
        let shift = base_shift + t;
        let abs = abs_prec.min(shift + cap as i64 * e);
        for (j, c) in unit.iter_mut().enumerate() {
            let m = ceil_div(abs - shift - j as i64, e);
            if m <= 0 {
                c.set_zero();
            } else {
                *c = c.mod_floor(&p_pow(prime, m));
            }
        }
        LocalElem { prime, ram, cap, shift, unit, abs_prec: abs, exact: None }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Ramification index `E` of the field this element lives in.
    pub fn ramification(&self) -> u64 {
        self.ram
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// `k` with `E = e^k`, if `E` is a power of `e`.
    pub fn tower_level(&self, e: u64) -> Option<u32> {
        if e <= 1 {
            return (self.ram == 1).then_some(0);
        }
        let mut k = 0;
        let mut acc = 1u64;
        while acc < self.ram {
            acc = acc.checked_mul(e)?;
            k += 1;
        }
        (acc == self.ram).then_some(k)
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(|r| r.is_zero())
    }

    /// Exact zero, or no nonzero digit known at the current precision.
    pub fn is_zero(&self) -> bool {
        self.is_exact_zero() || self.unit.iter().all(|c| c.is_zero())
    }

    /// Absolute precision in π-adic units (`INFINITE_PRECISION` for exact zero).
    pub fn abs_prec_pi(&self) -> i64 {
        self.abs_prec
    }

    /// Absolute precision as a valuation (units of `v(p) = 1`).
    pub fn abs_precision(&self) -> Option<Rational> {
        (self.abs_prec < INFINITE_PRECISION).then(|| Rational::new(self.abs_prec.into(), (self.ram as i64).into()))
    }

    /// Valuation lower bound in π-adic units.
    pub fn val_pi(&self) -> i64 {
        self.shift
    }

    pub fn valuation(&self) -> Valuation {
        let e = BigInt::from(self.ram);
        if self.is_exact_zero() {
            Valuation::Infinite
        } else if self.is_zero() {
            Valuation::AtLeast(Rational::new(self.abs_prec.into(), e))
        } else {
            Valuation::Finite(Rational::new(self.shift.into(), e))
        }
    }

    /// Residue of the unit part in `F_p`.
    pub fn residue(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        self.unit[0].mod_floor(&BigInt::from(self.prime)).to_u64()
    }

    /// π-adic digits of the unit part, least significant first, over the known relative precision.
    pub fn unit_digits(&self) -> Vec<u64> {
        if self.is_zero() {
            return Vec::new();
        }
        let rel = self.abs_prec - self.shift;
        let e = self.ram as usize;
        let p = BigInt::from(self.prime);
        let mut digits = vec![0u64; rel.max(0) as usize];
        for (i, c) in self.unit.iter().enumerate() {
            let mut m = c.clone();
            let mut pos = i;
            while !m.is_zero() && pos < digits.len() {
                let (q, r) = m.div_rem(&p);
                digits[pos] = r.to_u64().unwrap_or(0);
                m = q;
                pos += e;
            }
        }
        digits
    }

    /// Coefficients `c_i` of the unit part in the basis `1, π, …, π^{E-1}`.
    pub fn unit_coefficients(&self) -> &[BigInt] {
        &self.unit
    }

    /// Forgets the exact shadow, keeping the stored digits.
    pub fn inexact(&self) -> Self {
        let mut out = self.clone();
        if out.is_exact_zero() {
            out.shift = out.cap as i64 * out.ram as i64;
            out.abs_prec = out.shift;
        }
        out.exact = None;
        out
    }

    /// Lowers the absolute precision to at most `abs_pi` π-adic units.
    pub fn with_abs_prec(&self, abs_pi: i64) -> Self {
        if abs_pi >= self.abs_prec {
            return self.clone();
        }
        if self.is_zero() || self.shift >= abs_pi {
            let inexact_zero = LocalElem::normalize(
                self.prime,
                self.ram,
                self.cap,
                vec![BigInt::zero(); self.ram as usize],
                abs_pi,
                abs_pi,
            );
            return inexact_zero;
        }
        LocalElem::normalize(self.prime, self.ram, self.cap, self.unit.clone(), self.shift, abs_pi)
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        match &self.exact {
            Some(r) => LocalElem::from_rational(r, self.prime, self.ram, cap),
            None if self.is_zero() => {
                let mut out = self.clone();
                out.cap = cap;
                out
            }
            None => {
                let abs = self.abs_prec.min(self.shift + cap as i64 * self.ram as i64);
                LocalElem::normalize(self.prime, self.ram, cap, self.unit.clone(), self.shift, abs)
            }
        }
    }

    /// Embeds into `Q_p(p^{1/ram2})`; `ram2` must be a multiple of the current index.
    pub fn embed(&self, ram2: u64) -> Result<Self, PadicError> {
        if ram2 == self.ram {
            return Ok(self.clone());
        }
        if ram2 % self.ram != 0 {
            return Err(PadicError::Incompatible(format!(
                "cannot embed ramification {} into {}",
                self.ram, ram2
            )));
        }
        if let Some(r) = &self.exact {
            return Ok(LocalElem::from_rational(r, self.prime, ram2, self.cap));
        }
        let f = (ram2 / self.ram) as i64;
        let mut raw = vec![BigInt::zero(); ram2 as usize];
        for (i, c) in self.unit.iter().enumerate() {
            raw[i * f as usize] = c.clone();
        }
        Ok(LocalElem::normalize(self.prime, ram2, self.cap, raw, self.shift * f, self.abs_prec * f))
    }

    fn align(&self, other: &Self) -> Result<(Self, Self, u32), PadicError> {
        if self.prime != other.prime {
            return Err(PadicError::Incompatible(format!(
                "primes {} and {}",
                self.prime, other.prime
            )));
        }
        let l = self.ram / gcd(self.ram, other.ram) * other.ram;
        Ok((self.embed(l)?, other.embed(l)?, self.cap.min(other.cap)))
    }

    /// Multiplies a unit vector by `π^k`, adding into `acc`; terms at or beyond `limit` (relative) are skipped.
    fn add_shifted(acc: &mut [BigInt], unit: &[BigInt], k: i64, p: u64) {
        let e = unit.len() as i64;
        let q = k.div_euclid(e);
        let r = k.rem_euclid(e) as usize;
        let pq = p_pow(p, q);
        let pq1 = &pq * BigInt::from(p);
        for (i, c) in unit.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = i + r;
            if j < unit.len() {
                acc[j] += c * &pq;
            } else {
                acc[j - unit.len()] += c * &pq1;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        let (a, b, cap) = self.align(other)?;
        if a.is_exact_zero() {
            return Ok(b.with_cap(cap));
        }
        if b.is_exact_zero() {
            return Ok(a.with_cap(cap));
        }
        if let (Some(x), Some(y)) = (&a.exact, &b.exact) {
            return Ok(LocalElem::from_rational(&(x + y), a.prime, a.ram, cap));
        }
        let s = a.shift.min(b.shift);
        let abs = a.abs_prec.min(b.abs_prec);
        let mut raw = vec![BigInt::zero(); a.ram as usize];
        for x in [&a, &b] {
            if x.shift < abs && !x.is_zero() {
                Self::add_shifted(&mut raw, &x.unit, x.shift - s, a.prime);
            }
        }
        Ok(LocalElem::normalize(a.prime, a.ram, cap, raw, s, abs))
    }

    pub fn neg(&self) -> Self {
        if let Some(r) = &self.exact {
            return LocalElem::from_rational(&-r, self.prime, self.ram, self.cap);
        }
        if self.is_zero() {
            return self.clone();
        }
        let raw = self.unit.iter().map(|c| -c).collect();
        LocalElem::normalize(self.prime, self.ram, self.cap, raw, self.shift, self.abs_prec)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        let (a, b, cap) = self.align(other)?;
        if a.is_exact_zero() || b.is_exact_zero() {
            return Ok(LocalElem::zero(a.prime, a.ram, cap));
        }
        if let (Some(x), Some(y)) = (&a.exact, &b.exact) {
            return Ok(LocalElem::from_rational(&(x * y), a.prime, a.ram, cap));
        }
        let abs = (a.abs_prec + b.shift).min(b.abs_prec + a.shift);
        let base = a.shift + b.shift;
        if a.is_zero() || b.is_zero() {
            return Ok(LocalElem::normalize(a.prime, a.ram, cap, vec![BigInt::zero(); a.ram as usize], abs, abs));
        }
        let digits = ceil_div(abs - base, a.ram as i64).max(1);
        let modulus = p_pow(a.prime, digits);
        let raw = poly_mul(&a.unit, &b.unit, a.prime, &modulus);
        Ok(LocalElem::normalize(a.prime, a.ram, cap, raw, base, abs))
    }

    pub fn mul_rational(&self, r: &Rational) -> Result<Self, PadicError> {
        self.mul(&LocalElem::from_rational(r, self.prime, self.ram, self.cap))
    }

    /// Multiplicative inverse of the unit part, correct modulo `π^rel`.
    fn unit_inverse(&self, rel: i64) -> Vec<BigInt> {
        let e = self.ram as i64;
        let modulus = p_pow(self.prime, ceil_div(rel, e).max(1) + 1);
        let pm = BigInt::from(self.prime);
        let c0 = self.unit[0].mod_floor(&pm);
        let mut z = vec![BigInt::zero(); self.ram as usize];
        z[0] = c0.modinv(&pm).expect("normalized unit");
        let mut two = vec![BigInt::zero(); self.ram as usize];
        two[0] = BigInt::from(2);
        let mut known = 1;
        while known < rel {
            let yz = poly_mul(&self.unit, &z, self.prime, &modulus);
            let corr: Vec<BigInt> = two.iter().zip(&yz).map(|(t, v)| t - v).collect();
            z = poly_mul(&z, &corr, self.prime, &modulus);
            known *= 2;
        }
        z
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        if let Some(r) = &self.exact {
            return Ok(LocalElem::from_rational(&r.recip(), self.prime, self.ram, self.cap));
        }
        let rel = self.abs_prec - self.shift;
        let z = self.unit_inverse(rel);
        Ok(LocalElem::normalize(self.prime, self.ram, self.cap, z, -self.shift, -self.shift + rel))
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self, PadicError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut acc = LocalElem::from_int(1, self.prime, self.ram, self.cap);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Divides by `π^k` exactly (shifts the valuation).
    pub fn shift_by_pi(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        let mut out = self.clone();
        if out.exact.is_some() && k.rem_euclid(self.ram as i64) == 0 {
            let q = k / self.ram as i64;
            let factor = Rational::from_integer(BigInt::from(self.prime)).pow(q as i32);
            return LocalElem::from_rational(&(self.exact.as_ref().unwrap() * factor), self.prime, self.ram, self.cap);
        }
        out.exact = None;
        out.shift += k;
        out.abs_prec += k;
        out
    }

    /// True when `self - other` has no nonzero digit at the common precision.
    pub fn congruent(&self, other: &Self) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Integer representative of a base-field element that is p-integral, modulo its precision.
    pub fn to_integer_mod(&self) -> Option<(BigInt, i64)> {
        if self.ram != 1 || self.is_zero() || self.shift < 0 {
            return None;
        }
        let value = &self.unit[0] * p_pow(self.prime, self.shift);
        Some((value, self.abs_prec))
    }
}

impl fmt::Display for LocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        let piname = if self.ram == 1 { format!("{}", self.prime) } else { format!("π{}", self.ram) };
        if self.is_zero() {
            return write!(f, "O({}^{})", piname, self.abs_prec);
        }
        write!(f, "{}^{} · (", piname, self.shift)?;
        let mut first = true;
        for (i, c) in self.unit.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·π^{i}")?;
            }
        }
        write!(f, ") + O({}^{})", piname, self.abs_prec)
    }
}

/// Arithmetic selector for [`padic_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary arithmetic that refuses results whose valuation cannot be certified.
pub fn padic_arith(a: &LocalElem, b: &LocalElem, op: ArithOp) -> Result<LocalElem, PadicError> {
    let out = match op {
        ArithOp::Add => a.add(b)?,
        ArithOp::Sub => a.sub(b)?,
        ArithOp::Mul => a.mul(b)?,
        ArithOp::Div => a.div(b)?,
    };
    if out.is_zero() && !out.is_exact_zero() {
        return Err(PadicError::PrecisionExhausted(format!(
            "result is O(π^{}) with no certified digit",
            out.abs_prec
        )));
    }
    Ok(out)
}

/// Horner evaluation of `Σ coeffs[j] x^j`.
pub fn eval_rational_poly(coeffs: &[Rational], x: &LocalElem) -> Result<LocalElem, PadicError> {
    let mut acc = LocalElem::zero(x.prime(), x.ramification(), x.cap());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?.add(&LocalElem::from_rational(c, x.prime(), x.ramification(), x.cap()))?;
    }
    Ok(acc)
}

/// Horner evaluation with local-field coefficients.
pub fn eval_poly(coeffs: &[LocalElem], x: &LocalElem) -> Result<LocalElem, PadicError> {
    let mut acc = LocalElem::zero(x.prime(), x.ramification(), x.cap());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    fn q5(r: Rational) -> LocalElem {
        LocalElem::from_rational(&r, 5, 1, 10)
    }

    #[test]
    fn exact_rational_sum_keeps_full_precision() {
        let s = padic_arith(&q5(rat(1, 5)), &q5(rat(4, 5)), ArithOp::Add).unwrap();
        assert_eq!(s.exact_value(), Some(&int(1)));
        assert_eq!(s.valuation(), Valuation::Finite(int(0)));
        assert_eq!(s.abs_precision(), Some(int(10)));
    }

    #[test]
    fn uniformizer_squared_is_p() {
        let pi = LocalElem::uniformizer(5, 2, 8);
        let sq = pi.mul(&pi).unwrap();
        assert_eq!(sq.valuation(), Valuation::Finite(int(1)));
        assert_eq!(sq.residue(), Some(1));
        assert!(sq.congruent(&LocalElem::from_int(5, 5, 2, 8)));
    }

    #[test]
    fn capped_product_digits() {
        let a = LocalElem::from_rational_with_precision(&int(7), 5, 1, 6, 40);
        let b = LocalElem::from_rational_with_precision(&int(3), 5, 1, 6, 40);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.abs_precision(), Some(int(6)));
        assert_eq!(c.to_integer_mod().unwrap().0, BigInt::from(21));
        assert_eq!(c.unit_digits(), vec![1, 4, 0, 0, 0, 0]);
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = LocalElem::from_rational_with_precision(&int(1), 5, 1, 6, 40);
        let b = LocalElem::from_rational_with_precision(&int(26), 5, 1, 6, 40);
        let d = b.sub(&a).unwrap();
        assert_eq!(d.valuation(), Valuation::Finite(int(2)));
        assert_eq!(d.abs_precision(), Some(int(6)));
        let z = a.sub(&a).unwrap();
        assert!(z.is_zero() && !z.is_exact_zero());
        assert!(matches!(padic_arith(&a, &a, ArithOp::Sub), Err(PadicError::PrecisionExhausted(_))));
    }

    #[test]
    fn division_and_inverse() {
        let a = LocalElem::from_int(3, 7, 1, 12).inexact();
        let inv = a.inv().unwrap();
        let one = a.mul(&inv).unwrap();
        assert!(one.congruent(&LocalElem::from_int(1, 7, 1, 12)));
        let zero = LocalElem::zero(7, 1, 12);
        assert_eq!(a.div(&zero), Err(PadicError::DivisionByZero));
        assert_eq!(padic_arith(&a, &zero, ArithOp::Div), Err(PadicError::DivisionByZero));
    }

    #[test]
    fn ramified_inverse() {
        let pi = LocalElem::uniformizer(5, 4, 6);
        let x = pi.add(&LocalElem::from_int(2, 5, 4, 6)).unwrap().mul(&pi).unwrap();
        let y = x.inv().unwrap();
        assert_eq!(y.valuation(), Valuation::Finite(rat(-1, 4)));
        assert!(x.mul(&y).unwrap().congruent(&LocalElem::from_int(1, 5, 4, 6)));
    }

    #[test]
    fn embedding_preserves_value() {
        let pi2 = LocalElem::uniformizer(5, 2, 6);
        let pi4 = LocalElem::uniformizer(5, 4, 6);
        let sq = pi4.mul(&pi4).unwrap();
        assert!(sq.congruent(&pi2));
        assert_eq!(pi2.embed(4).unwrap().valuation(), Valuation::Finite(rat(1, 2)));
        assert!(pi2.embed(3).is_err());
    }

    #[test]
    fn unit_digits_interleave_coefficients() {
        // 1 + 2π + 3π^2 with π^2 = 5 at E = 2: digits 1, 2, 3 in positions 0, 1, 2
        let pi = LocalElem::uniformizer(5, 2, 3);
        let x = LocalElem::from_int(1, 5, 2, 3)
            .add(&pi.mul(&LocalElem::from_int(2, 5, 2, 3)).unwrap())
            .unwrap()
            .add(&LocalElem::from_int(15, 5, 2, 3))
            .unwrap();
        assert_eq!(&x.unit_digits()[..3], &[1, 2, 3]);
    }

    #[test]
    fn mixed_primes_rejected() {
        let a = LocalElem::from_int(1, 5, 1, 4);
        let b = LocalElem::from_int(1, 7, 1, 4);
        assert!(matches!(a.add(&b), Err(PadicError::Incompatible(_))));
    }
}
