//! Seeded random correspondences with integer coefficients in `[-5, 5]`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::rational::Rational;
use crate::series::Correspondence;

pub const COEFF_BOUND: i64 = 5;

pub fn rng_for(seed: u64, e: usize, d: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((e as u64) << 32 | d as u64))
}

/// Monic `f` of degree `d` and `g` of degree `e`, lower coefficients uniform in `[-5, 5]`.
pub fn random_correspondence<R: Rng>(rng: &mut R, e: usize, d: usize) -> Correspondence {
    let mut draw = |n: usize| {
        let mut v: Vec<Rational> = (0..n)
            .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-COEFF_BOUND..=COEFF_BOUND))))
            .collect();
        v.push(Rational::from_integer(BigInt::from(1)));
        v
    };
    let f = draw(d);
    let g = draw(e);
    Correspondence::new(f, g).expect("monic by construction")
}

pub fn random_suite(seed: u64, e: usize, d: usize, count: usize) -> Vec<Correspondence> {
    let mut rng = rng_for(seed, e, d);
    (0..count).map(|_| random_correspondence(&mut rng, e, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let a = random_suite(7, 2, 3, 5);
        assert_eq!(a, random_suite(7, 2, 3, 5));
        assert_ne!(a, random_suite(8, 2, 3, 5));
        for c in &a {
            assert_eq!((c.e(), c.d()), (2, 3));
            assert!(c.f_coeffs().iter().chain(c.g_coeffs()).all(|x| x.is_integer() && x.numer().magnitude() <= &5u32.into()));
        }
    }
}
