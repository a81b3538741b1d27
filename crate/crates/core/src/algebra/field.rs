//! Coefficient fields for series arithmetic: exact rational functions, or
//! a prime-field specialization at a random point.

use std::fmt::Debug;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::modp;
use super::rational::{FactoredRational, FormProduct};
use crate::error::{Error, Result};

/// Retries allowed when a sampled point makes a denominator vanish.
pub const RESAMPLE_CAP: usize = 16;

pub trait Field: Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    #[allow(clippy::wrong_self_convention)]
    fn from_rational(&self, q: &BigRational) -> Self::Elem;
    fn lift(&self, x: &FactoredRational) -> Result<Self::Elem>;
    fn lift_product(&self, x: &FormProduct) -> Result<Self::Elem>;
    fn scale(&self, a: &Self::Elem, q: &BigRational) -> Self::Elem {
        self.mul(a, &self.from_rational(q))
    }
    /// Deterministic text rendering for reports.
    fn render(&self, a: &Self::Elem) -> String;
}

/// Exact arithmetic in `Q(s1, s2, s3)[m]` with linear-form denominators.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactRF;

impl Field for ExactRF {
    type Elem = FactoredRational;

    fn zero(&self) -> FactoredRational {
        FactoredRational::zero()
    }
    fn one(&self) -> FactoredRational {
        FactoredRational::one()
    }
    fn add(&self, a: &FactoredRational, b: &FactoredRational) -> FactoredRational {
        a + b
    }
    fn sub(&self, a: &FactoredRational, b: &FactoredRational) -> FactoredRational {
        a - b
    }
    fn mul(&self, a: &FactoredRational, b: &FactoredRational) -> FactoredRational {
        a * b
    }
    fn neg(&self, a: &FactoredRational) -> FactoredRational {
        -a
    }
    fn is_zero(&self, a: &FactoredRational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> FactoredRational {
        FactoredRational::from_rational(q.clone())
    }
    fn lift(&self, x: &FactoredRational) -> Result<FactoredRational> {
        Ok(x.clone())
    }
    fn lift_product(&self, x: &FormProduct) -> Result<FactoredRational> {
        Ok(x.to_rational())
    }
    fn scale(&self, a: &FactoredRational, q: &BigRational) -> FactoredRational {
        a.scale(q)
    }
    fn render(&self, a: &FactoredRational) -> String {
        a.to_string()
    }
}

/// Evaluation of `(s1, s2, s3, m)` at a point of `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSample {
    pub p: u64,
    /// Residues of `s1, s2, s3, m`, all nonzero.
    pub point: [u64; 4],
    pub seed: u64,
}

impl PrimeSample {
    pub fn new(p: u64, point: [u64; 4], seed: u64) -> Result<Self> {
        if !modp::is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if point.iter().any(|&x| x % p == 0) {
            return Err(Error::Config("sample residues must be nonzero".into()));
        }
        Ok(PrimeSample { p, point: point.map(|x| x % p), seed })
    }

    /// Draw a point from the seeded stream; `attempt` selects the retry.
    pub fn random(p: u64, seed: u64, trial: usize, attempt: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((trial as u64) << 8) | attempt as u64);
        let point = [(); 4].map(|_| rng.gen_range(1..p));
        Self::new(p, point, seed)
    }

    /// `p > cutoff!` guarantees every `1/k` used by exp/log exists.
    pub fn supports_cutoff(&self, cutoff: u32) -> bool {
        (1..=cutoff as u64).all(|k| k < self.p)
    }
}

impl Field for PrimeSample {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        modp::add_mod(*a, *b, self.p)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        modp::sub_mod(*a, *b, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        modp::mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        modp::sub_mod(0, *a, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &BigRational) -> u64 {
        modp::rational_mod(q, self.p).expect("rational constant with denominator divisible by p")
    }
    fn lift(&self, x: &FactoredRational) -> Result<u64> {
        x.eval_mod(&self.point, self.p)
    }
    fn lift_product(&self, x: &FormProduct) -> Result<u64> {
        x.eval_mod(&self.point, self.p)
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{LinearForm, Poly};

    #[test]
    fn seeded_points_are_reproducible() {
        let p = modp::prime_below_2_62(0);
        let a = PrimeSample::random(p, 7, 0, 0).unwrap();
        let b = PrimeSample::random(p, 7, 0, 0).unwrap();
        let c = PrimeSample::random(p, 7, 1, 0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.point, c.point);
    }

    #[test]
    fn small_prime_specialization() {
        let f = PrimeSample::new(101, [2, 3, 5, 7], 0).unwrap();
        let x = FactoredRational::new(
            Poly::from_linear(&(&LinearForm::s(1) + &LinearForm::s(2))),
            &[(LinearForm::s(3), 1)],
        )
        .unwrap();
        assert_eq!(f.lift(&x).unwrap(), 1);
        assert!(PrimeSample::new(100, [1, 1, 1, 1], 0).is_err());
    }
}
