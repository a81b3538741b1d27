//! Exact arithmetic substrate.

mod class;
mod euler;
mod field;
mod linear;
pub mod modp;
mod poly;
mod rational;

pub use class::{EquivariantClass, Monomial};
pub use euler::{euler_class, euler_factors, weight_map, weight_multiplicities, StandardWeights, WeightMap};
pub use field::{ExactRF, Field, PrimeSample, RESAMPLE_CAP};
pub use linear::{LinearForm, VAR_NAMES};
pub use poly::{Exps, Poly};
pub use rational::{FactoredRational, FormProduct};

/// `specialize(x, sample)`: exact evaluation of a rational function mod `p`.
pub fn specialize(x: &FactoredRational, sample: &PrimeSample) -> crate::Result<u64> {
    sample.lift(x)
}

/// Order of `x` along `f = 0`; `None` when `x` is zero.
pub fn rf_valuation(x: &FactoredRational, f: &LinearForm) -> Option<i64> {
    x.valuation(f)
}
