//! Equivariant vertex computations for zero-dimensional DT4 invariants of
//! toric Calabi-Yau fourfolds and of `[C^4/Z_r]`, together with the
//! MacMahon-type closed forms they are compared against.

pub mod algebra;
pub mod engine;
pub mod error;
pub mod partitions;
pub mod series;
pub mod vertex;

pub use error::{Error, Result};
