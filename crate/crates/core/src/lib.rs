//! Complex-valued harmonic morphisms from Euclidean spaces built from
//! Hermitian structures parametrized by skew-symmetric complex matrices.

pub mod catalog;
pub mod complex_core;
pub mod error;
pub mod geometry;
pub mod hermitian;
pub mod holo;
pub mod implicit;
pub mod system_json;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
