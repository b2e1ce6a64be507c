//! Toric principal bundles for GL(r), SL(r) and Sp(2r) through their
//! piecewise-linear maps into the extended Tits building.

pub mod analysis;
pub mod building;
pub mod error;
pub mod fan;
pub mod helly;
pub mod json;
pub mod field;
pub mod linalg;
pub mod plmap;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rational, F2, F3, F5, F7};
