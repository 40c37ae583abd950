//! Equilibrium states of the affine Hecke system of `Q` and quadratic fields, with a finite
//! groupoid engine for checking KMS and ground-state criteria on explicit models.

pub mod arith;
pub mod boundary;
pub mod error;
pub mod groupoid;
pub mod hecke;
pub mod json;
pub mod linalg;
pub mod number_field;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
