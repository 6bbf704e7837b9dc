//! Computational toolkit for Nomura algebras, type-II matrices, Jones
//! pairs, spin models and the association schemes attached to them,
//! over dense complex matrices in double precision.

pub mod braid;
pub mod construct;
pub mod endo;
pub mod jones;
pub mod error;
pub mod matrix;
pub mod modular;
pub mod nomura;
pub mod scheme;
pub mod spin;
pub mod subspace;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Tolerance};
