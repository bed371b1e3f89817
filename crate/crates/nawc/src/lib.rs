//! Verification engine for non-abelian warped convolutions in exact
//! finite-dimensional representations.

pub mod coupling;
pub mod error;
pub mod expr;
pub mod fock_qft;
pub mod linalg;
pub mod qm_gauge;
pub mod quadrature;
pub mod sun_algebra;
pub mod warped_core;
pub mod wedge;

pub use error::{NawcError, Result};
