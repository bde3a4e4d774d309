//! Supersymmetric intertwiners for Jaynes–Cummings type Hamiltonians.
//!
//! Truncated Fock-space models, closed-form spectra, first-order intertwiners
//! and their hierarchies, and the coordinate-space Darboux construction that
//! rebuilds the same intertwiners from seed solutions.

pub mod darboux;
pub mod error;
pub mod exec;
pub mod fock;
pub mod hierarchy;
pub mod intertwiners;
pub mod linalg;
pub mod models;
pub mod spectra;
pub mod verification;

pub use error::{JcError, Result};
pub use exec::Exec;
