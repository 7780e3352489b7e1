//! Three integer invariants of paths of linear Hamiltonian systems on `R^{2n}`:
//! the spectral flow of the associated selfadjoint operators, the Maslov index
//! of the stable/unstable Lagrangian pairs, and the winding of a determinant
//! around the parameter rectangle.

pub mod ensembles;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod maslov;
pub mod spectral_flow;
pub mod symplectic;

pub use error::{Error, Result};
