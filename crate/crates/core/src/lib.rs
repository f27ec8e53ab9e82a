//! Truncated Jacobi operators on ℤ and ℤ², their ground states, and
//! eigenvalue comparison certificates between a background and its
//! perturbation.

pub mod eigensolve;
pub mod error;
pub mod bounds;
pub mod discretize;
pub mod floquet;
pub mod groundstate;
pub mod lattice;
pub mod operator;
pub mod potential;
pub mod quadform;
pub mod suite;

pub use error::{Error, Result};
pub use lattice::{Coord, Edge, LatticeBox};
pub use operator::{
    apply_perturbation, build_operator, JacobiCoefficients, JacobiOperator, PeriodicCoefficients,
    Perturbation, Provenance,
};
