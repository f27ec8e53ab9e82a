use thiserror::Error;

use crate::lattice::Coord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice dimension {0} is not supported (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("empty or inverted range {lo}..={hi} on axis {axis}")]
    EmptyRange { axis: usize, lo: i64, hi: i64 },
    #[error("edge {0:?} - {1:?} does not join nearest neighbours")]
    NotAnEdge(Coord, Coord),
    #[error("no hopping coefficient for in-box edge {0:?} - {1:?}")]
    MissingEdge(Coord, Coord),
    #[error("hopping coefficient {value} on edge {lo:?} - {hi:?} is not positive")]
    NonpositiveA { lo: Coord, hi: Coord, value: f64 },
    #[error("coefficient {0} is not finite")]
    NonFinite(f64),
    #[error("vector length {got} does not match operator size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("perturbation touches site {0:?}, which is not strictly inside the box")]
    SupportOutsideBox(Coord),
    #[error("potential is positive ({value}) at x = {x}")]
    PositiveV { x: f64, value: f64 },
    #[error("bad mesh: {0}")]
    BadMesh(String),
    #[error("coefficients are not periodic: {0}")]
    NotPeriodic(String),
    #[error("band edge search failed: {0}")]
    EdgeSolveFailure(String),
    #[error("ground state changes sign at flat index {index} (value {value})")]
    SignFailure { index: usize, value: f64 },
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("ground states live on different boxes")]
    BoxMismatch,
    #[error("ground states have different orientations")]
    OrientationMismatch,
    #[error("test function is nonzero at site {0:?}, within two layers of the boundary")]
    SupportTouchesBoundary(Coord),
    #[error("sequence does not annihilate the operator near the test support (residual {residual:e}, allowed {allowed:e})")]
    BadGroundState { residual: f64, allowed: f64 },
    #[error("operator is not tridiagonal (dimension {0})")]
    NotTridiagonal(usize),
    #[error("requested {requested} eigenvalues of a {size}-site operator")]
    TooMany { requested: usize, size: usize },
    #[error("dense eigensolve limited to {limit} sites, got {size}")]
    SizeLimit { size: usize, limit: usize },
    #[error("eigenpair {index} of the {side} operator has boundary mass {mass:e}")]
    TruncationSuspect {
        side: &'static str,
        index: usize,
        mass: f64,
    },
    #[error("moment exponent {0} is negative")]
    NegativeGamma(f64),
    #[error("gamma = {gamma} is outside the Lieb-Thirring range for dimension {dim}")]
    GammaOutOfRange { gamma: f64, dim: usize },
    #[error("no Lieb-Thirring constant known for gamma = {gamma}, dimension {dim}")]
    UnknownConstant { gamma: f64, dim: usize },
}
