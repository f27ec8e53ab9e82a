//! Extreme eigenvalues of truncated Jacobi operators.
//!
//! One-dimensional operators go through Sturm bisection (eigenvectors by
//! inverse iteration); two-dimensional ones through the dense solver, capped
//! at [`dense::DENSE_LIMIT`] sites.

pub mod dense;
pub mod sturm;
pub mod tridiag;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::JacobiOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    FromTop,
    FromBottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sturm,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending, multiplicities kept.
    pub eigenvalues: Vec<f64>,
    pub orientation: Side,
    pub method: Method,
    /// Fraction of each eigenvector's mass on the outermost layer, aligned
    /// with `eigenvalues`; present when eigenvectors were computed.
    pub boundary_mass: Option<Vec<f64>>,
    #[serde(skip)]
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    /// Eigenvalues ordered from the requested edge inwards.
    pub fn from_edge(&self) -> Vec<f64> {
        match self.orientation {
            Side::FromTop => self.eigenvalues.iter().rev().copied().collect(),
            Side::FromBottom => self.eigenvalues.clone(),
        }
    }

    /// Position in `eigenvalues` of the `j`-th level from the edge (0-based).
    pub fn edge_index(&self, j: usize) -> usize {
        match self.orientation {
            Side::FromTop => self.eigenvalues.len() - 1 - j,
            Side::FromBottom => j,
        }
    }
}

pub fn sturm_count(op: &JacobiOperator, lambda: f64) -> Result<usize> {
    if op.dim() != 1 {
        return Err(Error::NotTridiagonal(op.dim()));
    }
    Ok(sturm::count_below(op.diagonal(), op.off_diagonal(), lambda))
}

/// The `k` largest (or smallest) eigenvalues. `tol <= 0` bisects to full
/// precision.
pub fn eig_extreme(op: &JacobiOperator, k: usize, side: Side, tol: f64) -> Result<Spectrum> {
    extreme(op, k, side, tol, false)
}

/// As [`eig_extreme`], with eigenvectors and boundary-mass diagnostics.
pub fn eig_extreme_vectors(
    op: &JacobiOperator,
    k: usize,
    side: Side,
    tol: f64,
) -> Result<Spectrum> {
    extreme(op, k, side, tol, true)
}

fn extreme(op: &JacobiOperator, k: usize, side: Side, tol: f64, vectors: bool) -> Result<Spectrum> {
    let n = op.len();
    if k > n {
        return Err(Error::TooMany {
            requested: k,
            size: n,
        });
    }
    let indices: Vec<usize> = match side {
        Side::FromTop => (n - k..n).collect(),
        Side::FromBottom => (0..k).collect(),
    };
    let (eigenvalues, vecs, method) = if op.dim() == 1 {
        let (d, e) = (op.diagonal(), op.off_diagonal());
        let values: Vec<f64> = indices
            .par_iter()
            .map(|&i| sturm::bisect_eigenvalue(d, e, i, tol))
            .collect();
        let vecs = vectors.then(|| tridiagonal_vectors(d, e, &values));
        (values, vecs, Method::Sturm)
    } else {
        let (all, mat) = dense::dense_eigh(op)?;
        let values = indices.iter().map(|&i| all[i]).collect();
        let vecs = vectors.then(|| {
            indices
                .iter()
                .map(|&i| mat.column(i).iter().copied().collect())
                .collect()
        });
        (values, vecs, Method::Dense)
    };
    let boundary = vecs
        .as_ref()
        .map(|vs: &Vec<Vec<f64>>| vs.iter().map(|v| boundary_mass(op, v)).collect());
    Ok(Spectrum {
        eigenvalues,
        orientation: side,
        method,
        boundary_mass: boundary,
        vectors: vecs,
    })
}

/// Inverse iteration for each value, keeping vectors of clustered
/// eigenvalues mutually orthogonal.
fn tridiagonal_vectors(d: &[f64], e: &[f64], values: &[f64]) -> Vec<Vec<f64>> {
    let (lo, hi) = sturm::gershgorin(d, e);
    let cluster_gap = 1e-3 * (hi - lo).abs().max(f64::MIN_POSITIVE);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (i, &lambda) in values.iter().enumerate() {
        let cluster: Vec<Vec<f64>> = (0..i)
            .filter(|&j| (values[j] - lambda).abs() < cluster_gap)
            .map(|j| out[j].clone())
            .collect();
        out.push(tridiag::inverse_iteration(d, e, lambda, &cluster));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `E_j = max(0, j-th eigenvalue from the top)`.
    TopPositive,
    /// `E_j = min(0, j-th eigenvalue from the bottom)`.
    BottomNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampedLevels {
    pub values: Vec<f64>,
    pub convention: Convention,
}

/// First `k` clamped levels, padded with zeros past the clamp or past the
/// end of the spectrum.
pub fn extract_levels(spec: &Spectrum, convention: Convention, k: usize) -> ClampedLevels {
    let ordered: Vec<f64> = match convention {
        Convention::TopPositive => {
            let mut v = spec.eigenvalues.clone();
            v.reverse();
            v.into_iter().map(|x| x.max(0.0)).collect()
        }
        Convention::BottomNegative => spec.eigenvalues.iter().map(|x| x.min(0.0)).collect(),
    };
    let values = (0..k)
        .map(|j| ordered.get(j).copied().unwrap_or(0.0))
        .collect();
    ClampedLevels { values, convention }
}

/// Fraction of `‖v‖²` carried by the outermost layer of sites.
pub fn boundary_mass(op: &JacobiOperator, v: &[f64]) -> f64 {
    let lattice = op.lattice();
    let total: f64 = v.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = v
        .iter()
        .enumerate()
        .filter(|(i, _)| lattice.is_boundary(*i))
        .map(|(_, x)| x * x)
        .sum();
    edge / total
}
