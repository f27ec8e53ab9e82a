//! Ground-state representation of the quadratic form and the commutator
//! identities behind it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groundstate::GroundState;
use crate::lattice::LatticeBox;
use crate::operator::JacobiOperator;

/// Required depth of `supp f`: the neighbours of the support must still be
/// interior sites, so no boundary-crossing edge ever carries `f ≠ 0`.
pub const SUPPORT_DEPTH: usize = 2;

/// Allowed `|(Ju)_ℓ|` near the support, relative to `scale(J)·max |u|`.
pub const ANNIHILATION_TOL: f64 = 1e-8;

/// Per-entry tolerance for the commutator identities.
pub const COMMUTATOR_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsrCheck {
    /// `⟨fu, (-J) fu⟩`.
    pub lhs: f64,
    /// `Σ_edges a_{ℓm} u_ℓ u_m (f_ℓ - f_m)²`.
    pub rhs: f64,
    pub residual: f64,
    pub scale: f64,
}

impl GsrCheck {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

/// Evaluates both sides of the ground-state representation. `u` must solve
/// `Ju = 0` on the neighbourhood of `supp f`; shift `J` by the ground-state
/// energy first if needed.
pub fn gsr_both_sides(op: &JacobiOperator, gs: &GroundState, f: &[f64]) -> Result<GsrCheck> {
    let lattice = op.lattice();
    if &gs.lattice != lattice {
        return Err(Error::BoxMismatch);
    }
    if f.len() != lattice.len() {
        return Err(Error::LengthMismatch {
            expected: lattice.len(),
            got: f.len(),
        });
    }
    let mut near = vec![false; f.len()];
    for (i, &fi) in f.iter().enumerate() {
        if fi == 0.0 {
            continue;
        }
        if lattice.depth(i) < SUPPORT_DEPTH {
            return Err(Error::SupportTouchesBoundary(lattice.coord(i)));
        }
        near[i] = true;
        for j in lattice.neighbors(i) {
            near[j] = true;
        }
    }

    let u = &gs.u;
    let ju = op.apply(u)?;
    let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let allowed = ANNIHILATION_TOL * op.scale().max(1.0) * umax;
    let residual = near
        .iter()
        .zip(&ju)
        .filter(|(n, _)| **n)
        .fold(0.0f64, |m, (_, x)| m.max(x.abs()));
    if residual > allowed {
        return Err(Error::BadGroundState { residual, allowed });
    }

    let phi: Vec<f64> = f.iter().zip(u).map(|(a, b)| a * b).collect();
    let lhs = -op.form(&phi, &phi)?;
    let rhs = gsr_rhs(op, u, f);
    Ok(GsrCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        scale: lhs.abs() + rhs.abs() + 1.0,
    })
}

/// `Σ_edges a_{ℓm} u_ℓ u_m (f_ℓ - f_m)²`; depends on `f` only through its
/// differences along edges.
pub fn gsr_rhs(op: &JacobiOperator, u: &[f64], f: &[f64]) -> f64 {
    op.edge_coefficients()
        .fold(0.0, |acc, (i, j, a)| acc + a * u[i] * u[j] * (f[i] - f[j]).powi(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    /// Assembled `[M_f, J]`.
    pub first: DMatrix<f64>,
    /// Assembled `[M_f, [M_f, J]]`.
    pub second: DMatrix<f64>,
    pub first_error: f64,
    pub second_error: f64,
    pub exact: bool,
}

/// Builds both commutators by dense matrix products and compares them with
/// the coefficient formulas `a(f_ℓ - f_m)` (antisymmetric) and
/// `a(f_ℓ - f_m)²` (symmetric, zero diagonal).
pub fn commutator_check(op: &JacobiOperator, f: &[f64]) -> Result<CommutatorCheck> {
    let n = op.len();
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let j = op.to_dense();
    let mf = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(f));
    let first = &mf * &j - &j * &mf;
    let second = &mf * &first - &first * &mf;

    let mut expect1 = DMatrix::zeros(n, n);
    let mut expect2 = DMatrix::zeros(n, n);
    for (i, k, a) in op.edge_coefficients() {
        let d = f[i] - f[k];
        expect1[(i, k)] = a * d;
        expect1[(k, i)] = -a * d;
        expect2[(i, k)] = a * d * d;
        expect2[(k, i)] = a * d * d;
    }
    let first_error = (&first - &expect1).amax();
    let second_error = (&second - &expect2).amax();
    Ok(CommutatorCheck {
        exact: first_error <= COMMUTATOR_TOL && second_error <= COMMUTATOR_TOL,
        first,
        second,
        first_error,
        second_error,
    })
}

/// Random test function: i.i.d. uniform on `[-1, 1]` over a random sub-box of
/// the sites at depth ≥ [`SUPPORT_DEPTH`], zero elsewhere. All zero if the box
/// has no such sites.
pub fn random_interior_function(lattice: &LatticeBox, rng: &mut impl Rng) -> Vec<f64> {
    let mut ranges = Vec::with_capacity(lattice.dim());
    for axis in 0..lattice.dim() {
        let (lo, hi) = lattice.axis_range(axis);
        let (lo, hi) = (lo + SUPPORT_DEPTH as i64, hi - SUPPORT_DEPTH as i64);
        if lo > hi {
            return vec![0.0; lattice.len()];
        }
        let a = rng.random_range(lo..=hi);
        let b = rng.random_range(lo..=hi);
        ranges.push((a.min(b), a.max(b)));
    }
    (0..lattice.len())
        .map(|i| {
            let c = lattice.coord(i);
            let inside = ranges
                .iter()
                .enumerate()
                .all(|(axis, &(lo, hi))| (lo..=hi).contains(&c[axis]));
            if inside {
                rng.random_range(-1.0..=1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Smallest observed Rayleigh quotient `⟨fu,(-J)fu⟩/⟨fu,fu⟩` over random
/// interior-supported `f`. Does not check that `u` solves `Ju = 0`, so it can
/// also exhibit failures when it does not.
pub fn form_nonnegativity_witness(
    op: &JacobiOperator,
    gs: &GroundState,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let lattice = op.lattice();
    if &gs.lattice != lattice {
        return Err(Error::BoxMismatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..trials {
        let f = random_interior_function(lattice, &mut rng);
        let phi: Vec<f64> = f.iter().zip(&gs.u).map(|(a, b)| a * b).collect();
        let norm: f64 = phi.iter().map(|x| x * x).sum();
        if norm == 0.0 {
            continue;
        }
        min = min.min(-op.form(&phi, &phi)? / norm);
    }
    Ok(min)
}
