//! Eigenvalues of a perturbed periodic background outside the convex hull
//! of its band set, and the half-power distance sum.

use serde::{Deserialize, Serialize};

use crate::eigensolve::sturm::{bisect_eigenvalue, count_below};
use crate::error::{Error, Result};
use crate::floquet::{floquet_data, Band};
use crate::lattice::LatticeBox;
use crate::operator::{apply_perturbation, build_operator, JacobiCoefficients, PeriodicCoefficients, Perturbation};

/// Eigenvalues closer than this to the hull are treated as inside it.
pub const HULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpectrum {
    pub bands: Vec<Band>,
    pub hull: (f64, f64),
}

/// Closed bands of a periodic one-dimensional background.
pub fn band_spectrum(coeffs: &JacobiCoefficients) -> Result<BandSpectrum> {
    let p = periodic_part(coeffs)?;
    let data = floquet_data(&p)?;
    Ok(BandSpectrum {
        hull: data.hull(),
        bands: data.bands,
    })
}

pub(crate) fn periodic_part(coeffs: &JacobiCoefficients) -> Result<PeriodicCoefficients> {
    match coeffs {
        JacobiCoefficients::Constant { a, b } => PeriodicCoefficients::new(vec![*a], vec![*b]),
        JacobiCoefficients::Periodic(p) => Ok(p.clone()),
        JacobiCoefficients::Explicit { .. } => Err(Error::NotPeriodic(
            "explicit coefficients carry no period".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoReport {
    pub bands: Vec<Band>,
    pub hull: (f64, f64),
    /// Eigenvalues above the hull, descending.
    pub above: Vec<f64>,
    /// Eigenvalues below the hull, ascending.
    pub below: Vec<f64>,
    /// `Σ dist(E, σ(J0))^{1/2}` over `above` and `below`.
    pub lhs: f64,
    /// `Σ|δa| + Σ|δb|`.
    pub norm: f64,
    /// `lhs / norm`; absent for the zero perturbation.
    pub c_emp: Option<f64>,
}

/// Runs on `n` sites, either centred on the origin or the half-line box
/// `1..=n`.
pub fn szego_sum(
    p: &PeriodicCoefficients,
    delta: &Perturbation,
    half_line: bool,
    n: usize,
) -> Result<SzegoReport> {
    let data = floquet_data(p)?;
    let (lo, hi) = data.hull();
    let lattice = if half_line {
        LatticeBox::half_line(n)?
    } else {
        LatticeBox::centered_line(n)?
    };
    let j0 = build_operator(&JacobiCoefficients::Periodic(p.clone()), &lattice)?;
    let op = apply_perturbation(&j0, delta)?;
    let (d, e) = (op.diagonal(), op.off_diagonal());
    let len = op.len();

    let n_below = count_below(d, e, lo - HULL_TOL);
    let n_above = len - count_below(d, e, hi + HULL_TOL);
    let below: Vec<f64> = (0..n_below).map(|i| bisect_eigenvalue(d, e, i, 0.0)).collect();
    let above: Vec<f64> = (0..n_above)
        .map(|i| bisect_eigenvalue(d, e, len - 1 - i, 0.0))
        .collect();
    let lhs = above
        .iter()
        .chain(&below)
        .map(|&x| data.dist(x).sqrt())
        .sum();
    let norm = delta.l1_norm();
    Ok(SzegoReport {
        hull: (lo, hi),
        bands: data.bands,
        above,
        below,
        lhs,
        norm,
        c_emp: (norm > 0.0).then(|| lhs / norm),
    })
}
