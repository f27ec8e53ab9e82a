//! Eigenvalue comparison certificates between a perturbed background and a
//! rescaled reference background plus the dominating potential.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{eig_extreme_vectors, extract_levels, Convention, Side, Spectrum};
use crate::error::{Error, Result};
use crate::groundstate::{comparison_constants, ComparisonConstants, GroundState, SpectralEdge};
use crate::operator::{
    apply_perturbation, dominating_potential, site_map_on, JacobiOperator, Perturbation,
};

/// Largest tolerated fraction of eigenvector mass on the outermost layer.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-8;

/// Relative slack applied to each margin.
pub const MARGIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    /// 1-based level index counted from the edge.
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCertificate {
    pub edge: SpectralEdge,
    pub constants: ComparisonConstants,
    pub rows: Vec<CertificateRow>,
    pub holds: bool,
    /// Largest boundary mass among eigenpairs with a nonzero clamped level.
    pub max_boundary_mass: f64,
}

impl ComparisonCertificate {
    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }
}

/// Compares `E_j(J0 + δ)` with `E_j(J(η a¹, η b¹ + β w))` for `j = 1..=k`,
/// where both backgrounds are shifted so their spectra top out at 0 and
/// `gs0`, `gs1` are positive solutions of `J0 u = 0`, `J1 u = 0`.
pub fn theorem41_certificate(
    j0: &JacobiOperator,
    gs0: &GroundState,
    j1: &JacobiOperator,
    gs1: &GroundState,
    delta: &Perturbation,
    k: usize,
) -> Result<ComparisonCertificate> {
    let constants = comparison_constants(gs0, j0, gs1, j1)?;
    let lhs_op = apply_perturbation(j0, delta)?;
    let w = site_map_on(j1.lattice(), &dominating_potential(delta));
    let rhs_op = j1.scaled_plus_potential(constants.eta, constants.beta, &w)?;

    let (lhs, lhs_mass) = top_levels(&lhs_op, k, "lhs")?;
    let (rhs, rhs_mass) = top_levels(&rhs_op, k, "rhs")?;

    let rows: Vec<CertificateRow> = lhs
        .iter()
        .zip(&rhs)
        .enumerate()
        .map(|(i, (&l, &r))| CertificateRow {
            j: i + 1,
            lhs: l,
            rhs: r,
            margin: r - l,
            slack: MARGIN_SLACK * (1.0 + l.abs() + r.abs()),
        })
        .collect();
    Ok(ComparisonCertificate {
        edge: SpectralEdge::Top,
        constants,
        holds: rows.iter().all(|r| r.margin >= -r.slack),
        rows,
        max_boundary_mass: lhs_mass.max(rhs_mass),
    })
}

/// Bottom-edge counterpart: `gs0`, `gs1` alternate in sign and both
/// backgrounds have their spectra bottoming out at 0. Rows hold `|E_j⁻|`.
///
/// Runs [`theorem41_certificate`] on the `W`-images `J(a, -b)`, `Wu` and
/// `δb ↦ -δb`; the dominating potential is unchanged by the map.
pub fn theorem43_certificate(
    j0: &JacobiOperator,
    gs0: &GroundState,
    j1: &JacobiOperator,
    gs1: &GroundState,
    delta: &Perturbation,
    k: usize,
) -> Result<ComparisonCertificate> {
    let mut cert = theorem41_certificate(
        &j0.conjugate_w(),
        &gs0.conjugate_w(),
        &j1.conjugate_w(),
        &gs1.conjugate_w(),
        &delta.conjugate_w(),
        k,
    )?;
    cert.edge = SpectralEdge::Bottom;
    Ok(cert)
}

/// Top-positive clamped levels and the worst boundary mass among the
/// eigenpairs that produced a nonzero level.
fn top_levels(op: &JacobiOperator, k: usize, side: &'static str) -> Result<(Vec<f64>, f64)> {
    let k_eff = k.min(op.len());
    let spec: Spectrum = eig_extreme_vectors(op, k_eff, Side::FromTop, 0.0)?;
    let levels = extract_levels(&spec, Convention::TopPositive, k).values;
    let masses = spec.boundary_mass.as_deref().unwrap_or(&[]);
    let mut worst = 0.0f64;
    for (j, &level) in levels.iter().enumerate().take(k_eff) {
        if level <= 0.0 {
            continue;
        }
        let mass = masses[spec.edge_index(j)];
        if mass > BOUNDARY_MASS_LIMIT {
            return Err(Error::TruncationSuspect {
                side,
                index: j + 1,
                mass,
            });
        }
        worst = worst.max(mass);
    }
    Ok((levels, worst))
}
