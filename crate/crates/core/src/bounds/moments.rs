//! Moments of clamped levels and Lieb–Thirring type bounds for discretised
//! Schrödinger operators.

use serde::{Deserialize, Serialize};

use crate::discretize::{discretize_schrodinger, Mesh};
use crate::eigensolve::{eig_extreme_vectors, sturm_count, ClampedLevels, Side};
use crate::error::{Error, Result};
use crate::groundstate::{periodic_edge_state, SpectralEdge};
use crate::operator::{apply_perturbation, PeriodicCoefficients};
use crate::potential::Potential;

/// Safety factor in the mesh slack `C·h·∫|V|`.
pub const MESH_SLACK_FACTOR: f64 = 10.0;

/// Period pattern must fit the mesh to this relative tolerance.
const PATTERN_TOL: f64 = 1e-9;

/// `Σ |E_j|^γ`, with `0^0 = 0` so that `γ = 0` counts nonzero levels.
pub fn moment_sum(levels: &ClampedLevels, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::NegativeGamma(gamma));
    }
    Ok(levels
        .values
        .iter()
        .filter(|e| **e != 0.0)
        .fold(0.0, |acc, e| acc + e.abs().powf(gamma)))
}

/// Known sharp constants `L_{γ,ν}`.
pub fn lieb_thirring_constant(gamma: f64, dim: usize) -> Option<f64> {
    (gamma == 0.5 && dim == 1).then_some(0.5)
}

fn check_gamma(gamma: f64, dim: usize) -> Result<()> {
    let ok = match dim {
        1 => gamma >= 0.5,
        2 => gamma > 0.0,
        _ => gamma >= 0.0,
    };
    if ok && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::GammaOutOfRange { gamma, dim })
    }
}

/// `L_{γ,ν} β^{γ+ν/2} Σ h^ν |V_n|^{γ+ν/2}` for samples `V_n ≤ 0`.
pub fn lt_bound_rhs(
    samples: &[f64],
    gamma: f64,
    dim: usize,
    beta: f64,
    h: f64,
    constant: Option<f64>,
) -> Result<f64> {
    check_gamma(gamma, dim)?;
    let l = constant
        .or_else(|| lieb_thirring_constant(gamma, dim))
        .ok_or(Error::UnknownConstant { gamma, dim })?;
    if let Some(&v) = samples.iter().find(|v| **v > 0.0) {
        return Err(Error::PositiveV { x: f64::NAN, value: v });
    }
    let p = gamma + dim as f64 / 2.0;
    let integral: f64 = h.powi(dim as i32) * samples.iter().map(|v| v.abs().powf(p)).sum::<f64>();
    Ok(l * beta.powf(p) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `S_γ ≤ L β^{γ+ν/2} ∫|V|^{γ+ν/2}`.
    Upper,
    /// `S_{1/2} ≥ ∫|V| / (4β)`.
    Lower,
    /// `S_γ(lhs) ≤ S_γ(rhs)` between two level sets.
    Comparison,
}

/// `s_lhs ≤ s_rhs` is the claimed inequality; `gap = s_rhs - s_lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub gamma: f64,
    pub kind: BoundKind,
    pub s_lhs: f64,
    pub s_rhs: f64,
    pub gap: f64,
    pub slack: f64,
    pub holds: bool,
    pub constant: Option<f64>,
    pub beta: f64,
}

impl MomentReport {
    pub fn new(
        gamma: f64,
        kind: BoundKind,
        s_lhs: f64,
        s_rhs: f64,
        slack: f64,
        constant: Option<f64>,
        beta: f64,
    ) -> Self {
        let gap = s_rhs - s_lhs;
        Self {
            gamma,
            kind,
            s_lhs,
            s_rhs,
            gap,
            slack,
            holds: gap >= -slack,
            constant,
            beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub h: f64,
    pub interval: (f64, f64),
    /// Top of the discretised background band, subtracted from `b`.
    pub shift: f64,
    pub beta: f64,
    /// Riemann sum of `|V|`.
    pub integral: f64,
    /// Negative eigenvalues of the discretised `H`, most negative first.
    pub levels: Vec<f64>,
    pub s_half: f64,
    pub mesh_slack: f64,
    pub max_boundary_mass: f64,
    pub upper: MomentReport,
    pub lower: MomentReport,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.upper.holds && self.lower.holds
    }
}

/// Periodic Jacobi parameters of the discretised background on the grid of
/// `mesh`, indexed by lattice coordinate.
pub fn background_pattern(v0: &Potential, mesh: &Mesh) -> Result<PeriodicCoefficients> {
    let h = mesh.h;
    let cells = match v0.period() {
        None => {
            return Err(Error::NotPeriodic(format!(
                "background {v0:?} is not periodic"
            )))
        }
        Some(None) => 1,
        Some(Some(period)) => {
            let r = period / h;
            let n = r.round();
            if n < 1.0 || (r - n).abs() > PATTERN_TOL * r.max(1.0) {
                return Err(Error::BadMesh(format!(
                    "period {period} is not a multiple of h = {h}"
                )));
            }
            n as usize
        }
    };
    let inv = 1.0 / (h * h);
    let offset = mesh.x_lo - mesh.n_lo as f64 * h;
    let b = (0..cells)
        .map(|r| -2.0 * inv - v0.eval(r as f64 * h + offset))
        .collect();
    PeriodicCoefficients::new(vec![inv; cells], b)
}

/// Discretises `-d² + V0 + V` on `interval`, shifts the background so its
/// band top is 0, and checks
/// `∫|V|/(4β) - slack ≤ S_{1/2} ≤ (β/2)∫|V| + slack`
/// with `β` from the background's periodic ground state and
/// `slack = 10·h·∫|V|`.
pub fn lt_sandwich_check(
    v0: &Potential,
    v: &Potential,
    h: f64,
    interval: (f64, f64),
) -> Result<SandwichReport> {
    let gamma = 0.5;
    let mesh = Mesh::new(h, interval)?;
    let pattern = background_pattern(v0, &mesh)?;
    let edge = periodic_edge_state(&pattern, SpectralEdge::Top)?;
    let shift = edge.edge;
    let beta = edge.solution.regularity().2;

    let (j0, delta) = discretize_schrodinger(|x| v0.eval(x), |x| v.eval(x), h, interval)?;
    let op = apply_perturbation(&j0.shift(shift), &delta)?;

    let positive = op.len() - sturm_count(&op, 0.0)?;
    let (levels, max_boundary_mass) = if positive == 0 {
        (Vec::new(), 0.0)
    } else {
        let spec = eig_extreme_vectors(&op, positive, Side::FromTop, 0.0)?;
        let mass = spec
            .boundary_mass
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .fold(0.0f64, |m, x| m.max(*x));
        let levels: Vec<f64> = spec
            .from_edge()
            .into_iter()
            .filter(|e| *e > 0.0)
            .map(|e| -e)
            .collect();
        (levels, mass)
    };
    let clamped = ClampedLevels {
        values: levels.iter().map(|e| -e).collect(),
        convention: crate::eigensolve::Convention::TopPositive,
    };
    let s_half = moment_sum(&clamped, gamma)?;

    let samples: Vec<f64> = (0..op.len())
        .map(|i| v.eval(mesh.x(op.lattice().coord(i)[0])))
        .collect();
    let integral = h * samples.iter().map(|x| x.abs()).sum::<f64>();
    let mesh_slack = MESH_SLACK_FACTOR * h * integral;
    let upper_bound = lt_bound_rhs(&samples, gamma, 1, beta, h, None)?;
    let lower_bound = integral / (4.0 * beta);
    Ok(SandwichReport {
        h,
        interval,
        shift,
        beta,
        integral,
        levels,
        s_half,
        mesh_slack,
        max_boundary_mass,
        upper: MomentReport::new(
            gamma,
            BoundKind::Upper,
            s_half,
            upper_bound,
            mesh_slack,
            lieb_thirring_constant(gamma, 1),
            beta,
        ),
        lower: MomentReport::new(gamma, BoundKind::Lower, lower_bound, s_half, mesh_slack, None, beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::Convention;

    fn levels(v: &[f64]) -> ClampedLevels {
        ClampedLevels {
            values: v.to_vec(),
            convention: Convention::TopPositive,
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment_sum(&levels(&[0.25, 0.0]), 0.5).unwrap(), 0.5);
        assert_eq!(moment_sum(&levels(&[0.5, 0.1, 0.0]), 0.0).unwrap(), 2.0);
        assert!((moment_sum(&levels(&[0.5, 0.1, 0.0]), 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(
            moment_sum(&levels(&[0.5]), -1.0),
            Err(Error::NegativeGamma(-1.0))
        );
    }

    #[test]
    fn lt_rhs_examples() {
        let h = 0.001;
        let well: Vec<f64> = vec![-1.0; 1000];
        assert_eq!(lt_bound_rhs(&[0.0; 10], 0.5, 1, 1.0, h, None).unwrap(), 0.0);
        assert!((lt_bound_rhs(&well, 0.5, 1, 1.0, h, None).unwrap() - 0.5).abs() <= h);
        assert!((lt_bound_rhs(&well, 0.5, 1, 4.0, h, None).unwrap() - 2.0).abs() <= 4.0 * h);
        assert!(matches!(
            lt_bound_rhs(&well, 0.3, 1, 1.0, h, None),
            Err(Error::GammaOutOfRange { .. })
        ));
        assert!(matches!(
            lt_bound_rhs(&well, 1.0, 1, 1.0, h, None),
            Err(Error::UnknownConstant { .. })
        ));
        assert!(lt_bound_rhs(&well, 1.0, 1, 1.0, h, Some(0.2)).is_ok());
    }

    #[test]
    fn square_well_sandwich() {
        let well = Potential::SquareWell {
            depth: 1.0,
            center: 0.0,
            width: 1.0,
        };
        let r = lt_sandwich_check(&Potential::Zero {}, &well, 0.01, (-20.0, 20.0)).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!((r.beta - 1.0).abs() < 1e-12);
        assert!(r.shift.abs() < 1e-9);
        assert!(r.upper.gap >= 0.0 && r.lower.gap >= 0.0);
        assert!((r.upper.s_rhs - 0.5).abs() < 0.02);
    }

    #[test]
    fn empty_potential() {
        let r = lt_sandwich_check(&Potential::Zero {}, &Potential::Zero {}, 0.01, (-5.0, 5.0)).unwrap();
        assert_eq!(r.s_half, 0.0);
        assert!(r.levels.is_empty());
        assert!(r.holds());
    }
}
