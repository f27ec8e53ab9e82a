//! Positive and alternating-positive solutions of `Σ a_{ℓm} u_m + b_ℓ u_ℓ = 0`,
//! their regularity constants, and the comparison constants between two
//! backgrounds.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{eig_extreme_vectors, Side};
use crate::error::{Error, Result};
use crate::floquet::{floquet_data, monodromy, FloquetData};
use crate::lattice::LatticeBox;
use crate::operator::{JacobiOperator, PeriodicCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `u_m > 0` everywhere.
    Positive,
    /// `(-1)^{|m|} u_m > 0` everywhere.
    AlternatingPositive,
}

impl Orientation {
    fn flipped(self) -> Self {
        match self {
            Self::Positive => Self::AlternatingPositive,
            Self::AlternatingPositive => Self::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralEdge {
    Top,
    Bottom,
}

/// A solution sampled on a box.
///
/// `energy` is the value the operator was shifted by for `u` to solve the
/// zero-energy equation (0 for Floquet states of already shifted
/// coefficients, the top eigenvalue for truncated eigenvectors). `residual`
/// is the sup over interior sites of `|(Ju)_ℓ - energy·u_ℓ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub lattice: LatticeBox,
    pub u: Vec<f64>,
    pub orientation: Orientation,
    pub energy: f64,
    pub residual: f64,
    pub c1: f64,
    pub c2: f64,
    pub beta_reg: f64,
}

impl GroundState {
    /// Wraps `u`, checking the sign pattern and filling in the constants.
    pub fn new(
        lattice: LatticeBox,
        u: Vec<f64>,
        orientation: Orientation,
        energy: f64,
        residual: f64,
    ) -> Result<Self> {
        if u.len() != lattice.len() {
            return Err(Error::LengthMismatch {
                expected: lattice.len(),
                got: u.len(),
            });
        }
        for (i, &x) in u.iter().enumerate() {
            let sign = match orientation {
                Orientation::Positive => 1.0,
                Orientation::AlternatingPositive => {
                    if lattice.parity(i) == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            if !(sign * x > 0.0) {
                return Err(Error::SignFailure { index: i, value: x });
            }
        }
        let mut gs = Self {
            lattice,
            u,
            orientation,
            energy,
            residual,
            c1: 0.0,
            c2: 0.0,
            beta_reg: 0.0,
        };
        let (c1, c2, beta) = regularity_constants(&gs);
        gs.c1 = c1;
        gs.c2 = c2;
        gs.beta_reg = beta;
        Ok(gs)
    }

    /// `c·u` with the constants recomputed.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.lattice.clone(),
            self.u.iter().map(|x| c * x).collect(),
            self.orientation,
            self.energy,
            c.abs() * self.residual,
        )
    }

    /// `W u`: positive ↔ alternating positive. Solves the equation for the
    /// conjugated parameters `(a, -b)` with energy `-energy`.
    pub fn conjugate_w(&self) -> Self {
        let signs = self.lattice.w_signs();
        Self {
            lattice: self.lattice.clone(),
            u: self.u.iter().zip(&signs).map(|(x, s)| x * s).collect(),
            orientation: self.orientation.flipped(),
            energy: -self.energy,
            ..self.clone()
        }
    }
}

/// `(c1, c2, β) = (min |u|, max |u|, (c2/c1)²)` over the interior core.
pub fn regularity_constants(gs: &GroundState) -> (f64, f64, f64) {
    let core = gs.lattice.interior_core();
    let (c1, c2) = core.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &i| {
        let x = gs.u[i].abs();
        (lo.min(x), hi.max(x))
    });
    (c1, c2, (c2 / c1).powi(2))
}

/// Floquet solution of shifted periodic parameters at a band edge, known on
/// all of ℤ through `u_{n+p} = μ u_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSolution {
    /// `u_0, …, u_{p-1}`.
    pub values: Vec<f64>,
    /// Floquet multiplier `μ = ±1`.
    pub multiplier: f64,
    pub orientation: Orientation,
    /// Parameters after the edge shift; `u` solves their zero-energy equation.
    pub coefficients: PeriodicCoefficients,
}

impl FloquetSolution {
    pub fn at(&self, n: i64) -> f64 {
        let p = self.values.len() as i64;
        let q = n.div_euclid(p);
        let r = n.rem_euclid(p) as usize;
        let sign = if self.multiplier < 0.0 && q.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        };
        sign * self.values[r]
    }

    /// `|a_n u_{n+1} + a_{n-1} u_{n-1} + b_n u_n|` at site `n`.
    pub fn residual_at(&self, n: i64) -> f64 {
        let c = &self.coefficients;
        (c.a_at(n) * self.at(n + 1) + c.a_at(n - 1) * self.at(n - 1) + c.b_at(n) * self.at(n)).abs()
    }

    /// Sup of the residual over one period (hence over ℤ).
    pub fn residual(&self) -> f64 {
        (0..self.values.len() as i64)
            .map(|n| self.residual_at(n))
            .fold(0.0, f64::max)
    }

    /// Whole-line `(c1, c2, β)`: extremes of `|u|` over one period.
    pub fn regularity(&self) -> (f64, f64, f64) {
        let (c1, c2) = self
            .values
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
                (lo.min(x.abs()), hi.max(x.abs()))
            });
        (c1, c2, (c2 / c1).powi(2))
    }

    /// Samples the solution on a one-dimensional box, normalised so that the
    /// minimum of `|u|` over the interior core is 1.
    pub fn on_box(&self, lattice: &LatticeBox) -> Result<GroundState> {
        if lattice.dim() != 1 {
            return Err(Error::NotPeriodic(
                "Floquet solutions live on one-dimensional boxes".into(),
            ));
        }
        let raw: Vec<f64> = (0..lattice.len())
            .map(|i| self.at(lattice.coord(i)[0]))
            .collect();
        let norm = lattice
            .interior_core()
            .iter()
            .map(|&i| raw[i].abs())
            .fold(f64::INFINITY, f64::min);
        let u: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let residual = (0..lattice.len())
            .filter(|&i| lattice.is_interior(i))
            .map(|i| self.residual_at(lattice.coord(i)[0]) / norm)
            .fold(0.0, f64::max);
        GroundState::new(lattice.clone(), u, self.orientation, 0.0, residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeState {
    /// The requested spectral edge `s`; the solution belongs to `b - s`.
    pub edge: f64,
    pub solution: FloquetSolution,
    /// Band structure of the unshifted parameters.
    pub floquet: FloquetData,
}

/// Band-edge solution of periodic parameters. At the top edge the solution
/// is positive and periodic; the bottom edge is obtained from the top edge
/// of the `W`-conjugated parameters and is alternating positive.
pub fn periodic_edge_state(p: &PeriodicCoefficients, edge: SpectralEdge) -> Result<EdgeState> {
    match edge {
        SpectralEdge::Top => {
            let floquet = floquet_data(p)?;
            let s = floquet.top();
            let solution = top_edge_solution(p, s)?;
            Ok(EdgeState {
                edge: s,
                solution,
                floquet,
            })
        }
        SpectralEdge::Bottom => {
            let dual = periodic_edge_state(&p.conjugate_w(), SpectralEdge::Top)?;
            let s = -dual.edge;
            let period = p.period();
            let values = dual
                .solution
                .values
                .iter()
                .enumerate()
                .map(|(r, x)| if r % 2 == 0 { *x } else { -x })
                .collect();
            let solution = FloquetSolution {
                values,
                multiplier: if period.is_multiple_of(2) { 1.0 } else { -1.0 },
                orientation: Orientation::AlternatingPositive,
                coefficients: p.shifted(s),
            };
            Ok(EdgeState {
                edge: s,
                solution,
                floquet: floquet_data(p)?,
            })
        }
    }
}

fn top_edge_solution(p: &PeriodicCoefficients, s: f64) -> Result<FloquetSolution> {
    let shifted = p.shifted(s);
    let m = monodromy(&shifted, 0.0);
    // null vector of M - I; take the better conditioned of the two rows
    let v1 = [m[0][1], 1.0 - m[0][0]];
    let v2 = [1.0 - m[1][1], m[1][0]];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let (u0, u_prev) = if n1 >= n2 {
        (v1[0], v1[1])
    } else {
        (v2[0], v2[1])
    };
    if n1.max(n2) == 0.0 {
        return Err(Error::EdgeSolveFailure(
            "monodromy is the identity at the top edge".into(),
        ));
    }
    let period = p.period();
    let mut values = Vec::with_capacity(period);
    let (mut cur, mut prev) = (u0, u_prev);
    for n in 0..period as i64 {
        values.push(cur);
        let next = (-shifted.b_at(n) * cur - shifted.a_at(n - 1) * prev) / shifted.a_at(n);
        prev = cur;
        cur = next;
    }
    let sign = if values[0] < 0.0 { -1.0 } else { 1.0 };
    for (i, x) in values.iter_mut().enumerate() {
        *x *= sign;
        if *x <= 0.0 {
            return Err(Error::SignFailure { index: i, value: *x });
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.iter_mut().for_each(|x| *x /= min);
    Ok(FloquetSolution {
        values,
        multiplier: 1.0,
        orientation: Orientation::Positive,
        coefficients: shifted,
    })
}

/// Top eigenvector of the truncated operator, normalised to `min |u| = 1`
/// on the interior core. `tol` bounds the eigen-residual relative to
/// `scale(J)·max u`.
pub fn generic_ground_state(op: &JacobiOperator, tol: f64) -> Result<GroundState> {
    let spec = eig_extreme_vectors(op, 1, Side::FromTop, 0.0)?;
    let lambda = spec.eigenvalues[0];
    let mut v = spec
        .vectors
        .and_then(|mut vs| vs.pop())
        .ok_or_else(|| Error::NoConvergence("no eigenvector returned".into()))?;
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    if let Some((i, &x)) = v.iter().enumerate().find(|(_, &x)| x <= 0.0) {
        return Err(Error::SignFailure { index: i, value: x });
    }
    let lattice = op.lattice();
    let norm = lattice
        .interior_core()
        .iter()
        .map(|&i| v[i])
        .fold(f64::INFINITY, f64::min);
    let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let ju = op.apply(&u)?;
    let residual = (0..u.len())
        .filter(|&i| lattice.is_interior(i))
        .map(|i| (ju[i] - lambda * u[i]).abs())
        .fold(0.0, f64::max);
    let umax = u.iter().copied().fold(0.0, f64::max);
    let allowed = tol * op.scale().max(1.0) * umax;
    if residual > allowed {
        return Err(Error::NoConvergence(format!(
            "eigen-residual {residual:e} exceeds {allowed:e}"
        )));
    }
    GroundState::new(lattice.clone(), u, Orientation::Positive, lambda, residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConstants {
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub gamma_minus: f64,
    pub eta: f64,
    pub beta: f64,
}

/// `β± = sup/inf (u⁰/u¹)²`, `γ₋ = inf a⁰u⁰u⁰ / a¹u¹u¹` over edges,
/// `η = γ₋/β₋`, `β = β₊/β₋`, all taken over the interior core with moduli.
pub fn comparison_constants(
    gs0: &GroundState,
    j0: &JacobiOperator,
    gs1: &GroundState,
    j1: &JacobiOperator,
) -> Result<ComparisonConstants> {
    let lattice = &gs0.lattice;
    if &gs1.lattice != lattice || j0.lattice() != lattice || j1.lattice() != lattice {
        return Err(Error::BoxMismatch);
    }
    if gs0.orientation != gs1.orientation {
        return Err(Error::OrientationMismatch);
    }
    let mut beta_plus = 0.0f64;
    let mut beta_minus = f64::INFINITY;
    for i in lattice.interior_core() {
        let r = (gs0.u[i] / gs1.u[i]).powi(2);
        beta_plus = beta_plus.max(r);
        beta_minus = beta_minus.min(r);
    }
    let mut gamma_minus = f64::INFINITY;
    for (i, j, axis) in lattice.edges() {
        if !(lattice.in_core(i) && lattice.in_core(j)) {
            continue;
        }
        let num = j0.hopping(axis)[i] * (gs0.u[i] * gs0.u[j]).abs();
        let den = j1.hopping(axis)[i] * (gs1.u[i] * gs1.u[j]).abs();
        gamma_minus = gamma_minus.min(num / den);
    }
    Ok(ComparisonConstants {
        beta_plus,
        beta_minus,
        gamma_minus,
        eta: gamma_minus / beta_minus,
        beta: beta_plus / beta_minus,
    })
}
