//! Finite-difference discretisation of `-d²/dx² + V0 + V` on an interval,
//! written in the top-edge Jacobi convention (the operator is `-H`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::LatticeBox;
use crate::operator::{JacobiOperator, Perturbation, Provenance};
use crate::potential::check_nonpositive;

/// Relative tolerance for `(x_hi - x_lo)/h` being an integer.
const MESH_TOL: f64 = 1e-9;

/// Grid for an interval: lattice coordinate `n` sits at
/// `x_n = x_lo + (n - n_lo)·h`, with `n_lo = round(x_lo/h)` so that `x_n = n·h`
/// whenever `x_lo` is itself a grid multiple. The Dirichlet end points carry
/// no site; the box is `n_lo + 1 ..= n_lo + M - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub h: f64,
    pub x_lo: f64,
    pub n_lo: i64,
    pub cells: usize,
}

impl Mesh {
    pub fn new(h: f64, (x_lo, x_hi): (f64, f64)) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::BadMesh(format!("mesh width {h} must be positive")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::BadMesh(format!("empty interval [{x_lo}, {x_hi}]")));
        }
        let ratio = (x_hi - x_lo) / h;
        let cells = ratio.round();
        if (ratio - cells).abs() > MESH_TOL * ratio.max(1.0) {
            return Err(Error::BadMesh(format!(
                "interval length {} is not a multiple of h = {h}",
                x_hi - x_lo
            )));
        }
        if cells < 2.0 {
            return Err(Error::BadMesh("interval holds no interior grid point".into()));
        }
        Ok(Self {
            h,
            x_lo,
            n_lo: (x_lo / h).round() as i64,
            cells: cells as usize,
        })
    }

    pub fn lattice(&self) -> LatticeBox {
        LatticeBox::line(self.n_lo + 1, self.n_lo + self.cells as i64 - 1)
            .expect("at least one interior point")
    }

    pub fn x(&self, n: i64) -> f64 {
        self.x_lo + (n - self.n_lo) as f64 * self.h
    }
}

/// `J0` with `a ≡ 1/h²`, `b_n = -2/h² - V0(x_n)`, and `δb_n = -V(x_n) ≥ 0`.
/// Positive eigenvalues of `J0 + δ` are negated eigenvalues of `H`.
pub fn discretize_schrodinger(
    v0: impl Fn(f64) -> f64,
    v: impl Fn(f64) -> f64,
    h: f64,
    interval: (f64, f64),
) -> Result<(JacobiOperator, Perturbation)> {
    let mesh = Mesh::new(h, interval)?;
    let lattice = mesh.lattice();
    let inv = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(lattice.len());
    let mut db = BTreeMap::new();
    for i in 0..lattice.len() {
        let n = lattice.coord(i)[0];
        let x = mesh.x(n);
        let b = -2.0 * inv - v0(x);
        if !b.is_finite() {
            return Err(Error::NonFinite(b));
        }
        diag.push(b);
        let vx = v(x);
        if !vx.is_finite() {
            return Err(Error::NonFinite(vx));
        }
        check_nonpositive(x, vx)?;
        if vx != 0.0 {
            db.insert([n, 0], -vx);
        }
    }
    let lo = lattice.coord(0)[0];
    let off = vec![inv; lattice.len() - 1];
    let op = JacobiOperator::tridiagonal(lo, diag, &off)?
        .with_provenance(Provenance::Discretized { h });
    let mut delta = Perturbation::new();
    for (site, value) in db {
        delta = delta.with_db(site, value);
    }
    Ok((op, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{eig_extreme, Side};

    #[test]
    fn free_unit_mesh() {
        let (op, delta) = discretize_schrodinger(|_| 0.0, |_| 0.0, 1.0, (-5.0, 5.0)).unwrap();
        assert_eq!(op.lattice().axis_range(0), (-4, 4));
        assert!(op.diagonal().iter().all(|&b| b == -2.0));
        assert!(op.off_diagonal().iter().all(|&a| a == 1.0));
        assert!(delta.is_empty());
        assert_eq!(op.provenance(), Provenance::Discretized { h: 1.0 });
    }

    #[test]
    fn point_well() {
        let s = 0.7;
        let v = |x: f64| if x == 0.0 { -s } else { 0.0 };
        let (_, delta) = discretize_schrodinger(|_| 0.0, v, 1.0, (-5.0, 5.0)).unwrap();
        assert_eq!(delta, Perturbation::new().with_db([0, 0], s));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            discretize_schrodinger(|_| 0.0, |_| 0.0, 0.0, (0.0, 1.0)),
            Err(Error::BadMesh(_))
        ));
        assert!(matches!(
            discretize_schrodinger(|_| 0.0, |_| 0.0, 0.3, (0.0, 1.0)),
            Err(Error::BadMesh(_))
        ));
        assert!(matches!(
            discretize_schrodinger(|_| 0.0, |x: f64| x, 0.5, (-2.0, 2.0)),
            Err(Error::PositiveV { .. })
        ));
    }

    #[test]
    fn cosine_background_is_nonpositive() {
        let v0 = |x: f64| 1.0 - (std::f64::consts::TAU * x).cos();
        let (op, _) = discretize_schrodinger(v0, |_| 0.0, 0.01, (0.0, 50.0)).unwrap();
        let top = eig_extreme(&op, 1, Side::FromTop, 0.0).unwrap().eigenvalues[0];
        // the continuum ground energy of -d² + 1 - cos is positive, so -H < 0
        assert!(top < 0.0);
        assert!(top > -1.0);
    }
}
