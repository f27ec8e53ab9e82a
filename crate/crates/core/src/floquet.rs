//! Transfer matrices and the Floquet discriminant of periodic Jacobi
//! parameters on ℤ.
//!
//! A solution of `a_n u_{n+1} + a_{n-1} u_{n-1} + b_n u_n = λ u_n` is carried
//! from `(u_n, u_{n-1})` to `(u_{n+1}, u_n)` by
//!
//! ```text
//! T_n(λ) = [ (λ - b_n)/a_n   -a_{n-1}/a_n ]
//!          [       1              0      ]
//! ```
//!
//! and the monodromy over one period is `M(λ) = T_{p-1} ⋯ T_0`, with
//! `det M = 1`. The spectrum of the whole-line operator is the set where the
//! discriminant `Δ(λ) = tr M(λ)` satisfies `|Δ| ≤ 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::PeriodicCoefficients;

pub type Mat2 = [[f64; 2]; 2];

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

pub fn transfer_matrix(p: &PeriodicCoefficients, n: i64, lambda: f64) -> Mat2 {
    let a = p.a_at(n);
    let a_prev = p.a_at(n - 1);
    [[(lambda - p.b_at(n)) / a, -a_prev / a], [1.0, 0.0]]
}

/// `T_{p-1}(λ) ⋯ T_0(λ)`.
pub fn monodromy(p: &PeriodicCoefficients, lambda: f64) -> Mat2 {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for n in 0..p.period() as i64 {
        m = mul(&transfer_matrix(p, n, lambda), &m);
    }
    m
}

pub fn discriminant(p: &PeriodicCoefficients, lambda: f64) -> f64 {
    let m = monodromy(p, lambda);
    m[0][0] + m[1][1]
}

/// Closed spectral band `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn dist(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetData {
    pub period: usize,
    /// Sorted solutions of `Δ(λ) = ±2`; a closed gap contributes its
    /// touching point twice.
    pub edges: Vec<f64>,
    /// Bands in increasing order. Adjacent bands may touch.
    pub bands: Vec<Band>,
}

impl FloquetData {
    pub fn top(&self) -> f64 {
        self.bands.last().map(|b| b.hi).unwrap_or(f64::NAN)
    }

    pub fn bottom(&self) -> f64 {
        self.bands.first().map(|b| b.lo).unwrap_or(f64::NAN)
    }

    /// Convex hull of the spectrum.
    pub fn hull(&self) -> (f64, f64) {
        (self.bottom(), self.top())
    }

    /// Distance from `x` to the band set.
    pub fn dist(&self, x: f64) -> f64 {
        self.bands
            .iter()
            .map(|b| b.dist(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Bands with touching neighbours merged (within `tol`).
    pub fn union(&self, tol: f64) -> Vec<Band> {
        let mut out: Vec<Band> = Vec::new();
        for b in &self.bands {
            match out.last_mut() {
                Some(last) if b.lo <= last.hi + tol => last.hi = last.hi.max(b.hi),
                _ => out.push(*b),
            }
        }
        out
    }
}

/// Grid points per unit of period when bracketing band edges.
const SCAN_PER_PERIOD: usize = 10 * 100;
/// A local maximum of `|Δ|` within this distance of 2 is a closed gap.
const TOUCH_TOL: f64 = 1e-7;
/// A local maximum of `|Δ| - 2` above this is an open gap (rounding in `Δ`
/// near ±2 is a few ulps).
const GAP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    Start,
    End,
}

/// Band edges by scanning `|Δ| - 2` over the Gershgorin interval, bisecting
/// every sign change, and refining local extrema of `|Δ|` that might hide a
/// gap or band narrower than the grid.
pub fn floquet_data(p: &PeriodicCoefficients) -> Result<FloquetData> {
    let g = |x: f64| discriminant(p, x).abs() - 2.0;
    let lo_b = p.b().iter().copied().fold(f64::INFINITY, f64::min);
    let hi_b = p.b().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r = 2.0 * p.sup_a();
    let pad = 1e-3 * (hi_b - lo_b + 2.0 * r) + 1e-9 * p.scale().max(1.0);
    let (lo, hi) = (lo_b - r - pad, hi_b + r + pad);
    let m = SCAN_PER_PERIOD * p.period();
    let xs: Vec<f64> = (0..=m)
        .map(|i| lo + (hi - lo) * i as f64 / m as f64)
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    if gs[0] <= 0.0 || gs[m] <= 0.0 {
        return Err(Error::EdgeSolveFailure(
            "discriminant inside [-2, 2] at the end of the scan interval".into(),
        ));
    }

    let mut events: Vec<(f64, Event)> = Vec::new();
    for i in 0..m {
        let (x0, x1, g0, g1) = (xs[i], xs[i + 1], gs[i], gs[i + 1]);
        if g0 > 0.0 && g1 <= 0.0 {
            events.push((bisect_sign(&g, x0, x1), Event::Start));
        } else if g0 <= 0.0 && g1 > 0.0 {
            events.push((bisect_sign(&g, x0, x1), Event::End));
        }
    }
    for i in 1..m {
        let (gl, gc, gr) = (gs[i - 1], gs[i], gs[i + 1]);
        let (xl, xr) = (xs[i - 1], xs[i + 1]);
        if gl <= 0.0 && gc <= 0.0 && gr <= 0.0 && gc > gl && gc >= gr {
            // |Δ| peaks inside a band run: narrow gap or closed gap
            let (xm, gm) = golden_extremum(&g, xl, xr, true);
            if gm > GAP_TOL {
                events.push((bisect_sign(&g, xl, xm), Event::End));
                events.push((bisect_sign(&g, xm, xr), Event::Start));
            } else if gm > -TOUCH_TOL {
                events.push((xm, Event::End));
                events.push((xm, Event::Start));
            }
        } else if gl > 0.0 && gc > 0.0 && gr > 0.0 && gc < gl && gc <= gr {
            // |Δ| dips inside a gap run: possibly a band narrower than the grid
            let (xm, gm) = golden_extremum(&g, xl, xr, false);
            if gm <= 0.0 {
                events.push((bisect_sign(&g, xl, xm), Event::Start));
                events.push((bisect_sign(&g, xm, xr), Event::End));
            }
        }
    }
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then_with(|| (a.1 == Event::Start).cmp(&(b.1 == Event::Start)))
    });

    let mut bands = Vec::new();
    let mut open: Option<f64> = None;
    for (x, ev) in &events {
        match (ev, open) {
            (Event::Start, None) => open = Some(*x),
            (Event::End, Some(s)) => {
                bands.push(Band { lo: s, hi: *x });
                open = None;
            }
            _ => {
                return Err(Error::EdgeSolveFailure(format!(
                    "unbalanced band edge at λ = {x}"
                )))
            }
        }
    }
    if open.is_some() || bands.is_empty() {
        return Err(Error::EdgeSolveFailure("no closed band found".into()));
    }
    let edges = bands.iter().flat_map(|b| [b.lo, b.hi]).collect();
    Ok(FloquetData {
        period: p.period(),
        edges,
        bands,
    })
}

/// Point where `f` changes sign between `x0` and `x1` (sign of `f(x0)` is
/// taken as given), bisected until the bracket stops shrinking.
fn bisect_sign(f: &impl Fn(f64) -> f64, mut x0: f64, mut x1: f64) -> f64 {
    let s0 = f(x0) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (x0 + x1);
        if mid <= x0.min(x1) || mid >= x0.max(x1) {
            break;
        }
        if (f(mid) > 0.0) == s0 {
            x0 = mid;
        } else {
            x1 = mid;
        }
    }
    0.5 * (x0 + x1)
}

/// Golden-section search for the maximum (or minimum) of `f` on `[a, b]`.
fn golden_extremum(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
    let sign = if maximize { 1.0 } else { -1.0 };
    let h = |x: f64| sign * f(x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monodromy_is_unimodular() {
        let p = PeriodicCoefficients::new(vec![0.7, 1.3, 1.1], vec![0.2, -0.5, 0.9]).unwrap();
        for lambda in [-3.0, -0.4, 0.0, 1.7] {
            let m = monodromy(&p, lambda);
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!((det - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_band_is_minus_two_to_two() {
        let fd = floquet_data(&PeriodicCoefficients::free()).unwrap();
        assert_eq!(fd.bands.len(), 1);
        assert!((fd.bands[0].lo + 2.0).abs() < 1e-12);
        assert!((fd.bands[0].hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn period_two_constant_reduces_to_free() {
        let c = 0.3;
        let p = PeriodicCoefficients::new(vec![1.0, 1.0], vec![c, c]).unwrap();
        let fd = floquet_data(&p).unwrap();
        assert_eq!(fd.bands.len(), 2);
        let u = fd.union(1e-9);
        assert_eq!(u.len(), 1);
        assert!((u[0].lo - (c - 2.0)).abs() < 1e-9);
        assert!((u[0].hi - (c + 2.0)).abs() < 1e-9);
    }

    #[test]
    fn period_two_edges_solve_closed_form() {
        // Δ(λ) = λ(λ + 1) - 2 for a ≡ 1, b = (0, -1)
        let p = PeriodicCoefficients::new(vec![1.0, 1.0], vec![0.0, -1.0]).unwrap();
        let fd = floquet_data(&p).unwrap();
        let mut oracle = vec![
            (-1.0 - 17f64.sqrt()) / 2.0,
            -1.0,
            0.0,
            (-1.0 + 17f64.sqrt()) / 2.0,
        ];
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(fd.edges.len(), 4);
        for (e, o) in fd.edges.iter().zip(&oracle) {
            assert!((e - o).abs() < 1e-12, "{e} vs {o}");
        }
    }

    #[test]
    fn narrow_gap_is_resolved() {
        // b = (ε, -ε) opens a gap of width ~ 2ε at λ = 0
        let eps = 1e-6;
        let p = PeriodicCoefficients::new(vec![1.0, 1.0], vec![eps, -eps]).unwrap();
        let fd = floquet_data(&p).unwrap();
        assert_eq!(fd.bands.len(), 2);
        let gap = fd.bands[1].lo - fd.bands[0].hi;
        assert!((gap - 2.0 * eps).abs() < 1e-9, "gap {gap}");
    }
}
