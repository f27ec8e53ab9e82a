//! Jacobi operators on finite boxes: coefficient sources, assembly,
//! matrix-vector products, perturbations and the sign conjugation `W`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coord, Edge, LatticeBox};

/// One period of one-dimensional Jacobi parameters. `a[i]` is the hopping on
/// the edge `{n, n+1}` and `b[i]` the potential at `n`, for `n ≡ i (mod p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCoefficients {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PeriodicCoefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::NotPeriodic(format!(
                "a has {} entries and b has {}",
                a.len(),
                b.len()
            )));
        }
        for &x in a.iter().chain(&b) {
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
        }
        if let Some((i, &x)) = a.iter().enumerate().find(|(_, &x)| x <= 0.0) {
            return Err(Error::NonpositiveA {
                lo: [i as i64, 0],
                hi: [i as i64 + 1, 0],
                value: x,
            });
        }
        Ok(Self { a, b })
    }

    /// `a ≡ 1`, `b ≡ 0`.
    pub fn free() -> Self {
        Self {
            a: vec![1.0],
            b: vec![0.0],
        }
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Hopping on the edge `{n, n+1}`.
    pub fn a_at(&self, n: i64) -> f64 {
        self.a[n.rem_euclid(self.period() as i64) as usize]
    }

    pub fn b_at(&self, n: i64) -> f64 {
        self.b[n.rem_euclid(self.period() as i64) as usize]
    }

    pub fn shifted(&self, s: f64) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.iter().map(|b| b - s).collect(),
        }
    }

    /// Parameters of `W J W⁻¹ = -J(a, -b)`, i.e. `(a, -b)`.
    pub fn conjugate_w(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.iter().map(|b| -b).collect(),
        }
    }

    pub fn sup_a(&self) -> f64 {
        self.a.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_abs_b(&self) -> f64 {
        self.b.iter().map(|b| b.abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self) -> f64 {
        self.sup_a() + self.sup_abs_b()
    }
}

/// Where the coefficients of an operator come from.
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiCoefficients {
    /// Same `a` on every edge and `b` on every site, any dimension.
    Constant { a: f64, b: f64 },
    Periodic(PeriodicCoefficients),
    /// Explicit maps; sites absent from `b` carry zero potential, edges absent
    /// from `a` are an error when they fall inside the box.
    Explicit {
        a: BTreeMap<Edge, f64>,
        b: BTreeMap<Coord, f64>,
    },
}

impl JacobiCoefficients {
    pub fn free() -> Self {
        Self::Constant { a: 1.0, b: 0.0 }
    }

    fn a_on(&self, e: &Edge) -> Option<f64> {
        match self {
            Self::Constant { a, .. } => Some(*a),
            Self::Periodic(p) => Some(p.a_at(e.lo[0])),
            Self::Explicit { a, .. } => a.get(e).copied(),
        }
    }

    fn b_on(&self, c: Coord) -> f64 {
        match self {
            Self::Constant { b, .. } => *b,
            Self::Periodic(p) => p.b_at(c[0]),
            Self::Explicit { b, .. } => b.get(&c).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Free,
    Periodic,
    Discretized { h: f64 },
    Perturbed,
    Custom,
}

/// The truncation of `(Jφ)_ℓ = Σ a_{ℓm} φ_m + b_ℓ φ_ℓ` to a box.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOperator {
    lattice: LatticeBox,
    diag: Vec<f64>,
    /// `hop[axis][i]` couples `i` to its forward neighbour along `axis`;
    /// zero when that neighbour is outside the box.
    hop: [Vec<f64>; 2],
    periodic: Option<PeriodicCoefficients>,
    provenance: Provenance,
}

pub fn build_operator(coeffs: &JacobiCoefficients, lattice: &LatticeBox) -> Result<JacobiOperator> {
    if matches!(coeffs, JacobiCoefficients::Periodic(_)) && lattice.dim() != 1 {
        return Err(Error::NotPeriodic(
            "periodic coefficients are one-dimensional".into(),
        ));
    }
    let n = lattice.len();
    let mut diag = vec![0.0; n];
    let mut hop = [vec![0.0; n], vec![0.0; n]];
    for (i, d) in diag.iter_mut().enumerate() {
        *d = coeffs.b_on(lattice.coord(i));
    }
    for (i, j, axis) in lattice.edges() {
        let e = Edge {
            lo: lattice.coord(i),
            hi: lattice.coord(j),
        };
        let a = coeffs.a_on(&e).ok_or(Error::MissingEdge(e.lo, e.hi))?;
        hop[axis][i] = a;
    }
    let provenance = match coeffs {
        JacobiCoefficients::Constant { a, b } if *a == 1.0 && *b == 0.0 => Provenance::Free,
        JacobiCoefficients::Constant { .. } | JacobiCoefficients::Periodic(_) => {
            Provenance::Periodic
        }
        JacobiCoefficients::Explicit { .. } => Provenance::Custom,
    };
    let periodic = match coeffs {
        JacobiCoefficients::Periodic(p) => Some(p.clone()),
        JacobiCoefficients::Constant { a, b } if lattice.dim() == 1 => {
            Some(PeriodicCoefficients::new(vec![*a], vec![*b])?)
        }
        _ => None,
    };
    JacobiOperator::from_parts(lattice.clone(), diag, hop, periodic, provenance)
}

impl JacobiOperator {
    fn from_parts(
        lattice: LatticeBox,
        diag: Vec<f64>,
        hop: [Vec<f64>; 2],
        periodic: Option<PeriodicCoefficients>,
        provenance: Provenance,
    ) -> Result<Self> {
        let op = Self {
            lattice,
            diag,
            hop,
            periodic,
            provenance,
        };
        op.validate()?;
        Ok(op)
    }

    fn validate(&self) -> Result<()> {
        if let Some(&x) = self.diag.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(x));
        }
        for (i, j, axis) in self.lattice.edges() {
            let a = self.hop[axis][i];
            if !a.is_finite() {
                return Err(Error::NonFinite(a));
            }
            if a <= 0.0 {
                return Err(Error::NonpositiveA {
                    lo: self.lattice.coord(i),
                    hi: self.lattice.coord(j),
                    value: a,
                });
            }
        }
        Ok(())
    }

    /// Operator with explicitly given diagonal and forward hoppings.
    pub fn from_arrays(lattice: LatticeBox, diag: Vec<f64>, hop: [Vec<f64>; 2]) -> Result<Self> {
        let n = lattice.len();
        for len in [diag.len(), hop[0].len(), hop[1].len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        let mut hop = hop;
        // entries without an in-box forward neighbour are meaningless; zero them
        for axis in 0..2 {
            for i in 0..n {
                if axis >= lattice.dim() || lattice.step(i, axis, true).is_none() {
                    hop[axis][i] = 0.0;
                }
            }
        }
        Self::from_parts(lattice, diag, hop, None, Provenance::Custom)
    }

    /// One-dimensional operator on `lo..=lo+n-1` from a diagonal and `n-1`
    /// off-diagonal entries.
    pub fn tridiagonal(lo: i64, diag: Vec<f64>, off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::EmptyRange {
                axis: 0,
                lo,
                hi: lo - 1,
            });
        }
        if off.len() + 1 != n {
            return Err(Error::LengthMismatch {
                expected: n - 1,
                got: off.len(),
            });
        }
        let lattice = LatticeBox::line(lo, lo + n as i64 - 1)?;
        let mut h = vec![0.0; n];
        h[..n - 1].copy_from_slice(off);
        Self::from_parts(lattice, diag, [h, vec![0.0; n]], None, Provenance::Custom)
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    /// Periodic pattern the operator was generated from, if any. Kept in step
    /// with `shift` and `conjugate_w`; dropped by perturbations.
    pub fn periodic(&self) -> Option<&PeriodicCoefficients> {
        self.periodic.as_ref()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn hopping(&self, axis: usize) -> &[f64] {
        &self.hop[axis]
    }

    /// Off-diagonal of a one-dimensional operator (`n - 1` entries).
    pub fn off_diagonal(&self) -> &[f64] {
        let n = self.len();
        &self.hop[0][..n.saturating_sub(1)]
    }

    /// Coefficient between two flat indices; zero unless they are neighbours.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        for axis in 0..self.dim() {
            if self.lattice.step(i, axis, true) == Some(j) {
                return self.hop[axis][i];
            }
            if self.lattice.step(j, axis, true) == Some(i) {
                return self.hop[axis][j];
            }
        }
        0.0
    }

    pub fn b(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// In-box edges with their coefficient, each once.
    pub fn edge_coefficients(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.lattice
            .edges()
            .map(move |(i, j, axis)| (i, j, self.hop[axis][i]))
    }

    pub fn sup_a(&self) -> f64 {
        self.edge_coefficients().map(|(_, _, a)| a).fold(0.0, f64::max)
    }

    pub fn sup_abs_b(&self) -> f64 {
        self.diag.iter().map(|b| b.abs()).fold(0.0, f64::max)
    }

    /// `sup a + sup |b|`, the natural size of the operator.
    pub fn scale(&self) -> f64 {
        self.sup_a() + self.sup_abs_b()
    }

    /// Gershgorin bracket `[min b - 2ν sup a, max b + 2ν sup a]`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.dim() as f64 * self.sup_a();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - r, hi + r)
    }

    pub fn apply(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if phi.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: phi.len(),
            });
        }
        let mut out: Vec<f64> = self.diag.iter().zip(phi).map(|(b, p)| b * p).collect();
        for (i, j, axis) in self.lattice.edges() {
            let a = self.hop[axis][i];
            out[i] += a * phi[j];
            out[j] += a * phi[i];
        }
        Ok(out)
    }

    /// `⟨φ, Jψ⟩`.
    pub fn form(&self, phi: &[f64], psi: &[f64]) -> Result<f64> {
        let jpsi = self.apply(psi)?;
        Ok(phi.iter().zip(&jpsi).map(|(x, y)| x * y).sum())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, j, a) in self.edge_coefficients() {
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
        m
    }

    /// `J(a, b) ↦ J(a, -b)`, so that `W M(J) W = -M(J')`.
    pub fn conjugate_w(&self) -> Self {
        Self {
            lattice: self.lattice.clone(),
            diag: self.diag.iter().map(|b| -b).collect(),
            hop: self.hop.clone(),
            periodic: self.periodic.as_ref().map(|p| p.conjugate_w()),
            provenance: self.provenance,
        }
    }

    /// `b ← b - s`; the spectrum moves by `-s`.
    pub fn shift(&self, s: f64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            diag: self.diag.iter().map(|b| b - s).collect(),
            hop: self.hop.clone(),
            periodic: self.periodic.as_ref().map(|p| p.shifted(s)),
            provenance: self.provenance,
        }
    }

    /// Operator with coefficients `(η a, η b + κ w)`.
    pub fn scaled_plus_potential(&self, eta: f64, kappa: f64, w: &[f64]) -> Result<Self> {
        let n = self.len();
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: w.len(),
            });
        }
        let diag = self
            .diag
            .iter()
            .zip(w)
            .map(|(b, w)| eta * b + kappa * w)
            .collect();
        let hop = [
            self.hop[0].iter().map(|a| eta * a).collect(),
            self.hop[1].iter().map(|a| eta * a).collect(),
        ];
        Self::from_parts(self.lattice.clone(), diag, hop, None, Provenance::Custom)
    }

    /// Same operator with a different site potential.
    pub fn with_diagonal(&self, diag: Vec<f64>) -> Result<Self> {
        if diag.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: diag.len(),
            });
        }
        Self::from_parts(
            self.lattice.clone(),
            diag,
            self.hop.clone(),
            None,
            Provenance::Custom,
        )
    }
}

/// Finitely supported change of the Jacobi parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub da: BTreeMap<Edge, f64>,
    pub db: BTreeMap<Coord, f64>,
}

impl Perturbation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_db(mut self, site: Coord, value: f64) -> Self {
        *self.db.entry(site).or_insert(0.0) += value;
        self
    }

    pub fn with_da(mut self, edge: Edge, value: f64) -> Self {
        *self.da.entry(edge).or_insert(0.0) += value;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.da.values().all(|&x| x == 0.0) && self.db.values().all(|&x| x == 0.0)
    }

    /// Sites carrying a `δb` or touched by a `δa` edge.
    pub fn support(&self) -> BTreeSet<Coord> {
        self.db
            .keys()
            .copied()
            .chain(self.da.keys().flat_map(|e| e.ends()))
            .collect()
    }

    /// Smallest axis-aligned box containing the support, as `(min, max)` corners.
    pub fn bounding_box(&self) -> Option<(Coord, Coord)> {
        let support = self.support();
        let mut it = support.iter();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), c| {
            (
                [lo[0].min(c[0]), lo[1].min(c[1])],
                [hi[0].max(c[0]), hi[1].max(c[1])],
            )
        }))
    }

    /// `Σ|δa| + Σ|δb|`.
    pub fn l1_norm(&self) -> f64 {
        self.da.values().map(|x| x.abs()).sum::<f64>() + self.db.values().map(|x| x.abs()).sum::<f64>()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            da: self.da.iter().map(|(e, v)| (*e, t * v)).collect(),
            db: self.db.iter().map(|(c, v)| (*c, t * v)).collect(),
        }
    }

    /// Image under `W`: `δb ↦ -δb`, `δa` unchanged.
    pub fn conjugate_w(&self) -> Self {
        Self {
            da: self.da.clone(),
            db: self.db.iter().map(|(c, v)| (*c, -v)).collect(),
        }
    }
}

/// `w_ℓ = |δb_ℓ| + Σ_{|m-ℓ|=1} |δa_{ℓm}|`.
pub fn dominating_potential(delta: &Perturbation) -> BTreeMap<Coord, f64> {
    let mut w = BTreeMap::new();
    for (c, v) in &delta.db {
        *w.entry(*c).or_insert(0.0) += v.abs();
    }
    for (e, v) in &delta.da {
        for c in e.ends() {
            *w.entry(c).or_insert(0.0) += v.abs();
        }
    }
    w
}

/// Site map laid out on a box; entries outside the box are dropped.
pub fn site_map_on(lattice: &LatticeBox, map: &BTreeMap<Coord, f64>) -> Vec<f64> {
    let mut out = vec![0.0; lattice.len()];
    for (c, v) in map {
        if let Some(i) = lattice.index(*c) {
            out[i] += v;
        }
    }
    out
}

pub fn apply_perturbation(op: &JacobiOperator, delta: &Perturbation) -> Result<JacobiOperator> {
    let lattice = op.lattice();
    for c in delta.support() {
        match lattice.index(c) {
            Some(i) if lattice.depth(i) >= 1 => {}
            _ => return Err(Error::SupportOutsideBox(c)),
        }
    }
    if delta.is_empty() {
        return Ok(op.clone());
    }
    let mut diag = op.diag.clone();
    let mut hop = op.hop.clone();
    for (c, v) in &delta.db {
        diag[lattice.index(*c).unwrap()] += v;
    }
    for (e, v) in &delta.da {
        let i = lattice.index(e.lo).unwrap();
        let axis = if e.lo[0] != e.hi[0] { 0 } else { 1 };
        let a = hop[axis][i] + v;
        if a <= 0.0 {
            return Err(Error::NonpositiveA {
                lo: e.lo,
                hi: e.hi,
                value: a,
            });
        }
        hop[axis][i] = a;
    }
    JacobiOperator::from_parts(lattice.clone(), diag, hop, None, Provenance::Perturbed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn free_line(lo: i64, hi: i64, b: f64) -> JacobiOperator {
        build_operator(
            &JacobiCoefficients::Constant { a: 1.0, b },
            &LatticeBox::line(lo, hi).unwrap(),
        )
        .unwrap()
    }

    fn random_op(rng: &mut ChaCha8Rng, lattice: LatticeBox) -> JacobiOperator {
        let n = lattice.len();
        let diag = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let hop = [
            (0..n).map(|_| rng.random_range(0.2..2.0)).collect(),
            (0..n).map(|_| rng.random_range(0.2..2.0)).collect(),
        ];
        JacobiOperator::from_arrays(lattice, diag, hop).unwrap()
    }

    #[test]
    fn free_operator_matrix() {
        let m = free_line(0, 4, 0.0).to_dense();
        for i in 0..5usize {
            for j in 0..5 {
                let expected = if i.abs_diff(j) == 1 { 1.0 } else { 0.0 };
                assert_eq!(m[(i, j)], expected);
            }
        }
    }

    #[test]
    fn shifted_free_diagonal() {
        let op = free_line(0, 99, -2.0);
        assert!(op.diagonal().iter().all(|&b| b == -2.0));
    }

    #[test]
    fn period_two_matches_direct_assembly() {
        let p = PeriodicCoefficients::new(vec![1.0, 1.0], vec![0.0, -1.0]).unwrap();
        let lattice = LatticeBox::line(0, 199).unwrap();
        let m = build_operator(&JacobiCoefficients::Periodic(p), &lattice)
            .unwrap()
            .to_dense();
        let mut oracle = DMatrix::<f64>::zeros(200, 200);
        for i in 0..200 {
            oracle[(i, i)] = if i % 2 == 0 { 0.0 } else { -1.0 };
            if i + 1 < 200 {
                oracle[(i, i + 1)] = 1.0;
                oracle[(i + 1, i)] = 1.0;
            }
        }
        assert_eq!(m, oracle);
    }

    #[test]
    fn missing_and_nonpositive_edges() {
        let lattice = LatticeBox::line(0, 2).unwrap();
        let mut a = BTreeMap::new();
        a.insert(Edge::line(0), 1.0);
        let coeffs = JacobiCoefficients::Explicit {
            a: a.clone(),
            b: BTreeMap::new(),
        };
        assert_eq!(
            build_operator(&coeffs, &lattice),
            Err(Error::MissingEdge([1, 0], [2, 0]))
        );
        a.insert(Edge::line(1), -0.5);
        let coeffs = JacobiCoefficients::Explicit { a, b: BTreeMap::new() };
        assert!(matches!(
            build_operator(&coeffs, &lattice),
            Err(Error::NonpositiveA { .. })
        ));
    }

    #[test]
    fn impulse_response() {
        let op = free_line(0, 10, 0.0);
        let mut phi = vec![0.0; 11];
        phi[5] = 1.0;
        let out = op.apply(&phi).unwrap();
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, if i == 4 || i == 6 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn constant_annihilated_in_interior() {
        let op = free_line(0, 20, -2.0);
        let out = op.apply(&[1.0; 21]).unwrap();
        assert_eq!(out[0], -1.0);
        assert_eq!(out[20], -1.0);
        assert!(out[1..20].iter().all(|&v| v == 0.0));
        assert!(matches!(
            op.apply(&[1.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn apply_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lattice in [
            LatticeBox::line(0, 49).unwrap(),
            LatticeBox::centered_rect(7, 8).unwrap(),
        ] {
            let op = random_op(&mut rng, lattice);
            let phi: Vec<f64> = (0..op.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let got = op.apply(&phi).unwrap();
            let oracle = op.to_dense() * nalgebra::DVector::from_vec(phi);
            for (g, o) in got.iter().zip(oracle.iter()) {
                assert!((g - o).abs() <= 1e-14 * o.abs().max(1.0));
            }
        }
    }

    #[test]
    fn w_conjugation_identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = random_op(&mut rng, LatticeBox::centered_line(30).unwrap());
        let w = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            op.lattice().w_signs(),
        ));
        let lhs = &w * op.to_dense() * &w;
        let rhs = -op.conjugate_w().to_dense();
        assert_eq!(lhs, rhs);
        assert_eq!(op.conjugate_w().conjugate_w(), op);
    }

    #[test]
    fn w_conjugation_flips_sign_of_b() {
        let op = free_line(0, 5, -2.0).conjugate_w();
        assert!(op.diagonal().iter().all(|&b| b == 2.0));
        assert!(op.edge_coefficients().all(|(_, _, a)| a == 1.0));
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let op = free_line(-3, 3, 0.5);
        assert_eq!(op.shift(0.0), op);
        let shifted = free_line(0, 9, 0.0).shift(2.0);
        assert!(shifted.diagonal().iter().all(|&b| b == -2.0));
    }

    #[test]
    fn dominating_potential_examples() {
        let d = Perturbation::new().with_db([0, 0], -3.0);
        let w = dominating_potential(&d);
        assert_eq!(w.len(), 1);
        assert_eq!(w[&[0, 0]], 3.0);

        let d = Perturbation::new().with_da(Edge::line(0), 0.5);
        let w = dominating_potential(&d);
        assert_eq!(w[&[0, 0]], 0.5);
        assert_eq!(w[&[1, 0]], 0.5);
    }

    #[test]
    fn dominating_potential_matches_per_site_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut d = Perturbation::new();
        for n in 0..10 {
            d = d.with_db([n, 0], rng.random_range(-2.0..2.0));
            if n < 9 {
                d = d.with_da(Edge::line(n), rng.random_range(-0.4..0.4));
            }
        }
        let w = dominating_potential(&d);
        for n in 0..10i64 {
            let mut oracle = d.db[&[n, 0]].abs();
            if n > 0 {
                oracle += d.da[&Edge::line(n - 1)].abs();
            }
            if n < 9 {
                oracle += d.da[&Edge::line(n)].abs();
            }
            assert!((w[&[n, 0]] - oracle).abs() < 1e-15);
        }
    }

    #[test]
    fn perturbation_application() {
        let op = free_line(-5, 5, 0.0);
        assert_eq!(apply_perturbation(&op, &Perturbation::new()).unwrap(), op);

        let p = apply_perturbation(&op, &Perturbation::new().with_db([0, 0], 1.5)).unwrap();
        let i0 = op.lattice().index([0, 0]).unwrap();
        for i in 0..op.len() {
            let expected = if i == i0 { 1.5 } else { 0.0 };
            assert_eq!(p.b(i), expected);
        }
        assert_eq!(p.off_diagonal(), op.off_diagonal());

        let bad = Perturbation::new().with_da(Edge::line(0), -1.0);
        assert!(matches!(
            apply_perturbation(&op, &bad),
            Err(Error::NonpositiveA { .. })
        ));
        let edge = Perturbation::new().with_db([5, 0], 1.0);
        assert_eq!(
            apply_perturbation(&op, &edge),
            Err(Error::SupportOutsideBox([5, 0]))
        );
    }

    #[test]
    fn periodic_pattern_follows_shift_and_conjugation() {
        let p = PeriodicCoefficients::new(vec![1.0, 2.0], vec![0.5, -1.0]).unwrap();
        let op = build_operator(
            &JacobiCoefficients::Periodic(p),
            &LatticeBox::line(-4, 5).unwrap(),
        )
        .unwrap();
        let moved = op.shift(0.25).conjugate_w();
        let pat = moved.periodic().unwrap();
        for i in 0..op.len() {
            let n = op.lattice().coord(i)[0];
            assert_eq!(moved.b(i), pat.b_at(n));
        }
    }
}
