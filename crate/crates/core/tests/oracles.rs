mod common;

use common::ql_eigenvalues;
use gsr_core::bounds::{
    band_spectrum, lt_sandwich_check, moment_sum, szego_sum, theorem41_certificate,
    theorem43_certificate,
};
use gsr_core::discretize::discretize_schrodinger;
use gsr_core::eigensolve::dense::dense_eigenvalues;
use gsr_core::eigensolve::{eig_extreme, extract_levels, ClampedLevels, Convention, Side};
use gsr_core::groundstate::{periodic_edge_state, SpectralEdge};
use gsr_core::potential::Potential;
use gsr_core::suite::edge_background;
use gsr_core::{
    apply_perturbation, build_operator, Edge, JacobiCoefficients, LatticeBox, PeriodicCoefficients,
    Perturbation,
};

fn period2() -> PeriodicCoefficients {
    PeriodicCoefficients::new(vec![1.0, 1.0], vec![0.0, -1.0]).unwrap()
}

#[test]
fn ql_reference_agrees_with_dense() {
    let op = build_operator(
        &JacobiCoefficients::Periodic(period2()),
        &LatticeBox::centered_line(300).unwrap(),
    )
    .unwrap();
    let ql = ql_eigenvalues(op.diagonal(), op.off_diagonal());
    let dense = dense_eigenvalues(&op).unwrap();
    for (a, b) in ql.iter().zip(&dense) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn period_two_bands_match_long_truncation() {
    let bands = band_spectrum(&JacobiCoefficients::Periodic(period2())).unwrap();
    let r = 17f64.sqrt();
    let expected = [(-1.0 - r) / 2.0, -1.0, 0.0, (r - 1.0) / 2.0];
    assert_eq!(bands.bands.len(), 2);
    let got = [bands.bands[0].lo, bands.bands[0].hi, bands.bands[1].lo, bands.bands[1].hi];
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-12, "{got:?}");
    }

    let op = build_operator(
        &JacobiCoefficients::Periodic(period2()),
        &LatticeBox::centered_line(4000).unwrap(),
    )
    .unwrap();
    let eig = ql_eigenvalues(op.diagonal(), op.off_diagonal());
    let outside: Vec<f64> = eig
        .iter()
        .copied()
        .filter(|&x| bands.bands.iter().all(|b| b.dist(x) > 1e-9))
        .collect();
    // Dirichlet ends can add at most one gap state each
    assert!(outside.len() <= 2, "{outside:?}");
    assert!(outside.iter().all(|&x| x > -1.0 && x < 0.0));
    // band edges are approached at the Dirichlet rate O(1/N²)
    assert!((eig[0] - expected[0]).abs() < 1e-5);
    assert!((eig[eig.len() - 1] - expected[3]).abs() < 1e-5);
    let lower: Vec<&f64> = eig.iter().filter(|&&x| x <= -1.0 + 1e-9).collect();
    let upper: Vec<&f64> = eig.iter().filter(|&&x| x >= -1e-9).collect();
    assert!(lower.len() >= 1999 && upper.len() >= 1999);
}

#[test]
fn equal_period_two_entries_reduce_to_shifted_free() {
    let c = 0.37;
    let p = PeriodicCoefficients::new(vec![1.0, 1.0], vec![c, c]).unwrap();
    let b = band_spectrum(&JacobiCoefficients::Periodic(p)).unwrap();
    assert!((b.hull.0 - (c - 2.0)).abs() < 1e-9);
    assert!((b.hull.1 - (c + 2.0)).abs() < 1e-9);
    let total: f64 = b.bands.iter().map(|band| band.hi - band.lo).sum();
    assert!((total - 4.0).abs() < 1e-6);
}

#[test]
fn single_site_bound_state_against_closed_form_and_dense() {
    let s = 1.5;
    let op = build_operator(
        &JacobiCoefficients::Constant { a: 1.0, b: -2.0 },
        &LatticeBox::centered_line(600).unwrap(),
    )
    .unwrap();
    let op = apply_perturbation(&op, &Perturbation::new().with_db([0, 0], s)).unwrap();
    let top = eig_extreme(&op, 1, Side::FromTop, 0.0).unwrap().eigenvalues[0];
    let closed = (s * s + 4.0f64).sqrt() - 2.0;
    assert!((top - closed).abs() < 1e-6);
    assert!((closed - 0.5).abs() < 1e-15);
    let dense = dense_eigenvalues(&op).unwrap();
    assert!((top - dense[dense.len() - 1]).abs() < 1e-12);
}

fn top_levels_dense(op: &gsr_core::JacobiOperator, k: usize) -> Vec<f64> {
    let mut ev = dense_eigenvalues(op).unwrap();
    ev.reverse();
    (0..k).map(|j| ev[j].max(0.0)).collect()
}

#[test]
fn period_two_versus_free_certificate_matches_dense() {
    let lattice = LatticeBox::centered_line(800).unwrap();
    let (j0, gs0) = edge_background(&period2(), SpectralEdge::Top, &lattice).unwrap();
    let (j1, gs1) = edge_background(&PeriodicCoefficients::free(), SpectralEdge::Top, &lattice).unwrap();
    let delta = Perturbation::new().with_db([0, 0], 2.0);
    let k = 5;
    let cert = theorem41_certificate(&j0, &gs0, &j1, &gs1, &delta, k).unwrap();
    assert!(cert.holds);

    let lhs = top_levels_dense(&apply_perturbation(&j0, &delta).unwrap(), k);
    let c = cert.constants;
    let w: Vec<f64> = (0..lattice.len())
        .map(|i| if lattice.coord(i) == [0, 0] { 2.0 } else { 0.0 })
        .collect();
    let rhs = top_levels_dense(&j1.scaled_plus_potential(c.eta, c.beta, &w).unwrap(), k);
    for (row, (l, r)) in cert.rows.iter().zip(lhs.iter().zip(&rhs)) {
        assert!((row.lhs - l).abs() < 1e-10);
        assert!((row.rhs - r).abs() < 1e-10);
    }

    // with u1 ≡ 1 the constants are extremes of the period-2 state
    let (c1, c2, _) = periodic_edge_state(&period2(), SpectralEdge::Top)
        .unwrap()
        .solution
        .regularity();
    let ratio = c2 / c1;
    assert!((c.beta - ratio * ratio).abs() < 1e-10);
}

#[test]
fn hopping_perturbation_spreads_to_both_ends() {
    let lattice = LatticeBox::centered_line(400).unwrap();
    let (j, gs) = edge_background(&PeriodicCoefficients::free(), SpectralEdge::Top, &lattice).unwrap();
    let delta = Perturbation::new().with_da(Edge::line(0), -0.4);
    let cert = theorem41_certificate(&j, &gs, &j, &gs, &delta, 3).unwrap();
    assert!(cert.holds);
    let w: Vec<f64> = (0..lattice.len())
        .map(|i| match lattice.coord(i) {
            [0, 0] | [1, 0] => 0.4,
            _ => 0.0,
        })
        .collect();
    let rhs = top_levels_dense(&j.scaled_plus_potential(1.0, 1.0, &w).unwrap(), 3);
    for (row, r) in cert.rows.iter().zip(&rhs) {
        assert!((row.rhs - r).abs() < 1e-10);
    }
}

#[test]
fn bottom_edge_certificate_matches_dense() {
    let lattice = LatticeBox::centered_line(400).unwrap();
    let (j, gs) = edge_background(&PeriodicCoefficients::free(), SpectralEdge::Bottom, &lattice).unwrap();
    let delta = Perturbation::new().with_db([0, 0], -2.0);
    let cert = theorem43_certificate(&j, &gs, &j, &gs, &delta, 3).unwrap();
    assert!(cert.holds);
    let ev = dense_eigenvalues(&apply_perturbation(&j, &delta).unwrap()).unwrap();
    for (row, e) in cert.rows.iter().zip(&ev) {
        assert!((row.lhs - (-e).max(0.0)).abs() < 1e-10);
    }
}

#[test]
fn bottom_levels_are_top_levels_of_conjugate() {
    let lattice = LatticeBox::centered_line(300).unwrap();
    let (j, _) = edge_background(&period2(), SpectralEdge::Bottom, &lattice).unwrap();
    let delta = Perturbation::new().with_db([0, 0], -2.5).with_db([3, 0], -1.0);
    let k = 4;
    let bottom = eig_extreme(&apply_perturbation(&j, &delta).unwrap(), k, Side::FromBottom, 0.0).unwrap();
    let top = eig_extreme(
        &apply_perturbation(&j.conjugate_w(), &delta.conjugate_w()).unwrap(),
        k,
        Side::FromTop,
        0.0,
    )
    .unwrap();
    let lb = extract_levels(&bottom, Convention::BottomNegative, k).values;
    let lt = extract_levels(&top, Convention::TopPositive, k).values;
    for (b, t) in lb.iter().zip(&lt) {
        assert_eq!(b.abs(), *t);
    }
}

#[test]
fn period_two_bottom_certificate() {
    let lattice = LatticeBox::centered_line(400).unwrap();
    let (j0, gs0) = edge_background(&period2(), SpectralEdge::Bottom, &lattice).unwrap();
    let (j1, gs1) = edge_background(&PeriodicCoefficients::free(), SpectralEdge::Bottom, &lattice).unwrap();
    let delta = Perturbation::new().with_db([0, 0], -2.0).with_db([1, 0], 0.5);
    let cert = theorem43_certificate(&j0, &gs0, &j1, &gs1, &delta, 5).unwrap();
    assert!(cert.holds);
    assert!(cert.rows[0].lhs > 0.0);
}

#[test]
fn moment_of_certificate_columns() {
    let lattice = LatticeBox::centered_line(400).unwrap();
    let (j0, gs0) = edge_background(&period2(), SpectralEdge::Top, &lattice).unwrap();
    let (j1, gs1) = edge_background(&PeriodicCoefficients::free(), SpectralEdge::Top, &lattice).unwrap();
    let delta = Perturbation::new().with_db([0, 0], 2.0).with_db([2, 0], 1.0);
    let k = 5;
    let cert = theorem41_certificate(&j0, &gs0, &j1, &gs1, &delta, k).unwrap();
    let column = |f: fn(&gsr_core::bounds::CertificateRow) -> f64| ClampedLevels {
        values: cert.rows.iter().map(f).collect(),
        convention: Convention::TopPositive,
    };
    let s_lhs = moment_sum(&column(|r| r.lhs), 0.5).unwrap();
    let s_rhs = moment_sum(&column(|r| r.rhs), 0.5).unwrap();
    let slack: f64 = cert.rows.iter().map(|r| r.slack).fold(0.0, f64::max);
    assert!(s_lhs > 0.0);
    assert!(s_lhs <= s_rhs + k as f64 * slack);
}

#[test]
fn random_levels_moment_matches_plain_sum() {
    let values = vec![0.9, 0.41, 0.0375, 0.002, 0.0];
    let levels = ClampedLevels {
        values: values.clone(),
        convention: Convention::TopPositive,
    };
    let plain: f64 = values.iter().sum();
    assert!((moment_sum(&levels, 1.0).unwrap() - plain).abs() < 1e-15);
}

#[test]
fn free_szego_sum_against_closed_form_and_dense() {
    let delta = Perturbation::new().with_db([0, 0], 1.5);
    let r = szego_sum(&PeriodicCoefficients::free(), &delta, false, 1000).unwrap();
    assert!((r.lhs - 0.5f64.sqrt()).abs() < 1e-5);
    assert!((r.norm - 1.5).abs() < 1e-15);
    assert!((r.c_emp.unwrap() - 0.4714).abs() < 1e-4);

    let op = apply_perturbation(
        &build_operator(&JacobiCoefficients::free(), &LatticeBox::centered_line(1000).unwrap()).unwrap(),
        &delta,
    )
    .unwrap();
    let dense = dense_eigenvalues(&op).unwrap();
    assert!((dense[dense.len() - 1] - r.above[0]).abs() < 1e-10);
}

#[test]
fn cosine_background_top_is_below_zero() {
    let v0 = |x: f64| 1.0 - (std::f64::consts::TAU * x).cos();
    let (op, _) = discretize_schrodinger(v0, |_| 0.0, 0.01, (0.0, 50.0)).unwrap();
    let eig = ql_eigenvalues(op.diagonal(), op.off_diagonal());
    let top = eig[eig.len() - 1];
    let sturm = eig_extreme(&op, 1, Side::FromTop, 0.0).unwrap().eigenvalues[0];
    assert!((top - sturm).abs() < 1e-8 * op.scale());
    assert!(top <= 0.0);
}

/// Even bound state of a square well of depth `s` and width `l`:
/// `k tan(kl/2) = κ`, `k² + κ² = s`.
fn square_well_kappa(s: f64, l: f64) -> f64 {
    let f = |k: f64| k * (k * l / 2.0).tan() - (s - k * k).sqrt();
    let (mut lo, mut hi) = (1e-12, s.sqrt().min(std::f64::consts::PI / l - 1e-12));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    (s - k * k).sqrt()
}

#[test]
fn square_well_moment_converges_to_continuum() {
    let well = Potential::SquareWell {
        depth: 1.0,
        center: 0.0,
        width: 1.0,
    };
    let kappa = square_well_kappa(1.0, 1.0);
    for h in [0.01, 0.005] {
        let r = lt_sandwich_check(&Potential::Zero {}, &well, h, (-20.0, 20.0)).unwrap();
        assert_eq!(r.levels.len(), 1);
        assert!((r.s_half - kappa).abs() <= r.mesh_slack, "{} vs {kappa}", r.s_half);
    }
}
