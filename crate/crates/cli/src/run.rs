//! Scenario execution and the report structure.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gsr_core::bounds::{
    lt_sandwich_check, szego_sum, theorem41_certificate, theorem43_certificate,
    ComparisonCertificate, SandwichReport,
};
use gsr_core::floquet::{floquet_data, Band};
use gsr_core::groundstate::SpectralEdge;
use gsr_core::quadform::{commutator_check, gsr_both_sides, random_interior_function, GsrCheck};
use gsr_core::suite::{edge_background, random_perturbation, trial_rng, MAX_BOX};
use gsr_core::{build_operator, Error, JacobiCoefficients, LatticeBox, PeriodicCoefficients, Perturbation};

use crate::config::{Background, ExperimentSpec, PerturbationSpec, Scenario};
use crate::error::CliError;

/// Freezes `meta.elapsed_ms` at 0 when set to `1`.
pub const FIXED_CLOCK_ENV: &str = "GSR_FIXED_CLOCK";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: ExperimentSpec,
    pub results: Vec<ScenarioResult>,
    pub verdicts: Vec<Verdict>,
    pub meta: Meta,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: usize,
    pub kind: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoTrial {
    pub trial: usize,
    pub lhs: f64,
    pub norm: f64,
    pub c_emp: Option<f64>,
    pub outside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioResult {
    GsrCheck {
        checks: Vec<GsrCheck>,
        max_relative_residual: f64,
    },
    Theorem41 {
        n: usize,
        certificate: ComparisonCertificate,
    },
    Theorem43 {
        n: usize,
        certificate: ComparisonCertificate,
    },
    LtSandwich {
        reports: Vec<SandwichReport>,
    },
    SzegoSweep {
        bands: Vec<Band>,
        hull: (f64, f64),
        trials: Vec<SzegoTrial>,
        max_c_emp: Option<f64>,
    },
    Commutator {
        trials: usize,
        max_first_error: f64,
        max_second_error: f64,
        exact: bool,
    },
}

/// Seed for scenario `index`, so scenarios are independent of each other.
pub fn scenario_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn run_spec(spec: &ExperimentSpec) -> Result<Report, CliError> {
    spec.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<(ScenarioResult, Verdict), CliError>> = spec
        .scenarios
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            run_scenario(s, scenario_seed(spec.seed, i), i).map_err(|source| CliError::Compute {
                index: i,
                kind: s.kind(),
                source,
            })
        })
        .collect();
    let mut results = Vec::with_capacity(outcomes.len());
    let mut verdicts = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let (r, v) = o?;
        results.push(r);
        verdicts.push(v);
    }
    let fixed = std::env::var(FIXED_CLOCK_ENV).is_ok_and(|v| v == "1");
    Ok(Report {
        spec: spec.clone(),
        results,
        verdicts,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: spec.seed,
            elapsed_ms: if fixed {
                0
            } else {
                start.elapsed().as_millis() as u64
            },
        },
    })
}

fn verdict(index: usize, kind: &str, pass: bool, detail: String) -> Verdict {
    Verdict {
        scenario: index,
        kind: kind.to_string(),
        pass,
        detail,
    }
}

fn run_scenario(s: &Scenario, seed: u64, index: usize) -> Result<(ScenarioResult, Verdict), Error> {
    let kind = s.kind();
    match s {
        Scenario::GsrCheck {
            background,
            edge,
            n,
            trials,
            tolerance,
        } => {
            let p = background.coefficients();
            let lattice = LatticeBox::centered_line(*n)?;
            let (op, gs) = edge_background(&p, (*edge).into(), &lattice)?;
            let checks = (0..*trials)
                .into_par_iter()
                .map(|t| {
                    let f = random_interior_function(&lattice, &mut trial_rng(seed, t));
                    gsr_both_sides(&op, &gs, &f)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let worst = checks.iter().map(|c| c.relative()).fold(0.0, f64::max);
            let v = verdict(
                index,
                kind,
                worst <= *tolerance,
                format!("max relative residual {worst:e} (tolerance {tolerance:e})"),
            );
            Ok((
                ScenarioResult::GsrCheck {
                    checks,
                    max_relative_residual: worst,
                },
                v,
            ))
        }
        Scenario::Theorem41 {
            background,
            reference,
            perturbation,
            n,
            k,
            grow,
        }
        | Scenario::Theorem43 {
            background,
            reference,
            perturbation,
            n,
            k,
            grow,
        } => {
            let edge = if matches!(s, Scenario::Theorem41 { .. }) {
                SpectralEdge::Top
            } else {
                SpectralEdge::Bottom
            };
            let (cert, used) = certificate(background, reference, perturbation, *n, *k, *grow, edge)?;
            let c = cert.constants;
            let v = verdict(
                index,
                kind,
                cert.holds,
                format!(
                    "min margin {:e} on {used} sites (eta {:.6}, beta {:.6})",
                    cert.min_margin(),
                    c.eta,
                    c.beta
                ),
            );
            let result = match edge {
                SpectralEdge::Top => ScenarioResult::Theorem41 {
                    n: used,
                    certificate: cert,
                },
                SpectralEdge::Bottom => ScenarioResult::Theorem43 {
                    n: used,
                    certificate: cert,
                },
            };
            Ok((result, v))
        }
        Scenario::LtSandwich {
            v0,
            v,
            meshes,
            interval,
            ..
        } => {
            let reports = meshes
                .par_iter()
                .map(|&h| lt_sandwich_check(v0, v, h, *interval))
                .collect::<Result<Vec<_>, _>>()?;
            let pass = reports
                .iter()
                .all(|r| r.holds() && r.upper.gap >= 0.0 && r.lower.gap >= 0.0);
            let detail = reports
                .iter()
                .map(|r| {
                    format!(
                        "h={}: {:.6} <= {:.6} <= {:.6}",
                        r.h, r.lower.s_lhs, r.s_half, r.upper.s_rhs
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            Ok((ScenarioResult::LtSandwich { reports }, verdict(index, kind, pass, detail)))
        }
        Scenario::SzegoSweep {
            background,
            perturbation,
            trials,
            norm,
            n,
            half_line,
        } => {
            let p = background.coefficients();
            let data = floquet_data(&p)?;
            let deltas: Vec<Perturbation> = match perturbation {
                Some(spec) => vec![spec.build()],
                None => (0..*trials)
                    .map(|t| {
                        let d = random_perturbation(&mut trial_rng(seed, t), &p);
                        let l1 = d.l1_norm();
                        d.scaled(norm / l1)
                    })
                    .collect(),
            };
            let rows = deltas
                .par_iter()
                .enumerate()
                .map(|(t, d)| {
                    let r = szego_sum(&p, d, *half_line, *n)?;
                    Ok(SzegoTrial {
                        trial: t,
                        lhs: r.lhs,
                        norm: r.norm,
                        c_emp: r.c_emp,
                        outside: r.above.len() + r.below.len(),
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let max_c_emp = rows.iter().filter_map(|r| r.c_emp).reduce(f64::max);
            let pass = rows.iter().all(|r| r.lhs.is_finite() && r.c_emp.is_none_or(f64::is_finite));
            let detail = match max_c_emp {
                Some(c) => format!("max C_emp {c:.6} over {} trials", rows.len()),
                None => "zero perturbation".to_string(),
            };
            Ok((
                ScenarioResult::SzegoSweep {
                    hull: data.hull(),
                    bands: data.bands,
                    trials: rows,
                    max_c_emp,
                },
                verdict(index, kind, pass, detail),
            ))
        }
        Scenario::Commutator {
            background,
            n,
            trials,
        } => {
            let op = build_operator(
                &JacobiCoefficients::Periodic(background.coefficients()),
                &LatticeBox::centered_line(*n)?,
            )?;
            let errors = (0..*trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, t);
                    let f: Vec<f64> = (0..op.len())
                        .map(|_| rng.random_range(-1.0..=1.0))
                        .collect();
                    commutator_check(&op, &f).map(|c| (c.first_error, c.second_error, c.exact))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let first = errors.iter().map(|e| e.0).fold(0.0, f64::max);
            let second = errors.iter().map(|e| e.1).fold(0.0, f64::max);
            let exact = errors.iter().all(|e| e.2);
            Ok((
                ScenarioResult::Commutator {
                    trials: *trials,
                    max_first_error: first,
                    max_second_error: second,
                    exact,
                },
                verdict(
                    index,
                    kind,
                    exact,
                    format!("max entry errors {first:e}, {second:e}"),
                ),
            ))
        }
    }
}

fn certificate(
    background: &Background,
    reference: &Background,
    perturbation: &PerturbationSpec,
    n: usize,
    k: usize,
    grow: bool,
    edge: SpectralEdge,
) -> Result<(ComparisonCertificate, usize), Error> {
    let p0: PeriodicCoefficients = background.coefficients();
    let p1 = reference.coefficients();
    let delta = perturbation.build();
    let mut n = n;
    loop {
        let lattice = LatticeBox::centered_line(n)?;
        let (j0, gs0) = edge_background(&p0, edge, &lattice)?;
        let (j1, gs1) = edge_background(&p1, edge, &lattice)?;
        let cert = match edge {
            SpectralEdge::Top => theorem41_certificate(&j0, &gs0, &j1, &gs1, &delta, k),
            SpectralEdge::Bottom => theorem43_certificate(&j0, &gs0, &j1, &gs1, &delta, k),
        };
        match cert {
            Err(Error::TruncationSuspect { .. }) if grow && n < MAX_BOX => n = (2 * n).min(MAX_BOX),
            other => return other.map(|c| (c, n)),
        }
    }
}
