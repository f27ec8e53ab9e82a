//! Experiment files: a seed and a list of scenarios, validated in full before
//! anything runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gsr_core::groundstate::SpectralEdge;
use gsr_core::potential::Potential;
use gsr_core::suite::DEFAULT_SEED;
use gsr_core::{Edge, LatticeBox, PeriodicCoefficients, Perturbation};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub scenarios: Vec<Scenario>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Background {
    Free {},
    Periodic {
        period: usize,
        a: Vec<f64>,
        b: Vec<f64>,
    },
}

impl Default for Background {
    fn default() -> Self {
        Self::Free {}
    }
}

impl Background {
    pub fn coefficients(&self) -> PeriodicCoefficients {
        match self {
            Self::Free {} => PeriodicCoefficients::free(),
            Self::Periodic { a, b, .. } => {
                PeriodicCoefficients::new(a.clone(), b.clone()).expect("validated")
            }
        }
    }

    fn validate(&self, field: &str) -> Result<(), String> {
        let Self::Periodic { period, a, b } = self else {
            return Ok(());
        };
        if *period == 0 {
            return Err(format!("{field}.period must be at least 1"));
        }
        if a.len() != *period {
            return Err(format!("{field}.a has {} entries, period is {period}", a.len()));
        }
        if b.len() != *period {
            return Err(format!("{field}.b has {} entries, period is {period}", b.len()));
        }
        if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(format!("{field}.a entries must be positive and finite, got {x}"));
        }
        if let Some(x) = b.iter().find(|x| !x.is_finite()) {
            return Err(format!("{field}.b entries must be finite, got {x}"));
        }
        Ok(())
    }
}

/// A value at site `site` (for `db`) or on the edge `{site, site + 1}` (for `da`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteValue {
    pub site: i64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default)]
    pub db: Vec<SiteValue>,
    #[serde(default)]
    pub da: Vec<SiteValue>,
}

impl PerturbationSpec {
    pub fn build(&self) -> Perturbation {
        let mut p = Perturbation::new();
        for sv in &self.db {
            p = p.with_db([sv.site, 0], sv.value);
        }
        for sv in &self.da {
            p = p.with_da(Edge::line(sv.site), sv.value);
        }
        p
    }

    fn validate(&self, field: &str, lattice: &LatticeBox, background: &Background) -> Result<(), String> {
        let inside = |n: i64| {
            lattice
                .index([n, 0])
                .is_some_and(|i| lattice.depth(i) >= 1)
        };
        let coeffs = background.coefficients();
        for (j, sv) in self.db.iter().enumerate() {
            if !sv.value.is_finite() {
                return Err(format!("{field}.db[{j}].value must be finite"));
            }
            if !inside(sv.site) {
                return Err(format!("{field}.db[{j}].site {} is not inside the box", sv.site));
            }
        }
        for (j, sv) in self.da.iter().enumerate() {
            if !sv.value.is_finite() {
                return Err(format!("{field}.da[{j}].value must be finite"));
            }
            if !inside(sv.site) || !inside(sv.site + 1) {
                return Err(format!("{field}.da[{j}].site {} is not inside the box", sv.site));
            }
            if coeffs.a_at(sv.site) + sv.value <= 0.0 {
                return Err(format!("{field}.da[{j}].value makes the hopping nonpositive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeChoice {
    Top,
    Bottom,
}

impl From<EdgeChoice> for SpectralEdge {
    fn from(e: EdgeChoice) -> Self {
        match e {
            EdgeChoice::Top => SpectralEdge::Top,
            EdgeChoice::Bottom => SpectralEdge::Bottom,
        }
    }
}

fn top() -> EdgeChoice {
    EdgeChoice::Top
}
fn n400() -> usize {
    400
}
fn n40() -> usize {
    40
}
fn n600() -> usize {
    600
}
fn k5() -> usize {
    5
}
fn trials20() -> usize {
    20
}
fn trials50() -> usize {
    50
}
fn gsr_tol() -> f64 {
    1e-10
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn meshes() -> Vec<f64> {
    vec![0.01, 0.005]
}
fn interval() -> (f64, f64) {
    (-20.0, 20.0)
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    /// Residual of the ground-state representation for random test functions.
    GsrCheck {
        #[serde(default)]
        background: Background,
        #[serde(default = "top")]
        edge: EdgeChoice,
        #[serde(default = "n400")]
        n: usize,
        #[serde(default = "trials20")]
        trials: usize,
        #[serde(default = "gsr_tol")]
        tolerance: f64,
    },
    Theorem41 {
        #[serde(default)]
        background: Background,
        #[serde(default)]
        reference: Background,
        perturbation: PerturbationSpec,
        #[serde(default = "n400")]
        n: usize,
        #[serde(default = "k5")]
        k: usize,
        /// Double the box while eigenvectors reach its boundary.
        #[serde(default = "yes")]
        grow: bool,
    },
    Theorem43 {
        #[serde(default)]
        background: Background,
        #[serde(default)]
        reference: Background,
        perturbation: PerturbationSpec,
        #[serde(default = "n400")]
        n: usize,
        #[serde(default = "k5")]
        k: usize,
        #[serde(default = "yes")]
        grow: bool,
    },
    LtSandwich {
        v0: Potential,
        v: Potential,
        #[serde(default = "meshes")]
        meshes: Vec<f64>,
        #[serde(default = "interval")]
        interval: (f64, f64),
        #[serde(default = "half")]
        gamma: f64,
    },
    /// Explicit perturbation, or `trials` random ones scaled to `norm`.
    SzegoSweep {
        #[serde(default)]
        background: Background,
        #[serde(default)]
        perturbation: Option<PerturbationSpec>,
        #[serde(default = "trials20")]
        trials: usize,
        #[serde(default = "one")]
        norm: f64,
        #[serde(default = "n600")]
        n: usize,
        #[serde(default)]
        half_line: bool,
    },
    Commutator {
        #[serde(default)]
        background: Background,
        #[serde(default = "n40")]
        n: usize,
        #[serde(default = "trials50")]
        trials: usize,
    },
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::GsrCheck { .. } => "gsr-check",
            Self::Theorem41 { .. } => "theorem41",
            Self::Theorem43 { .. } => "theorem43",
            Self::LtSandwich { .. } => "lt-sandwich",
            Self::SzegoSweep { .. } => "szego-sweep",
            Self::Commutator { .. } => "commutator",
        }
    }

    pub fn background(&self) -> Option<&Background> {
        match self {
            Self::GsrCheck { background, .. }
            | Self::Theorem41 { background, .. }
            | Self::Theorem43 { background, .. }
            | Self::SzegoSweep { background, .. }
            | Self::Commutator { background, .. } => Some(background),
            Self::LtSandwich { .. } => None,
        }
    }

    fn validate(&self, field: &str) -> Result<(), String> {
        if let Some(bg) = self.background() {
            bg.validate(&format!("{field}.background"))?;
        }
        match self {
            Self::GsrCheck {
                n,
                trials,
                tolerance,
                ..
            } => {
                at_least(field, "n", *n, 5)?;
                at_least(field, "trials", *trials, 1)?;
                positive(field, "tolerance", *tolerance)
            }
            Self::Theorem41 {
                background,
                reference,
                perturbation,
                n,
                k,
                ..
            }
            | Self::Theorem43 {
                background,
                reference,
                perturbation,
                n,
                k,
                ..
            } => {
                reference.validate(&format!("{field}.reference"))?;
                at_least(field, "n", *n, 8)?;
                at_least(field, "k", *k, 1)?;
                if k > n {
                    return Err(format!("{field}.k exceeds the box size {n}"));
                }
                let lattice = LatticeBox::centered_line(*n).expect("n ≥ 8");
                perturbation.validate(&format!("{field}.perturbation"), &lattice, background)
            }
            Self::LtSandwich {
                v0,
                v,
                meshes,
                interval,
                gamma,
            } => {
                if !(*gamma >= 0.0) {
                    return Err(format!("{field}.gamma must be nonnegative, got {gamma}"));
                }
                if *gamma != 0.5 {
                    return Err(format!(
                        "{field}.gamma: only 0.5 has a built-in constant, got {gamma}"
                    ));
                }
                v0.validate(&format!("{field}.v0"))?;
                if v0.period().is_none() {
                    return Err(format!("{field}.v0 must be zero, constant or cosine"));
                }
                v.validate(&format!("{field}.v"))?;
                if meshes.is_empty() {
                    return Err(format!("{field}.meshes must not be empty"));
                }
                for (j, h) in meshes.iter().enumerate() {
                    positive(field, &format!("meshes[{j}]"), *h)?;
                }
                let (lo, hi) = *interval;
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(format!("{field}.interval must be an increasing pair"));
                }
                if !v.supported_in(lo, hi) {
                    return Err(format!("{field}.v must vanish outside the interval"));
                }
                Ok(())
            }
            Self::SzegoSweep {
                background,
                perturbation,
                trials,
                norm,
                n,
                half_line,
            } => {
                at_least(field, "n", *n, 8)?;
                at_least(field, "trials", *trials, 1)?;
                positive(field, "norm", *norm)?;
                let lattice = if *half_line {
                    LatticeBox::half_line(*n)
                } else {
                    LatticeBox::centered_line(*n)
                }
                .expect("n ≥ 8");
                match perturbation {
                    Some(p) => p.validate(&format!("{field}.perturbation"), &lattice, background),
                    // random perturbations live on [-6, 6]
                    None if *half_line || *n < 16 => Err(format!(
                        "{field}.perturbation is required for half-line or small boxes"
                    )),
                    None => Ok(()),
                }
            }
            Self::Commutator { n, trials, .. } => {
                at_least(field, "n", *n, 1)?;
                at_least(field, "trials", *trials, 1)
            }
        }
    }
}

fn at_least(field: &str, name: &str, value: usize, min: usize) -> Result<(), String> {
    if value < min {
        Err(format!("{field}.{name} must be at least {min}, got {value}"))
    } else {
        Ok(())
    }
}

fn positive(field: &str, name: &str, value: f64) -> Result<(), String> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(format!("{field}.{name} must be positive, got {value}"))
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.scenarios.is_empty() {
            return Err(CliError::Validation("scenarios must not be empty".into()));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            s.validate(&format!("scenarios[{i}]"))
                .map_err(CliError::Validation)?;
        }
        Ok(())
    }
}
