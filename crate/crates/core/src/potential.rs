//! Named continuum potentials used for finite-difference Schrödinger
//! operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Potential {
    Zero {},
    Constant {
        value: f64,
    },
    /// `mean - amplitude·cos(2πx/period)`.
    Cosine {
        mean: f64,
        amplitude: f64,
        period: f64,
    },
    /// `-depth` on the closed interval `[center - width/2, center + width/2]`.
    SquareWell {
        depth: f64,
        center: f64,
        width: f64,
    },
    /// `-depth·exp(-((x - center)/width)²)`.
    GaussianWell {
        depth: f64,
        center: f64,
        width: f64,
    },
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Zero {} => 0.0,
            Self::Constant { value } => value,
            Self::Cosine {
                mean,
                amplitude,
                period,
            } => mean - amplitude * (std::f64::consts::TAU * x / period).cos(),
            Self::SquareWell {
                depth,
                center,
                width,
            } => {
                // small tolerance so grid points on the edge count as inside
                let half = 0.5 * width + 1e-12 * (1.0 + center.abs() + width);
                if (x - center).abs() <= half {
                    -depth
                } else {
                    0.0
                }
            }
            Self::GaussianWell {
                depth,
                center,
                width,
            } => -depth * (-((x - center) / width).powi(2)).exp(),
        }
    }

    /// Spatial period, if the potential is periodic (`Some(None)` for
    /// translation-invariant ones).
    pub fn period(&self) -> Option<Option<f64>> {
        match *self {
            Self::Zero {} | Self::Constant { .. } => Some(None),
            Self::Cosine { period, .. } => Some(Some(period)),
            _ => None,
        }
    }

    /// Checks parameters for finiteness and sign; `field` prefixes messages.
    pub fn validate(&self, field: &str) -> std::result::Result<(), String> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("{field}.{name} must be finite"))
            }
        };
        match *self {
            Self::Zero {} => Ok(()),
            Self::Constant { value } => finite("value", value),
            Self::Cosine {
                mean,
                amplitude,
                period,
            } => {
                finite("mean", mean)?;
                finite("amplitude", amplitude)?;
                finite("period", period)?;
                if period <= 0.0 {
                    return Err(format!("{field}.period must be positive"));
                }
                Ok(())
            }
            Self::SquareWell {
                depth,
                center,
                width,
            }
            | Self::GaussianWell {
                depth,
                center,
                width,
            } => {
                finite("depth", depth)?;
                finite("center", center)?;
                finite("width", width)?;
                if width < 0.0 || (width == 0.0 && matches!(self, Self::GaussianWell { .. })) {
                    return Err(format!("{field}.width must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Whether the potential is supported in `[lo, hi]` (Gaussian tails are
    /// cut where they drop below machine precision).
    pub fn supported_in(&self, lo: f64, hi: f64) -> bool {
        match *self {
            Self::Zero {} => true,
            Self::Constant { value } => value == 0.0,
            Self::Cosine {
                mean, amplitude, ..
            } => mean == 0.0 && amplitude == 0.0,
            Self::SquareWell {
                depth,
                center,
                width,
            } => depth == 0.0 || (center - 0.5 * width >= lo && center + 0.5 * width <= hi),
            Self::GaussianWell {
                depth,
                center,
                width,
            } => {
                let reach = 6.1 * width;
                depth == 0.0 || (center - reach >= lo && center + reach <= hi)
            }
        }
    }
}

pub(crate) fn check_nonpositive(x: f64, value: f64) -> Result<()> {
    if value > 0.0 {
        Err(Error::PositiveV { x, value })
    } else {
        Ok(())
    }
}
