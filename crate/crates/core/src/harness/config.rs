//! Run configuration shared by the CLI and JSON config files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Solve,
    SolveZp,
    Compare,
    Converge,
    EpsSweep,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Solve => "solve",
            Self::SolveZp => "solve-zp",
            Self::Compare => "compare",
            Self::Converge => "converge",
            Self::EpsSweep => "eps-sweep",
        }
    }
}

pub const DEFAULT_GRID_N: usize = 4096;

/// Defaults for `compare` when fields are omitted.
pub const COMPARE_DEFAULT_INITIAL: &str = "random-bump";
pub const COMPARE_DEFAULT_EPS: f64 = 0.5;
pub const COMPARE_DEFAULT_T: f64 = 1.0;

/// Field names follow the JSON config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub initial: Option<String>,
    #[serde(rename = "N", default)]
    pub n_particles: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Particle counts for `converge`.
    #[serde(default)]
    pub n_values: Option<Vec<usize>>,
    /// Particle sizes for `eps-sweep`.
    #[serde(default)]
    pub eps_values: Option<Vec<f64>>,
}

/// A configuration with every field required by its mode resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub mode: Mode,
    pub initial: String,
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub eps: f64,
    pub times: Vec<f64>,
    pub grid_n: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub n_values: Vec<usize>,
    pub eps_values: Vec<f64>,
}

impl Resolved {
    pub fn t_final(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            initial: None,
            n_particles: None,
            eps: None,
            t_final: None,
            times: None,
            grid_n: None,
            out_dir: None,
            seed: None,
            n_values: None,
            eps_values: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks mode-specific requirements and fills defaults. Errors name the
    /// offending field.
    pub fn resolve(&self) -> Result<Resolved> {
        let mode = self.mode;
        let compare = mode == Mode::Compare;

        let initial = match (&self.initial, compare) {
            (Some(s), _) => s.clone(),
            (None, true) => COMPARE_DEFAULT_INITIAL.to_string(),
            (None, false) => return Err(invalid("initial", format!("required in {} mode", mode.name()))),
        };

        let n_particles = match (self.n_particles, mode) {
            (Some(0), _) => return Err(invalid("N", "must be >= 1")),
            (Some(n), _) => n,
            (None, Mode::Simulate | Mode::Compare) => {
                return Err(invalid("N", format!("required in {} mode", mode.name())))
            }
            (None, _) => 0,
        };

        let eps = match (self.eps, mode) {
            (Some(e), _) if !(e.is_finite() && e >= 0.0) => {
                return Err(invalid("eps", format!("must be finite and >= 0, got {e}")))
            }
            (Some(0.0), Mode::Simulate | Mode::Solve | Mode::Compare | Mode::Converge) => {
                return Err(invalid("eps", format!("must be > 0 in {} mode", mode.name())))
            }
            (Some(e), _) => e,
            (None, Mode::Compare) => COMPARE_DEFAULT_EPS,
            (None, Mode::SolveZp | Mode::EpsSweep) => 0.0,
            (None, _) => return Err(invalid("eps", format!("required in {} mode", mode.name()))),
        };

        let times = match (&self.times, self.t_final) {
            (Some(ts), tf) => {
                if ts.is_empty() {
                    return Err(invalid("times", "must not be empty"));
                }
                if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                    return Err(invalid("times", format!("must be finite and >= 0, got {t}")));
                }
                if ts.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("times", "must be strictly increasing"));
                }
                if let Some(tf) = tf.filter(|tf| Some(tf) != ts.last()) {
                    return Err(invalid(
                        "t_final",
                        format!("{tf} disagrees with the last entry of times"),
                    ));
                }
                ts.clone()
            }
            (None, Some(t)) if !(t.is_finite() && t >= 0.0) => {
                return Err(invalid("t_final", format!("must be finite and >= 0, got {t}")))
            }
            (None, Some(t)) => vec![t],
            (None, None) if compare => vec![COMPARE_DEFAULT_T],
            (None, None) => return Err(invalid("t_final", format!("required in {} mode", mode.name()))),
        };

        let grid_n = self.grid_n.unwrap_or(DEFAULT_GRID_N);
        if !grid_n.is_power_of_two() || !(1 << 6..=1 << 20).contains(&grid_n) {
            return Err(invalid(
                "grid_n",
                format!("must be a power of two in [64, 1048576], got {grid_n}"),
            ));
        }

        let n_values = self
            .n_values
            .clone()
            .unwrap_or_else(|| (6..=11).map(|k| 1usize << k).collect());
        if mode == Mode::Converge && (n_values.len() < 2 || n_values.contains(&0)) {
            return Err(invalid("n_values", "need at least two positive particle counts"));
        }
        let eps_values = self.eps_values.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
        if mode == Mode::EpsSweep && (eps_values.is_empty() || eps_values.iter().any(|e| !(*e > 0.0))) {
            return Err(invalid("eps_values", "need positive particle sizes"));
        }

        Ok(Resolved {
            mode,
            initial,
            n_particles,
            eps,
            times,
            grid_n,
            out_dir: self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.unwrap_or(0),
            n_values,
            eps_values,
        })
    }
}
