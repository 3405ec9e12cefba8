//! Run configuration: a TOML file whose values command-line flags override.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcr::{DetectionConfig, GammaMode, QuantityKind, TimeSearchConfig};
use crate::quadrature::{DEFAULT_NODES, MAX_NODES};

/// Evenly spaced values `start + (stop - start) i / (points - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..self.points)
            .map(|i| self.start + span * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

/// Either an explicit list or a [`Range`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Range(Range),
}

impl Values {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Values::List(v) => v.clone(),
            Values::Range(r) => r.values(),
        }
    }
}

/// Every setting a command can read. Unset fields take per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub quantities: Option<Vec<QuantityKind>>,
    pub h0: Option<f64>,
    pub h0_grid: Option<Values>,
    pub h1: Option<f64>,
    pub gamma: Option<f64>,
    pub multicritical: Option<bool>,
    pub temperature: Option<f64>,
    pub temperatures: Option<Values>,
    pub eta: Option<f64>,
    pub t_hi: Option<f64>,
    pub scan_points: Option<usize>,
    pub bisection_tol: Option<f64>,
    pub time_search: Option<TimeSearchConfig>,
    /// Length and step of the `evolve` time series.
    pub evolve_t_max: Option<f64>,
    pub evolve_dt: Option<f64>,
    /// `(h0, h1)` pairs of the `quench-length` command.
    pub pairs: Option<Vec<(f64, f64)>>,
    pub grid_nodes: Option<usize>,
    /// Chain lengths of the finite-temperature convergence check in `validate`.
    pub sizes: Option<Vec<usize>>,
    /// Number of sampled states in the entanglement checks of `validate`.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| config_err("config", e.message().to_string()))
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn merge(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            quantities,
            h0,
            h0_grid,
            h1,
            gamma,
            multicritical,
            temperature,
            temperatures,
            eta,
            t_hi,
            scan_points,
            bisection_tol,
            time_search,
            evolve_t_max,
            evolve_dt,
            pairs,
            grid_nodes,
            sizes,
            samples,
            seed,
            workers,
            output
        );
        self
    }

    /// TOML of the settings that determine the data, for file headers.
    /// Output location and worker count are left out so that reruns elsewhere
    /// produce identical bytes.
    pub fn echo(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.workers = None;
        toml::to_string(&c).unwrap_or_default()
    }

    pub fn quantities(&self) -> Vec<QuantityKind> {
        self.quantities
            .clone()
            .unwrap_or_else(|| QuantityKind::ALL.to_vec())
    }

    pub fn h1(&self) -> Result<f64> {
        finite("h1", self.h1.unwrap_or(1.0))
    }

    pub fn gamma(&self) -> Result<f64> {
        let g = self.gamma.unwrap_or(0.8);
        if !(0.0..=1.0).contains(&g) {
            return Err(config_err("gamma", format!("must lie in [0, 1], got {g}")));
        }
        Ok(g)
    }

    pub fn multicritical(&self) -> bool {
        self.multicritical.unwrap_or(false)
    }

    pub fn gamma_mode(&self) -> Result<GammaMode> {
        Ok(if self.multicritical() {
            GammaMode::Multicritical
        } else {
            GammaMode::Fixed(self.gamma()?)
        })
    }

    pub fn temperature(&self) -> Result<f64> {
        let t = self.temperature.unwrap_or(0.05);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(config_err(
                "temperature",
                format!("must be finite and >= 0, got {t}"),
            ));
        }
        Ok(t)
    }

    pub fn temperatures(&self) -> Result<Vec<f64>> {
        let v = self
            .temperatures
            .clone()
            .unwrap_or(Values::Range(Range {
                start: 0.0,
                stop: 0.1,
                points: 21,
            }))
            .values();
        if v.is_empty() {
            return Err(config_err("temperatures", "empty temperature grid"));
        }
        if let Some(bad) = v.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(config_err(
                "temperatures",
                format!("must be finite and >= 0, got {bad}"),
            ));
        }
        Ok(v)
    }

    pub fn h0_grid(&self, default: Values) -> Result<Vec<f64>> {
        let v = self.h0_grid.clone().unwrap_or(default).values();
        if v.is_empty() {
            return Err(config_err("h0_grid", "empty grid"));
        }
        for &h in &v {
            finite("h0_grid", h)?;
        }
        Ok(v)
    }

    pub fn time_search(&self) -> Result<TimeSearchConfig> {
        let t = self.time_search.unwrap_or_default();
        t.validate()
            .map_err(|e| config_err("time_search", e.to_string()))?;
        Ok(t)
    }

    pub fn detection(&self) -> Result<DetectionConfig> {
        let base = DetectionConfig::default();
        let d = DetectionConfig {
            eta: self.eta.unwrap_or(base.eta),
            t_hi: self.t_hi.unwrap_or(if self.multicritical() {
                0.01
            } else {
                base.t_hi
            }),
            scan_points: self.scan_points.unwrap_or(base.scan_points),
            tolerance: self.bisection_tol.unwrap_or(base.tolerance),
        };
        d.validate()
            .map_err(|e| config_err("detection", e.to_string()))?;
        Ok(d)
    }

    pub fn grid_nodes(&self) -> Result<usize> {
        let n = self.grid_nodes.unwrap_or(DEFAULT_NODES);
        if !(16..=MAX_NODES).contains(&n) {
            return Err(config_err(
                "grid_nodes",
                format!("must lie in 16..={MAX_NODES}, got {n}"),
            ));
        }
        Ok(n)
    }

    pub fn output(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(20240601)
    }
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(field, format!("must be finite, got {v}")))
    }
}
