//! Experiment configuration: TOML files, command-line overrides and
//! per-experiment defaults, merged with precedence flags > file > defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{self, Experiment};

/// Model parameters. Only the fields an experiment uses are resolved.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Model for `custom` runs: harmonic, lmg, dicke, kicked_rotor or quantum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Dicke coupling in units of the critical coupling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_ratio: Option<f64>,
    /// Dicke spin magnitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Quantum spin `S`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin: Option<u32>,
    /// Quantum observable: m_y or m_x.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    /// Harmonic oracle: strip half-width `x0` and initial line half-length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_half_length: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    /// rk4, symplectic_leapfrog, euler or euler_maruyama.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Kicks per trajectory for the standard map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Sweep grid; its meaning depends on the experiment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    /// Spin sizes for the finite-size study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spins: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
}

macro_rules! overlay_fields {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl ModelConfig {
    fn overlay(&mut self, o: &ModelConfig) {
        overlay_fields!(
            self,
            o,
            kind,
            mu,
            j,
            alpha,
            beta,
            eta,
            temperature,
            m,
            omega0,
            omega,
            lambda_ratio,
            spin_j,
            k,
            spin,
            observable,
            x0,
            line_half_length
        );
    }
}

impl ExperimentConfig {
    /// Fields set in `o` replace those in `self`.
    pub fn overlay(&mut self, o: &ExperimentConfig) {
        overlay_fields!(
            self,
            o,
            experiment,
            seed,
            trajectories,
            dt,
            t_end,
            burn_in,
            scheme,
            iterations,
            bins,
            fit_window,
            out_dir,
            grid,
            spins,
            snapshot_times
        );
        match (&mut self.model, &o.model) {
            (Some(mine), Some(theirs)) => mine.overlay(theirs),
            (None, Some(theirs)) => self.model = Some(theirs.clone()),
            _ => {}
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid config: {}", e.message()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a TOML config, or the `config` entry of a `run_meta.json`.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            let meta: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
            let cfg = meta.get("config").cloned().unwrap_or(meta);
            return serde_json::from_value(cfg)
                .map_err(|e| format!("invalid config in {}: {e}", path.display()));
        }
        Self::from_toml(&text)
    }

    pub fn model(&self) -> &ModelConfig {
        static EMPTY: ModelConfig = ModelConfig {
            kind: None,
            mu: None,
            j: None,
            alpha: None,
            beta: None,
            eta: None,
            temperature: None,
            m: None,
            omega0: None,
            omega: None,
            lambda_ratio: None,
            spin_j: None,
            k: None,
            spin: None,
            observable: None,
            x0: None,
            line_half_length: None,
        };
        self.model.as_ref().unwrap_or(&EMPTY)
    }
}

/// A fully resolved configuration: defaults filled in and validated.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
}

impl Resolved {
    pub fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.config
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(self.experiment.name()))
    }
}

/// Layers `file` and `flags` over the experiment defaults and validates.
/// All violations are reported together.
pub fn resolve(
    name: &str,
    file: Option<&ExperimentConfig>,
    flags: &ExperimentConfig,
) -> Result<Resolved, Vec<String>> {
    let experiment = Experiment::parse(name).ok_or_else(|| {
        vec![format!(
            "unknown experiment '{name}'; expected one of {}",
            experiments::names().join(", ")
        )]
    })?;
    for layer in [file, Some(flags)].into_iter().flatten() {
        if let Some(other) = &layer.experiment {
            if other != name {
                return Err(vec![format!(
                    "config is for experiment '{other}', not '{name}'"
                )]);
            }
        }
    }
    let mut config = experiment.defaults();
    if experiment == Experiment::Custom {
        // Custom runs take their model from the layers; defaults depend on it.
        let kind = flags
            .model
            .as_ref()
            .and_then(|m| m.kind.clone())
            .or_else(|| {
                file.and_then(|f| f.model.as_ref())
                    .and_then(|m| m.kind.clone())
            })
            .unwrap_or_else(|| "lmg".to_string());
        config = experiments::custom_defaults(&kind).map_err(|e| vec![e])?;
    }
    if let Some(f) = file {
        config.overlay(f);
    }
    config.overlay(flags);
    config.experiment = Some(name.to_string());
    // Default time lists follow a shortened t_end; user-given ones are checked as-is.
    let user_set = |f: fn(&ExperimentConfig) -> bool| f(flags) || file.is_some_and(f);
    if let Some(t) = config.t_end {
        if !user_set(|c| c.snapshot_times.is_some()) {
            if let Some(ts) = config.snapshot_times.as_mut() {
                ts.retain(|&s| s <= t);
            }
        }
        if experiment == Experiment::Fig3 && !user_set(|c| c.grid.is_some()) {
            if let Some(g) = config.grid.as_mut() {
                g.retain(|&tau| tau < t);
                g.push(t);
            }
        }
    }
    let errors = experiments::validate(experiment, &config);
    if errors.is_empty() {
        Ok(Resolved { experiment, config })
    } else {
        Err(errors)
    }
}
