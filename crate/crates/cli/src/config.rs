//! JSON run configuration.
//!
//! Every section is optional and every field has a default, so `{}` is a
//! valid document. Unknown keys are rejected with their full path.
//!
//! ```json
//! {
//!   "model":      { "mu": 0, "gamma": 0, "alpha": 0, "m": 1, "epsilon": 0.1, "convention": "ExcludeSelf" },
//!   "integrator": { "dt": 0.01, "t_transient": 2000, "t_measure": 2000, "record_stride": 10 },
//!   "classifier": { ... tolerances ... },
//!   "command": {
//!     "simulate":  { "theta0": [..3], "omega0": [..3] },
//!     "scan":      { "mu_min": -5, "mu_max": 5, "gamma_min": -5, "gamma_max": 5, "n_mu": 201, "n_gamma": 201, "n_ics": 10 },
//!     "bifurcate": { "axis": "alpha", "start": 0, "end": 1.8, "n_steps": 37, "initial": "splay", "down": true, "fresh_start": false },
//!     "analytic":  { "equilibria": ["sync", "splay", "phase_locked"] }
//!   },
//!   "out": ".",
//!   "seed": 0
//! }
//! ```

use std::path::{Path, PathBuf};

use kuramoto3::continuation::{InitPolicy, SweepAxis, SweepSpec};
use kuramoto3::scan::random_state_from_seed;
use kuramoto3::{ClassifierTolerances, Config, Convention, Params, ScanGrid, State};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config `{path}`: {reason}")]
    Validation { path: String, reason: String },
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        path: path.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub mu: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub m: f64,
    pub epsilon: f64,
    pub convention: Convention,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            mu: 0.0,
            gamma: 0.0,
            alpha: 0.0,
            m: 1.0,
            epsilon: 0.1,
            convention: Convention::ExcludeSelf,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> Params {
        Params::new(self.mu, self.gamma, self.alpha)
            .with_inertia(self.m, self.epsilon)
            .with_convention(self.convention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_transient: f64,
    pub t_measure: f64,
    pub record_stride: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let c = Config::default();
        IntegratorSection {
            dt: c.dt,
            t_transient: c.t_transient,
            t_measure: c.t_measure,
            record_stride: c.record_stride,
        }
    }
}

impl IntegratorSection {
    pub fn config(&self) -> Config {
        Config::new(self.dt, self.t_transient, self.t_measure, self.record_stride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// Initial phases; a seeded random state is used when either is absent.
    pub theta0: Option<[f64; 3]>,
    pub omega0: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub mu_min: f64,
    pub mu_max: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub n_mu: usize,
    pub n_gamma: usize,
    pub n_ics: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        let g = ScanGrid::default();
        ScanSection {
            mu_min: g.mu_min,
            mu_max: g.mu_max,
            gamma_min: g.gamma_min,
            gamma_max: g.gamma_max,
            n_mu: g.n_mu,
            n_gamma: g.n_gamma,
            n_ics: g.n_ics,
        }
    }
}

/// Named or explicit starting state of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Sync,
    Splay,
    Antipodal,
    Random,
    #[serde(untagged)]
    Explicit { theta: [f64; 3], omega: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BifurcateSection {
    pub axis: SweepAxis,
    pub start: f64,
    pub end: f64,
    pub n_steps: usize,
    pub initial: InitialState,
    /// Also run the reverse sweep from the forward end state.
    pub down: bool,
    /// Draw a fresh random state at every step instead of inheriting.
    pub fresh_start: bool,
}

impl Default for BifurcateSection {
    fn default() -> Self {
        BifurcateSection {
            axis: SweepAxis::Alpha,
            start: 0.0,
            end: 1.8,
            n_steps: 37,
            initial: InitialState::Splay,
            down: true,
            fresh_start: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equilibrium {
    Sync,
    Splay,
    PhaseLocked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSection {
    pub equilibria: Vec<Equilibrium>,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        AnalyticSection {
            equilibria: vec![Equilibrium::Sync, Equilibrium::Splay, Equilibrium::PhaseLocked],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommandSection {
    pub simulate: SimulateSection,
    pub scan: ScanSection,
    pub bifurcate: BifurcateSection,
    pub analytic: AnalyticSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub integrator: IntegratorSection,
    pub classifier: ClassifierTolerances,
    pub command: CommandSection,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSection::default(),
            integrator: IntegratorSection::default(),
            classifier: ClassifierTolerances::default(),
            command: CommandSection::default(),
            out: PathBuf::from("."),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_data() {
                invalid(path, inner.to_string())
            } else {
                ConfigError::Parse(inner.to_string())
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        use kuramoto3::model::ModelError;
        use kuramoto3::IntegrateError;
        self.model.params().validate().map_err(|ModelError::InvalidParam { field, reason }| {
            invalid(format!("model.{field}"), reason)
        })?;
        self.integrator.config().validate().map_err(|e| match e {
            IntegrateError::InvalidConfig { field, reason } => invalid(format!("integrator.{field}"), reason),
            other => invalid("integrator", other.to_string()),
        })?;
        self.classifier
            .validate()
            .map_err(|(field, reason)| invalid(format!("classifier.{field}"), reason))?;
        self.scan_grid().validate().map_err(|e| match e {
            kuramoto3::scan::ScanError::InvalidGrid { field, reason } => {
                invalid(format!("command.scan.{field}"), reason)
            }
            other => invalid("command.scan", other.to_string()),
        })?;
        let b = &self.command.bifurcate;
        if !(b.start.is_finite() && b.end.is_finite()) || b.start == b.end {
            return Err(invalid("command.bifurcate.end", "bounds must be finite and distinct"));
        }
        if b.n_steps < 2 {
            return Err(invalid("command.bifurcate.n_steps", "must be >= 2"));
        }
        if b.axis == SweepAxis::Alpha {
            for (name, v) in [("start", b.start), ("end", b.end)] {
                if !(0.0..std::f64::consts::PI).contains(&v) {
                    return Err(invalid(format!("command.bifurcate.{name}"), "alpha must lie in [0, pi)"));
                }
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Params {
        self.model.params()
    }

    pub fn integrator(&self) -> Config {
        self.integrator.config()
    }

    pub fn scan_grid(&self) -> ScanGrid {
        let s = &self.command.scan;
        ScanGrid {
            mu_min: s.mu_min,
            mu_max: s.mu_max,
            gamma_min: s.gamma_min,
            gamma_max: s.gamma_max,
            n_mu: s.n_mu,
            n_gamma: s.n_gamma,
            alpha: self.model.alpha,
            n_ics: s.n_ics,
            seed: self.seed,
        }
    }

    pub fn initial_state(&self) -> State {
        match self.command.simulate {
            SimulateSection {
                theta0: Some(theta),
                omega0: Some(omega),
            } => State::new(theta, omega),
            _ => random_state_from_seed(self.seed),
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let b = &self.command.bifurcate;
        let initial = match b.initial {
            InitialState::Sync => Some(State::sync(0.0)),
            InitialState::Splay => Some(State::splay()),
            InitialState::Antipodal => Some(State::antipodal(2)),
            InitialState::Random => None,
            InitialState::Explicit { theta, omega } => Some(State::new(theta, omega)),
        };
        SweepSpec {
            n_steps: b.n_steps,
            cfg: self.integrator(),
            init: if b.fresh_start {
                InitPolicy::FreshRandom(self.seed)
            } else {
                InitPolicy::Inherit
            },
            initial,
            seed: self.seed,
            tol: self.classifier,
            ..SweepSpec::new(b.axis, b.start, b.end, self.params())
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_nested_key_names_path() {
        let err = RunConfig::from_json(r#"{"command":{"scan":{"n_mus":3}}}"#).unwrap_err();
        match err {
            ConfigError::Validation { path, .. } => assert!(path.starts_with("command.scan"), "{path}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn truncated_document_is_parse_error() {
        assert!(matches!(RunConfig::from_json(r#"{"model":"#), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn explicit_initial_state() {
        let c = RunConfig::from_json(
            r#"{"command":{"bifurcate":{"initial":{"theta":[0,1,2],"omega":[0,0,0]}}}}"#,
        )
        .unwrap();
        assert_eq!(c.sweep_spec().initial, Some(State::new([0.0, 1.0, 2.0], [0.0; 3])));
        let c = RunConfig::from_json(r#"{"command":{"bifurcate":{"initial":"antipodal"}}}"#).unwrap();
        assert_eq!(c.sweep_spec().initial, Some(State::antipodal(2)));
    }
}
