//! TOML experiment files.
//!
//! ```toml
//! [system]
//! dimension = 2                # or register_n = 2
//! strength = 1.0
//! strength_convention = "gamma" # or "kappa"; γ = 4κ
//!
//! [run]
//! t_final = 1.0
//! n_traj = 100
//! seed = 7
//! sample_count = 11            # or sample_times = [0.0, 0.5, 1.0]
//!
//! [protocol]
//! kind = "qubit-ubb"
//!
//! [output]
//! path = "out.csv"
//! ```

use std::path::{Path, PathBuf};

use purify_core::protocols::{FeedbackStrategy, PermutationPolicy, StrategyKind};
use purify_core::quantum::{fourier_unbiased_transform, UnitaryTransform};
use purify_core::sme::{uniform_grid, NoiseSource, SimConfig};
use purify_core::Error;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrengthConvention {
    Gamma,
    Kappa,
}

impl StrengthConvention {
    /// Converts `value` in this convention to `target`.
    pub fn convert(self, value: f64, target: StrengthConvention) -> f64 {
        match (self, target) {
            (StrengthConvention::Gamma, StrengthConvention::Kappa) => value / 4.0,
            (StrengthConvention::Kappa, StrengthConvention::Gamma) => value * 4.0,
            _ => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformChoice {
    #[default]
    Fourier,
    FourierRandomPhase,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub dimension: Option<usize>,
    pub register_n: Option<usize>,
    pub strength: f64,
    pub strength_convention: StrengthConvention,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub dt: Option<f64>,
    pub t_final: f64,
    #[serde(default = "one")]
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
    pub sample_times: Option<Vec<f64>>,
    pub sample_count: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub kind: String,
    #[serde(default)]
    pub transform: TransformChoice,
    pub permutation_policy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub run: RunSection,
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn field(name: &str, reason: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidConfig {
        field: name.to_string(),
        reason: reason.into(),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Register size, or `None` for a qudit.
    pub fn qubits(&self) -> CliResult<Option<usize>> {
        match (self.system.dimension, self.system.register_n) {
            (Some(_), None) => Ok(None),
            (None, Some(n)) => Ok(Some(n)),
            (Some(_), Some(_)) => Err(field("register_n", "give either dimension or register_n, not both")),
            (None, None) => Err(field("dimension", "missing (or give register_n)")),
        }
    }

    /// Validated simulation settings. Qudit strengths are `γ`, register
    /// strengths `κ`.
    pub fn sim_config(&self) -> CliResult<SimConfig> {
        let run = &self.run;
        let s = &self.system;
        let mut config = match self.qubits()? {
            None => {
                let gamma = s.strength_convention.convert(s.strength, StrengthConvention::Gamma);
                SimConfig::qudit(s.dimension.unwrap_or(0), gamma, run.t_final)
            }
            Some(n) => {
                let kappa = s.strength_convention.convert(s.strength, StrengthConvention::Kappa);
                SimConfig::register(n, kappa, run.t_final)
            }
        };
        if let Some(dt) = run.dt {
            config.dt = dt;
        }
        config.seed = run.seed;
        config.n_traj = run.n_traj;
        match (&run.sample_times, run.sample_count) {
            (Some(_), Some(_)) => {
                return Err(field("sample_count", "give either sample_times or sample_count"))
            }
            (Some(times), None) => config.sample_times = times.clone(),
            (None, Some(count)) => {
                if count < 1 {
                    return Err(field("sample_count", "must be at least 1"));
                }
                config.sample_times = uniform_grid(run.t_final, count);
            }
            (None, None) => {}
        }
        if let Some(format) = &self.output.format {
            if format != "csv" {
                return Err(field("format", format!("`{format}` is not supported (csv only)")));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn strategy(&self) -> CliResult<FeedbackStrategy> {
        let kind: StrategyKind = self
            .protocol
            .kind
            .parse()
            .map_err(|_| field("kind", format!("unknown protocol `{}`", self.protocol.kind)))?;
        let policy = match &self.protocol.permutation_policy {
            None => PermutationPolicy::ResampleEachStep,
            Some(p) => p
                .parse()
                .map_err(|_| field("permutation_policy", format!("unknown policy `{p}`")))?,
        };
        let qubits = self.qubits()?;
        if kind.is_register() != qubits.is_some() {
            return Err(field(
                "kind",
                format!("`{}` does not fit the configured system", kind.name()),
            ));
        }
        let dim = match qubits {
            Some(n) if (1..=10).contains(&n) => 1usize << n,
            Some(n) => return Err(field("register_n", format!("{n} is outside 1..=10"))),
            None => self.system.dimension.unwrap_or(0),
        };
        if dim < 2 {
            return Err(field("dimension", format!("{dim} is below 2")));
        }
        let transform = match self.protocol.transform {
            TransformChoice::Fourier => fourier_unbiased_transform(dim)?,
            TransformChoice::FourierRandomPhase => {
                // Phases come from their own stream so they never overlap
                // trajectory noise.
                let mut rng = NoiseSource::new(self.run.seed, u64::MAX).rng(0);
                UnitaryTransform::random_phase_fourier(dim, &mut rng)?
            }
        };
        let strategy = match kind {
            StrategyKind::Bare => FeedbackStrategy::bare(dim)?,
            StrategyKind::QubitUbb => {
                if dim != 2 {
                    return Err(field("kind", "qubit-ubb needs dimension = 2"));
                }
                FeedbackStrategy::qubit_ubb()
            }
            StrategyKind::QuditUbb => FeedbackStrategy::qudit_ubb(dim, transform)?,
            StrategyKind::PermutationAveragedUbb => {
                FeedbackStrategy::permutation_averaged_ubb(dim, transform, policy)?
            }
            StrategyKind::RegisterBare => FeedbackStrategy::register_bare(qubits.unwrap_or(0))?,
            StrategyKind::RegisterUbb => {
                FeedbackStrategy::register_ubb(qubits.unwrap_or(0), transform, policy)?
            }
        };
        Ok(strategy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use purify_core::sme::System;

    const QUBIT: &str = r#"
[system]
dimension = 2
strength = 1.0
strength_convention = "gamma"

[run]
t_final = 1.0
n_traj = 4
seed = 3
sample_count = 5

[protocol]
kind = "qubit-ubb"
"#;

    fn invalid_field(err: CliError) -> String {
        match err {
            CliError::Core(Error::InvalidConfig { field, .. }) => field,
            other => panic!("expected a field error, got {other}"),
        }
    }

    #[test]
    fn qubit_config() {
        let cfg = ExperimentConfig::parse(QUBIT).unwrap();
        let sim = cfg.sim_config().unwrap();
        assert_eq!(sim.system, System::Qudit { dim: 2 });
        assert_eq!(sim.dt, 1e-4);
        assert_eq!(sim.sample_times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sim.n_traj, 4);
        assert_eq!(cfg.strategy().unwrap().kind(), StrategyKind::QubitUbb);
    }

    #[test]
    fn conventions_convert() {
        let text = QUBIT.replace("\"gamma\"", "\"kappa\"");
        let sim = ExperimentConfig::parse(&text).unwrap().sim_config().unwrap();
        assert_eq!(sim.strength, 4.0);

        let reg = r#"
[system]
register_n = 2
strength = 4.0
strength_convention = "gamma"
[run]
t_final = 0.5
[protocol]
kind = "register-ubb"
permutation_policy = "fixed"
transform = "fourier-random-phase"
"#;
        let cfg = ExperimentConfig::parse(reg).unwrap();
        let sim = cfg.sim_config().unwrap();
        assert_eq!(sim.system, System::Register { qubits: 2 });
        assert_eq!(sim.strength, 1.0);
        let strategy = cfg.strategy().unwrap();
        assert_eq!(strategy.dim(), 4);
        assert_eq!(strategy.policy(), PermutationPolicy::Fixed);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = QUBIT.replace("seed = 3", "seed = 3\nsteps = 10");
        let msg = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(msg.contains("steps"), "{msg}");
    }

    #[test]
    fn invalid_fields_are_named() {
        let cfg = ExperimentConfig::parse(&QUBIT.replace("strength = 1.0", "strength = -1.0")).unwrap();
        assert_eq!(invalid_field(cfg.sim_config().unwrap_err()), "strength");

        let cfg = ExperimentConfig::parse(&QUBIT.replace("n_traj = 4", "n_traj = 0")).unwrap();
        assert_eq!(invalid_field(cfg.sim_config().unwrap_err()), "n_traj");

        let cfg = ExperimentConfig::parse(&QUBIT.replace("qubit-ubb", "magic")).unwrap();
        assert_eq!(invalid_field(cfg.strategy().unwrap_err()), "kind");

        let cfg = ExperimentConfig::parse(&QUBIT.replace("qubit-ubb", "register-bare")).unwrap();
        assert_eq!(invalid_field(cfg.strategy().unwrap_err()), "kind");

        let both = QUBIT.replace("sample_count = 5", "sample_count = 5\nsample_times = [0.0]");
        let cfg = ExperimentConfig::parse(&both).unwrap();
        assert_eq!(invalid_field(cfg.sim_config().unwrap_err()), "sample_count");

        let csv = format!("{QUBIT}\n[output]\nformat = \"parquet\"\n");
        let cfg = ExperimentConfig::parse(&csv).unwrap();
        assert_eq!(invalid_field(cfg.sim_config().unwrap_err()), "format");
    }
}
