use crate::quantum::DensityMatrix;
use crate::{Error, Result};

/// What is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// One `D`-level system measured through `J_z` with strength `γ`.
    Qudit { dim: usize },
    /// `n` qubits, each measured through its own `σ_z` with strength `κ`.
    Register { qubits: usize },
}

impl System {
    pub fn dim(&self) -> usize {
        match *self {
            System::Qudit { dim } => dim,
            System::Register { qubits } => 1 << qubits,
        }
    }

    pub fn channels(&self) -> usize {
        match *self {
            System::Qudit { .. } => 1,
            System::Register { qubits } => qubits,
        }
    }
}

/// Parameters of a trajectory ensemble.
///
/// `strength` is `γ` for qudits and `κ` for registers (`κ = γ/4` for a
/// single qubit).
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub system: System,
    pub strength: f64,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub n_traj: usize,
    pub sample_times: Vec<f64>,
    /// `None` starts from `I/D`.
    pub initial_state: Option<DensityMatrix>,
    pub keep_records: bool,
}

/// Step-size scale: `dt = DT_SCALE/γ` for qudits and `DT_SCALE/(4κ)` for
/// registers.
pub const DEFAULT_DT_SCALE: f64 = 1e-4;

/// Above this `strength·dt` the first-order step is inaccurate.
pub const COARSE_STEP_WARNING: f64 = 0.01;

impl SimConfig {
    pub fn qudit(dim: usize, gamma: f64, t_final: f64) -> Self {
        Self::with_system(System::Qudit { dim }, gamma, DEFAULT_DT_SCALE / gamma, t_final)
    }

    pub fn register(qubits: usize, kappa: f64, t_final: f64) -> Self {
        Self::with_system(
            System::Register { qubits },
            kappa,
            DEFAULT_DT_SCALE / (4.0 * kappa),
            t_final,
        )
    }

    fn with_system(system: System, strength: f64, dt: f64, t_final: f64) -> Self {
        let sample_times = if t_final > 0.0 {
            vec![0.0, t_final]
        } else {
            vec![0.0]
        };
        Self {
            system,
            strength,
            dt,
            t_final,
            seed: 0,
            n_traj: 1,
            sample_times,
            initial_state: None,
            keep_records: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// Number of integration steps, `round(t_final/dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Step index at which each sample time is recorded.
    pub fn sample_steps(&self) -> Vec<usize> {
        self.sample_times
            .iter()
            .map(|&t| ((t / self.dt).round() as usize).min(self.steps()))
            .collect()
    }

    /// Evenly spaced sample grid with `count` points from 0 to `t_final`.
    pub fn uniform_samples(mut self, count: usize) -> Self {
        self.sample_times = uniform_grid(self.t_final, count);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.system {
            System::Qudit { dim } if dim < 2 => {
                return Err(Error::config("dimension", format!("{dim} is below 2")))
            }
            System::Register { qubits } if qubits == 0 || qubits > 10 => {
                return Err(Error::config("register_n", format!("{qubits} is outside 1..=10")))
            }
            _ => {}
        }
        if !(self.strength > 0.0) || !self.strength.is_finite() {
            return Err(Error::config("strength", format!("{} must be positive", self.strength)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("dt", format!("{} must be positive", self.dt)));
        }
        // t_final = 0 is allowed and yields only the initial sample.
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::config("t_final", format!("{} must be nonnegative", self.t_final)));
        }
        if self.t_final > 0.0 && self.t_final < self.dt {
            return Err(Error::config("t_final", format!("{} is shorter than dt", self.t_final)));
        }
        if self.n_traj == 0 {
            return Err(Error::config("n_traj", "at least one trajectory is required"));
        }
        if self.sample_times.is_empty() {
            return Err(Error::config("sample_times", "no sample times"));
        }
        if self.sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::config("sample_times", "must be sorted"));
        }
        if self
            .sample_times
            .iter()
            .any(|&t| !(t >= 0.0) || t > self.t_final * (1.0 + 1e-12))
        {
            return Err(Error::config(
                "sample_times",
                format!("must lie within [0, {}]", self.t_final),
            ));
        }
        if let Some(rho) = &self.initial_state {
            if rho.dim() != self.dim() {
                return Err(Error::config(
                    "initial_state",
                    format!("dimension {} does not match {}", rho.dim(), self.dim()),
                ));
            }
            if !rho.is_normalized() {
                return Err(Error::config("initial_state", "must be normalized"));
            }
        }
        if self.strength * self.dt > COARSE_STEP_WARNING {
            log::warn!(
                "strength·dt = {} exceeds {COARSE_STEP_WARNING}; the step is coarse",
                self.strength * self.dt
            );
        }
        Ok(())
    }
}

/// `count` evenly spaced points from 0 to `t_final` inclusive.
pub fn uniform_grid(t_final: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t_final],
        _ => (0..count)
            .map(|k| t_final * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = SimConfig::qudit(2, 2.0, 1.0);
        assert_eq!(cfg.dt, 5e-5);
        assert_eq!(cfg.steps(), 20_000);
        assert!(cfg.validate().is_ok());
        let reg = SimConfig::register(2, 0.25, 1.0);
        assert_eq!(reg.dt, 1e-4);
        assert_eq!(reg.dim(), 4);
        assert_eq!(reg.system.channels(), 2);
    }

    #[test]
    fn zero_final_time_has_one_sample() {
        let cfg = SimConfig::qudit(3, 1.0, 0.0);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.sample_steps(), vec![0]);
    }

    #[test]
    fn validation_names_the_field() {
        let field = |cfg: SimConfig| match cfg.validate() {
            Err(Error::InvalidConfig { field, .. }) => field,
            other => panic!("unexpected {other:?}"),
        };
        let mut cfg = SimConfig::qudit(2, 1.0, 1.0);
        cfg.dt = 0.0;
        assert_eq!(field(cfg), "dt");
        let mut cfg = SimConfig::qudit(2, 1.0, 1.0);
        cfg.n_traj = 0;
        assert_eq!(field(cfg), "n_traj");
        let mut cfg = SimConfig::qudit(2, 1.0, 1.0);
        cfg.sample_times = vec![0.5, 0.2];
        assert_eq!(field(cfg), "sample_times");
        let mut cfg = SimConfig::qudit(2, 1.0, 1.0);
        cfg.sample_times = vec![2.0];
        assert_eq!(field(cfg), "sample_times");
        let mut cfg = SimConfig::qudit(2, 1.0, 1e-5);
        cfg.dt = 1e-4;
        assert_eq!(field(cfg), "t_final");
        assert_eq!(field(SimConfig::qudit(1, 1.0, 1.0)), "dimension");
    }

    #[test]
    fn grid() {
        assert_eq!(uniform_grid(1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_grid(2.0, 1), vec![2.0]);
    }
}
