//! Parallel trajectory ensembles.
//!
//! Trajectory `k` draws all of its noise from stream `k` of the configured
//! seed, and results are reduced in trajectory order, so summaries do not
//! depend on the number of workers.

use rayon::prelude::*;

use crate::analytics::{CurveKind, DecaySource, ImpurityCurve};
use crate::protocols::FeedbackStrategy;
use crate::quantum::{eigensystem, DensityMatrix, Observable};
use crate::sme::{sme_step, MeasurementRecord, NoiseSource, SimConfig, System, WienerNoise};
use crate::stats::{mean_and_stderr, CompensatedSum};
use crate::{Error, Result};

/// One trajectory's impurity samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub sample_times: Vec<f64>,
    pub impurity_values: Vec<f64>,
    pub clip_count: usize,
    pub steps: usize,
    pub final_state: DensityMatrix,
    /// Present when the configuration asks to keep records.
    pub record: Option<MeasurementRecord>,
}

/// Ensemble mean impurity with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub sample_times: Vec<f64>,
    pub mean_impurity: Vec<f64>,
    pub stderr_impurity: Vec<f64>,
    pub n_traj: usize,
    pub config: SimConfig,
    /// Clipped steps over all steps of all trajectories.
    pub clip_fraction: f64,
}

impl EnsembleSummary {
    /// The mean impurity as a curve; repeated sample times keep their first
    /// value.
    pub fn curve(&self) -> Result<ImpurityCurve> {
        let mut times = Vec::with_capacity(self.sample_times.len());
        let mut values = Vec::with_capacity(self.sample_times.len());
        for (&t, &v) in self.sample_times.iter().zip(&self.mean_impurity) {
            if times.last().is_some_and(|&last| last >= t) {
                continue;
            }
            times.push(t);
            values.push(v.clamp(0.0, 1.0));
        }
        ImpurityCurve::new(times, values, CurveKind::Simulated)
    }

    /// Least-squares slope of `−ln⟨L⟩` against `t` over samples in
    /// `[t_from, t_to]`.
    pub fn decay_rate(&self, t_from: f64, t_to: f64) -> Result<f64> {
        let points: Vec<(f64, f64)> = self
            .sample_times
            .iter()
            .zip(&self.mean_impurity)
            .filter(|&(&t, &l)| t >= t_from && t <= t_to && l > 0.0)
            .map(|(&t, &l)| (t, l.ln()))
            .collect();
        if points.len() < 2 {
            return Err(Error::domain("need at least two positive samples to fit a rate"));
        }
        let n = points.len() as f64;
        let tm = points.iter().map(|p| p.0).sum::<f64>() / n;
        let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
        Ok(-sxy / sxx)
    }
}

impl DecaySource for EnsembleSummary {
    fn time_to_impurity(&self, target: f64) -> Result<f64> {
        self.curve()?.time_to_impurity(target)
    }
}

fn check_compatible(config: &SimConfig, strategy: &FeedbackStrategy) -> Result<()> {
    let register_strategy = strategy.kind().is_register();
    let register_system = matches!(config.system, System::Register { .. });
    if register_strategy != register_system {
        return Err(Error::config(
            "protocol",
            format!("`{}` does not fit the configured system", strategy.kind().name()),
        ));
    }
    if strategy.dim() != config.dim() || strategy.channels() != config.system.channels() {
        return Err(Error::DimensionMismatch {
            expected: config.dim(),
            found: strategy.dim(),
        });
    }
    Ok(())
}

fn initial_state(config: &SimConfig) -> Result<DensityMatrix> {
    match &config.initial_state {
        Some(rho) => Ok(rho.clone()),
        None => DensityMatrix::maximally_mixed(config.dim()),
    }
}

/// Runs trajectory `index` of the ensemble.
pub fn run_trajectory(config: &SimConfig, strategy: &FeedbackStrategy, index: usize) -> Result<TrajectoryResult> {
    config.validate()?;
    check_compatible(config, strategy)?;
    simulate(config, strategy, index)
}

fn simulate(config: &SimConfig, strategy: &FeedbackStrategy, index: usize) -> Result<TrajectoryResult> {
    let source = NoiseSource::new(config.seed, index as u64);
    let channels = strategy.channels();
    let mut noise = WienerNoise::new(&source, channels);
    let mut strategy = strategy.seeded(&source);
    let sample_steps = config.sample_steps();
    let steps = config.steps();
    let mut record = if config.keep_records {
        Some(MeasurementRecord::new(channels, config.dt)?)
    } else {
        None
    };

    let mut rho = initial_state(config)?;
    let mut eigen = eigensystem(&rho);
    let mut values = Vec::with_capacity(sample_steps.len());
    let mut next = 0;
    let mut take_samples = |step: usize, rho: &DensityMatrix, values: &mut Vec<f64>| {
        while next < sample_steps.len() && sample_steps[next] == step {
            values.push(1.0 - rho.purity());
            next += 1;
        }
    };
    take_samples(0, &rho, &mut values);

    let fixed: Vec<Observable> = strategy.base_observables().to_vec();
    let mut clip_count = 0;
    for step in 1..=steps {
        let chosen;
        let observables = if strategy.is_adaptive() {
            chosen = strategy.choose_observables_with(&eigen)?;
            &chosen
        } else {
            &fixed
        };
        let out = sme_step(&rho, observables, config.strength, config.dt, &mut noise).map_err(
            |e| match e {
                Error::NonFinite => Error::NumericalFailure {
                    trajectory: index,
                    step,
                },
                other => other,
            },
        )?;
        if out.clipped {
            clip_count += 1;
        }
        if let Some(rec) = record.as_mut() {
            rec.push(&out.records)?;
        }
        rho = out.state;
        eigen = out.eigen;
        take_samples(step, &rho, &mut values);
    }

    Ok(TrajectoryResult {
        sample_times: config.sample_times.clone(),
        impurity_values: values,
        clip_count,
        steps,
        final_state: rho,
        record,
    })
}

/// All trajectories, in index order, on the current rayon pool.
pub fn run_trajectories(config: &SimConfig, strategy: &FeedbackStrategy) -> Result<Vec<TrajectoryResult>> {
    config.validate()?;
    check_compatible(config, strategy)?;
    (0..config.n_traj)
        .into_par_iter()
        .map(|k| simulate(config, strategy, k))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Runs the ensemble on the current rayon pool.
pub fn run_ensemble(config: &SimConfig, strategy: &FeedbackStrategy) -> Result<EnsembleSummary> {
    let trajectories = run_trajectories(config, strategy)?;
    summarize(config, &trajectories)
}

/// Runs the ensemble on a dedicated pool of `workers` threads.
pub fn run_ensemble_with_workers(
    config: &SimConfig,
    strategy: &FeedbackStrategy,
    workers: usize,
) -> Result<EnsembleSummary> {
    if workers == 0 {
        return Err(Error::config("workers", "at least one worker is required"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    pool.install(|| run_ensemble(config, strategy))
}

/// Order-fixed reduction of per-trajectory samples.
pub fn summarize(config: &SimConfig, trajectories: &[TrajectoryResult]) -> Result<EnsembleSummary> {
    if trajectories.is_empty() {
        return Err(Error::domain("no trajectories to summarize"));
    }
    let samples = config.sample_times.len();
    let mut mean = Vec::with_capacity(samples);
    let mut stderr = Vec::with_capacity(samples);
    let mut column = Vec::with_capacity(trajectories.len());
    for s in 0..samples {
        column.clear();
        column.extend(trajectories.iter().map(|tr| tr.impurity_values[s]));
        let (m, e) = mean_and_stderr(&column);
        mean.push(m);
        stderr.push(e);
    }
    let mut clips = CompensatedSum::default();
    trajectories.iter().for_each(|tr| clips.add(tr.clip_count as f64));
    let total_steps = (trajectories.len() * config.steps()) as f64;
    Ok(EnsembleSummary {
        sample_times: config.sample_times.clone(),
        mean_impurity: mean,
        stderr_impurity: stderr,
        n_traj: trajectories.len(),
        config: config.clone(),
        clip_fraction: if total_steps > 0.0 { clips.value() / total_steps } else { 0.0 },
    })
}

/// `t_bare/t_fb` at which each source first reaches `target`.
pub fn measured_speedup(fb: &dyn DecaySource, bare: &dyn DecaySource, target: f64) -> Result<f64> {
    let t_fb = fb.time_to_impurity(target)?;
    let t_bare = bare.time_to_impurity(target)?;
    if t_fb <= 0.0 {
        return Err(Error::domain(format!(
            "target {target:e} is the initial impurity; the speed-up is undefined"
        )));
    }
    Ok(t_bare / t_fb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{feedback_curve_qubit, Oracle};
    use crate::protocols::{PermutationPolicy, StrategyKind};

    fn qubit_config(t_final: f64, n_traj: usize) -> SimConfig {
        let mut cfg = SimConfig::qudit(2, 1.0, t_final);
        cfg.dt = 1e-3;
        cfg.n_traj = n_traj;
        cfg.seed = 17;
        cfg
    }

    #[test]
    fn zero_time_gives_initial_impurity() {
        for d in 2..=5 {
            let mut cfg = SimConfig::qudit(d, 1.0, 0.0);
            cfg.n_traj = 1;
            let s = run_ensemble(&cfg, &FeedbackStrategy::bare(d).unwrap()).unwrap();
            assert_eq!(s.mean_impurity.len(), 1);
            assert!((s.mean_impurity[0] - (1.0 - 1.0 / d as f64)).abs() < 1e-15);
            assert_eq!(s.stderr_impurity, vec![0.0]);
            assert_eq!(s.clip_fraction, 0.0);
        }
    }

    #[test]
    fn reproducible_and_worker_independent() {
        let cfg = qubit_config(0.5, 16).uniform_samples(6);
        let strategy = FeedbackStrategy::qubit_ubb();
        let a = run_ensemble_with_workers(&cfg, &strategy, 1).unwrap();
        let b = run_ensemble_with_workers(&cfg, &strategy, 4).unwrap();
        let c = run_ensemble(&cfg, &strategy).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn feedback_mean_tracks_curve() {
        let cfg = qubit_config(1.0, 20).uniform_samples(5);
        let s = run_ensemble(&cfg, &FeedbackStrategy::qubit_ubb()).unwrap();
        for (&t, &m) in s.sample_times.iter().zip(&s.mean_impurity) {
            let want = feedback_curve_qubit(0.5, 1.0, t).unwrap();
            assert!(((m - want) / want).abs() < 0.02, "t={t}: {m} vs {want}");
        }
        let rate = s.decay_rate(0.0, 1.0).unwrap();
        assert!((rate - 2.0).abs() < 0.05);
    }

    #[test]
    fn records_are_kept_on_request() {
        let mut cfg = qubit_config(0.01, 1);
        cfg.keep_records = true;
        let tr = run_trajectory(&cfg, &FeedbackStrategy::bare(2).unwrap(), 0).unwrap();
        let rec = tr.record.unwrap();
        assert_eq!(rec.len(), 10);
        assert_eq!(rec.channels(), 1);
        // A bare qubit's state is fixed by the integrated record, up to the
        // O(dR³) per-step difference between the step and the exponential.
        let rho = crate::sme::linear_state(rec.integral(0), 0.01, 1.0, &crate::quantum::jz_operator(2).unwrap())
            .unwrap();
        assert!((rho.entries() - tr.final_state.entries()).norm() < 1e-4);
    }

    #[test]
    fn incompatible_strategy_is_rejected() {
        let cfg = qubit_config(0.1, 1);
        let reg = FeedbackStrategy::register_bare(1).unwrap();
        assert!(matches!(run_ensemble(&cfg, &reg), Err(Error::InvalidConfig { .. })));
        let wrong = FeedbackStrategy::with_defaults(StrategyKind::QuditUbb, 3, PermutationPolicy::Fixed).unwrap();
        assert!(run_ensemble(&cfg, &wrong).is_err());
    }

    #[test]
    fn speedup_of_identical_sources_is_one() {
        let o = Oracle::BareQubit { strength: 1.0 };
        assert_eq!(measured_speedup(&o, &o, 1e-4).unwrap(), 1.0);
        let fb = Oracle::FeedbackQubit { l0: 0.5, strength: 1.0 };
        assert!(measured_speedup(&fb, &o, 0.5).is_err());
        assert!(matches!(measured_speedup(&fb, &o, 0.7), Err(Error::NoCrossing { .. })));
    }
}
