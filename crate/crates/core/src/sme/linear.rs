use rand::Rng;
use rand_distr::StandardNormal;

use crate::quantum::{state::diagonal_state, CMatrix, DensityMatrix, Observable};
use crate::{Error, Result};

fn require_diagonal(x: &Observable) -> Result<&[f64]> {
    x.diagonal().ok_or_else(|| {
        Error::Unsupported("the closed-form solution needs a diagonal observable".into())
    })
}

fn require_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t = {t} must be positive")))
    }
}

/// `ln` of the diagonal of the unnormalized state, up to the `1/D` factor:
/// `−4γx²t + 2√(2γ)·x·R`.
pub(crate) fn log_weights(record: f64, t: f64, strength: f64, diag: &[f64]) -> Vec<f64> {
    let amp = 2.0 * (2.0 * strength).sqrt();
    diag.iter()
        .map(|&x| -4.0 * strength * x * x * t + amp * x * record)
        .collect()
}

/// Normalizes `exp(log_weights)` without overflow.
pub(crate) fn normalized_weights(log_w: &[f64]) -> Vec<f64> {
    let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|&l| (l - peak).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

pub(crate) fn diagonal_impurity(p: &[f64]) -> f64 {
    1.0 - p.iter().map(|v| v * v).sum::<f64>()
}

/// Unnormalized state `exp(−4γX²t)·exp(2√(2γ)·X·R)/D` reached from `I/D`
/// with integrated record `R`, together with its trace.
///
/// The trace is the likelihood ratio of the record against pure noise:
/// the record density is `N·exp(−R²/2t)/√(2πt)`.
pub fn linear_solution(
    record: f64,
    t: f64,
    strength: f64,
    x: &Observable,
) -> Result<(DensityMatrix, f64)> {
    let diag = require_diagonal(x)?;
    require_positive_time(t)?;
    let d = diag.len() as f64;
    let values: Vec<f64> = log_weights(record, t, strength, diag)
        .into_iter()
        .map(|l| l.exp() / d)
        .collect();
    let norm: f64 = values.iter().sum();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = values.len();
    let entries = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            crate::quantum::c(values[i])
        } else {
            crate::quantum::c(0.0)
        }
    });
    Ok((DensityMatrix::from_parts(entries, false), norm))
}

/// The normalized state for record `R`, computed stably for large `|R|`.
pub fn linear_state(record: f64, t: f64, strength: f64, x: &Observable) -> Result<DensityMatrix> {
    let diag = require_diagonal(x)?;
    require_positive_time(t)?;
    Ok(diagonal_state(&normalized_weights(&log_weights(
        record, t, strength, diag,
    ))))
}

/// One exact draw of the bare-measurement outcome at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSample {
    pub record: f64,
    pub state: DensityMatrix,
    pub impurity: f64,
}

/// Draws `R` from its exact density and returns the conditioned state.
///
/// Completing the square shows the density is an equal-weight mixture of
/// `D` Gaussians with means `√(8γ)·x_i·t` and variance `t`.
pub fn exact_record_sampler<R: Rng + ?Sized>(
    strength: f64,
    t: f64,
    x: &Observable,
    rng: &mut R,
) -> Result<ExactSample> {
    let diag = require_diagonal(x)?;
    require_positive_time(t)?;
    let record = draw_record(strength, t, diag, rng);
    let p = normalized_weights(&log_weights(record, t, strength, diag));
    Ok(ExactSample {
        record,
        impurity: diagonal_impurity(&p),
        state: diagonal_state(&p),
    })
}

fn draw_record<R: Rng + ?Sized>(strength: f64, t: f64, diag: &[f64], rng: &mut R) -> f64 {
    let k = rng.random_range(0..diag.len());
    let z: f64 = rng.sample(StandardNormal);
    (8.0 * strength).sqrt() * diag[k] * t + t.sqrt() * z
}

/// Impurity of one exact draw, without building the state.
pub fn exact_impurity_sample<R: Rng + ?Sized>(
    strength: f64,
    t: f64,
    x: &Observable,
    rng: &mut R,
) -> Result<f64> {
    let diag = require_diagonal(x)?;
    require_positive_time(t)?;
    let record = draw_record(strength, t, diag, rng);
    Ok(diagonal_impurity(&normalized_weights(&log_weights(
        record, t, strength, diag,
    ))))
}

/// Exact bare-measurement draw for an `n`-qubit register measured channel by
/// channel with strength `κ`, starting from `I/2ⁿ`.
///
/// The channels commute and the initial state is a product, so each qubit
/// evolves independently and the conditioned state is a product state.
pub fn register_exact_sampler<R: Rng + ?Sized>(
    qubits: usize,
    kappa: f64,
    t: f64,
    rng: &mut R,
) -> Result<ExactSample> {
    if qubits == 0 || qubits > 20 {
        return Err(Error::domain(format!("register size {qubits}")));
    }
    require_positive_time(t)?;
    let sigma_z = [1.0, -1.0];
    let mut diag = vec![1.0];
    let mut purity = 1.0;
    let mut first_record = 0.0;
    for q in 0..qubits {
        let record = draw_record(kappa, t, &sigma_z, rng);
        if q == 0 {
            first_record = record;
        }
        let p = normalized_weights(&log_weights(record, t, kappa, &sigma_z));
        purity *= p[0] * p[0] + p[1] * p[1];
        // Qubit 1 is the most significant bit.
        diag = diag
            .iter()
            .flat_map(|&a| p.iter().map(move |&b| a * b))
            .collect();
    }
    Ok(ExactSample {
        record: first_record,
        state: diagonal_state(&diag),
        impurity: 1.0 - purity,
    })
}

/// Draw from the defensive mixture `q = (p + m)/2`, where `p` is the exact
/// record density and `m` puts Gaussians of variance `t` midway between
/// adjacent peaks of `p`. Returns the record and its weight `p/q ≤ 2`.
fn defensive_draw<R: Rng + ?Sized>(strength: f64, t: f64, diag: &[f64], rng: &mut R) -> (f64, f64) {
    let scale = (8.0 * strength).sqrt() * t;
    let mut peaks: Vec<f64> = diag.iter().map(|&x| scale * x).collect();
    peaks.sort_by(f64::total_cmp);
    let mids: Vec<f64> = peaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let record = if mids.is_empty() || rng.random_bool(0.5) {
        draw_record(strength, t, diag, rng)
    } else {
        let z: f64 = rng.sample(StandardNormal);
        mids[rng.random_range(0..mids.len())] + t.sqrt() * z
    };
    if mids.is_empty() {
        return (record, 1.0);
    }
    // Both mixtures share the variance, so only the exponents matter.
    let expo = |c: &f64| -(record - c) * (record - c) / (2.0 * t);
    let top = peaks.iter().chain(&mids).map(expo).fold(f64::NEG_INFINITY, f64::max);
    let mean_exp = |cs: &[f64]| cs.iter().map(|c| (expo(c) - top).exp()).sum::<f64>() / cs.len() as f64;
    let (pk, md) = (mean_exp(&peaks), mean_exp(&mids));
    (record, pk / (0.5 * pk + 0.5 * md))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::domain(format!("{samples} samples give no error estimate")));
    }
    Ok(())
}

/// Mean bare impurity at `t` with its standard error, from exact draws
/// mixed half-and-half with draws between the record peaks and reweighted.
///
/// At long times the mean is carried by rare records between the peaks,
/// which plain draws from [`exact_record_sampler`] almost never hit.
pub fn weighted_mean_impurity<R: Rng + ?Sized>(
    strength: f64,
    t: f64,
    x: &Observable,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let diag = require_diagonal(x)?;
    require_positive_time(t)?;
    check_samples(samples)?;
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let (r, w) = defensive_draw(strength, t, diag, rng);
            w * diagonal_impurity(&normalized_weights(&log_weights(r, t, strength, diag)))
        })
        .collect();
    Ok(crate::stats::mean_and_stderr(&values))
}

/// Register version of [`weighted_mean_impurity`] for the product state
/// reached from `I/2ⁿ`; each qubit is drawn and weighted independently.
pub fn register_weighted_mean_impurity<R: Rng + ?Sized>(
    qubits: usize,
    kappa: f64,
    t: f64,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if qubits == 0 || qubits > 20 {
        return Err(Error::domain(format!("register size {qubits}")));
    }
    require_positive_time(t)?;
    check_samples(samples)?;
    let sigma_z = [1.0, -1.0];
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let (mut weight, mut purity) = (1.0, 1.0);
            for _ in 0..qubits {
                let (r, w) = defensive_draw(kappa, t, &sigma_z, rng);
                weight *= w;
                purity *= 1.0 - diagonal_impurity(&normalized_weights(&log_weights(r, t, kappa, &sigma_z)));
            }
            weight * (1.0 - purity)
        })
        .collect();
    Ok(crate::stats::mean_and_stderr(&values))
}
