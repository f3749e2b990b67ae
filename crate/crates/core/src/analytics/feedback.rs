//! Deterministic impurity decay under unbiased-basis feedback, and
//! speed-up formulas.

use crate::{Error, Result};

fn check_initial(l0: f64, max: f64) -> Result<()> {
    if (0.0..=max + 1e-12).contains(&l0) {
        Ok(())
    } else {
        Err(Error::domain(format!("initial impurity {l0} outside [0, {max}]")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t = {t} must be nonnegative")))
    }
}

/// Qubit feedback: `L₀·e^{−2γt}`.
pub fn feedback_curve_qubit(l0: f64, strength: f64, t: f64) -> Result<f64> {
    check_initial(l0, 0.5)?;
    check_time(t)?;
    Ok(l0 * (-2.0 * strength * t).exp())
}

/// Lower-bound qudit decay `L₀·e^{−(2/3)(D+1)γt}`, which the
/// permutation-averaged protocol achieves.
pub fn feedback_curve_qudit_lower(dim: usize, l0: f64, strength: f64, t: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    check_initial(l0, 1.0 - 1.0 / dim as f64)?;
    check_time(t)?;
    Ok(l0 * (-qudit_lower_rate(dim) * strength * t).exp())
}

/// Lower-bound register decay `L₀·e^{−8κnt/(2ⁿ−1)}`.
pub fn feedback_curve_register_lower(qubits: usize, l0: f64, kappa: f64, t: f64) -> Result<f64> {
    if qubits == 0 || qubits > 30 {
        return Err(Error::domain(format!("register size {qubits}")));
    }
    let d = (1usize << qubits) as f64;
    check_initial(l0, 1.0 - 1.0 / d)?;
    check_time(t)?;
    Ok(l0 * (-register_lower_rate(qubits) * kappa * t).exp())
}

/// `(2/3)(D+1)`, the decay rate in units of `γ`.
pub(crate) fn qudit_lower_rate(dim: usize) -> f64 {
    2.0 / 3.0 * (dim as f64 + 1.0)
}

/// `8n/(2ⁿ−1)`, the decay rate in units of `κ`.
pub(crate) fn register_lower_rate(qubits: usize) -> f64 {
    8.0 * qubits as f64 / ((1usize << qubits) as f64 - 1.0)
}

/// Asymptotic speed-up bounds. Register entries are present only when a
/// register size is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupBounds {
    /// `(2/3)(D+1)`, achieved by permutation-averaged feedback.
    pub qudit_lower: f64,
    /// `D²/2`, for any unbiased-basis feedback.
    pub qudit_upper: f64,
    /// `2n/(D−1)`.
    pub register_lower: Option<f64>,
    /// `2n`.
    pub register_upper: Option<f64>,
}

pub fn speedup_bounds(dim: usize, qubits: Option<usize>) -> Result<SpeedupBounds> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let d = dim as f64;
    let (register_lower, register_upper) = match qubits {
        Some(n) => {
            if n == 0 || n >= usize::BITS as usize || 1usize << n != dim {
                return Err(Error::domain(format!("D = {dim} is not 2^{n}")));
            }
            let n = n as f64;
            (Some(2.0 * n / (d - 1.0)), Some(2.0 * n))
        }
        None => (None, None),
    };
    Ok(SpeedupBounds {
        qudit_lower: 2.0 / 3.0 * (d + 1.0),
        qudit_upper: d * d / 2.0,
        register_lower,
        register_upper,
    })
}

/// Finite-time qubit speed-up `S` from
/// `1/S = 1/2 + ln√(16πγt)/(2γt) − ln(2π)/(2γt)` with `t` the bare time.
///
/// Built on the long-time asymptote, so `γt ≤ 1` is refused.
pub fn speedup_ratio_qubit(t_bare: f64, strength: f64) -> Result<f64> {
    let gt = strength * t_bare;
    if !(gt > 1.0) || !gt.is_finite() {
        return Err(Error::domain(format!(
            "speed-up formula needs γt > 1, got {gt}"
        )));
    }
    let inv = 0.5 + (16.0 * std::f64::consts::PI * gt).sqrt().ln() / (2.0 * gt)
        - (2.0 * std::f64::consts::PI).ln() / (2.0 * gt);
    Ok(1.0 / inv)
}
