//! Mean impurity under bare measurement from `I/D`, by quadrature over the
//! integrated record, and its long-time asymptotes.

use std::f64::consts::PI;

use super::quadrature::integrate;
use crate::quantum::jz_operator;
use crate::{Error, Result};

const QUBIT_REL_TOL: f64 = 1e-10;
const QUDIT_REL_TOL: f64 = 1e-9;
/// Half-widths beyond the outermost Gaussian mean.
const TAIL_WIDTHS: f64 = 12.0;

fn require_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t = {t} must be positive")))
    }
}

fn require_strength(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("strength {s} must be positive")))
    }
}

/// `1/(cosh u + z·sinh u)` without overflow.
fn inv_cosh_tilt(u: f64, z: f64) -> f64 {
    let e = (-2.0 * u.abs()).exp();
    2.0 * (-u.abs()).exp() / ((1.0 + e) + z * u.signum() * (1.0 - e))
}

/// `∫ e^{−R²/2t}/(cosh(√(2γ)R) + z·sinh(√(2γ)R)) dR`.
fn tilted_integral(strength: f64, t: f64, z: f64, rel_tol: f64) -> Result<f64> {
    let a = (2.0 * strength).sqrt();
    let peak = a * t;
    let edge = peak + TAIL_WIDTHS * t.sqrt();
    let points = [-edge, -peak, 0.0, peak, edge];
    let points: Vec<f64> = dedup_sorted(&points);
    let (v, _) = integrate(
        |r| (-r * r / (2.0 * t)).exp() * inv_cosh_tilt(a * r, z),
        &points,
        rel_tol,
        0.0,
    )?;
    Ok(v)
}

fn dedup_sorted(points: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = points.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    out
}

/// `⟨L(t)⟩ = e^{−γt}/√(8πt)·∫ e^{−R²/2t}/cosh(√(2γ)R) dR` for a qubit
/// measured through `J_z` from `I/2`.
pub fn bare_qubit_quadrature(strength: f64, t: f64) -> Result<f64> {
    require_strength(strength)?;
    require_time(t)?;
    let integral = tilted_integral(strength, t, 0.0, QUBIT_REL_TOL)?;
    Ok((-strength * t).exp() / (8.0 * PI * t).sqrt() * integral)
}

/// `⟨L(t)⟩ = ∫ P(R,t)·L(R,t) dR` for a `D`-level system measured through
/// `J_z` from `I/D`.
///
/// The record density is `(1/D)·Σ_i φ_i(R)` with `φ_i` Gaussian of mean
/// `√(8γ)·x_i·t` and variance `t`, and the conditioned populations are
/// `p_i = φ_i/Σ_j φ_j`, so the integrand is `(1/D)·Σ_i φ_i·Σ_{j≠i} p_j`.
pub fn bare_qudit_quadrature(dim: usize, strength: f64, t: f64) -> Result<f64> {
    require_strength(strength)?;
    require_time(t)?;
    let x = jz_operator(dim)?;
    let means: Vec<f64> = x
        .diagonal()
        .expect("J_z is diagonal")
        .iter()
        .map(|&xi| (8.0 * strength).sqrt() * xi * t)
        .collect();
    let d = dim as f64;
    let log_norm = -0.5 * (2.0 * PI * t).ln();
    let integrand = |r: f64| {
        let log_phi: Vec<f64> = means
            .iter()
            .map(|&m| log_norm - (r - m) * (r - m) / (2.0 * t))
            .collect();
        let p = crate::sme::normalized_weights(&log_phi);
        let mut acc = 0.0;
        for (i, &lp) in log_phi.iter().enumerate() {
            let others: f64 = p.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
            acc += lp.exp() * others;
        }
        acc / d
    };
    let edge = means[0] + TAIL_WIDTHS * t.sqrt();
    let mut points = vec![-edge, edge];
    for w in means.windows(2) {
        points.push(w[0]);
        points.push(0.5 * (w[0] + w[1]));
    }
    points.push(means[dim - 1]);
    let (v, _) = integrate(integrand, &dedup_sorted(&points), QUDIT_REL_TOL, 0.0)?;
    Ok(v)
}

/// Qubit initial state `(I + x·σx + y·σy + z·σz)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitInitialState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl QubitInitialState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x * x + y * y + z * z > 1.0 + 1e-12 {
            return Err(Error::domain("Bloch vector longer than 1"));
        }
        Ok(Self { x, y, z })
    }

    pub fn maximally_mixed() -> Self {
        Self { x: 0.0, y: 0.0, z: 0.0 }
    }

    /// `1 − tr(ρ₀²) = (1 − |r|²)/2`.
    pub fn impurity(&self) -> f64 {
        (1.0 - self.x * self.x - self.y * self.y - self.z * self.z) / 2.0
    }
}

/// Mean impurity of a qubit measured through `J_z` from an arbitrary
/// initial state:
/// `L(ρ₀)·e^{−γt}/√(2πt)·∫ e^{−R²/2t}/(cosh(√(2γ)R) + z·sinh(√(2γ)R)) dR`.
pub fn jordan_korotkov_quadrature(initial: &QubitInitialState, strength: f64, t: f64) -> Result<f64> {
    require_strength(strength)?;
    require_time(t)?;
    if initial.z.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "|z| = {} leaves no coherence to measure out",
            initial.z.abs()
        )));
    }
    let integral = tilted_integral(strength, t, initial.z, QUBIT_REL_TOL)?;
    Ok(initial.impurity() * (-strength * t).exp() / (2.0 * PI * t).sqrt() * integral)
}

/// Exact mean impurity of an `n`-qubit register measured channel by channel
/// with strength `κ` from `I/2ⁿ`: `1 − (1 − L_q)ⁿ` with `L_q` the qubit
/// value at `γ = 4κ`.
pub fn bare_register_quadrature(qubits: usize, kappa: f64, t: f64) -> Result<f64> {
    if qubits == 0 {
        return Err(Error::domain("register size 0"));
    }
    let lq = bare_qubit_quadrature(4.0 * kappa, t)?;
    Ok(-(qubits as f64 * (-lq).ln_1p()).exp_m1())
}

fn require_long_time(gamma_t: f64) -> Result<()> {
    if gamma_t >= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "long-time formula needs γt ≥ 1, got {gamma_t}"
        )))
    }
}

/// `π·e^{−γt}/√(16πγt)`.
pub fn qubit_asymptote(strength: f64, t: f64) -> Result<f64> {
    require_strength(strength)?;
    require_long_time(strength * t)?;
    Ok(PI * (-strength * t).exp() / (16.0 * PI * strength * t).sqrt())
}

/// Qubit asymptote times `2(D−1)/D`.
pub fn qudit_asymptote(dim: usize, strength: f64, t: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let d = dim as f64;
    Ok(2.0 * (d - 1.0) / d * qubit_asymptote(strength, t)?)
}

/// Qubit asymptote times `2L(ρ₀)/√(1 − z²)`.
pub fn jordan_korotkov_asymptote(initial: &QubitInitialState, strength: f64, t: f64) -> Result<f64> {
    if initial.z.abs() >= 1.0 {
        return Err(Error::domain("|z| must be below 1"));
    }
    Ok(2.0 * initial.impurity() / (1.0 - initial.z * initial.z).sqrt() * qubit_asymptote(strength, t)?)
}

/// `n·π·e^{−4κt}/(8√(πκt))`, i.e. `n` times the qubit asymptote at `γ = 4κ`.
pub fn bare_register_asymptote(qubits: usize, kappa: f64, t: f64) -> Result<f64> {
    if qubits == 0 {
        return Err(Error::domain("register size 0"));
    }
    require_strength(kappa)?;
    require_time(t)?;
    require_long_time(4.0 * kappa * t)?;
    if 4.0 * kappa * t < 2.0 {
        log::warn!("register asymptote at 4κt = {} is outside its long-time regime", 4.0 * kappa * t);
    }
    let n = qubits as f64;
    Ok(n * PI * (-4.0 * kappa * t).exp() / (8.0 * (PI * kappa * t).sqrt()))
}
