use super::bare::{
    bare_qubit_quadrature, bare_qudit_quadrature, bare_register_asymptote,
    bare_register_quadrature, jordan_korotkov_quadrature, qubit_asymptote, qudit_asymptote,
    QubitInitialState,
};
use super::feedback::{
    feedback_curve_qubit, feedback_curve_qudit_lower, feedback_curve_register_lower,
    qudit_lower_rate, register_lower_rate,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Quadrature,
    Asymptotic,
    DeterministicFeedback,
    Bound,
    Simulated,
}

/// Mean impurity sampled on a sorted time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpurityCurve {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
}

impl ImpurityCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::domain("curve needs matching, nonempty time and value grids"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("curve times must be strictly increasing"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::domain("curve values must lie in [0, 1]"));
        }
        if kind == CurveKind::DeterministicFeedback
            && values.windows(2).any(|w| !(w[1] < w[0]) && w[0] > 0.0)
        {
            return Err(Error::domain("feedback curves must be strictly decreasing"));
        }
        Ok(Self { times, values, kind })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }
}

/// Time at which the curve first falls to `target`, interpolating `ln L`
/// linearly in `t` on the bracketing segment.
pub fn time_to_impurity(curve: &ImpurityCurve, target: f64) -> Result<f64> {
    let (t, v) = (&curve.times, &curve.values);
    if !(target > 0.0) {
        return Err(Error::NoCrossing { target });
    }
    if target == v[0] {
        return Ok(t[0]);
    }
    if target > v[0] {
        return Err(Error::NoCrossing { target });
    }
    for k in 0..v.len() - 1 {
        let (a, b) = (v[k], v[k + 1]);
        if a >= target && target >= b {
            if a == b {
                return Ok(t[k]);
            }
            let frac = if b > 0.0 {
                (a / target).ln() / (a / b).ln()
            } else {
                (a - target) / (a - b)
            };
            return Ok(t[k] + frac * (t[k + 1] - t[k]));
        }
    }
    Err(Error::NoCrossing { target })
}

/// Anything that can report when its mean impurity reaches a target.
pub trait DecaySource {
    fn time_to_impurity(&self, target: f64) -> Result<f64>;
}

impl DecaySource for ImpurityCurve {
    fn time_to_impurity(&self, target: f64) -> Result<f64> {
        time_to_impurity(self, target)
    }
}

/// Analytic impurity curves that can be evaluated at any time.
///
/// `strength` is `γ`, `kappa` is the register strength `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    BareQubit { strength: f64 },
    BareQudit { dim: usize, strength: f64 },
    JordanKorotkov { initial: QubitInitialState, strength: f64 },
    BareRegister { qubits: usize, kappa: f64 },
    QubitAsymptote { strength: f64 },
    QuditAsymptote { dim: usize, strength: f64 },
    RegisterAsymptote { qubits: usize, kappa: f64 },
    FeedbackQubit { l0: f64, strength: f64 },
    FeedbackQuditLower { dim: usize, l0: f64, strength: f64 },
    FeedbackRegisterLower { qubits: usize, l0: f64, kappa: f64 },
}

const BISECTION_REL_TOL: f64 = 1e-12;

impl Oracle {
    pub fn kind(&self) -> CurveKind {
        match self {
            Oracle::BareQubit { .. }
            | Oracle::BareQudit { .. }
            | Oracle::JordanKorotkov { .. }
            | Oracle::BareRegister { .. } => CurveKind::Quadrature,
            Oracle::QubitAsymptote { .. }
            | Oracle::QuditAsymptote { .. }
            | Oracle::RegisterAsymptote { .. } => CurveKind::Asymptotic,
            Oracle::FeedbackQubit { .. } | Oracle::FeedbackQuditLower { .. } => {
                CurveKind::DeterministicFeedback
            }
            Oracle::FeedbackRegisterLower { .. } => CurveKind::Bound,
        }
    }

    /// Mean impurity at `t`. Quadrature oracles return the initial impurity
    /// at `t = 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let at_zero = t == 0.0;
        match *self {
            Oracle::BareQubit { strength } if at_zero => {
                check_strength(strength).map(|_| 0.5)
            }
            Oracle::BareQubit { strength } => bare_qubit_quadrature(strength, t),
            Oracle::BareQudit { dim, strength } if at_zero => {
                check_strength(strength)?;
                if dim < 2 {
                    return Err(Error::InvalidDimension(dim));
                }
                Ok(1.0 - 1.0 / dim as f64)
            }
            Oracle::BareQudit { dim, strength } => bare_qudit_quadrature(dim, strength, t),
            Oracle::JordanKorotkov { initial, .. } if at_zero => Ok(initial.impurity()),
            Oracle::JordanKorotkov { initial, strength } => {
                jordan_korotkov_quadrature(&initial, strength, t)
            }
            Oracle::BareRegister { qubits, .. } if at_zero => {
                Ok(1.0 - 1.0 / (1usize << qubits) as f64)
            }
            Oracle::BareRegister { qubits, kappa } => bare_register_quadrature(qubits, kappa, t),
            Oracle::QubitAsymptote { strength } => qubit_asymptote(strength, t),
            Oracle::QuditAsymptote { dim, strength } => qudit_asymptote(dim, strength, t),
            Oracle::RegisterAsymptote { qubits, kappa } => bare_register_asymptote(qubits, kappa, t),
            Oracle::FeedbackQubit { l0, strength } => feedback_curve_qubit(l0, strength, t),
            Oracle::FeedbackQuditLower { dim, l0, strength } => {
                feedback_curve_qudit_lower(dim, l0, strength, t)
            }
            Oracle::FeedbackRegisterLower { qubits, l0, kappa } => {
                feedback_curve_register_lower(qubits, l0, kappa, t)
            }
        }
    }

    /// Samples the oracle on `times`.
    pub fn curve(&self, times: &[f64]) -> Result<ImpurityCurve> {
        let values = times.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        ImpurityCurve::new(times.to_vec(), values, self.kind())
    }

    /// Rate scale `1/time` used to seed the bracket search.
    fn time_scale(&self) -> f64 {
        match *self {
            Oracle::BareQubit { strength }
            | Oracle::BareQudit { strength, .. }
            | Oracle::JordanKorotkov { strength, .. }
            | Oracle::QubitAsymptote { strength }
            | Oracle::QuditAsymptote { strength, .. }
            | Oracle::FeedbackQubit { strength, .. }
            | Oracle::FeedbackQuditLower { strength, .. } => 1.0 / strength,
            Oracle::BareRegister { kappa, .. }
            | Oracle::RegisterAsymptote { kappa, .. }
            | Oracle::FeedbackRegisterLower { kappa, .. } => 1.0 / (4.0 * kappa),
        }
    }

    /// Earliest time at which the oracle is defined.
    fn start_time(&self) -> f64 {
        match self.kind() {
            CurveKind::Asymptotic => self.time_scale(),
            _ => 0.0,
        }
    }
}

fn check_strength(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("strength {s} must be positive")))
    }
}

impl DecaySource for Oracle {
    /// Closed-form inversion for exponential curves; otherwise a doubling
    /// bracket search followed by bisection on the oracle itself.
    fn time_to_impurity(&self, target: f64) -> Result<f64> {
        if !(target > 0.0) {
            return Err(Error::NoCrossing { target });
        }
        let exponential = match *self {
            Oracle::FeedbackQubit { l0, strength } => Some((l0, 2.0 * strength)),
            Oracle::FeedbackQuditLower { dim, l0, strength } => {
                Some((l0, qudit_lower_rate(dim) * strength))
            }
            Oracle::FeedbackRegisterLower { qubits, l0, kappa } => {
                Some((l0, register_lower_rate(qubits) * kappa))
            }
            _ => None,
        };
        if let Some((l0, rate)) = exponential {
            self.eval(0.0)?;
            if target > l0 || l0 == 0.0 {
                return Err(Error::NoCrossing { target });
            }
            return Ok((l0 / target).ln() / rate);
        }

        let mut lo = self.start_time();
        let start = self.eval(lo)?;
        if target == start {
            return Ok(lo);
        }
        if target > start {
            return Err(Error::NoCrossing { target });
        }
        let mut step = self.time_scale();
        let mut hi = lo + step;
        let mut doublings = 0;
        while self.eval(hi)? > target {
            lo = hi;
            step *= 2.0;
            hi += step;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::NoCrossing { target });
            }
        }
        while hi - lo > BISECTION_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feedback_inversion() {
        let o = Oracle::FeedbackQubit { l0: 0.5, strength: 1.0 };
        let t = o.time_to_impurity(0.5 * (-2.0f64).exp()).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert_eq!(o.time_to_impurity(0.5).unwrap(), 0.0);
        assert!(matches!(o.time_to_impurity(0.6), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn curve_interpolation() {
        let o = Oracle::FeedbackQubit { l0: 0.5, strength: 1.0 };
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
        let curve = o.curve(&grid).unwrap();
        // Exact for an exponential.
        let t = time_to_impurity(&curve, 0.5 * (-2.0f64).exp()).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert_eq!(time_to_impurity(&curve, 0.5).unwrap(), 0.0);
        assert!(time_to_impurity(&curve, 1e-9).is_err());
    }

    #[test]
    fn bisection_on_quadrature() {
        let o = Oracle::BareQubit { strength: 1.0 };
        let t = o.time_to_impurity(1e-5).unwrap();
        let l = bare_qubit_quadrature(1.0, t).unwrap();
        assert!(((l - 1e-5) / 1e-5).abs() < 1e-4);
        assert_eq!(o.time_to_impurity(0.5).unwrap(), 0.0);
    }

    #[test]
    fn asymptote_starts_at_validity_edge() {
        let o = Oracle::QubitAsymptote { strength: 1.0 };
        let t = o.time_to_impurity(1e-6).unwrap();
        assert!((o.eval(t).unwrap() / 1e-6 - 1.0).abs() < 1e-9);
        assert!(o.time_to_impurity(0.4).is_err());
    }

    #[test]
    fn curve_validation() {
        assert!(ImpurityCurve::new(vec![0.0, 1.0], vec![0.5], CurveKind::Simulated).is_err());
        assert!(ImpurityCurve::new(vec![1.0, 0.0], vec![0.5, 0.4], CurveKind::Simulated).is_err());
        assert!(ImpurityCurve::new(vec![0.0, 1.0], vec![0.5, 0.5], CurveKind::DeterministicFeedback).is_err());
        assert!(ImpurityCurve::new(vec![0.0, 1.0], vec![0.5, 1.5], CurveKind::Simulated).is_err());
    }
}
