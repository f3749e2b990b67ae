//! Analytic oracles: record-space quadrature of the bare-measurement
//! impurity, long-time asymptotes, feedback decay curves and speed-ups.
//!
//! Strengths are `γ` for `J_z` measurements and `κ` for register channels;
//! a single qubit has `κ = γ/4`.

mod bare;
mod curve;
mod feedback;
pub mod quadrature;

pub use bare::{
    bare_qubit_quadrature, bare_qudit_quadrature, bare_register_asymptote,
    bare_register_quadrature, jordan_korotkov_asymptote, jordan_korotkov_quadrature,
    qubit_asymptote, qudit_asymptote, QubitInitialState,
};
pub use curve::{time_to_impurity, CurveKind, DecaySource, ImpurityCurve, Oracle};
pub use feedback::{
    feedback_curve_qubit, feedback_curve_qudit_lower, feedback_curve_register_lower,
    speedup_bounds, speedup_ratio_qubit, SpeedupBounds,
};
