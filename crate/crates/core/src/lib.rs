//! Simulation of continuous quantum measurement with unbiased-basis feedback
//! and the analytic oracles used to check it.
//!
//! Modules, bottom up:
//!
//! * [`quantum`]: states, observables, unbiased transforms and identities.
//! * [`sme`]: stochastic master equation stepping, noise and exact samplers.
//! * [`protocols`]: feedback strategies and single-step impurity rates.
//! * [`analytics`]: quadrature, asymptotes, feedback curves and speed-ups.
//! * [`ensemble`]: parallel trajectory ensembles and measured speed-ups.
//! * [`verify`]: the identity checks run by `purify verify`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod quantum;
pub mod analytics;
pub mod ensemble;
pub mod protocols;
pub mod sme;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
