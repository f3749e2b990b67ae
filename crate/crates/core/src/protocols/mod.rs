//! Feedback strategies and the deterministic single-step impurity rates
//! used as oracles for them.
#![allow(non_snake_case)]

mod rates;
mod strategy;

pub use rates::{
    binary_delta_for_impurity, binary_state_dL, bound_sandwich, flat_delta_for_impurity,
    flat_state_dL, max_element_bound, max_off_diagonal, optimal_permutation_dL,
    permutation_average_closed_form, permutation_averaged_dL, register_max_element_bound,
    register_permutation_averaged_dL, sign_pattern_max, step_dL, BoundSandwich,
};
pub use strategy::{FeedbackStrategy, PermutationPolicy, StrategyKind};
