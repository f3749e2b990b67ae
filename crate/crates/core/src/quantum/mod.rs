//! Dense complex linear algebra for states, observables and unbiased
//! transforms, together with the algebraic identities that the feedback
//! bounds rest on.
//!
//! Basis states are labelled `0..D`. [`jz_operator`] puts the `+j` eigenvalue
//! on label 0 and descends with the label, and register observables treat
//! qubit 1 as the most significant bit of the label.

pub(crate) mod eigen;
pub(crate) mod identities;
mod operator;
pub(crate) mod state;
mod transform;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use eigen::{eigensystem, hermitian_eigensystem, EigenDecomposition};
pub use identities::{
    permutation_sum_identity, verify_row_sum_identity, verify_traceless_conjugate,
};
pub use operator::{conjugate_observable, jz_operator, register_observable, Observable};
pub use state::{binary_state, flat_state, flat_state_impurity, impurity, DensityMatrix};
pub use transform::{
    fourier_unbiased_transform, permutation_operator, verify_unbiased, UnitaryTransform,
};

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-10;
pub(crate) const POSITIVITY_TOL: f64 = 1e-9;
pub(crate) const UNITARY_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest `|m_ij - conj(m_ji)|`.
pub(crate) fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

pub(crate) fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

pub(crate) fn real_trace(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> crate::Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(crate::Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_square(m: &CMatrix) -> crate::Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(crate::Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(crate::Error::InvalidDimension(0));
    }
    Ok(m.nrows())
}
