use num_complex::Complex64;

use super::{
    c, check_square, hermitian_residual, real_trace, CMatrix, HERMITIAN_TOL, POSITIVITY_TOL,
    TRACE_TOL,
};
use crate::{Error, Result};

/// A `D×D` Hermitian, positive-semidefinite state.
///
/// `normalized` is false only for the unnormalized linear-trajectory states
/// produced by [`crate::sme::linear_solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    normalized: bool,
}

impl DensityMatrix {
    /// Validated unit-trace state.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let rho = Self::checked(entries, true)?;
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::contract(format!("trace is {trace}, expected 1")));
        }
        Ok(rho)
    }

    /// Validated state whose trace is not constrained.
    pub fn unnormalized(entries: CMatrix) -> Result<Self> {
        Self::checked(entries, false)
    }

    fn checked(entries: CMatrix, normalized: bool) -> Result<Self> {
        check_square(&entries)?;
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let residual = hermitian_residual(&entries);
        if residual > HERMITIAN_TOL {
            return Err(Error::contract(format!(
                "state is not Hermitian (residual {residual:e})"
            )));
        }
        let rho = Self {
            entries,
            normalized,
        };
        let scale = if normalized { 1.0 } else { rho.trace().abs().max(1.0) };
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL * scale {
            return Err(Error::contract(format!(
                "state is not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(entries: CMatrix, normalized: bool) -> Self {
        Self {
            entries,
            normalized,
        }
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(values[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `I/D`, the default initial state.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self::from_parts(
            CMatrix::identity(dim, dim) * c(1.0 / dim as f64),
            true,
        ))
    }

    /// Projector onto a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm2 == 0.0 {
            return Err(Error::domain("zero state vector"));
        }
        let d = psi.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm2))
    }

    /// Qubit state `(I + xσx + yσy + zσz)/2`.
    pub fn qubit_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        if x * x + y * y + z * z > 1.0 + 1e-12 {
            return Err(Error::domain("Bloch vector longer than 1"));
        }
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c((1.0 + z) / 2.0),
                Complex64::new(x / 2.0, -y / 2.0),
                Complex64::new(x / 2.0, y / 2.0),
                c((1.0 - z) / 2.0),
            ],
        );
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.entries)
    }

    /// `tr(ρ²)`, which for a Hermitian matrix is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Divides by the trace.
    pub fn normalize(&self) -> Result<Self> {
        let trace = self.trace();
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::domain(format!("cannot normalize trace {trace}")));
        }
        Ok(Self::from_parts(&self.entries * c(1.0 / trace), true))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        super::eigensystem(self)
            .eigenvalues()
            .last()
            .copied()
            .unwrap_or(0.0)
    }
}

/// Linear entropy `1 - tr(ρ²)`.
pub fn impurity(rho: &DensityMatrix) -> Result<f64> {
    if !rho.is_normalized() {
        return Err(Error::contract("impurity of an unnormalized state"));
    }
    Ok(1.0 - rho.purity())
}

/// `diag(1-Δ, Δ/(D-1), …, Δ/(D-1))`.
pub fn flat_state(dim: usize, delta: f64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    check_fraction(delta)?;
    let rest = delta / (dim - 1) as f64;
    let mut values = vec![rest; dim];
    values[0] = 1.0 - delta;
    Ok(diagonal_state(&values))
}

/// Closed-form impurity of [`flat_state`].
pub fn flat_state_impurity(dim: usize, delta: f64) -> f64 {
    let d1 = (dim - 1) as f64;
    d1 * (2.0 * delta * (1.0 - delta) / d1 + (dim as f64 - 2.0) * delta * delta / (d1 * d1))
}

/// Two nonzero eigenvalues: `1-Δ'` at `positions.0`, `Δ'` at `positions.1`.
pub fn binary_state(dim: usize, delta: f64, positions: (usize, usize)) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    check_fraction(delta)?;
    let (a, b) = positions;
    if a == b || a >= dim || b >= dim {
        return Err(Error::domain(format!(
            "binary-state positions ({a}, {b}) must be distinct and below {dim}"
        )));
    }
    let mut values = vec![0.0; dim];
    values[a] = 1.0 - delta;
    values[b] = delta;
    Ok(diagonal_state(&values))
}

pub(crate) fn diagonal_state(values: &[f64]) -> DensityMatrix {
    let d = values.len();
    DensityMatrix::from_parts(
        CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(values[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        true,
    )
}

fn check_fraction(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::domain(format!("Δ = {delta} outside [0, 1]")))
    }
}
