use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;

use super::{c, check_dim, check_square, CMatrix, UNITARY_TOL};
use crate::{Error, Result};

/// A `D×D` unitary: unbiased transforms, permutations and eigenbases.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTransform {
    entries: CMatrix,
}

impl UnitaryTransform {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let d = check_square(&entries)?;
        let residual = (&entries * entries.adjoint() - CMatrix::identity(d, d))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if residual > UNITARY_TOL {
            return Err(Error::contract(format!(
                "matrix is not unitary (residual {residual:e})"
            )));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_parts(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self::from_parts(CMatrix::identity(dim, dim)))
    }

    /// The real rotation `exp(iπJ_y/2) = [[1, 1], [-1, 1]]/√2` that turns
    /// `J_z` into a `J_x`-like observable.
    pub fn qubit_rotation() -> Self {
        let s = FRAC_1_SQRT_2;
        Self::from_parts(CMatrix::from_row_slice(2, 2, &[c(s), c(s), c(-s), c(s)]))
    }

    /// Fourier kernel decorated with row phases `θ` and column phases `φ`:
    /// entry `(k, n)` is `exp(i(θ_k + 2πkn/D + φ_n))/√D`.
    ///
    /// Every member of this family is unbiased with respect to the
    /// computational basis.
    pub fn phase_decorated_fourier(row_phases: &[f64], column_phases: &[f64]) -> Result<Self> {
        let d = row_phases.len();
        check_dim(d, column_phases.len())?;
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let scale = 1.0 / (d as f64).sqrt();
        let entries = CMatrix::from_fn(d, d, |k, n| {
            // Reduce k·n mod D first so the angle stays small.
            let kernel = 2.0 * PI * ((k * n) % d) as f64 / d as f64;
            Complex64::from_polar(scale, row_phases[k] + kernel + column_phases[n])
        });
        Ok(Self::from_parts(entries))
    }

    /// Fourier kernel with independent uniform random row and column phases.
    pub fn random_phase_fourier<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let rows: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let cols: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        Self::phase_decorated_fourier(&rows, &cols)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.entries.adjoint())
    }

    /// `self · other`.
    pub fn compose(&self, other: &UnitaryTransform) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self::from_parts(&self.entries * &other.entries))
    }
}

/// Fourier kernel `exp(2πi·k·n/D)/√D`.
pub fn fourier_unbiased_transform(dim: usize) -> Result<UnitaryTransform> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let zeros = vec![0.0; dim];
    UnitaryTransform::phase_decorated_fourier(&zeros, &zeros)
}

/// `P|i⟩ = |perm[i]⟩`.
pub fn permutation_operator(perm: &[usize]) -> Result<UnitaryTransform> {
    let d = perm.len();
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::InvalidPermutation(d));
        }
        seen[p] = true;
    }
    let mut m = CMatrix::zeros(d, d);
    for (i, &p) in perm.iter().enumerate() {
        m[(p, i)] = c(1.0);
    }
    Ok(UnitaryTransform::from_parts(m))
}

/// True iff every `|U_ij|²` is within `tol` of `1/D`.
pub fn verify_unbiased(u: &UnitaryTransform, tol: f64) -> bool {
    let target = 1.0 / u.dim() as f64;
    u.entries().iter().all(|z| (z.norm_sqr() - target).abs() <= tol)
}
