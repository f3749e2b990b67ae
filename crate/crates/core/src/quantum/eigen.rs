use nalgebra::SymmetricEigen;

use super::{check_square, hermitian_residual, is_diagonal, CMatrix, DensityMatrix, UnitaryTransform};
use crate::{Error, Result};

/// Eigenvalues sorted in descending order with the matching eigenvectors as
/// the columns of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    basis: UnitaryTransform,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &UnitaryTransform {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `basis · diag(eigenvalues) · basis†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = self.basis.entries();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * v.adjoint()
    }
}

/// Eigen-decomposition of a state.
///
/// Ties keep the original index order, so an exactly diagonal input with
/// equal eigenvalues yields the identity basis.
pub fn eigensystem(rho: &DensityMatrix) -> EigenDecomposition {
    decompose(rho.entries())
}

/// Eigen-decomposition of an arbitrary Hermitian matrix.
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<EigenDecomposition> {
    check_square(m)?;
    let residual = hermitian_residual(m);
    if residual > super::HERMITIAN_TOL {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (residual {residual:e})"
        )));
    }
    Ok(decompose(m))
}

pub(crate) fn decompose(m: &CMatrix) -> EigenDecomposition {
    let d = m.nrows();
    let (values, vectors) = if is_diagonal(m) {
        let values: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
        (values, CMatrix::identity(d, d))
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..d).collect();
    // Stable: equal eigenvalues keep their index order.
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let basis = CMatrix::from_fn(d, d, |i, j| vectors[(i, order[j])]);
    EigenDecomposition {
        eigenvalues,
        basis: UnitaryTransform::from_parts(basis),
    }
}

/// Replaces negative eigenvalues by zero and renormalizes the trace.
/// Returns `None` when no eigenvalue is negative.
pub(crate) fn clip_negative(eigen: &EigenDecomposition) -> Option<(CMatrix, EigenDecomposition)> {
    if eigen.eigenvalues.iter().all(|&l| l >= 0.0) {
        return None;
    }
    let clipped: Vec<f64> = eigen.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let normalized: Vec<f64> = clipped.iter().map(|&l| l / total).collect();
    let out = EigenDecomposition {
        eigenvalues: normalized,
        basis: eigen.basis.clone(),
    };
    let m = super::hermitize(&out.reconstruct());
    Some((m, out))
}
