use num_complex::Complex64;

use super::{
    c, check_dim, check_square, hermitian_residual, hermitize, is_diagonal, real_trace, CMatrix,
    UnitaryTransform, HERMITIAN_TOL,
};
use crate::{Error, Result};

/// Hermitian measured observable.
///
/// Diagonal observables remember their real diagonal so that the integrator
/// can take an elementwise path.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    entries: CMatrix,
    diagonal: Option<Vec<f64>>,
}

impl Observable {
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_square(&entries)?;
        let residual = hermitian_residual(&entries);
        if residual > HERMITIAN_TOL {
            return Err(Error::contract(format!(
                "observable is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(Self::from_hermitian(hermitize(&entries)))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let d = values.len();
        let entries = CMatrix::from_fn(d, d, |i, j| if i == j { c(values[i]) } else { c(0.0) });
        Ok(Self {
            entries,
            diagonal: Some(values.to_vec()),
        })
    }

    pub(crate) fn from_hermitian(entries: CMatrix) -> Self {
        let diagonal = is_diagonal(&entries)
            .then(|| (0..entries.nrows()).map(|i| entries[(i, i)].re).collect());
        Self { entries, diagonal }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Real diagonal, if the matrix is exactly diagonal.
    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.entries)
    }

    /// `tr(X²)`.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }
}

/// `J_z = diag(j, j-1, …, -j)` with `j = (D-1)/2`.
pub fn jz_operator(dim: usize) -> Result<Observable> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let j = (dim as f64 - 1.0) / 2.0;
    let values: Vec<f64> = (0..dim).map(|k| j - k as f64).collect();
    Observable::from_diagonal(&values)
}

/// `σ_z` on qubit `channel` (1-based) of an `n`-qubit register.
///
/// Entry `k` is `(-1)^b` where `b` is bit `n - channel` of `k`, so qubit 1 is
/// the most significant bit.
pub fn register_observable(qubits: usize, channel: usize) -> Result<Observable> {
    if qubits == 0 || qubits >= usize::BITS as usize {
        return Err(Error::domain(format!("register size {qubits}")));
    }
    if channel == 0 || channel > qubits {
        return Err(Error::InvalidChannel { qubits, channel });
    }
    let shift = qubits - channel;
    let values: Vec<f64> = (0..1usize << qubits)
        .map(|k| if (k >> shift) & 1 == 1 { -1.0 } else { 1.0 })
        .collect();
    Observable::from_diagonal(&values)
}

/// Heisenberg-picture observable `U·X·U†`.
pub fn conjugate_observable(x: &Observable, u: &UnitaryTransform) -> Result<Observable> {
    check_dim(x.dim(), u.dim())?;
    let m = u.entries() * x.entries() * u.entries().adjoint();
    Ok(Observable::from_hermitian(hermitize(&m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fourier_unbiased_transform;

    #[test]
    fn jz_examples() {
        let x = jz_operator(2).unwrap();
        assert_eq!(x.diagonal().unwrap(), &[0.5, -0.5]);
        assert_eq!(x.trace_of_square(), 0.5);
        assert_eq!(jz_operator(3).unwrap().diagonal().unwrap(), &[1.0, 0.0, -1.0]);
        assert_eq!(jz_operator(3).unwrap().trace_of_square(), 2.0);
        assert_eq!(jz_operator(4).unwrap().trace_of_square(), 5.0);
        for d in 2..=9 {
            let x = jz_operator(d).unwrap();
            let df = d as f64;
            assert_eq!(x.trace(), 0.0);
            assert!((x.trace_of_square() - df * (df * df - 1.0) / 12.0).abs() < 1e-12);
        }
        assert!(matches!(jz_operator(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn register_observable_examples() {
        assert_eq!(register_observable(1, 1).unwrap().diagonal().unwrap(), &[1.0, -1.0]);
        assert_eq!(
            register_observable(2, 2).unwrap().diagonal().unwrap(),
            &[1.0, -1.0, 1.0, -1.0]
        );
        assert_eq!(
            register_observable(2, 1).unwrap().diagonal().unwrap(),
            &[1.0, 1.0, -1.0, -1.0]
        );
        for n in 1..=4 {
            for r in 1..=n {
                let x = register_observable(n, r).unwrap();
                assert_eq!(x.trace(), 0.0);
                let sq = x.entries() * x.entries();
                assert_eq!(sq, CMatrix::identity(1 << n, 1 << n));
            }
        }
        assert!(matches!(
            register_observable(2, 3),
            Err(Error::InvalidChannel { qubits: 2, channel: 3 })
        ));
        assert!(register_observable(2, 0).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let jz = jz_operator(2).unwrap();
        let same = conjugate_observable(&jz, &UnitaryTransform::identity(2).unwrap()).unwrap();
        assert_eq!(same, jz);

        let xc = conjugate_observable(&jz, &fourier_unbiased_transform(2).unwrap()).unwrap();
        assert!(xc.get(0, 0).norm() < 1e-15 && xc.get(1, 1).norm() < 1e-15);
        assert!((xc.get(0, 1).norm() - 0.5).abs() < 1e-15);

        let xc = conjugate_observable(&jz_operator(3).unwrap(), &fourier_unbiased_transform(3).unwrap())
            .unwrap();
        for i in 0..3 {
            assert!(xc.get(i, i).norm() < 1e-14);
        }
    }

    #[test]
    fn conjugation_dimension_mismatch() {
        let err = conjugate_observable(&jz_operator(2).unwrap(), &UnitaryTransform::identity(3).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
