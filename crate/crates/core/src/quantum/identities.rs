//! Identities for observables measured in a basis unbiased with respect to
//! the state. Each function returns the raw quantity so callers can compare
//! it against the closed form at their own tolerance.

use itertools::Itertools;

use super::{
    check_dim, conjugate_observable, permutation_operator, verify_unbiased, DensityMatrix,
    Observable, UnitaryTransform,
};
use crate::{Error, Result};

const UNBIASED_TOL: f64 = 1e-10;
const MAX_PERMUTATION_DIM: usize = 6;

fn require_traceless_diagonal(x: &Observable) -> Result<()> {
    if x.diagonal().is_none() {
        return Err(Error::contract("observable must be diagonal"));
    }
    let scale = x.trace_of_square().sqrt().max(1.0);
    if x.trace().abs() > 1e-12 * scale {
        return Err(Error::contract(format!(
            "observable must be traceless (trace {:e})",
            x.trace()
        )));
    }
    Ok(())
}

fn require_unbiased(u: &UnitaryTransform) -> Result<()> {
    if verify_unbiased(u, UNBIASED_TOL) {
        Ok(())
    } else {
        Err(Error::contract("transform is not unbiased"))
    }
}

/// `max_i |(U X U†)_ii|` for traceless diagonal `X` and unbiased `U`.
/// Unbiasedness forces every diagonal entry to `tr(X)/D = 0`.
pub fn verify_traceless_conjugate(x: &Observable, u: &UnitaryTransform) -> Result<f64> {
    check_dim(x.dim(), u.dim())?;
    require_traceless_diagonal(x)?;
    require_unbiased(u)?;
    let xc = conjugate_observable(x, u)?;
    Ok((0..xc.dim()).fold(0.0f64, |m, i| m.max(xc.get(i, i).norm())))
}

/// `Σ_{r≠p} |X̌_rp|²` with `X̌ = U X U†`. For `X = J_z` this is `(D²-1)/12`
/// for every column `p`.
pub fn verify_row_sum_identity(x: &Observable, u: &UnitaryTransform, column: usize) -> Result<f64> {
    check_dim(x.dim(), u.dim())?;
    require_traceless_diagonal(x)?;
    require_unbiased(u)?;
    if column >= x.dim() {
        return Err(Error::domain(format!("column {column} out of range")));
    }
    let xc = conjugate_observable(x, u)?;
    Ok((0..xc.dim())
        .filter(|&r| r != column)
        .map(|r| xc.get(r, column).norm_sqr())
        .sum())
}

/// Brute-force `Σ_m tr(P_m X̌ P_m† ρ P_m X̌ P_m† ρ)` over all `D!`
/// permutations, paired with the closed form `(D-2)!·tr(X̌²)·(1 - tr ρ²)`.
///
/// Refuses `D > 6`.
pub fn permutation_sum_identity(rho: &DensityMatrix, xcheck: &Observable) -> Result<(f64, f64)> {
    let d = rho.dim();
    check_dim(d, xcheck.dim())?;
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if d > MAX_PERMUTATION_DIM {
        return Err(Error::Unsupported(format!(
            "permutation sum over {d}! terms (limit D = {MAX_PERMUTATION_DIM})"
        )));
    }
    if !super::is_diagonal(rho.entries()) {
        return Err(Error::contract("state must be diagonal"));
    }
    if !rho.is_normalized() {
        return Err(Error::contract("state must be normalized"));
    }

    let r = rho.entries();
    let x = xcheck.entries();
    let mut brute = 0.0;
    for perm in (0..d).permutations(d) {
        let p = permutation_operator(&perm)?;
        let pm = p.entries();
        let xm = pm * x * pm.adjoint();
        let prod = &xm * r * &xm * r;
        brute += (0..d).map(|i| prod[(i, i)].re).sum::<f64>();
    }

    let closed = factorial(d - 2) * xcheck.trace_of_square() * (1.0 - rho.purity());
    Ok((brute, closed))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
