use num_complex::Complex64;

use super::WienerNoise;
use crate::quantum::{
    c, check_dim, eigen::clip_negative, eigen::decompose, hermitize, real_trace, CMatrix,
    DensityMatrix, EigenDecomposition, Observable,
};
use crate::{Error, Result};

/// Result of one integration step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: DensityMatrix,
    /// Record increment `dR` per channel, computed from the pre-step state.
    pub records: Vec<f64>,
    /// Eigen-decomposition of `state`, reused by feedback on the next step.
    pub eigen: EigenDecomposition,
    /// True when an eigenvalue fell below `-ROUNDOFF_EIGENVALUE`. Smaller
    /// negatives are zeroed without being counted.
    pub clipped: bool,
    /// Smallest eigenvalue before clipping.
    pub min_eigenvalue: f64,
}

/// Negative eigenvalues above this are eigensolver roundoff.
pub const ROUNDOFF_EIGENVALUE: f64 = 1e-14;

/// `tr(Xρ)`.
pub fn expectation(x: &Observable, rho: &DensityMatrix) -> f64 {
    let r = rho.entries();
    match x.diagonal() {
        Some(diag) => diag.iter().enumerate().map(|(i, &v)| v * r[(i, i)].re).sum(),
        None => {
            let m = x.entries();
            let d = m.nrows();
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += (m[(i, j)] * r[(j, i)]).re;
                }
            }
            acc
        }
    }
}

/// One step of the measured evolution with noise drawn from `noise`.
pub fn sme_step(
    rho: &DensityMatrix,
    observables: &[Observable],
    strength: f64,
    dt: f64,
    noise: &mut WienerNoise,
) -> Result<StepOutput> {
    check_dim(observables.len(), noise.channels())?;
    let mut dw = vec![0.0; observables.len()];
    noise.fill(dt, &mut dw);
    sme_step_with_increments(rho, observables, strength, dt, &dw)
}

/// One step with caller-supplied Wiener increments.
///
/// Each channel contributes `dR = √(8γ)·tr(Xρ)·dt + dW` and the measurement
/// operator `M = I − γX²dt + √(2γ)·X·dR`; the state becomes `MρM†/tr(MρM†)`.
/// To first order this is the Itô step `2γ·D[X]ρ·dt + √(2γ)·H[X]ρ·dW`, but it
/// keeps the state positive.
pub fn sme_step_with_increments(
    rho: &DensityMatrix,
    observables: &[Observable],
    strength: f64,
    dt: f64,
    dw: &[f64],
) -> Result<StepOutput> {
    if !rho.is_normalized() {
        return Err(Error::contract("integration needs a normalized state"));
    }
    if observables.is_empty() {
        return Err(Error::domain("no measurement channels"));
    }
    check_dim(observables.len(), dw.len())?;
    let d = rho.dim();
    for x in observables {
        check_dim(d, x.dim())?;
    }
    if !(dt > 0.0) || !(strength >= 0.0) {
        return Err(Error::domain(format!("strength {strength}, dt {dt}")));
    }

    let amp = (2.0 * strength).sqrt();
    let records: Vec<f64> = observables
        .iter()
        .zip(dw)
        .map(|(x, &w)| 2.0 * amp * expectation(x, rho) * dt + w)
        .collect();

    let r = rho.entries();
    let updated = if observables.iter().all(|x| x.diagonal().is_some()) {
        let mut m = vec![1.0; d];
        for (x, &dr) in observables.iter().zip(&records) {
            for (mi, &xi) in m.iter_mut().zip(x.diagonal().unwrap_or_default()) {
                *mi *= 1.0 - strength * xi * xi * dt + amp * xi * dr;
            }
        }
        CMatrix::from_fn(d, d, |i, j| r[(i, j)] * (m[i] * m[j]))
    } else {
        let identity = CMatrix::identity(d, d);
        let mut k = identity.clone();
        for (x, &dr) in observables.iter().zip(&records) {
            let xm = x.entries();
            let kx = &identity - xm * xm * c(strength * dt) + xm * c(amp * dr);
            k = kx * k;
        }
        &k * r * k.adjoint()
    };

    let mut next = hermitize(&updated);
    let trace = real_trace(&next);
    if !trace.is_finite() || trace <= 0.0 || next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    next *= Complex64::new(1.0 / trace, 0.0);

    let mut eigen = decompose(&next);
    let min_eigenvalue = eigen.eigenvalues().last().copied().unwrap_or(0.0);
    // Roundoff negatives are zeroed too but are not counted as clips.
    let clipped = min_eigenvalue < -ROUNDOFF_EIGENVALUE;
    if let Some((m, e)) = clip_negative(&eigen) {
        next = m;
        eigen = e;
    }
    Ok(StepOutput {
        state: DensityMatrix::from_parts(next, true),
        records,
        eigen,
        clipped,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        conjugate_observable, hermitian_residual, impurity, jz_operator,
        register_observable, UnitaryTransform,
    };
    use crate::sme::NoiseSource;

    #[test]
    fn eigenstate_is_fixed() {
        let rho = DensityMatrix::from_diagonal(&[0.0, 1.0, 0.0]).unwrap();
        let x = jz_operator(3).unwrap();
        let out = sme_step_with_increments(&rho, &[x], 1.0, 1e-3, &[0.07]).unwrap();
        assert!((out.state.entries() - rho.entries()).norm() < 1e-15);
        // ⟨X⟩ = 0 on the middle level.
        assert_eq!(out.records, vec![0.07]);

        let up = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let out =
            sme_step_with_increments(&up, &[jz_operator(2).unwrap()], 2.0, 1e-3, &[0.0]).unwrap();
        assert!((out.records[0] - 2.0 * 2.0 * 0.5 * 1e-3).abs() < 1e-18);
        assert!((out.state.entries() - up.entries()).norm() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_drift_fixed() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let out =
            sme_step_with_increments(&rho, &[jz_operator(2).unwrap()], 1.0, 1e-4, &[0.0]).unwrap();
        assert!((out.state.entries() - rho.entries()).norm() < 1e-15);
        assert_eq!(out.records, vec![0.0]);
    }

    #[test]
    fn matches_ito_increment_to_first_order() {
        // Compare with 2γ·D[X]ρ·dt + √(2γ)·H[X]ρ·dW on a generic state.
        let rho = DensityMatrix::qubit_bloch(0.3, -0.2, 0.4).unwrap();
        let x = conjugate_observable(
            &jz_operator(2).unwrap(),
            &UnitaryTransform::qubit_rotation(),
        )
        .unwrap();
        let (gamma, dt): (f64, f64) = (1.0, 1e-6);
        // With dW² = dt the schemes agree through O(dt).
        let dw = -dt.sqrt();
        let out = sme_step_with_increments(&rho, std::slice::from_ref(&x), gamma, dt, &[dw]).unwrap();

        let r = rho.entries();
        let xm = x.entries();
        let mean = expectation(&x, &rho);
        let diss = xm * r * xm - (xm * xm * r + r * xm * xm) * c(0.5);
        let innov = xm * r + r * xm - r * c(2.0 * mean);
        let ito = r + diss * c(2.0 * gamma * dt) + innov * c((2.0 * gamma).sqrt() * dw);
        // The two schemes differ at O(dt^{3/2}).
        assert!((out.state.entries() - ito).norm() < 10.0 * dt.powf(1.5));
    }

    #[test]
    fn step_preserves_state_invariants() {
        let source = NoiseSource::new(11, 0);
        let mut noise = WienerNoise::new(&source, 2);
        let obs = [register_observable(2, 1).unwrap(), register_observable(2, 2).unwrap()];
        let rot = crate::quantum::fourier_unbiased_transform(4).unwrap();
        let obs_rot: Vec<Observable> = obs
            .iter()
            .map(|x| conjugate_observable(x, &rot).unwrap())
            .collect();
        let mut rho = DensityMatrix::maximally_mixed(4).unwrap();
        for k in 0..2000 {
            let chosen = if k % 2 == 0 { &obs[..] } else { &obs_rot[..] };
            let out = sme_step(&rho, chosen, 0.5, 1e-3, &mut noise).unwrap();
            assert!(hermitian_residual(out.state.entries()) < 1e-12);
            assert!((out.state.trace() - 1.0).abs() < 1e-10);
            assert!(out.min_eigenvalue >= -1e-9);
            assert!((out.eigen.reconstruct() - out.state.entries()).norm() < 1e-10);
            rho = out.state;
        }
        assert!(impurity(&rho).unwrap() < 0.75);
    }

    #[test]
    fn rejects_bad_input() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let x3 = jz_operator(3).unwrap();
        assert!(matches!(
            sme_step_with_increments(&rho, &[x3], 1.0, 1e-3, &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let x2 = jz_operator(2).unwrap();
        assert!(sme_step_with_increments(&rho, std::slice::from_ref(&x2), 1.0, 1e-3, &[0.0, 0.0]).is_err());
        assert!(matches!(
            sme_step_with_increments(&rho, std::slice::from_ref(&x2), 1.0, 1e-3, &[f64::NAN]),
            Err(Error::NonFinite)
        ));
        let unnorm = DensityMatrix::unnormalized(CMatrix::identity(2, 2)).unwrap();
        assert!(sme_step_with_increments(&unnorm, &[x2], 1.0, 1e-3, &[0.0]).is_err());
    }
}
