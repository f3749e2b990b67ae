use itertools::Itertools;

use crate::quantum::{
    check_dim, flat_state_impurity, identities::factorial, impurity, is_diagonal,
    permutation_operator, register_observable, state::diagonal_state, CMatrix, DensityMatrix,
    Observable, UnitaryTransform,
};
use crate::{Error, Result};

const UNBIASED_RATE_TOL: f64 = 1e-8;
const MAX_EXHAUSTIVE_DIM: usize = 8;

/// `tr(AρAρ)` for Hermitian `A` and `ρ`.
fn sandwich_trace(a: &CMatrix, rho: &CMatrix) -> f64 {
    let m = a * rho;
    let d = m.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (m[(i, j)] * m[(j, i)]).re;
        }
    }
    acc
}

/// Deterministic impurity change `−8γ·dt·tr(X̌ρX̌ρ)`, which in the state's
/// eigenbasis is `−8γ·dt·Σ|X̌_ij|²λ_iλ_j`.
///
/// Valid only when the noise term of `dL` vanishes, i.e. when
/// `tr(X̌ρ²) = tr(X̌ρ)·tr(ρ²)`; both traces must be below `1e-8`.
pub fn step_dL(rho: &DensityMatrix, xcheck: &Observable, strength: f64, dt: f64) -> Result<f64> {
    check_dim(rho.dim(), xcheck.dim())?;
    if !rho.is_normalized() {
        return Err(Error::contract("rate of an unnormalized state"));
    }
    let r = rho.entries();
    let x = xcheck.entries();
    let scale = xcheck.trace_of_square().sqrt().max(1.0);
    let first = (x * r).trace().re;
    let second = (x * r * r).trace().re;
    if first.abs() > UNBIASED_RATE_TOL * scale || second.abs() > UNBIASED_RATE_TOL * scale {
        return Err(Error::contract(format!(
            "observable is not unbiased with respect to the state \
             (tr(Xρ) = {first:e}, tr(Xρ²) = {second:e})"
        )));
    }
    Ok(-8.0 * strength * dt * sandwich_trace(x, r))
}

/// Flat-state rate `−(2/3)(D+1)·γ·dt·L`.
pub fn flat_state_dL(dim: usize, delta: f64, strength: f64, dt: f64) -> f64 {
    -(2.0 / 3.0) * (dim as f64 + 1.0) * strength * dt * flat_state_impurity(dim, delta)
}

/// Largest `|X̌_mn|²` over `m ≠ n`, with the pair achieving it.
pub fn max_off_diagonal(xcheck: &Observable) -> (f64, (usize, usize)) {
    let d = xcheck.dim();
    let mut best = (f64::NEG_INFINITY, (0, 1));
    for m in 0..d {
        for n in 0..d {
            let v = xcheck.get(m, n).norm_sqr();
            if m != n && v > best.0 {
                best = (v, (m, n));
            }
        }
    }
    best
}

/// Binary-state rate with the two nonzero eigenvalues on the pair that
/// maximizes `|X̌_mn|²`: `−8γ·dt·max|X̌_mn|²·2(1−Δ')Δ'`.
pub fn binary_state_dL(dim: usize, delta: f64, xcheck: &Observable, strength: f64, dt: f64) -> Result<f64> {
    check_dim(dim, xcheck.dim())?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain(format!("Δ' = {delta} outside [0, 1]")));
    }
    let (max_sq, _) = max_off_diagonal(xcheck);
    Ok(-8.0 * strength * dt * max_sq * 2.0 * (1.0 - delta) * delta)
}

/// `(Σ_k |x_k|)²/D²`, the largest `|X̌_mn|²` any unbiased transform can
/// produce from eigenvalues `x_k`; for `J_z` this is `D²/16` for even `D`
/// and `D²/16 − 1/8 + 1/(16D²)` for odd `D`.
pub fn max_element_bound(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let d = dim as f64;
    Ok(if dim.is_multiple_of(2) {
        d * d / 16.0
    } else {
        d * d / 16.0 - 0.125 + 1.0 / (16.0 * d * d)
    })
}

/// Per-channel bound for `±1`-valued register observables.
pub fn register_max_element_bound() -> f64 {
    1.0
}

/// `max (1/D²)|Σ_k s_k x_k|²` over all sign patterns `s ∈ {±1}^D`.
///
/// An off-diagonal element of `T·X·T†` for unbiased `T` is
/// `(1/D)·Σ_k e^{iψ_k}x_k`; real eigenvalues make aligned signs optimal.
pub fn sign_pattern_max(eigenvalues: &[f64]) -> Result<f64> {
    let d = eigenvalues.len();
    if !(2..=24).contains(&d) {
        return Err(Error::InvalidDimension(d));
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1 << d) {
        let s: f64 = eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &x)| if mask >> k & 1 == 1 { -x } else { x })
            .sum();
        best = best.max(s * s);
    }
    Ok(best / (d * d) as f64)
}

fn check_exhaustive(d: usize) -> Result<()> {
    if d > MAX_EXHAUSTIVE_DIM {
        return Err(Error::Unsupported(format!(
            "exhaustive permutation search at D = {d} (limit {MAX_EXHAUSTIVE_DIM})"
        )));
    }
    Ok(())
}

fn permuted(x: &CMatrix, perm: &[usize]) -> Result<CMatrix> {
    let p = permutation_operator(perm)?;
    Ok(p.entries().adjoint() * x * p.entries())
}

/// Exact average of [`step_dL`] over all `D!` observables `P_m†·X̌·P_m`.
pub fn permutation_averaged_dL(
    rho: &DensityMatrix,
    xcheck: &Observable,
    strength: f64,
    dt: f64,
) -> Result<f64> {
    let d = rho.dim();
    check_dim(d, xcheck.dim())?;
    check_exhaustive(d)?;
    let mut total = crate::stats::CompensatedSum::default();
    for perm in (0..d).permutations(d) {
        let xm = Observable::from_hermitian(permuted(xcheck.entries(), &perm)?);
        total.add(step_dL(rho, &xm, strength, dt)?);
    }
    Ok(total.value() / factorial(d))
}

/// Closed form of [`permutation_averaged_dL`]:
/// `−8γ·dt·(D−2)!/D!·tr(X²)·L`.
pub fn permutation_average_closed_form(rho: &DensityMatrix, trace_x2: f64, strength: f64, dt: f64) -> Result<f64> {
    let d = rho.dim() as f64;
    Ok(-8.0 * strength * dt * trace_x2 / (d * (d - 1.0)) * impurity(rho)?)
}

/// Sum over channels of the exact permutation average for a register
/// measured through `P_m·T·X^(r)·T†·P_m†` with strength `κ`.
///
/// Equals `−8κ·dt·n/(D−1)·L`.
pub fn register_permutation_averaged_dL(
    rho: &DensityMatrix,
    qubits: usize,
    transform: &UnitaryTransform,
    kappa: f64,
    dt: f64,
) -> Result<f64> {
    check_dim(1 << qubits, rho.dim())?;
    let mut total = 0.0;
    for r in 1..=qubits {
        let x = crate::quantum::conjugate_observable(&register_observable(qubits, r)?, transform)?;
        total += permutation_averaged_dL(rho, &x, kappa, dt)?;
    }
    Ok(total)
}

/// Most negative [`step_dL`] over all arrangements of a diagonal state's
/// eigenvalues, with the arrangement achieving it.
pub fn optimal_permutation_dL(
    rho: &DensityMatrix,
    xcheck: &Observable,
    strength: f64,
    dt: f64,
) -> Result<(f64, Vec<usize>)> {
    let d = rho.dim();
    check_dim(d, xcheck.dim())?;
    check_exhaustive(d)?;
    if !is_diagonal(rho.entries()) {
        return Err(Error::contract("state must be diagonal"));
    }
    let lambda: Vec<f64> = (0..d).map(|i| rho.entries()[(i, i)].re).collect();
    let mut best = (f64::INFINITY, (0..d).collect::<Vec<_>>());
    for perm in (0..d).permutations(d) {
        let arranged: Vec<f64> = perm.iter().map(|&k| lambda[k]).collect();
        let v = step_dL(&diagonal_state(&arranged), xcheck, strength, dt)?;
        if v < best.0 {
            best = (v, perm);
        }
    }
    Ok(best)
}

/// `Δ` of the flat state whose impurity is `L`, for `0 ≤ L ≤ 1 − 1/D`.
pub fn flat_delta_for_impurity(dim: usize, l: f64) -> Result<f64> {
    let d = dim as f64;
    let max = 1.0 - 1.0 / d;
    if !(0.0..=max + 1e-12).contains(&l) {
        return Err(Error::domain(format!("impurity {l} outside [0, {max}]")));
    }
    let q = (1.0 - l * d / (d - 1.0)).max(0.0);
    Ok((d - 1.0) / d * (1.0 - q.sqrt()))
}

/// `Δ'` of the binary state whose impurity is `L`, for `0 ≤ L ≤ 1/2`.
pub fn binary_delta_for_impurity(l: f64) -> Result<f64> {
    if !(0.0..=0.5 + 1e-12).contains(&l) {
        return Err(Error::domain(format!("binary states have impurity at most 1/2, got {l}")));
    }
    Ok((1.0 - (1.0 - 2.0 * l).max(0.0).sqrt()) / 2.0)
}

/// `|dL|` for the flat state, the given state and the binary state, all at
/// the given state's impurity and each under its best arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSandwich {
    pub impurity: f64,
    pub flat: f64,
    pub state: f64,
    pub binary: f64,
}

impl BoundSandwich {
    pub fn holds(&self, slack: f64) -> bool {
        self.flat <= self.state + slack && self.state <= self.binary + slack
    }
}

/// Evaluates the flat/state/binary ordering for a diagonal state.
///
/// Binary states cannot exceed impurity 1/2; above that the upper side is
/// `8γ·dt·max|X̌_mn|²·L`, the value the binary formula continues to and a
/// bound on `|dL|` for every state.
pub fn bound_sandwich(rho: &DensityMatrix, xcheck: &Observable, strength: f64, dt: f64) -> Result<BoundSandwich> {
    let d = rho.dim();
    let l = impurity(rho)?;
    let delta = flat_delta_for_impurity(d, l)?;
    let flat_rho = crate::quantum::flat_state(d, delta)?;
    let (flat, _) = optimal_permutation_dL(&flat_rho, xcheck, strength, dt)?;
    let (state, _) = optimal_permutation_dL(rho, xcheck, strength, dt)?;
    let binary = if l <= 0.5 {
        let dp = binary_delta_for_impurity(l)?;
        let b = crate::quantum::binary_state(d, dp, (0, 1))?;
        optimal_permutation_dL(&b, xcheck, strength, dt)?.0
    } else {
        -8.0 * strength * dt * max_off_diagonal(xcheck).0 * l
    };
    Ok(BoundSandwich {
        impurity: l,
        flat: flat.abs(),
        state: state.abs(),
        binary: binary.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        binary_state, conjugate_observable, flat_state, fourier_unbiased_transform, jz_operator,
    };

    fn fourier_jz(d: usize) -> Observable {
        conjugate_observable(&jz_operator(d).unwrap(), &fourier_unbiased_transform(d).unwrap())
            .unwrap()
    }

    #[test]
    fn qubit_rate() {
        let x = conjugate_observable(&jz_operator(2).unwrap(), &UnitaryTransform::qubit_rotation())
            .unwrap();
        for delta in [0.0, 0.1, 0.35, 0.5] {
            let rho = DensityMatrix::from_diagonal(&[1.0 - delta, delta]).unwrap();
            let l = impurity(&rho).unwrap();
            let v = step_dL(&rho, &x, 1.5, 1e-3).unwrap();
            assert!((v - (-2.0 * 1.5 * 1e-3 * l)).abs() < 1e-16);
        }
    }

    #[test]
    fn pure_state_rate_is_zero() {
        let rho = DensityMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(step_dL(&rho, &fourier_jz(4), 1.0, 1e-3).unwrap().abs(), 0.0);
    }

    #[test]
    fn flat_state_rate_matches_step() {
        for d in 2..=8 {
            for delta in [0.01, 0.1, 0.3] {
                let rho = flat_state(d, delta).unwrap();
                let step = step_dL(&rho, &fourier_jz(d), 1.0, 1e-4).unwrap();
                let closed = flat_state_dL(d, delta, 1.0, 1e-4);
                assert!(((step - closed) / closed).abs() < 1e-10, "D={d} Δ={delta}");
            }
        }
        assert!((flat_state_dL(2, 0.5, 1.0, 1e-3) + 1e-3).abs() < 1e-18);
        assert_eq!(flat_state_dL(4, 0.0, 1.0, 1e-3), 0.0);
        let l = flat_state_impurity(5, 0.1);
        assert!((flat_state_dL(5, 0.1, 1.0, 1e-3) + 4.0 * 1e-3 * l).abs() < 1e-16);
    }

    #[test]
    fn biased_observable_is_rejected() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        assert!(matches!(
            step_dL(&rho, &jz_operator(2).unwrap(), 1.0, 1e-3),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn binary_rate_examples() {
        let x = conjugate_observable(&jz_operator(2).unwrap(), &UnitaryTransform::qubit_rotation())
            .unwrap();
        let l = 2.0 * 0.7 * 0.3;
        assert!((binary_state_dL(2, 0.3, &x, 1.0, 1e-3).unwrap() + 2e-3 * l).abs() < 1e-16);
        assert_eq!(binary_state_dL(5, 0.0, &fourier_jz(5), 1.0, 1e-3).unwrap(), 0.0);

        // Exhaustive search over index pairs.
        let x = fourier_jz(4);
        let mut best = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    let rho = binary_state(4, 0.2, (a, b)).unwrap();
                    best = best.min(step_dL(&rho, &x, 1.0, 1e-3).unwrap());
                }
            }
        }
        assert!((binary_state_dL(4, 0.2, &x, 1.0, 1e-3).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn max_element_examples() {
        assert_eq!(max_element_bound(2).unwrap(), 0.25);
        assert!((max_element_bound(3).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert_eq!(max_element_bound(8).unwrap(), 4.0);
        for d in 2..=8 {
            let jz = jz_operator(d).unwrap();
            let brute = sign_pattern_max(jz.diagonal().unwrap()).unwrap();
            assert!((brute - max_element_bound(d).unwrap()).abs() < 1e-12, "D={d}");
        }
        for n in 1..=3 {
            let x = register_observable(n, 1).unwrap();
            assert_eq!(sign_pattern_max(x.diagonal().unwrap()).unwrap(), register_max_element_bound());
        }
    }

    #[test]
    fn permutation_average_matches_closed_form() {
        let rho = DensityMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let avg = permutation_averaged_dL(&rho, &fourier_jz(4), 1.0, 1e-3).unwrap();
        let closed = permutation_average_closed_form(&rho, 5.0, 1.0, 1e-3).unwrap();
        assert!(((avg - closed) / closed).abs() < 1e-10);
        // Same as the flat-state rate at equal impurity.
        let l = impurity(&rho).unwrap();
        assert!((closed + (2.0 / 3.0) * 5.0 * 1e-3 * l).abs() < 1e-15);
    }

    #[test]
    fn register_average() {
        let rho = DensityMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let f = fourier_unbiased_transform(4).unwrap();
        let v = register_permutation_averaged_dL(&rho, 2, &f, 1.0, 1e-3).unwrap();
        let expected = -16.0 / 3.0 * 1e-3 * impurity(&rho).unwrap();
        assert!(((v - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn matching_deltas() {
        for d in 2..=6 {
            for l in [0.0, 0.05, 0.3, 1.0 - 1.0 / d as f64] {
                let delta = flat_delta_for_impurity(d, l).unwrap();
                assert!((flat_state_impurity(d, delta) - l).abs() < 1e-12);
            }
        }
        for l in [0.0, 0.18, 0.5] {
            let dp = binary_delta_for_impurity(l).unwrap();
            assert!((2.0 * dp * (1.0 - dp) - l).abs() < 1e-12);
        }
        assert!(binary_delta_for_impurity(0.6).is_err());
    }

    #[test]
    fn sandwich_example() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.15, 0.05]).unwrap();
        let s = bound_sandwich(&rho, &fourier_jz(4), 1.0, 1.0).unwrap();
        assert!(s.holds(1e-12), "{s:?}");
        assert!(s.flat < s.binary);
    }
}
