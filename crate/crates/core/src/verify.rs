//! The identity checks behind `purify verify`: five lines per dimension.

use std::fmt;

use rand::Rng;
use rand_distr::Exp1;

use crate::protocols::{bound_sandwich, flat_state_dL, step_dL};
use crate::quantum::{
    conjugate_observable, flat_state, fourier_unbiased_transform, jz_operator,
    permutation_sum_identity, state::diagonal_state, verify_row_sum_identity,
    verify_traceless_conjugate, CMatrix, DensityMatrix, Observable, UnitaryTransform,
};
use crate::sme::NoiseSource;
use crate::{Error, Result};

/// Largest dimension the factorial checks accept.
pub const MAX_VERIFY_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// Conjugating a traceless diagonal observable by an unbiased transform
    /// leaves a zero diagonal.
    UnbiasedDiagonal,
    /// Every column of the conjugated `J_z` has off-diagonal weight
    /// `(D²−1)/12`.
    RowSum,
    /// The sum over all `D!` permutations equals `(D−2)!·tr(X²)·L`.
    PermutationSum,
    /// Flat states lose impurity at `(2/3)(D+1)·γ·L`.
    FlatStateRate,
    /// `|dL|` of flat ≤ any state ≤ binary, at equal impurity.
    BoundSandwich,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::UnbiasedDiagonal,
        Identity::RowSum,
        Identity::PermutationSum,
        Identity::FlatStateRate,
        Identity::BoundSandwich,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::UnbiasedDiagonal => "unbiased-diagonal",
            Identity::RowSum => "row-sum",
            Identity::PermutationSum => "permutation-sum",
            Identity::FlatStateRate => "flat-state-rate",
            Identity::BoundSandwich => "bound-sandwich",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Identity::UnbiasedDiagonal | Identity::RowSum | Identity::BoundSandwich => 1e-12,
            Identity::PermutationSum | Identity::FlatStateRate => 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub dim: usize,
    /// Largest residual found; infinite when a precondition failed.
    pub residual: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} D={:<2} {:<18} residual {:<10.3e} tol {:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.dim,
            self.identity.name(),
            self.residual,
            self.identity.tolerance()
        )?;
        if let Some(note) = &self.note {
            write!(f, "  ({note})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub min_dim: usize,
    pub max_dim: usize,
    pub seed: u64,
    /// Random phase-decorated transforms per dimension.
    pub transforms: usize,
    /// Random diagonal states per dimension.
    pub states: usize,
    /// Rotate the unbiased transform slightly so it is no longer unbiased;
    /// every check should then fail.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            min_dim: 2,
            max_dim: MAX_VERIFY_DIM,
            seed: 0,
            transforms: 20,
            states: 50,
            inject_fault: false,
        }
    }
}

/// Random diagonal state with eigenvalues uniform on the simplex.
pub fn random_diagonal_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let w: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    diagonal_state(&w.iter().map(|v| v / total).collect::<Vec<_>>())
}

fn perturb(u: &UnitaryTransform) -> UnitaryTransform {
    let d = u.dim();
    let (s, c) = 0.05f64.sin_cos();
    let mut r = CMatrix::identity(d, d);
    r[(0, 0)] = crate::quantum::c(c);
    r[(0, 1)] = crate::quantum::c(-s);
    r[(1, 0)] = crate::quantum::c(s);
    r[(1, 1)] = crate::quantum::c(c);
    UnitaryTransform::from_parts(u.entries() * r)
}

fn check(identity: Identity, dim: usize, outcome: Result<f64>) -> IdentityCheck {
    match outcome {
        Ok(residual) => IdentityCheck {
            identity,
            dim,
            residual,
            passed: residual <= identity.tolerance(),
            note: None,
        },
        Err(e) => IdentityCheck {
            identity,
            dim,
            residual: f64::INFINITY,
            passed: false,
            note: Some(e.to_string()),
        },
    }
}

fn transforms_for(dim: usize, opts: &VerifyOptions, source: &NoiseSource) -> Result<Vec<UnitaryTransform>> {
    let mut rng = source.rng(dim as u32);
    let mut out = vec![fourier_unbiased_transform(dim)?];
    for _ in 0..opts.transforms {
        out.push(UnitaryTransform::random_phase_fourier(dim, &mut rng)?);
    }
    if opts.inject_fault {
        out = out.iter().map(perturb).collect();
    }
    Ok(out)
}

fn relative(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn checks_for_dim(dim: usize, opts: &VerifyOptions) -> Result<Vec<IdentityCheck>> {
    let source = NoiseSource::new(opts.seed, dim as u64);
    let jz = jz_operator(dim)?;
    let transforms = transforms_for(dim, opts, &source)?;
    let xcheck: Observable = conjugate_observable(&jz, &transforms[0])?;
    let mut state_rng = source.rng(0);
    let states: Vec<DensityMatrix> =
        (0..opts.states.max(1)).map(|_| random_diagonal_state(dim, &mut state_rng)).collect();
    let target = (dim * dim - 1) as f64 / 12.0;

    let diag = transforms.iter().try_fold(0.0f64, |m, u| {
        Ok::<_, Error>(m.max(verify_traceless_conjugate(&jz, u)?))
    });
    let rows = transforms.iter().try_fold(0.0f64, |m, u| {
        (0..dim).try_fold(m, |m, p| {
            Ok::<_, Error>(m.max((verify_row_sum_identity(&jz, u, p)? - target).abs()))
        })
    });
    let perms = states.iter().try_fold(0.0f64, |m, rho| {
        let (brute, closed) = permutation_sum_identity(rho, &xcheck)?;
        Ok::<_, Error>(m.max(relative(brute, closed)))
    });
    let flat = [0.01, 0.1, 0.3].iter().try_fold(0.0f64, |m, &delta| {
        let v = step_dL(&flat_state(dim, delta)?, &xcheck, 1.0, 1.0)?;
        Ok::<_, Error>(m.max(relative(v, flat_state_dL(dim, delta, 1.0, 1.0))))
    });
    let sandwich = states.iter().try_fold(0.0f64, |m, rho| {
        let s = bound_sandwich(rho, &xcheck, 1.0, 1.0)?;
        let violation = (s.flat - s.state).max(s.state - s.binary).max(0.0);
        Ok::<_, Error>(m.max(violation))
    });

    Ok(vec![
        check(Identity::UnbiasedDiagonal, dim, diag),
        check(Identity::RowSum, dim, rows),
        check(Identity::PermutationSum, dim, perms),
        check(Identity::FlatStateRate, dim, flat),
        check(Identity::BoundSandwich, dim, sandwich),
    ])
}

/// Runs every identity for every dimension in `min_dim..=max_dim`.
pub fn run_verification(opts: &VerifyOptions) -> Result<Vec<IdentityCheck>> {
    if opts.min_dim < 2 || opts.min_dim > opts.max_dim {
        return Err(Error::domain(format!(
            "dimension range {}..={} is empty or starts below 2",
            opts.min_dim, opts.max_dim
        )));
    }
    if opts.max_dim > MAX_VERIFY_DIM {
        return Err(Error::Unsupported(format!(
            "verification above D = {MAX_VERIFY_DIM} (factorial permutation sums)"
        )));
    }
    let mut out = Vec::new();
    for dim in opts.min_dim..=opts.max_dim {
        out.extend(checks_for_dim(dim, opts)?);
    }
    Ok(out)
}
