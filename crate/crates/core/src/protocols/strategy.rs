use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::quantum::{
    check_dim, conjugate_observable, eigensystem, fourier_unbiased_transform, hermitize,
    jz_operator, register_observable, CMatrix, DensityMatrix, EigenDecomposition, Observable,
    UnitaryTransform,
};
use crate::sme::{NoiseSource, PERMUTATION_CHANNEL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Bare,
    QubitUbb,
    QuditUbb,
    PermutationAveragedUbb,
    RegisterBare,
    RegisterUbb,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Bare,
        StrategyKind::QubitUbb,
        StrategyKind::QuditUbb,
        StrategyKind::PermutationAveragedUbb,
        StrategyKind::RegisterBare,
        StrategyKind::RegisterUbb,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Bare => "bare",
            StrategyKind::QubitUbb => "qubit-ubb",
            StrategyKind::QuditUbb => "qudit-ubb",
            StrategyKind::PermutationAveragedUbb => "permutation-averaged-ubb",
            StrategyKind::RegisterBare => "register-bare",
            StrategyKind::RegisterUbb => "register-ubb",
        }
    }

    pub fn is_register(&self) -> bool {
        matches!(self, StrategyKind::RegisterBare | StrategyKind::RegisterUbb)
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown protocol kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PermutationPolicy {
    /// Always the identity permutation.
    Fixed,
    /// A fresh uniformly random permutation every step, shared by all
    /// channels.
    ResampleEachStep,
}

impl std::str::FromStr for PermutationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(PermutationPolicy::Fixed),
            "resample-each-step" => Ok(PermutationPolicy::ResampleEachStep),
            _ => Err(Error::domain(format!("unknown permutation policy `{s}`"))),
        }
    }
}

/// Chooses the measured observables before each step.
///
/// Feedback strategies measure `V·P·T·X·T†·P†·V†` where `V` holds the
/// current eigenvectors in descending eigenvalue order, `P` is the
/// permutation from the policy and `T` the unbiased transform. The feedback
/// is applied to the measurement basis, not to the state.
#[derive(Debug, Clone)]
pub struct FeedbackStrategy {
    kind: StrategyKind,
    base: Vec<Observable>,
    transform: UnitaryTransform,
    rotated: Vec<CMatrix>,
    policy: PermutationPolicy,
    perm: Vec<usize>,
    rng: ChaCha8Rng,
}

impl FeedbackStrategy {
    fn build(
        kind: StrategyKind,
        base: Vec<Observable>,
        transform: UnitaryTransform,
        policy: PermutationPolicy,
    ) -> Result<Self> {
        let dim = base[0].dim();
        check_dim(dim, transform.dim())?;
        let rotated = base
            .iter()
            .map(|x| conjugate_observable(x, &transform).map(|y| y.entries().clone()))
            .collect::<Result<_>>()?;
        Ok(Self {
            kind,
            base,
            transform,
            rotated,
            policy,
            perm: (0..dim).collect(),
            rng: NoiseSource::new(0, 0).rng(PERMUTATION_CHANNEL),
        })
    }

    /// Measures `J_z` at every step.
    pub fn bare(dim: usize) -> Result<Self> {
        let x = jz_operator(dim)?;
        Self::build(
            StrategyKind::Bare,
            vec![x],
            UnitaryTransform::identity(dim)?,
            PermutationPolicy::Fixed,
        )
    }

    /// Qubit feedback with the real rotation `[[1, 1], [−1, 1]]/√2`, so the
    /// measured observable is `J_x` in the state's eigenbasis.
    pub fn qubit_ubb() -> Self {
        Self::build(
            StrategyKind::QubitUbb,
            vec![jz_operator(2).expect("dimension 2")],
            UnitaryTransform::qubit_rotation(),
            PermutationPolicy::Fixed,
        )
        .expect("qubit dimensions agree")
    }

    pub fn qudit_ubb(dim: usize, transform: UnitaryTransform) -> Result<Self> {
        Self::build(
            StrategyKind::QuditUbb,
            vec![jz_operator(dim)?],
            transform,
            PermutationPolicy::Fixed,
        )
    }

    pub fn permutation_averaged_ubb(
        dim: usize,
        transform: UnitaryTransform,
        policy: PermutationPolicy,
    ) -> Result<Self> {
        Self::build(
            StrategyKind::PermutationAveragedUbb,
            vec![jz_operator(dim)?],
            transform,
            policy,
        )
    }

    /// Measures every qubit's `σ_z` at every step.
    pub fn register_bare(qubits: usize) -> Result<Self> {
        let base = register_channels(qubits)?;
        let dim = base[0].dim();
        Self::build(
            StrategyKind::RegisterBare,
            base,
            UnitaryTransform::identity(dim)?,
            PermutationPolicy::Fixed,
        )
    }

    pub fn register_ubb(
        qubits: usize,
        transform: UnitaryTransform,
        policy: PermutationPolicy,
    ) -> Result<Self> {
        Self::build(StrategyKind::RegisterUbb, register_channels(qubits)?, transform, policy)
    }

    /// The strategy for `kind` with the Fourier transform (or the qubit
    /// rotation for `qubit-ubb`). `dim` is `D` for qudits and `2ⁿ` for
    /// registers.
    pub fn with_defaults(kind: StrategyKind, dim: usize, policy: PermutationPolicy) -> Result<Self> {
        let qubits = || -> Result<usize> {
            if dim.is_power_of_two() && dim >= 2 {
                Ok(dim.trailing_zeros() as usize)
            } else {
                Err(Error::domain(format!("register dimension {dim} is not a power of two")))
            }
        };
        match kind {
            StrategyKind::Bare => Self::bare(dim),
            StrategyKind::QubitUbb => {
                check_dim(2, dim)?;
                Ok(Self::qubit_ubb())
            }
            StrategyKind::QuditUbb => Self::qudit_ubb(dim, fourier_unbiased_transform(dim)?),
            StrategyKind::PermutationAveragedUbb => {
                Self::permutation_averaged_ubb(dim, fourier_unbiased_transform(dim)?, policy)
            }
            StrategyKind::RegisterBare => Self::register_bare(qubits()?),
            StrategyKind::RegisterUbb => {
                Self::register_ubb(qubits()?, fourier_unbiased_transform(dim)?, policy)
            }
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.base[0].dim()
    }

    pub fn channels(&self) -> usize {
        self.base.len()
    }

    pub fn policy(&self) -> PermutationPolicy {
        self.policy
    }

    pub fn transform(&self) -> &UnitaryTransform {
        &self.transform
    }

    pub fn base_observables(&self) -> &[Observable] {
        &self.base
    }

    /// False for strategies that measure the same observables every step.
    pub fn is_adaptive(&self) -> bool {
        !matches!(self.kind, StrategyKind::Bare | StrategyKind::RegisterBare)
    }

    /// Permutation applied on the most recent feedback step.
    pub fn current_permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Copy whose permutation draws come from `source`.
    pub fn seeded(&self, source: &NoiseSource) -> Self {
        let mut out = self.clone();
        out.rng = source.rng(PERMUTATION_CHANNEL);
        out.perm = (0..self.dim()).collect();
        out
    }

    pub fn choose_observables(&mut self, rho: &DensityMatrix) -> Result<Vec<Observable>> {
        check_dim(self.dim(), rho.dim())?;
        if !self.is_adaptive() {
            return Ok(self.base.clone());
        }
        self.choose_observables_with(&eigensystem(rho))
    }

    /// As [`Self::choose_observables`], reusing an existing decomposition.
    pub fn choose_observables_with(&mut self, eigen: &EigenDecomposition) -> Result<Vec<Observable>> {
        check_dim(self.dim(), eigen.dim())?;
        if !self.is_adaptive() {
            return Ok(self.base.clone());
        }
        if self.policy == PermutationPolicy::ResampleEachStep {
            self.perm.shuffle(&mut self.rng);
        }
        let v = eigen.basis().entries();
        let d = self.dim();
        // Column i of V·P is column perm[i] of V.
        let w = CMatrix::from_fn(d, d, |r, i| v[(r, self.perm[i])]);
        let w_adj = w.adjoint();
        Ok(self
            .rotated
            .iter()
            .map(|y| Observable::from_hermitian(hermitize(&(&w * y * &w_adj))))
            .collect())
    }
}

fn register_channels(qubits: usize) -> Result<Vec<Observable>> {
    if qubits == 0 || qubits > 10 {
        return Err(Error::domain(format!("register size {qubits} outside 1..=10")));
    }
    (1..=qubits).map(|r| register_observable(qubits, r)).collect()
}
