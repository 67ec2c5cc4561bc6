//! Density matrices, fidelity and the numerical target test.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Tolerance for Hermiticity, trace and positivity checks on construction.
pub const STATE_TOL: f64 = 1e-10;

/// Default fidelity-squared slack for deciding that a state *is* the target.
pub const DEFAULT_TARGET_EPS: f64 = 1e-9;

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` against the density-operator invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_defect();
        if herm > STATE_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = (matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        if tr > STATE_TOL {
            return Err(Error::TraceNotOne(tr));
        }
        let min = matrix.eigh().min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// Wraps an operator already known to be PSD (e.g. `M rho M^dagger`),
    /// symmetrizing and dividing by its trace.
    pub(crate) fn from_psd_unnormalized(matrix: &ComplexMatrix, trace: f64) -> Self {
        Self {
            matrix: matrix.hermitian_part().scale(1.0 / trace),
        }
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k + 1,
            });
        }
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        make_pure_state(&v)
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(rho sigma)`, which is `<t|rho|t>` when `sigma = |t><t|`.
    pub fn overlap(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix[(i, j)] * other.matrix[(j, i)]).re;
            }
        }
        acc
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.overlap(self)
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= 1e-9
    }
}

/// Builds `|psi><psi|` from amplitudes, normalizing the vector first.
pub fn make_pure_state(amplitudes: &[Complex64]) -> Result<DensityMatrix> {
    let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if amplitudes.is_empty() || !norm_sq.is_finite() || norm_sq <= 1e-300 {
        return Err(Error::DegenerateStateVector);
    }
    let inv = 1.0 / libm::sqrt(norm_sq);
    let v: Vec<Complex64> = amplitudes.iter().map(|a| a * inv).collect();
    DensityMatrix::new(ComplexMatrix::outer(&v))
}

/// Uhlmann fidelity `tr sqrt(sqrt(rho) sigma sqrt(rho))`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let root = rho.matrix().eigh().apply(|l| libm::sqrt(l.max(0.0)));
    let inner = root.sandwich(sigma.matrix()).eigh();
    // Eigenvalues at rounding level are zero; their square roots would not be.
    let floor = 1e-13 * inner.eigenvalues().last().copied().unwrap_or(0.0).max(0.0);
    let f = inner.trace_of(|l| if l > floor { libm::sqrt(l) } else { 0.0 });
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity against a pure state: `sqrt(<t|rho|t>)`.
pub fn fidelity_pure(rho: &DensityMatrix, pure: &DensityMatrix) -> Result<f64> {
    check_dims(rho, pure)?;
    Ok(libm::sqrt(rho.overlap(pure).clamp(0.0, 1.0)))
}

/// `true` iff `F(rho, target)^2 >= 1 - eps`; `target` must be pure.
pub fn is_target(rho: &DensityMatrix, target: &DensityMatrix, eps: f64) -> bool {
    rho.dim() == target.dim() && rho.overlap(target) >= 1.0 - eps
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// A pure goal state together with the slack used to recognise it.
#[derive(Debug, Clone)]
pub struct Target {
    state: DensityMatrix,
    eps: f64,
}

impl Target {
    pub fn new(state: DensityMatrix) -> Result<Self> {
        Self::with_eps(state, DEFAULT_TARGET_EPS)
    }

    pub fn with_eps(state: DensityMatrix, eps: f64) -> Result<Self> {
        if !state.is_pure() {
            return Err(Error::TargetNotPure);
        }
        Ok(Self { state, eps })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn matches(&self, rho: &DensityMatrix) -> bool {
        is_target(rho, &self.state, self.eps)
    }

    /// `<t|rho|t>`, the per-state payoff of the expected-fidelity objective.
    pub fn overlap(&self, rho: &DensityMatrix) -> f64 {
        rho.overlap(&self.state).clamp(0.0, 1.0)
    }
}
