//! Kraus-operator measurements, their conditional and unconditional action,
//! and the standard family of rotated qubit projective measurements.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{make_pure_state, DensityMatrix, STATE_TOL};

/// Outcomes at or below this probability are dropped from [`apply_measurement`].
pub const PROB_FLOOR: f64 = 1e-12;

/// One labelled outcome of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub kraus: ComplexMatrix,
}

/// A finite set of Kraus operators satisfying `sum M^dagger M = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    name: String,
    outcomes: Vec<Outcome>,
}

impl Measurement {
    pub fn new(name: impl Into<String>, outcomes: Vec<Outcome>) -> Result<Self> {
        let name = name.into();
        let Some(first) = outcomes.first() else {
            return Err(Error::NoOutcomes(name));
        };
        let dim = first.kraus.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for o in &outcomes {
            if o.kraus.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: o.kraus.dim(),
                });
            }
            sum = &sum + &(&o.kraus.adjoint() * &o.kraus);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > STATE_TOL {
            return Err(Error::Incomplete { name, deviation });
        }
        Ok(Self { name, outcomes })
    }

    /// Projective measurement onto an orthonormal basis given as vectors.
    pub fn from_basis(name: impl Into<String>, basis: &[(&str, &[Complex64])]) -> Result<Self> {
        let outcomes = basis
            .iter()
            .map(|(label, v)| {
                Ok(Outcome {
                    label: String::from(*label),
                    kraus: make_pure_state(v)?.matrix().clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, outcomes)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].kraus.dim()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome_label(&self, outcome: usize) -> &str {
        &self.outcomes[outcome].label
    }

    /// Whether every Kraus operator is a Hermitian idempotent and they are
    /// mutually orthogonal.
    pub fn is_projective(&self) -> bool {
        let ops: Vec<&ComplexMatrix> = self.outcomes.iter().map(|o| &o.kraus).collect();
        for (i, a) in ops.iter().enumerate() {
            if a.hermiticity_defect() > STATE_TOL {
                return false;
            }
            for (j, b) in ops.iter().enumerate() {
                let prod = *a * *b;
                let expected = if i == j {
                    (*a).clone()
                } else {
                    ComplexMatrix::zeros(a.dim())
                };
                if prod.max_abs_diff(&expected) > STATE_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Whether some outcome's operator equals the projector `target`.
    pub fn projects_onto(&self, target: &DensityMatrix) -> bool {
        self.dim() == target.dim()
            && self
                .outcomes
                .iter()
                .any(|o| o.kraus.max_abs_diff(target.matrix()) <= STATE_TOL)
    }
}

/// One surviving branch of a measurement.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Index into [`Measurement::outcomes`].
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Conditional action of `e` on `rho`: every outcome with probability above
/// [`PROB_FLOOR`] together with its renormalized post-measurement state.
pub fn apply_measurement(rho: &DensityMatrix, e: &Measurement) -> Result<Vec<Branch>> {
    check_dim(rho, e)?;
    let mut branches = Vec::with_capacity(e.outcomes.len());
    for (idx, o) in e.outcomes.iter().enumerate() {
        let unnormalized = o.kraus.sandwich(rho.matrix());
        let p = unnormalized.trace().re;
        if p > PROB_FLOOR {
            branches.push(Branch {
                outcome: idx,
                probability: p,
                state: DensityMatrix::from_psd_unnormalized(&unnormalized, p),
            });
        }
    }
    Ok(branches)
}

/// Outcome-averaged action `sum_y M(y) rho M(y)^dagger`.
pub fn unconditional_evolve(rho: &DensityMatrix, e: &Measurement) -> Result<DensityMatrix> {
    check_dim(rho, e)?;
    let mut sum = ComplexMatrix::zeros(rho.dim());
    for o in &e.outcomes {
        sum = &sum + &o.kraus.sandwich(rho.matrix());
    }
    let tr = sum.trace().re;
    Ok(DensityMatrix::from_psd_unnormalized(&sum, tr))
}

fn check_dim(rho: &DensityMatrix, e: &Measurement) -> Result<()> {
    if rho.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// The ordered action set available to a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    dim: usize,
    actions: Vec<Measurement>,
    target_action: Option<usize>,
}

impl MeasurementSet {
    /// `target_action`, when given, must name a projective measurement with a
    /// rank-1 outcome (the projector onto the goal state).
    pub fn new(dim: usize, actions: Vec<Measurement>, target_action: Option<usize>) -> Result<Self> {
        for a in &actions {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
        }
        if let Some(t) = target_action {
            let Some(action) = actions.get(t) else {
                return Err(Error::InvalidTargetAction(format!("index {t} out of range")));
            };
            if !action.is_projective() {
                return Err(Error::InvalidTargetAction(format!(
                    "`{}` is not projective",
                    action.name()
                )));
            }
            let has_rank_one = action
                .outcomes()
                .iter()
                .any(|o| (o.kraus.trace().re - 1.0).abs() <= STATE_TOL);
            if !has_rank_one {
                return Err(Error::InvalidTargetAction(format!(
                    "`{}` has no rank-1 outcome",
                    action.name()
                )));
            }
        }
        Ok(Self {
            dim,
            actions,
            target_action,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Measurement] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> Result<&Measurement> {
        self.actions.get(index).ok_or(Error::UnknownAction(index))
    }

    /// Index of the measurement that projects onto the target state, if designated.
    pub fn target_action(&self) -> Option<usize> {
        self.target_action
    }

    /// Checks that the designated target action really resolves `target`.
    pub fn check_target_action(&self, target: &DensityMatrix) -> Result<usize> {
        let idx = self
            .target_action
            .ok_or_else(|| Error::InvalidTargetAction(String::from("no target action designated")))?;
        if !self.actions[idx].projects_onto(target) {
            return Err(Error::InvalidTargetAction(format!(
                "`{}` does not project onto the target state",
                self.actions[idx].name()
            )));
        }
        Ok(idx)
    }

    /// Restricts the set to the given actions, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let actions = indices
            .iter()
            .map(|&i| self.action(i).cloned())
            .collect::<Result<Vec<_>>>()?;
        let target_action = self.target_action.and_then(|t| indices.iter().position(|&i| i == t));
        Self::new(self.dim, actions, target_action)
    }
}

/// `(|phi_i>, |psi_i>)` for angle `pi i / (2T)`.
pub fn standard_basis_vectors(t: usize, i: usize) -> ([Complex64; 2], [Complex64; 2]) {
    let angle = PI * i as f64 / (2.0 * t as f64);
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    (
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    )
}

/// The qubit family `E_1..E_T`, where `E_i` projects onto the rotated basis
/// `|phi_i> = cos(pi i/2T)|0> + sin(pi i/2T)|1>`, `|psi_i> = -sin(..)|0> + cos(..)|1>`.
///
/// `E_T` is the computational-basis measurement and is designated as the
/// target action (index `T - 1`).
pub fn build_standard_set(t: usize) -> Result<MeasurementSet> {
    if t < 2 {
        return Err(Error::SetTooSmall(t));
    }
    let actions = (1..=t)
        .map(|i| {
            let (phi, psi) = standard_basis_vectors(t, i);
            Measurement::from_basis(
                format!("E_{i}"),
                &[(&format!("phi_{i}"), &phi), (&format!("psi_{i}"), &psi)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(2, actions, Some(t - 1))
}

/// The computational-basis measurement `{|0><0|, |1><1|}` on a qubit.
pub fn computational_basis_measurement() -> Measurement {
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let one = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    Measurement::from_basis("E_*", &[("0", &zero), ("1", &one)]).expect("basis measurement is complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn standard_set_vectors() {
        let (phi, _) = standard_basis_vectors(5, 1);
        assert!((phi[0].re - 0.951_056_516_295_153_5).abs() < 1e-12);
        assert!((phi[1].re - 0.309_016_994_374_947_4).abs() < 1e-12);
        let (_, psi) = standard_basis_vectors(3, 2);
        assert!((psi[0].re + 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!((psi[1].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn last_standard_action_is_computational_basis() {
        let set = build_standard_set(5).unwrap();
        assert_eq!(set.len(), 5);
        assert_eq!(set.target_action(), Some(4));
        let e5 = set.action(4).unwrap();
        assert_eq!(e5.name(), "E_5");
        assert_eq!(e5.outcome_label(0), "phi_5");
        let one = DensityMatrix::basis(2, 1).unwrap();
        let zero = DensityMatrix::basis(2, 0).unwrap();
        assert!(e5.outcomes()[0].kraus.max_abs_diff(one.matrix()) < 1e-12);
        assert!(e5.outcomes()[1].kraus.max_abs_diff(zero.matrix()) < 1e-12);
        assert_eq!(set.check_target_action(&one), Ok(4));
    }

    #[test]
    fn too_small_set() {
        assert_eq!(build_standard_set(1), Err(Error::SetTooSmall(1)));
        assert_eq!(build_standard_set(0), Err(Error::SetTooSmall(0)));
    }

    #[test]
    fn incomplete_measurement_is_rejected() {
        let half = ComplexMatrix::diag(&[0.5, 0.5]);
        let err = Measurement::new(
            "bad",
            vec![Outcome {
                label: "x".into(),
                kraus: half,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Incomplete { .. }));
        assert!(matches!(Measurement::new("none", vec![]), Err(Error::NoOutcomes(_))));
    }

    #[test]
    fn measuring_own_eigenstate_drops_zero_branch() {
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let e = computational_basis_measurement();
        let branches = apply_measurement(&zero, &e).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(e.outcome_label(branches[0].outcome), "0");
        assert!((branches[0].probability - 1.0).abs() < 1e-15);
        assert!(branches[0].state.matrix().max_abs_diff(zero.matrix()) < 1e-15);
    }

    #[test]
    fn born_rule_on_first_standard_action() {
        let set = build_standard_set(3).unwrap();
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let branches = apply_measurement(&zero, set.action(0).unwrap()).unwrap();
        assert_eq!(branches.len(), 2);
        assert!((branches[0].probability - 0.75).abs() < 1e-12);
        assert!((branches[1].probability - 0.25).abs() < 1e-12);
        let (phi, psi) = standard_basis_vectors(3, 1);
        let phi = make_pure_state(&phi).unwrap();
        let psi = make_pure_state(&psi).unwrap();
        assert!(branches[0].state.matrix().max_abs_diff(phi.matrix()) < 1e-12);
        assert!(branches[1].state.matrix().max_abs_diff(psi.matrix()) < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_unbiased() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let set = build_standard_set(7).unwrap();
        for e in set.actions() {
            let b = apply_measurement(&mixed, e).unwrap();
            assert_eq!(b.len(), 2);
            for (branch, o) in b.iter().zip(e.outcomes()) {
                assert!((branch.probability - 0.5).abs() < 1e-12);
                assert!(branch.state.matrix().max_abs_diff(&o.kraus) < 1e-12);
            }
            let u = unconditional_evolve(&mixed, e).unwrap();
            assert!(u.matrix().max_abs_diff(mixed.matrix()) < 1e-12);
        }
    }

    #[test]
    fn dephasing_in_measurement_basis() {
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let e = computational_basis_measurement();
        let u = unconditional_evolve(&zero, &e).unwrap();
        assert!(u.matrix().max_abs_diff(zero.matrix()) < 1e-15);

        let (phi, _) = standard_basis_vectors(3, 1);
        let phi = make_pure_state(&phi).unwrap();
        let u = unconditional_evolve(&phi, &e).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.75, 0.25])) < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let e = computational_basis_measurement();
        let qutrit = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            apply_measurement(&qutrit, &e),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            unconditional_evolve(&qutrit, &e),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn target_action_must_be_projective() {
        // Weak measurement: M0 = diag(1, sqrt(0.5)), M1 = diag(0, sqrt(0.5)).
        let h = libm::sqrt(0.5);
        let weak = Measurement::new(
            "weak",
            vec![
                Outcome {
                    label: "a".into(),
                    kraus: ComplexMatrix::diag(&[1.0, h]),
                },
                Outcome {
                    label: "b".into(),
                    kraus: ComplexMatrix::diag(&[0.0, h]),
                },
            ],
        )
        .unwrap();
        assert!(!weak.is_projective());
        assert!(matches!(
            MeasurementSet::new(2, vec![weak.clone()], Some(0)),
            Err(Error::InvalidTargetAction(_))
        ));
        assert!(matches!(
            MeasurementSet::new(2, vec![weak], Some(3)),
            Err(Error::InvalidTargetAction(_))
        ));
        let basis = Measurement::from_basis("z", &[("0", &[c(1.0), c(0.0)]), ("1", &[c(0.0), c(1.0)])]).unwrap();
        assert!(basis.is_projective());
    }
}
