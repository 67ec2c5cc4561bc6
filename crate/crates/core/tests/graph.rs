mod common;

use common::{one, zero};
use qsteer_core::graph::reachable_layers;
use qsteer_core::{
    apply_measurement, build_standard_set, canonical_key, enumerate_closed, enumerate_reachable, ComplexMatrix,
    DensityMatrix, Error, Measurement, MeasurementSet, Outcome,
};
use std::f64::consts::PI;

/// Closure of the angle `0` under "measure in the basis at angle pi i / 2T",
/// tracking real pure states by their angle modulo pi.
fn closure_by_angles(t: usize) -> usize {
    let norm = |x: f64| {
        let r = x.rem_euclid(PI);
        if (PI - r) < 1e-9 {
            0.0
        } else {
            r
        }
    };
    let mut seen: Vec<f64> = vec![0.0];
    let mut frontier = vec![0.0];
    while let Some(theta) = frontier.pop() {
        for i in 1..=t {
            let alpha = PI * i as f64 / (2.0 * t as f64);
            for (p, next) in [
                ((theta - alpha).cos().powi(2), alpha),
                ((theta - alpha).sin().powi(2), alpha + PI / 2.0),
            ] {
                let next = norm(next);
                if p > 1e-12 && !seen.iter().any(|s| (s - next).abs() < 1e-9) {
                    seen.push(next);
                    frontier.push(next);
                }
            }
        }
    }
    seen.len()
}

#[test]
fn standard_closure_has_two_t_states() {
    for t in 2..=12 {
        let set = build_standard_set(t).unwrap();
        let g = enumerate_closed(&zero(), &set).unwrap();
        assert_eq!(closure_by_angles(t), 2 * t, "oracle, T = {t}");
        assert_eq!(g.len(), 2 * t, "T = {t}");
        assert!(g.is_closed());
        // Every state is |0>, |1> or one of the phi/psi projectors.
        for s in g.states() {
            let in_family = set
                .actions()
                .iter()
                .flat_map(Measurement::outcomes)
                .any(|o| o.kraus.max_abs_diff(s.matrix()) < 1e-9);
            assert!(in_family);
        }
        for s in 0..g.len() {
            for a in 0..set.len() {
                let ts = g.transitions(s, a).unwrap();
                let total: f64 = ts.iter().map(|t| t.probability).sum();
                assert!((total - 1.0).abs() < 1e-9);
                assert!(ts.iter().all(|t| t.next < g.len()));
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let set = build_standard_set(9).unwrap();
    let a = enumerate_closed(&zero(), &set).unwrap();
    let b = enumerate_closed(&zero(), &set).unwrap();
    assert_eq!(a.states(), b.states());
    for s in 0..a.len() {
        for act in 0..set.len() {
            assert_eq!(a.transitions(s, act), b.transitions(s, act));
        }
    }
}

#[test]
fn bfs_discovery_order() {
    let set = build_standard_set(5).unwrap();
    let g = enumerate_closed(&zero(), &set).unwrap();
    let order: Vec<usize> = ["0", "phi1", "psi1", "phi2", "psi2", "phi3", "psi3", "phi4", "psi4", "1"]
        .iter()
        .map(|l| common::state_id(&g, 5, l))
        .collect();
    assert_eq!(order, (0..10).collect::<Vec<_>>());
}

#[test]
fn keys_are_stable_under_remeasurement() {
    let set = build_standard_set(7).unwrap();
    let g = enumerate_closed(&zero(), &set).unwrap();
    for (id, rho) in g.states().iter().enumerate() {
        // Some action has rho as an eigenprojector; measuring it returns rho.
        let again = set
            .actions()
            .iter()
            .find_map(|e| {
                let b = apply_measurement(rho, e).unwrap();
                (b.len() == 1).then(|| b[0].state.clone())
            })
            .unwrap();
        assert_eq!(canonical_key(&again), canonical_key(rho));
        assert_eq!(g.find(&again), Some(id));
    }
}

#[test]
fn only_the_basis_measurement_keeps_zero_fixed() {
    let set = build_standard_set(5).unwrap().subset(&[4]).unwrap();
    let g = enumerate_closed(&zero(), &set).unwrap();
    assert_eq!(g.len(), 1);
    assert!(g.find(&one()).is_none());
}

fn weak_measurement(strength: f64) -> Measurement {
    // M_0 = diag(1, sqrt(1 - s)), M_1 = diag(0, sqrt(s)): partial collapse towards |1>.
    Measurement::new(
        "weak",
        vec![
            Outcome {
                label: "0".into(),
                kraus: ComplexMatrix::diag(&[1.0, (1.0 - strength).sqrt()]),
            },
            Outcome {
                label: "1".into(),
                kraus: ComplexMatrix::diag(&[0.0, strength.sqrt()]),
            },
        ],
    )
    .unwrap()
}

#[test]
fn non_projective_sets_explode_without_a_horizon() {
    let set = MeasurementSet::new(2, vec![weak_measurement(0.3)], None).unwrap();
    let plus = DensityMatrix::new(
        ComplexMatrix::from_rows(&[vec![0.5.into(), 0.5.into()], vec![0.5.into(), 0.5.into()]]).unwrap(),
    )
    .unwrap();
    assert_eq!(
        enumerate_reachable(&plus, &set, 50, None).unwrap_err(),
        Error::StateExplosion(50)
    );

    let g = enumerate_reachable(&plus, &set, 50, Some(6)).unwrap();
    assert_eq!(g.horizon(), Some(6));
    let layers = reachable_layers(&g, 6);
    assert!(layers[6].iter().any(|&r| r));
    assert!((0..g.len()).all(|s| g.depth(s) <= 6));
    assert!((0..g.len()).filter(|&s| g.depth(s) == 6).all(|s| !g.is_expanded(s)));
}
