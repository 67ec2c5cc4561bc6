#![allow(dead_code)]

use qsteer_core::measurement::standard_basis_vectors;
use qsteer_core::{make_pure_state, DensityMatrix, StateGraph, Target};

pub fn zero() -> DensityMatrix {
    DensityMatrix::basis(2, 0).unwrap()
}

pub fn one() -> DensityMatrix {
    DensityMatrix::basis(2, 1).unwrap()
}

pub fn one_target() -> Target {
    Target::new(one()).unwrap()
}

/// Graph id of `|0>`, `|1>`, `|phi_i>` or `|psi_i>` for the standard set of size `t`.
pub fn state_id(graph: &StateGraph, t: usize, label: &str) -> usize {
    let rho = match label {
        "0" => zero(),
        "1" => one(),
        _ => {
            let (kind, i) = label.split_at(3);
            let i: usize = i.parse().unwrap();
            let (phi, psi) = standard_basis_vectors(t, i);
            make_pure_state(if kind == "phi" { &phi } else { &psi }).unwrap()
        }
    };
    graph.find(&rho).unwrap_or_else(|| panic!("{label} not in graph"))
}

/// Row labels in the order the reference tables use.
pub fn table_labels(t: usize) -> Vec<String> {
    let mut labels = vec!["0".to_string(), "1".to_string()];
    for i in 1..t {
        labels.push(format!("phi{i}"));
        labels.push(format!("psi{i}"));
    }
    labels
}
