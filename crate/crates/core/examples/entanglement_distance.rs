//! ED, optimal frame and entanglement metric of a few textbook states.

use std::f64::consts::FRAC_PI_4;

use entdist::families::{brs_state, ghzl_state, w_state};
use entdist::{entanglement_distance, PureState};

fn show(name: &str, psi: &PureState) {
    let rep = entanglement_distance(psi);
    println!("{name}: E = {:.6}, E/M = {:.6}", rep.total, rep.per_qubit_mean());
    for (q, (e, v)) in rep.per_qubit.iter().zip(rep.frame.vectors()).enumerate() {
        println!("  qubit {q}: E_mu = {e:.6}, v = [{:+.4}, {:+.4}, {:+.4}]", v[0], v[1], v[2]);
    }
    for row in rep.em.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:+.4}")).collect();
        println!("  | {} |", cells.join(" "));
    }
    if !rep.degenerate_qubits.is_empty() {
        println!("  degenerate qubits: {:?}", rep.degenerate_qubits);
    }
}

fn main() {
    show("GHZ M=3", &ghzl_state(3, FRAC_PI_4).unwrap());
    show("cluster M=4", &brs_state(4, std::f64::consts::PI).unwrap());
    show("W M=3", &w_state(3, &[(1.0 / 3f64.sqrt()).acos(), FRAC_PI_4]).unwrap());
    show("|0+>", &PureState::tensor_product(&[
        PureState::basis(1, 0).unwrap(),
        PureState::qubit_along([1.0, 0.0, 0.0]).unwrap(),
    ]).unwrap());
}
