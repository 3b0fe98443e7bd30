//! Numeric ED of the three state families against their closed forms.

use std::f64::consts::{FRAC_PI_2, TAU};

use entdist::families::{family_ed_closed_form, FamilySpec};
use entdist::fsmetric::entanglement_distance;

fn main() {
    let mut specs = Vec::new();
    for i in 0..=8 {
        let x = i as f64 / 8.0;
        specs.push(FamilySpec::ghzl(5, x * FRAC_PI_2).unwrap());
        specs.push(FamilySpec::brs(4, x * TAU).unwrap());
        specs.push(FamilySpec::w(3, vec![x * FRAC_PI_2, FRAC_PI_2 / 2.0]).unwrap());
    }
    println!("{:<28} {:>12} {:>12} {:>10}", "state", "numeric E/M", "closed E/M", "diff");
    for spec in specs {
        let numeric = entanglement_distance(&spec.state()).per_qubit_mean();
        let closed = family_ed_closed_form(&spec).unwrap();
        println!("{:<28} {numeric:>12.8} {closed:>12.8} {:>10.1e}", spec.to_string(), (numeric - closed).abs());
    }
    // BRS beyond four qubits has no closed form; the numeric path still works.
    let big = FamilySpec::brs(8, 1.0).unwrap();
    println!("{big}: E/M = {:.8}", entanglement_distance(&big.state()).per_qubit_mean());
}
