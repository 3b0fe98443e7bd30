//! A single-qubit measurement on a GHZ state, then the randomized property
//! suites.

use std::f64::consts::FRAC_PI_4;

use entdist::families::ghzl_state;
use entdist::fsmetric::entanglement_distance_value;
use entdist::locc::{apply_measurement, random_unilocal_measurement, run_suite, Suite};

fn main() {
    let ghz = ghzl_state(3, FRAC_PI_4).unwrap();
    let k = random_unilocal_measurement(5, 0, true);
    println!("E before: {:.6}", entanglement_distance_value(&ghz));
    let mut avg = 0.0;
    for (j, (p, psi)) in apply_measurement(&ghz, &k).unwrap().into_iter().enumerate() {
        let e = entanglement_distance_value(&psi);
        avg += p * e;
        println!("  outcome {j}: p = {p:.4}, E = {e:.6}");
    }
    println!("E after, averaged: {avg:.6}");

    for suite in Suite::ALL {
        let trials = if suite == Suite::Trace { 10 } else { 200 };
        let rep = run_suite(suite, trials, 1).unwrap();
        println!("{:<13} {:>4} trials  violations {}  worst margin {:+.3e}", suite.name(), rep.trials, rep.violations, rep.worst_margin);
    }
}
