//! Metric matching as a test of local-unitary equivalence.

use std::f64::consts::{FRAC_PI_4, PI};

use entdist::families::{brs_state, ghzl_state, w_state};
use entdist::luequiv::{equivalence_test, MatchConfig};
use entdist::random::{random_local_unitaries, random_state, rng};
use entdist::PureState;

fn report(name: &str, a: &PureState, b: &PureState) {
    let rep = equivalence_test(a, b, &MatchConfig::default()).unwrap();
    let res = rep.max_residual.map_or("-".to_string(), |r| format!("{r:.2e}"));
    println!("{name:<22} {:<20} max residual {res:>9}  {}", format!("{:?}", rep.status), rep.interpretation);
}

fn main() {
    report("GHZ2 vs cluster2", &ghzl_state(2, FRAC_PI_4).unwrap(), &brs_state(2, PI).unwrap());
    report("GHZ3 vs cluster3", &ghzl_state(3, FRAC_PI_4).unwrap(), &brs_state(3, PI).unwrap());
    report("GHZ3 vs W3", &ghzl_state(3, FRAC_PI_4).unwrap(), &w_state(3, &[0.9553, FRAC_PI_4]).unwrap());
    report("GHZ4 vs cluster4", &ghzl_state(4, FRAC_PI_4).unwrap(), &brs_state(4, PI).unwrap());

    let mut r = rng(3);
    let psi = random_state(&mut r, 3);
    let moved = psi.apply_local_unitaries(&random_local_unitaries(&mut r, 3)).unwrap();
    report("random vs LU image", &psi, &moved);
}
