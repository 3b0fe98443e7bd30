//! Block structure of the entanglement metric separates unentangled parts.

use std::f64::consts::FRAC_PI_4;

use entdist::families::{ghzl_state, w_state};
use entdist::fsmetric::DEFAULT_BLOCK_TOL;
use entdist::{block_structure, entanglement_distance, metric_tensor, PureState, UnitVectorFrame};

fn main() {
    let bell = ghzl_state(2, FRAC_PI_4).unwrap();
    let w = w_state(3, &[0.9, 0.6]).unwrap();
    let psi = PureState::tensor_product(&[bell, PureState::basis(1, 1).unwrap(), w]).unwrap();
    let rep = entanglement_distance(&psi);
    println!("E = {:.6} over {} qubits", rep.total, psi.num_qubits());
    println!("blocks in the optimal frame: {:?}", block_structure(&rep.em, DEFAULT_BLOCK_TOL));

    let z = UnitVectorFrame::uniform(psi.num_qubits(), [0.0, 0.0, 1.0]).unwrap();
    let g = metric_tensor(&psi, &z).unwrap();
    println!("trace in the all-z frame: {:.6} (never below E)", g.trace());
}
