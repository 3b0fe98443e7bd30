//! Convex-roof ED of Werner-type states compared with the squared
//! concurrence.

use std::f64::consts::FRAC_1_SQRT_2;

use entdist::convexroof::{concurrence_mixed_2q, mixed_ed, RoofConfig};
use entdist::{DensityMatrix, PureState, C64};

fn main() {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let zero = C64::new(0.0, 0.0);
    let bell = PureState::new(2, vec![h, zero, zero, h]).unwrap().density_matrix();
    let noise = DensityMatrix::maximally_mixed(2);
    let cfg = RoofConfig { restarts: 16, ..Default::default() };
    println!("{:>5} {:>12} {:>12} {:>12}", "p", "E(rho)", "2 C^2", "eigen bound");
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let m = bell.matrix() * C64::new(p, 0.0) + noise.matrix() * C64::new(1.0 - p, 0.0);
        let rho = DensityMatrix::new(2, m).unwrap();
        let rep = mixed_ed(&rho, &cfg).unwrap();
        let c = concurrence_mixed_2q(&rho).unwrap();
        let bound: f64 = rep.per_qubit.iter().map(|r| r.eigen_bound).sum();
        println!("{p:>5.1} {:>12.8} {:>12.8} {bound:>12.8}", rep.total, 2.0 * c * c);
    }
}
