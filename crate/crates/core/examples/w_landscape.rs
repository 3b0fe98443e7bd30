//! E/3 of the three-qubit W family over its two angles, as CSV on stdout.

use entdist::families::fig5_grid;

fn main() {
    let resolution = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(31);
    let grid = fig5_grid(resolution).unwrap();
    println!("theta1,theta2,E_per_qubit");
    for p in &grid {
        println!("{},{},{}", p.theta1, p.theta2, p.ed_per_qubit);
    }
    let top = grid.iter().max_by(|a, b| a.ed_per_qubit.total_cmp(&b.ed_per_qubit)).unwrap();
    eprintln!("max {:.6} at ({:.4}, {:.4})", top.ed_per_qubit, top.theta1, top.theta2);
}
