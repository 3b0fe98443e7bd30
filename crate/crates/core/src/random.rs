//! Seeded generators for random states, unitaries and frames.
//!
//! Every generator takes an explicit RNG so callers control reproducibility;
//! [`sub_seed`] derives independent per-trial seeds from a master seed.

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fsmetric::UnitVectorFrame;
use crate::qstate::{DensityMatrix, PureState, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `(seed, index)`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> PureState {
    let amps = (0..1usize << num_qubits).map(|_| gaussian_c64(rng)).collect();
    PureState::from_unnormalized(num_qubits, amps).expect("gaussian vector is nonzero")
}

/// Uniformly distributed point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> UnitVectorFrame {
    UnitVectorFrame::new((0..num_qubits).map(|_| random_unit_vector(rng)).collect()).expect("unit vectors")
}

/// Haar-random SU(2) element from a uniform unit quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let q: [f64; 4] = loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            break q.map(|x| x / n);
        }
    };
    let a = C64::new(q[0], q[1]);
    let b = C64::new(q[2], q[3]);
    Matrix2::new(a, -b.conj(), b, a.conj())
}

pub fn random_local_unitaries<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> Vec<Matrix2<C64>> {
    (0..num_qubits).map(|_| random_su2(rng)).collect()
}

/// Random density matrix of the given rank: Haar eigenvectors, flat
/// Dirichlet eigenvalues.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize, rank: usize) -> DensityMatrix {
    let dim = 1usize << num_qubits;
    let rank = rank.clamp(1, dim);
    let g = DMatrix::<C64>::from_fn(dim, rank, |_, _| gaussian_c64(rng));
    let q = g.qr().q();
    let mut w: Vec<f64> = (0..rank).map(|_| -rng.random_range(f64::EPSILON..1.0f64).ln()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (j, wj) in w.iter().enumerate() {
        let col = q.column(j);
        rho += col * col.adjoint() * C64::new(*wj, 0.0);
    }
    DensityMatrix::new_lenient(num_qubits, rho, 1e-9).expect("valid by construction")
}
