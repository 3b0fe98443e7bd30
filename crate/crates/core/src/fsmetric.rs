//! Projective Fubini-Study metric restricted to local rotations, the
//! entanglement metric (EM) and the entanglement distance (ED).
//!
//! For a frame of unit vectors `v^mu`, the metric is
//!
//! ```text
//! g_{mu nu}(psi, v) = <sigma_v^mu sigma_v^nu> - <sigma_v^mu><sigma_v^nu>
//! ```
//!
//! Its trace is minimized by aligning each `v^mu` with the qubit's Bloch
//! vector, which gives the closed form `E = M - sum_mu |<sigma^mu>|^2`.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{apply_1q, check_axis, dot3, BlochVector, PureState, C64};

/// Bloch vectors shorter than this are treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;
/// Default threshold on `|g_{mu nu}|` for block detection.
pub const DEFAULT_BLOCK_TOL: f64 = 1e-8;

/// One unit 3-vector per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 3]>", into = "Vec<[f64; 3]>")]
pub struct UnitVectorFrame {
    vectors: Vec<[f64; 3]>,
}

impl TryFrom<Vec<[f64; 3]>> for UnitVectorFrame {
    type Error = Error;

    fn try_from(vectors: Vec<[f64; 3]>) -> Result<Self> {
        Self::new(vectors)
    }
}

impl From<UnitVectorFrame> for Vec<[f64; 3]> {
    fn from(f: UnitVectorFrame) -> Self {
        f.vectors
    }
}

impl UnitVectorFrame {
    pub fn new(vectors: Vec<[f64; 3]>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Empty("frame vectors"));
        }
        for v in &vectors {
            check_axis(*v)?;
        }
        Ok(Self { vectors })
    }

    /// Every qubit uses the same axis.
    pub fn uniform(num_qubits: usize, axis: [f64; 3]) -> Result<Self> {
        Self::new(vec![axis; num_qubits])
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[[f64; 3]] {
        &self.vectors
    }

    pub fn get(&self, qubit: usize) -> [f64; 3] {
        self.vectors[qubit]
    }

    /// Same frame with `v^qubit -> -v^qubit`.
    pub fn flipped(&self, qubit: usize) -> Self {
        let mut vectors = self.vectors.clone();
        vectors[qubit] = vectors[qubit].map(|x| -x);
        Self { vectors }
    }
}

/// Real symmetric `M x M` metric tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    entries: DMatrix<f64>,
}

impl MetricTensor {
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::invalid("metric tensor must be square and non-empty"));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("metric tensor rows must be square"));
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// The all-ones matrix `J_M`.
    pub fn all_ones(m: usize) -> Self {
        Self { entries: DMatrix::from_element(m, m, 1.0) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.entries[(mu, nu)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.entries.row(i).iter().copied().collect()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: &self.entries * s }
    }

    /// Frobenius norm of the difference.
    pub fn frobenius_distance(&self, other: &MetricTensor) -> f64 {
        (&self.entries - &other.entries).norm()
    }

    pub fn max_abs_diff(&self, other: &MetricTensor) -> f64 {
        (&self.entries - &other.entries).amax()
    }

    pub fn symmetry_error(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        nalgebra::SymmetricEigen::new(self.entries.clone()).eigenvalues.min()
    }

    /// Conjugates by `diag(signs)`, i.e. flips the frame on qubits with a
    /// negative sign.
    pub fn gauge(&self, signs: &[f64]) -> Self {
        let n = self.dim();
        Self { entries: DMatrix::from_fn(n, n, |i, j| self.entries[(i, j)] * signs[i] * signs[j]) }
    }
}

/// Result of [`entanglement_distance`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdReport {
    pub total: f64,
    pub per_qubit: Vec<f64>,
    pub frame: UnitVectorFrame,
    pub em: MetricTensor,
    pub degenerate_qubits: Vec<usize>,
}

/// JSON shape of an [`EdReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdReportJson {
    pub schema_version: u32,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_mu")]
    pub e_mu: Vec<f64>,
    pub frame: Vec<[f64; 3]>,
    pub em: Vec<Vec<f64>>,
    pub degenerate: Vec<usize>,
}

impl EdReport {
    pub fn num_qubits(&self) -> usize {
        self.per_qubit.len()
    }

    /// `E / M`.
    pub fn per_qubit_mean(&self) -> f64 {
        self.total / self.num_qubits() as f64
    }

    pub fn to_json(&self) -> EdReportJson {
        EdReportJson {
            schema_version: 1,
            e: self.total,
            e_mu: self.per_qubit.clone(),
            frame: self.frame.vectors().to_vec(),
            em: self.em.rows(),
            degenerate: self.degenerate_qubits.clone(),
        }
    }
}

fn check_frame(state: &PureState, frame: &UnitVectorFrame) -> Result<()> {
    if frame.len() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: frame.len() });
    }
    Ok(())
}

/// Local rotation taking `n . sigma` to `sigma_3`: rows are `<n|` and `<-n|`.
fn align_to_z(n: [f64; 3]) -> Matrix2<C64> {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, -phi);
    Matrix2::new(C64::new(c, 0.0), e * s, C64::new(s, 0.0), -e * c)
}

/// In-place Walsh-Hadamard transform: `w[mask] = sum_k p_k (-1)^{|k & mask|}`.
fn walsh_hadamard(w: &mut [f64]) {
    let mut h = 1;
    while h < w.len() {
        for base in (0..w.len()).step_by(2 * h) {
            for i in base..base + h {
                let (a, b) = (w[i], w[i + h]);
                w[i] = a + b;
                w[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Metric tensor `g(psi, v)`.
///
/// The state is rotated so every `v^mu` becomes the z axis; all pair
/// correlators are then Walsh coefficients of the rotated probability
/// distribution, costing `O(M 2^M)` overall.
pub fn metric_tensor(state: &PureState, frame: &UnitVectorFrame) -> Result<MetricTensor> {
    check_frame(state, frame)?;
    let m = state.num_qubits();
    let blochs = state.bloch_vectors();
    let mut amps = state.amplitudes().to_vec();
    for q in 0..m {
        amps = apply_1q(&amps, q, &align_to_z(frame.get(q)));
    }
    let mut w: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    drop(amps);
    walsh_hadamard(&mut w);
    let proj: Vec<f64> = (0..m).map(|q| blochs[q].dot(frame.get(q))).collect();
    let mut g = DMatrix::<f64>::zeros(m, m);
    for mu in 0..m {
        g[(mu, mu)] = 1.0 - proj[mu] * proj[mu];
        for nu in mu + 1..m {
            let zz = w[(1 << mu) | (1 << nu)];
            let v = zz - proj[mu] * proj[nu];
            g[(mu, nu)] = v;
            g[(nu, mu)] = v;
        }
    }
    Ok(MetricTensor { entries: g })
}

/// `tr g(psi, v) = sum_mu [1 - (v^mu . <sigma^mu>)^2]`.
pub fn metric_trace(state: &PureState, frame: &UnitVectorFrame) -> Result<f64> {
    check_frame(state, frame)?;
    Ok(state
        .bloch_vectors()
        .iter()
        .zip(frame.vectors())
        .map(|(b, v)| 1.0 - b.dot(*v).powi(2))
        .sum())
}

/// Trace-minimizing frame: each `v^mu` is the normalized Bloch vector,
/// or `(0, 0, 1)` for qubits whose Bloch vector vanishes (flagged `true`).
pub fn optimal_frame(state: &PureState) -> (UnitVectorFrame, Vec<bool>) {
    frame_from_blochs(&state.bloch_vectors())
}

fn frame_from_blochs(blochs: &[BlochVector]) -> (UnitVectorFrame, Vec<bool>) {
    let mut degenerate = Vec::with_capacity(blochs.len());
    let vectors = blochs
        .iter()
        .map(|b| {
            let n = b.norm();
            if n > DEGENERACY_THRESHOLD {
                degenerate.push(false);
                b.0.map(|x| x / n)
            } else {
                degenerate.push(true);
                [0.0, 0.0, 1.0]
            }
        })
        .collect();
    (UnitVectorFrame { vectors }, degenerate)
}

/// Entanglement distance, its per-qubit split and the entanglement metric.
pub fn entanglement_distance(state: &PureState) -> EdReport {
    let blochs = state.bloch_vectors();
    let per_qubit: Vec<f64> = blochs.iter().map(|b| 1.0 - b.norm().powi(2)).collect();
    let (frame, flags) = frame_from_blochs(&blochs);
    let em = metric_tensor(state, &frame).expect("frame built for this state");
    EdReport {
        total: per_qubit.iter().sum(),
        per_qubit,
        frame,
        em,
        degenerate_qubits: flags.iter().enumerate().filter(|(_, d)| **d).map(|(i, _)| i).collect(),
    }
}

/// Entanglement distance only, without building the metric.
pub fn entanglement_distance_value(state: &PureState) -> f64 {
    state.bloch_vectors().iter().map(|b| 1.0 - b.norm().powi(2)).sum()
}

/// `E_mu = 2 (1 - tr rho_mu^2)` from the single-qubit marginal.
pub fn single_qubit_ed_via_purity(state: &PureState, qubit: usize) -> Result<f64> {
    let rho = state.reduced_density_matrix(&[qubit])?;
    Ok(2.0 * (1.0 - rho.purity()))
}

/// `sum_mu D_FS^2(psi, sigma_v^mu psi)` over the conjugate states.
pub fn conjugate_distance_sum(state: &PureState, frame: &UnitVectorFrame) -> Result<f64> {
    check_frame(state, frame)?;
    let mut total = 0.0;
    for q in 0..state.num_qubits() {
        let conj = state.apply_pauli_axis(q, frame.get(q))?;
        total += state.fs_distance_sq(&conj)?;
    }
    Ok(total)
}

/// Two-qubit pure-state concurrence `2 |w_0 w_3 - w_1 w_2|`.
pub fn concurrence_2q(state: &PureState) -> Result<f64> {
    if state.num_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: state.num_qubits() });
    }
    let w = state.amplitudes();
    Ok((2.0 * (w[0] * w[3] - w[1] * w[2]).norm()).min(1.0))
}

/// Connected components of the graph with an edge wherever
/// `|g_{mu nu}| > tol`; blocks are ordered by their smallest qubit.
#[allow(clippy::needless_range_loop)]
pub fn block_structure(em: &MetricTensor, tol: f64) -> Vec<Vec<usize>> {
    let m = em.dim();
    let mut label: Vec<Option<usize>> = vec![None; m];
    let mut blocks = Vec::new();
    for start in 0..m {
        if label[start].is_some() {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = Some(id);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..m {
                if label[v].is_none() && v != u && em.get(u, v).abs() > tol {
                    label[v] = Some(id);
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Single-qubit statistics and pair correlation tensors of a state, enough
/// to evaluate `g(psi, v)` for any frame in `O(M^2)`.
#[derive(Debug, Clone)]
pub struct LocalStatistics {
    blochs: Vec<[f64; 3]>,
    /// `corr[mu][nu][a][b] = <sigma_a^mu sigma_b^nu>` for `mu != nu`.
    corr: Vec<Vec<[[f64; 3]; 3]>>,
}

impl LocalStatistics {
    #[allow(clippy::needless_range_loop)]
    pub fn new(state: &PureState) -> Self {
        let m = state.num_qubits();
        let blochs = state.bloch_vectors().iter().map(|b| b.0).collect();
        let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut corr = vec![vec![[[0.0; 3]; 3]; m]; m];
        for mu in 0..m {
            for nu in mu + 1..m {
                let mut t = [[0.0; 3]; 3];
                for a in 0..3 {
                    for b in 0..3 {
                        t[a][b] = state.correlator(mu, axes[a], nu, axes[b]).expect("distinct qubits");
                    }
                }
                corr[mu][nu] = t;
                for a in 0..3 {
                    for b in 0..3 {
                        corr[nu][mu][b][a] = t[a][b];
                    }
                }
            }
        }
        Self { blochs, corr }
    }

    pub fn num_qubits(&self) -> usize {
        self.blochs.len()
    }

    pub fn bloch(&self, qubit: usize) -> [f64; 3] {
        self.blochs[qubit]
    }

    /// `g_{mu nu}(psi, v)` for a list of (not validated) unit vectors.
    pub fn metric_entry(&self, vectors: &[[f64; 3]], mu: usize, nu: usize) -> f64 {
        let pm = dot3(self.blochs[mu], vectors[mu]);
        if mu == nu {
            return 1.0 - pm * pm;
        }
        let pn = dot3(self.blochs[nu], vectors[nu]);
        let t = &self.corr[mu][nu];
        let (a, b) = (vectors[mu], vectors[nu]);
        let mut c = 0.0;
        for i in 0..3 {
            c += a[i] * (t[i][0] * b[0] + t[i][1] * b[1] + t[i][2] * b[2]);
        }
        c - pm * pn
    }

    pub fn metric(&self, vectors: &[[f64; 3]]) -> MetricTensor {
        let m = self.num_qubits();
        MetricTensor { entries: DMatrix::from_fn(m, m, |i, j| self.metric_entry(vectors, i, j)) }
    }

    /// Frobenius distance between `g(psi, v)` and `target`.
    pub fn residual(&self, vectors: &[[f64; 3]], target: &MetricTensor) -> f64 {
        let m = self.num_qubits();
        let mut acc = 0.0;
        for mu in 0..m {
            let d = self.metric_entry(vectors, mu, mu) - target.get(mu, mu);
            acc += d * d;
            for nu in mu + 1..m {
                let d1 = self.metric_entry(vectors, mu, nu);
                let e1 = d1 - target.get(mu, nu);
                let e2 = d1 - target.get(nu, mu);
                acc += e1 * e1 + e2 * e2;
            }
        }
        acc.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_frame, random_local_unitaries, random_state, rng};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ghz(m: usize, theta: f64) -> PureState {
        let mut a = vec![c(0.0); 1 << m];
        a[0] = c(theta.cos());
        a[(1 << m) - 1] = c(theta.sin());
        PureState::new(m, a).unwrap()
    }

    fn bell() -> PureState {
        ghz(2, FRAC_PI_4)
    }

    /// Independent route: pair correlators from the two-qubit marginals.
    fn metric_by_correlators(state: &PureState, frame: &UnitVectorFrame) -> DMatrix<f64> {
        let m = state.num_qubits();
        DMatrix::from_fn(m, m, |i, j| {
            let bi = state.bloch_vector(i).unwrap().dot(frame.get(i));
            if i == j {
                1.0 - bi * bi
            } else {
                let bj = state.bloch_vector(j).unwrap().dot(frame.get(j));
                state.correlator(i, frame.get(i), j, frame.get(j)).unwrap() - bi * bj
            }
        })
    }

    #[test]
    fn metric_routes_agree_on_random_states() {
        let mut r = rng(11);
        for m in 1..=5 {
            for _ in 0..10 {
                let psi = random_state(&mut r, m);
                let f = random_frame(&mut r, m);
                let fast = metric_tensor(&psi, &f).unwrap();
                let slow = metric_by_correlators(&psi, &f);
                assert!((fast.matrix() - &slow).amax() < 1e-12);
                let stats = LocalStatistics::new(&psi).metric(f.vectors());
                assert!(stats.max_abs_diff(&fast) < 1e-12);
            }
        }
    }

    #[test]
    fn metric_tensor_examples() {
        let a = PureState::qubit_along([0.6, 0.0, 0.8]).unwrap();
        let b = PureState::qubit_along([0.0, -1.0, 0.0]).unwrap();
        let prod = PureState::tensor_product(&[a, b]).unwrap();
        let (frame, flags) = optimal_frame(&prod);
        assert_eq!(flags, vec![false, false]);
        assert!(metric_tensor(&prod, &frame).unwrap().matrix().amax() < 1e-14);

        for m in 2..=5 {
            let g = metric_tensor(&ghz(m, FRAC_PI_4), &UnitVectorFrame::uniform(m, [0.0, 0.0, 1.0]).unwrap()).unwrap();
            assert!(g.max_abs_diff(&MetricTensor::all_ones(m)) < 1e-14);
        }
        let err = metric_tensor(&bell(), &UnitVectorFrame::uniform(3, [0.0, 0.0, 1.0]).unwrap());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn metric_trace_examples() {
        for m in 2..=6 {
            for theta in [0.1, 0.4, 1.2] {
                for sign in [1.0, -1.0] {
                    let f = UnitVectorFrame::uniform(m, [0.0, 0.0, sign]).unwrap();
                    let t = metric_trace(&ghz(m, theta), &f).unwrap();
                    assert_abs_diff_eq!(t, m as f64 * (2.0 * theta).sin().powi(2), epsilon = 1e-13);
                }
            }
        }
        let mut r = rng(3);
        for _ in 0..20 {
            let psi = random_state(&mut r, 3);
            let f = random_frame(&mut r, 3);
            let t = metric_trace(&psi, &f).unwrap();
            assert_abs_diff_eq!(t, metric_tensor(&psi, &f).unwrap().trace(), epsilon = 1e-12);
            assert!(t >= entanglement_distance(&psi).total - 1e-12);
            assert!((0.0..=3.0).contains(&t));
        }
    }

    #[test]
    fn optimal_frame_examples() {
        let zz = PureState::basis(2, 0).unwrap();
        let (f, d) = optimal_frame(&zz);
        assert_eq!(f.vectors(), &[[0.0, 0.0, 1.0]; 2]);
        assert_eq!(d, vec![false, false]);
        let (_, d) = optimal_frame(&ghz(2, FRAC_PI_4));
        assert_eq!(d, vec![true, true]);
        let (f, d) = optimal_frame(&ghz(2, FRAC_PI_6));
        assert_eq!(d, vec![false, false]);
        for v in f.vectors() {
            assert_abs_diff_eq!(v[2], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ed_of_ghz_family() {
        for m in 2..=6 {
            for theta in [0.0, 0.3, FRAC_PI_6, FRAC_PI_4, 1.1] {
                let rep = entanglement_distance(&ghz(m, theta));
                assert_abs_diff_eq!(rep.per_qubit_mean(), (2.0 * theta).sin().powi(2), epsilon = 1e-13);
                assert_abs_diff_eq!(rep.total, rep.per_qubit.iter().sum::<f64>(), epsilon = 1e-15);
                assert_abs_diff_eq!(rep.total, rep.em.trace(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn purity_route_matches_bloch_route() {
        assert_abs_diff_eq!(single_qubit_ed_via_purity(&bell(), 0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(single_qubit_ed_via_purity(&PureState::basis(3, 5).unwrap(), 2).unwrap(), 0.0);
        let mut r = rng(5);
        for _ in 0..30 {
            let psi = random_state(&mut r, 4);
            let rep = entanglement_distance(&psi);
            for q in 0..4 {
                assert_abs_diff_eq!(single_qubit_ed_via_purity(&psi, q).unwrap(), rep.per_qubit[q], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_distances_reproduce_trace() {
        let zz = PureState::basis(2, 0).unwrap();
        let f = UnitVectorFrame::uniform(2, [0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(conjugate_distance_sum(&zz, &f).unwrap(), 0.0);
        let f3 = UnitVectorFrame::uniform(3, [0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(conjugate_distance_sum(&ghz(3, FRAC_PI_4), &f3).unwrap(), 3.0, epsilon = 1e-14);
        let mut r = rng(8);
        for _ in 0..50 {
            let psi = random_state(&mut r, 3);
            let f = random_frame(&mut r, 3);
            let direct = conjugate_distance_sum(&psi, &f).unwrap();
            assert_abs_diff_eq!(direct, metric_trace(&psi, &f).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence_2q(&bell()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(entanglement_distance(&bell()).total, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence_2q(&PureState::basis(2, 2).unwrap()).unwrap(), 0.0);
        assert!(concurrence_2q(&ghz(3, 0.2)).is_err());
    }

    #[test]
    fn block_structure_examples() {
        let a = PureState::qubit_along([0.0, 1.0, 0.0]).unwrap();
        let prod = PureState::tensor_product(&[a.clone(), a.clone(), a]).unwrap();
        let em = entanglement_distance(&prod).em;
        assert_eq!(block_structure(&em, DEFAULT_BLOCK_TOL), vec![vec![0], vec![1], vec![2]]);
        let em = entanglement_distance(&ghz(4, FRAC_PI_4)).em;
        assert_eq!(block_structure(&em, DEFAULT_BLOCK_TOL), vec![vec![0, 1, 2, 3]]);
        let bb = PureState::tensor_product(&[bell(), bell()]).unwrap();
        let em = entanglement_distance(&bb).em;
        assert_eq!(block_structure(&em, DEFAULT_BLOCK_TOL), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn metric_tensor_invariants_on_random_states() {
        let mut r = rng(21);
        for m in 2..=5 {
            for _ in 0..10 {
                let psi = random_state(&mut r, m);
                let f = random_frame(&mut r, m);
                let g = metric_tensor(&psi, &f).unwrap();
                assert!(g.symmetry_error() < 1e-10);
                assert!(g.min_eigenvalue() > -1e-8);
                for q in 0..m {
                    assert!((-1e-10..=1.0 + 1e-10).contains(&g.get(q, q)));
                }
            }
        }
    }

    #[test]
    fn lu_invariance_and_sign_gauge() {
        let mut r = rng(9);
        for _ in 0..20 {
            let psi = random_state(&mut r, 4);
            let us = random_local_unitaries(&mut r, 4);
            let rep = entanglement_distance(&psi);
            let moved = psi.apply_local_unitaries(&us).unwrap();
            assert_abs_diff_eq!(entanglement_distance(&moved).total, rep.total, epsilon = 1e-10);
            for q in 0..4 {
                let flipped = metric_tensor(&psi, &rep.frame.flipped(q)).unwrap();
                for k in 0..4 {
                    assert_abs_diff_eq!(flipped.get(k, k), rep.em.get(k, k), epsilon = 1e-14);
                }
                assert_abs_diff_eq!(flipped.trace(), rep.total, epsilon = 1e-12);
            }
        }
    }
}
