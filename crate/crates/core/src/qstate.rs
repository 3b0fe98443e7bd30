//! Dense multi-qubit states.
//!
//! Basis index `k` encodes qubit occupations little-endian: qubit `mu` is bit
//! `mu` of `k`, so `|1>` on qubit 0 and `|0>` elsewhere is index 1.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for state normalization and Hermiticity checks.
pub const NORM_TOL: f64 = 1e-12;
/// Slack allowed on negative density-matrix eigenvalues.
pub const EIGEN_SLACK: f64 = 1e-10;
/// Tolerance applied when loading amplitudes from files.
pub const LOAD_NORM_TOL: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Validates a 3-vector as a unit axis.
pub fn check_axis(axis: [f64; 3]) -> Result<()> {
    let norm = norm3(axis);
    if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(Error::NonUnitAxis { norm });
    }
    Ok(())
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The 2x2 matrix `v . sigma`.
pub fn pauli_axis_matrix(v: [f64; 3]) -> Matrix2<C64> {
    Matrix2::new(
        C64::new(v[2], 0.0),
        C64::new(v[0], -v[1]),
        C64::new(v[0], v[1]),
        C64::new(-v[2], 0.0),
    )
}

/// Pauli matrices sigma_1, sigma_2, sigma_3.
pub fn paulis() -> [Matrix2<C64>; 3] {
    [
        pauli_axis_matrix([1.0, 0.0, 0.0]),
        pauli_axis_matrix([0.0, 1.0, 0.0]),
        pauli_axis_matrix([0.0, 0.0, 1.0]),
    ]
}

/// Applies a 2x2 operator to one qubit of a raw amplitude vector.
pub(crate) fn apply_1q(amps: &[C64], qubit: usize, op: &Matrix2<C64>) -> Vec<C64> {
    let mut out = amps.to_vec();
    let bit = 1usize << qubit;
    let (m00, m01, m10, m11) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
    for base in (0..amps.len()).step_by(2 * bit) {
        for i0 in base..base + bit {
            let i1 = i0 | bit;
            let (a0, a1) = (amps[i0], amps[i1]);
            out[i0] = m00 * a0 + m01 * a1;
            out[i1] = m10 * a0 + m11 * a1;
        }
    }
    out
}

fn norm_sq(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Single-qubit expectation values `<sigma_1>, <sigma_2>, <sigma_3>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(self.0)
    }

    pub fn dot(&self, axis: [f64; 3]) -> f64 {
        dot3(self.0, axis)
    }
}

/// Normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state, requiring unit norm within [`NORM_TOL`].
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(num_qubits, amplitudes.len())?;
        let n = norm_sq(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Builds a state, rescaling it to unit norm when its norm is within
    /// `tol` of one. Vectors already normalized to rounding are kept bit
    /// for bit.
    pub fn normalized_within(num_qubits: usize, mut amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        Self::check_shape(num_qubits, amplitudes.len())?;
        let n = norm_sq(&amplitudes);
        if !n.is_finite() || (n.sqrt() - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        if (n - 1.0).abs() <= 1e-14 {
            return Ok(Self { num_qubits, amplitudes });
        }
        let s = 1.0 / n.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn from_unnormalized(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_shape(num_qubits, amplitudes.len())?;
        let n = norm_sq(&amplitudes);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        let s = 1.0 / n.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(Self { num_qubits, amplitudes })
    }

    fn check_shape(num_qubits: usize, len: usize) -> Result<()> {
        if num_qubits == 0 {
            return Err(Error::invalid("a state needs at least one qubit"));
        }
        if num_qubits > 30 {
            return Err(Error::invalid(format!("{num_qubits} qubits exceeds dense storage limit")));
        }
        let dim = 1usize << num_qubits;
        if len != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: len });
        }
        Ok(())
    }

    /// Computational basis state `|k>`.
    pub fn basis(num_qubits: usize, k: usize) -> Result<Self> {
        Self::check_shape(num_qubits, 1 << num_qubits)?;
        if k >= 1 << num_qubits {
            return Err(Error::invalid(format!("basis index {k} out of range")));
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[k] = ONE;
        Ok(Self { num_qubits, amplitudes: amps })
    }

    /// Single-qubit state `a|0> + b|1>` (normalized on construction).
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::from_unnormalized(1, vec![a, b])
    }

    /// Single-qubit state pointing along the Bloch direction `axis`.
    pub fn qubit_along(axis: [f64; 3]) -> Result<Self> {
        check_axis(axis)?;
        let theta = axis[2].clamp(-1.0, 1.0).acos();
        let phi = axis[1].atan2(axis[0]);
        Ok(Self {
            num_qubits: 1,
            amplitudes: vec![
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            ],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    /// Tensor product; factor 0 occupies the lowest-order qubits.
    pub fn tensor_product(factors: &[PureState]) -> Result<PureState> {
        let (first, rest) = factors.split_first().ok_or(Error::Empty("tensor product factors"))?;
        for f in factors {
            let n = norm_sq(&f.amplitudes);
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized { norm_sq: n });
            }
        }
        let mut amps = first.amplitudes.clone();
        let mut qubits = first.num_qubits;
        for f in rest {
            let low = amps.len();
            let mut next = vec![ZERO; low * f.dim()];
            for (j, b) in f.amplitudes.iter().enumerate() {
                for (i, a) in amps.iter().enumerate() {
                    next[i + j * low] = a * b;
                }
            }
            amps = next;
            qubits += f.num_qubits;
        }
        PureState::normalized_within(qubits, amps, 1e-10)
    }

    /// Returns `(v . sigma^mu)|psi>`.
    pub fn apply_pauli_axis(&self, qubit: usize, axis: [f64; 3]) -> Result<PureState> {
        self.check_qubit(qubit)?;
        check_axis(axis)?;
        let amps = apply_1q(&self.amplitudes, qubit, &pauli_axis_matrix(axis));
        Ok(PureState { num_qubits: self.num_qubits, amplitudes: amps })
    }

    /// Applies a unitary to one qubit; the result is renormalized to absorb
    /// rounding.
    pub fn apply_unitary(&self, qubit: usize, u: &Matrix2<C64>) -> Result<PureState> {
        self.check_qubit(qubit)?;
        let amps = apply_1q(&self.amplitudes, qubit, u);
        PureState::normalized_within(self.num_qubits, amps, 1e-8)
    }

    /// Applies one unitary per qubit.
    pub fn apply_local_unitaries(&self, us: &[Matrix2<C64>]) -> Result<PureState> {
        if us.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: us.len() });
        }
        let mut amps = self.amplitudes.clone();
        for (q, u) in us.iter().enumerate() {
            amps = apply_1q(&amps, q, u);
        }
        PureState::normalized_within(self.num_qubits, amps, 1e-8)
    }

    /// Multiplies by a global phase `e^{i alpha}`.
    pub fn with_global_phase(&self, alpha: f64) -> PureState {
        let ph = C64::from_polar(1.0, alpha);
        PureState {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * ph).collect(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Single-qubit reduced density matrix entries `(rho_00, rho_11, rho_01)`.
    fn qubit_marginal(&self, qubit: usize) -> (f64, f64, C64) {
        let bit = 1usize << qubit;
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
        for base in (0..self.dim()).step_by(2 * bit) {
            for i0 in base..base + bit {
                let a0 = self.amplitudes[i0];
                let a1 = self.amplitudes[i0 | bit];
                r00 += a0.norm_sqr();
                r11 += a1.norm_sqr();
                r01 += a0 * a1.conj();
            }
        }
        (r00, r11, r01)
    }

    /// Bloch vector of one qubit.
    pub fn bloch_vector(&self, qubit: usize) -> Result<BlochVector> {
        self.check_qubit(qubit)?;
        let (r00, r11, r01) = self.qubit_marginal(qubit);
        Ok(BlochVector([2.0 * r01.re, -2.0 * r01.im, r00 - r11]))
    }

    /// Bloch vectors of every qubit.
    pub fn bloch_vectors(&self) -> Vec<BlochVector> {
        (0..self.num_qubits)
            .map(|q| {
                let (r00, r11, r01) = self.qubit_marginal(q);
                BlochVector([2.0 * r01.re, -2.0 * r01.im, r00 - r11])
            })
            .collect()
    }

    /// Two-qubit reduced density matrix over `(mu, nu)`; local index is
    /// `b_mu + 2 b_nu`.
    pub fn two_qubit_marginal(&self, mu: usize, nu: usize) -> Result<[[C64; 4]; 4]> {
        self.check_qubit(mu)?;
        self.check_qubit(nu)?;
        if mu == nu {
            return Err(Error::invalid("two-qubit marginal needs distinct qubits"));
        }
        let (bm, bn) = (1usize << mu, 1usize << nu);
        let mut rho = [[ZERO; 4]; 4];
        for k in 0..self.dim() {
            if k & (bm | bn) != 0 {
                continue;
            }
            let idx = [k, k | bm, k | bn, k | bm | bn];
            let a = idx.map(|i| self.amplitudes[i]);
            for s in 0..4 {
                for t in 0..4 {
                    rho[s][t] += a[s] * a[t].conj();
                }
            }
        }
        Ok(rho)
    }

    /// `<psi| (v_mu . sigma^mu)(v_nu . sigma^nu) |psi>` for distinct qubits.
    pub fn correlator(&self, mu: usize, v_mu: [f64; 3], nu: usize, v_nu: [f64; 3]) -> Result<f64> {
        if mu == nu {
            return Err(Error::invalid("correlator requires distinct qubits (sigma_v^2 = I on the diagonal)"));
        }
        check_axis(v_mu)?;
        check_axis(v_nu)?;
        let rho = self.two_qubit_marginal(mu, nu)?;
        let a = pauli_axis_matrix(v_mu);
        let b = pauli_axis_matrix(v_nu);
        let mut acc = ZERO;
        for s in 0..4 {
            for t in 0..4 {
                let op = a[(t & 1, s & 1)] * b[(t >> 1, s >> 1)];
                acc += rho[s][t] * op;
            }
        }
        // operator is Hermitian (distinct qubits commute)
        Ok(acc.re)
    }

    /// Reduced density matrix over `keep` (in the given order: `keep[0]`
    /// becomes qubit 0 of the result).
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (keep_bits, rest_bits) = split_bits(self.num_qubits, keep)?;
        let dk = 1usize << keep_bits.len();
        let dr = 1usize << rest_bits.len();
        let mut a = DMatrix::<C64>::zeros(dk, dr);
        for s in 0..dk {
            for r in 0..dr {
                a[(s, r)] = self.amplitudes[compose(s, &keep_bits, r, &rest_bits)];
            }
        }
        let rho = &a * a.adjoint();
        Ok(DensityMatrix { num_qubits: keep_bits.len(), matrix: rho })
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix { num_qubits: self.num_qubits, matrix: &v * v.adjoint() }
    }

    /// Squared Fubini-Study distance between rays, `1 - |<a|b>|^2`.
    pub fn fs_distance_sq(&self, other: &PureState) -> Result<f64> {
        let ov = self.inner(other)?;
        Ok((1.0 - ov.norm_sqr()).clamp(0.0, 1.0))
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("state serializes")
    }

    /// Parses a state file, normalizing within [`LOAD_NORM_TOL`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("state file line {} column {}: {e}", e.line(), e.column())))?;
        file.into_state()
    }
}

/// On-disk state representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn into_state(self) -> Result<PureState> {
        let amps = self.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect();
        PureState::normalized_within(self.qubits, amps, LOAD_NORM_TOL)
    }
}

fn split_bits(num_qubits: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::Empty("partial trace keep set"));
    }
    let mut seen = vec![false; num_qubits];
    for &q in keep {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
        }
        if seen[q] {
            return Err(Error::invalid(format!("qubit {q} listed twice in keep set")));
        }
        seen[q] = true;
    }
    let rest = (0..num_qubits).filter(|q| !seen[*q]).collect();
    Ok((keep.to_vec(), rest))
}

fn compose(s: usize, keep_bits: &[usize], r: usize, rest_bits: &[usize]) -> usize {
    let mut k = 0;
    for (i, &q) in keep_bits.iter().enumerate() {
        k |= ((s >> i) & 1) << q;
    }
    for (i, &q) in rest_bits.iter().enumerate() {
        k |= ((r >> i) & 1) << q;
    }
    k
}

/// Density matrix over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(num_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a density matrix needs at least one qubit"));
        }
        let dim = 1usize << num_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows().max(matrix.ncols()) });
        }
        let herm_err = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > NORM_TOL {
            return Err(Error::invalid(format!("matrix is not Hermitian (max deviation {herm_err:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::invalid(format!("trace {tr} is not 1")));
        }
        let rho = Self { num_qubits, matrix };
        let min_eig = rho.eigen().0.last().copied().unwrap_or(0.0);
        if min_eig < -EIGEN_SLACK {
            return Err(Error::invalid(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    /// Hermitizes and renormalizes the trace before validating.
    pub fn new_lenient(num_qubits: usize, matrix: DMatrix<C64>, tol: f64) -> Result<Self> {
        let herm = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let herm_err = (&matrix - &herm).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > tol {
            return Err(Error::invalid(format!("matrix is not Hermitian (max deviation {herm_err:.3e})")));
        }
        let tr = herm.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::invalid(format!("trace {tr} is not 1")));
        }
        Self::new(num_qubits, herm / C64::new(tr, 0.0))
    }

    /// Convex combination `sum_j w_j |psi_j><psi_j|`.
    pub fn mixture(members: &[(f64, PureState)]) -> Result<Self> {
        let (_, first) = members.first().ok_or(Error::Empty("mixture members"))?;
        let m = first.num_qubits();
        let dim = first.dim();
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for (w, s) in members {
            if s.num_qubits() != m {
                return Err(Error::DimensionMismatch { expected: m, found: s.num_qubits() });
            }
            if *w < 0.0 {
                return Err(Error::invalid("negative mixture weight"));
            }
            acc += s.density_matrix().matrix * C64::new(*w, 0.0);
        }
        Self::new_lenient(m, acc, 1e-9)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let matrix = DMatrix::<C64>::identity(dim, dim) / C64::new(dim as f64, 0.0);
        Self { num_qubits, matrix }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Eigenpairs sorted by decreasing eigenvalue; ties keep solver order.
    pub fn eigen(&self) -> (Vec<f64>, Vec<nalgebra::DVector<C64>>) {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        (vals, vecs)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().0.iter().filter(|&&l| l > tol).count()
    }

    /// Traces out every qubit not in `keep` (result order follows `keep`).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (keep_bits, rest_bits) = split_bits(self.num_qubits, keep)?;
        let dk = 1usize << keep_bits.len();
        let dr = 1usize << rest_bits.len();
        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for s in 0..dk {
            for t in 0..dk {
                let mut acc = ZERO;
                for r in 0..dr {
                    acc += self.matrix[(compose(s, &keep_bits, r, &rest_bits), compose(t, &keep_bits, r, &rest_bits))];
                }
                out[(s, t)] = acc;
            }
        }
        Ok(DensityMatrix { num_qubits: keep_bits.len(), matrix: out })
    }

    /// Bloch vector of a single-qubit density matrix.
    pub fn single_qubit_bloch(&self) -> Result<BlochVector> {
        if self.num_qubits != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.num_qubits });
        }
        let r01 = self.matrix[(0, 1)];
        Ok(BlochVector([2.0 * r01.re, -2.0 * r01.im, (self.matrix[(0, 0)] - self.matrix[(1, 1)]).re]))
    }

    /// Applies `U rho U^dagger` with one unitary per qubit.
    pub fn conjugate_local(&self, us: &[Matrix2<C64>]) -> Result<DensityMatrix> {
        if us.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: us.len() });
        }
        let mut full = DMatrix::<C64>::from_element(1, 1, ONE);
        for u in us.iter().rev() {
            full = full.kronecker(u);
        }
        let matrix = &full * &self.matrix * full.adjoint();
        DensityMatrix::new_lenient(self.num_qubits, matrix, 1e-9)
    }

    /// Max-entry distance to another density matrix.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect()
    }

    /// Parses `[[[re,im],...],...]` or `{"matrix": ...}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RhoFile {
            Bare(Vec<Vec<[f64; 2]>>),
            Wrapped { matrix: Vec<Vec<[f64; 2]>> },
        }
        let parsed: RhoFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("density matrix line {} column {}: {e}", e.line(), e.column())))?;
        let rows = match parsed {
            RhoFile::Bare(r) | RhoFile::Wrapped { matrix: r } => r,
        };
        let dim = rows.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Parse(format!("matrix dimension {dim} is not a power of two >= 2")));
        }
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            for (j, p) in row.iter().enumerate() {
                m[(i, j)] = C64::new(p[0], p[1]);
            }
        }
        DensityMatrix::new_lenient(dim.trailing_zeros() as usize, m, LOAD_NORM_TOL)
    }
}
