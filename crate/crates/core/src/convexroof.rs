//! Mixed-state entanglement distance as a convex roof: the least ensemble
//! average of the pure-state per-qubit ED over all decompositions of `rho`.
//!
//! Decompositions are reached through the mixing isometry `V`:
//! `|x_j> = sum_k V_jk sqrt(lambda_k) |e_k>` over the eigenpairs of `rho`,
//! with `V` built from planar Givens rotations carrying a phase.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{paulis, DensityMatrix, PureState, C64};
use crate::random::{rng, sub_seed};
use crate::simplex::NelderMead;

/// Eigenvalues at or below this count as zero when fixing the rank.
pub const RANK_TOL: f64 = 1e-10;
/// Ensemble members lighter than this are dropped.
pub const MIN_WEIGHT: f64 = 1e-12;

/// A decomposition `rho = sum_j p_j |psi_j><psi_j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(p, _)| p).sum()
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.members)
    }

    /// `sum_j p_j f(psi_j)`.
    pub fn average(&self, f: impl Fn(&PureState) -> f64) -> f64 {
        self.members.iter().map(|(p, s)| p * f(s)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoofConfig {
    /// Number of ensemble members; `None` means rank + 2.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self { ensemble_size: None, restarts: 64, max_iters: 500, tol: 1e-9, seed: 0 }
    }
}

/// Number of mixing parameters for `n` members: an angle and a phase per
/// pair of rows.
pub fn mixing_param_count(n: usize) -> usize {
    n * n.saturating_sub(1)
}

/// `n x n` unitary as an ordered product of phased Givens rotations; the
/// mixing isometry is its first `rank` columns.
pub fn mixing_unitary(n: usize, params: &[f64]) -> Result<DMatrix<C64>> {
    if params.len() != mixing_param_count(n) {
        return Err(Error::DimensionMismatch { expected: mixing_param_count(n), found: params.len() });
    }
    let mut u = DMatrix::<C64>::identity(n, n);
    let mut k = 0;
    for a in 0..n {
        for b in a + 1..n {
            let (t, chi) = (params[k], params[k + 1]);
            k += 2;
            let (c, s) = (t.cos(), t.sin());
            let ph = C64::from_polar(1.0, chi);
            // left-multiply by the rotation acting on rows a and b
            for col in 0..n {
                let (ua, ub) = (u[(a, col)], u[(b, col)]);
                u[(a, col)] = ua * c - ph * s * ub;
                u[(b, col)] = ph.conj() * s * ua + ub * c;
            }
        }
    }
    Ok(u)
}

/// Spectral data of `rho` reused across every mixing evaluation.
#[derive(Debug, Clone)]
pub struct Realizer {
    num_qubits: usize,
    size: usize,
    /// `sqrt(lambda_k) |e_k>` for the retained eigenpairs.
    scaled: Vec<DVector<C64>>,
    eigenvalues: Vec<f64>,
}

impl Realizer {
    pub fn new(rho: &DensityMatrix, ensemble_size: Option<usize>) -> Result<Self> {
        let (vals, vecs) = rho.eigen();
        let rank = vals.iter().filter(|&&l| l > RANK_TOL).count().max(1);
        let size = ensemble_size.unwrap_or(rank + 2);
        if size < rank {
            return Err(Error::InvalidParameter(format!("ensemble size {size} is below the rank {rank}")));
        }
        let scaled = vecs.into_iter().take(rank).zip(&vals).map(|(v, l)| v * C64::new(l.max(0.0).sqrt(), 0.0)).collect();
        Ok(Self { num_qubits: rho.num_qubits(), size, scaled, eigenvalues: vals[..rank].to_vec() })
    }

    pub fn rank(&self) -> usize {
        self.scaled.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn param_count(&self) -> usize {
        mixing_param_count(self.size)
    }

    /// Mixing isometry: the first `rank` columns of the mixing unitary.
    fn mixing_isometry(&self, params: &[f64]) -> Result<DMatrix<C64>> {
        let u = mixing_unitary(self.size, params)?;
        Ok(u.columns(0, self.rank()).into_owned())
    }

    pub fn realize(&self, params: &[f64]) -> Result<Ensemble> {
        let v = self.mixing_isometry(params)?;
        let mut members = Vec::new();
        for j in 0..self.size {
            let mut x = DVector::<C64>::zeros(1 << self.num_qubits);
            for (k, e) in self.scaled.iter().enumerate() {
                x += e * v[(j, k)];
            }
            let p = x.norm_squared();
            if p >= MIN_WEIGHT {
                let state = PureState::from_unnormalized(self.num_qubits, x.iter().copied().collect())?;
                members.push((p, state));
            }
        }
        Ok(Ensemble { members })
    }
}

/// Builds the ensemble selected by `params` for an `ensemble_size`-member
/// decomposition of `rho`.
pub fn realize_ensemble(rho: &DensityMatrix, ensemble_size: usize, params: &[f64]) -> Result<Ensemble> {
    Realizer::new(rho, Some(ensemble_size))?.realize(params)
}

/// Objective `sum_j p_j E_mu(psi_j)` evaluated directly in the eigenbasis:
/// with `x_j` unnormalized, `p_j E_mu = p_j - |<x_j|sigma^mu|x_j>|^2 / p_j`.
struct QubitObjective<'a> {
    realizer: &'a Realizer,
    /// `<e_k| sigma_a^mu |e_l> sqrt(lambda_k lambda_l)`.
    pauli_blocks: [DMatrix<C64>; 3],
}

impl<'a> QubitObjective<'a> {
    fn new(realizer: &'a Realizer, qubit: usize) -> Self {
        let r = realizer.rank();
        let ps = paulis();
        let block = |op: &Matrix2<C64>| {
            let applied: Vec<DVector<C64>> = realizer
                .scaled
                .iter()
                .map(|e| {
                    let amps = crate::qstate::apply_1q(e.as_slice(), qubit, op);
                    DVector::from_vec(amps)
                })
                .collect();
            DMatrix::from_fn(r, r, |k, l| realizer.scaled[k].dotc(&applied[l]))
        };
        Self { realizer, pauli_blocks: [block(&ps[0]), block(&ps[1]), block(&ps[2])] }
    }

    fn value_for(&self, v: &DMatrix<C64>) -> f64 {
        let (n, r) = (v.nrows(), v.ncols());
        let mut total = 0.0;
        for j in 0..n {
            let w: Vec<C64> = (0..r).map(|k| v[(j, k)]).collect();
            let p: f64 = (0..r).map(|k| w[k].norm_sqr() * self.realizer.eigenvalues[k]).sum();
            if p < MIN_WEIGHT {
                continue;
            }
            let mut b2 = 0.0;
            for blk in &self.pauli_blocks {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..r {
                    let mut row = C64::new(0.0, 0.0);
                    for l in 0..r {
                        row += blk[(k, l)] * w[l];
                    }
                    acc += w[k].conj() * row;
                }
                b2 += acc.re * acc.re;
            }
            total += p - b2 / p;
        }
        total.max(0.0)
    }

    fn value(&self, params: &[f64]) -> f64 {
        match self.realizer.mixing_isometry(params) {
            Ok(v) => self.value_for(&v),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Outcome of a roof minimization for one qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofResult {
    pub qubit: usize,
    /// Best ensemble average found: an upper bound on the roof.
    pub value: f64,
    /// Average over the eigen-ensemble, the starting point of restart 0.
    pub eigen_bound: f64,
    pub rank: usize,
    pub ensemble_size: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub evaluations: usize,
    pub best_params: Vec<f64>,
}

/// Minimal ensemble average of `E_mu` over decompositions of `rho`.
pub fn mixed_single_qubit_ed(rho: &DensityMatrix, qubit: usize, cfg: &RoofConfig) -> Result<RoofResult> {
    if qubit >= rho.num_qubits() {
        return Err(Error::QubitOutOfRange { qubit, num_qubits: rho.num_qubits() });
    }
    let realizer = Realizer::new(rho, cfg.ensemble_size)?;
    Ok(minimize_qubit(&realizer, qubit, cfg))
}

fn minimize_qubit(realizer: &Realizer, qubit: usize, cfg: &RoofConfig) -> RoofResult {
    let obj = QubitObjective::new(realizer, qubit);
    let dim = realizer.param_count();
    let identity = vec![0.0; dim];
    let eigen_bound = obj.value(&identity);
    let mut result = RoofResult {
        qubit,
        value: eigen_bound,
        eigen_bound,
        rank: realizer.rank(),
        ensemble_size: realizer.size(),
        restarts: 0,
        best_restart: 0,
        evaluations: 1,
        best_params: identity.clone(),
    };
    if realizer.rank() == 1 || dim == 0 {
        return result;
    }
    let nm = NelderMead { max_iters: cfg.max_iters, initial_step: 0.4, ftol: cfg.tol * 1e-3, xtol: 1e-9, target: 0.0 };
    for k in 0..cfg.restarts.max(1) {
        let x0: Vec<f64> = if k == 0 {
            identity.clone()
        } else {
            let mut r = rng(sub_seed(cfg.seed, k as u64));
            (0..dim).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect()
        };
        let mut m = nm.minimize(|x| obj.value(x), &x0);
        result.evaluations += m.evaluations;
        // fresh simplices around the point until the value settles
        for _ in 0..20 {
            let again = NelderMead { initial_step: 0.05, ..nm }.minimize(|x| obj.value(x), &m.x);
            result.evaluations += again.evaluations;
            let gain = m.value - again.value;
            if again.value < m.value {
                m = again;
            }
            if gain <= cfg.tol {
                break;
            }
        }
        result.restarts += 1;
        if m.value < result.value {
            result.value = m.value;
            result.best_restart = k;
            result.best_params = m.x;
        }
        if result.value <= 0.0 {
            break;
        }
    }
    result
}

/// Per-qubit roof values and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedEdReport {
    pub schema_version: u32,
    pub total: f64,
    pub per_qubit: Vec<RoofResult>,
}

/// `E(rho) = sum_mu E_mu(rho)`, each qubit minimized independently.
pub fn mixed_ed(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<MixedEdReport> {
    let realizer = Realizer::new(rho, cfg.ensemble_size)?;
    let per_qubit: Vec<RoofResult> = (0..rho.num_qubits()).map(|q| minimize_qubit(&realizer, q, cfg)).collect();
    Ok(MixedEdReport { schema_version: 1, total: per_qubit.iter().map(|r| r.value).sum(), per_qubit })
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence_mixed_2q(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.num_qubits() });
    }
    let (vals, vecs) = rho.eigen();
    let mut sqrt_rho = DMatrix::<C64>::zeros(4, 4);
    for (l, v) in vals.iter().zip(&vecs) {
        sqrt_rho += v * v.adjoint() * C64::new(l.max(0.0).sqrt(), 0.0);
    }
    let y = paulis()[1];
    let mut yy = DMatrix::<C64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            yy[(i, j)] = y[(i & 1, j & 1)] * y[(i >> 1, j >> 1)];
        }
    }
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let herm = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut l: Vec<f64> = nalgebra::SymmetricEigen::new(herm).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Exhaustive search over two-member ensembles of a rank-2 state, mixing
/// `[[cos t, -e^{ip} sin t], [sin t, e^{ip} cos t]]` on a grid of
/// `step_deg` degrees (`t` over `[0, 90]`, `p` over `[0, 360)`).
pub fn grid_search_two_member(rho: &DensityMatrix, qubit: usize, step_deg: f64) -> Result<f64> {
    let realizer = Realizer::new(rho, Some(2))?;
    if realizer.rank() != 2 {
        return Err(Error::InvalidParameter(format!("grid search needs rank 2, got {}", realizer.rank())));
    }
    if qubit >= rho.num_qubits() {
        return Err(Error::QubitOutOfRange { qubit, num_qubits: rho.num_qubits() });
    }
    if step_deg <= 0.0 {
        return Err(Error::InvalidParameter("grid step must be positive".into()));
    }
    let obj = QubitObjective::new(&realizer, qubit);
    let nt = (90.0 / step_deg).round() as usize;
    let np = (360.0 / step_deg).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=nt {
        let t = (i as f64 * step_deg).to_radians();
        for k in 0..np {
            let p = C64::from_polar(1.0, (k as f64 * step_deg).to_radians());
            let (c, s) = (C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0));
            let v = DMatrix::from_row_slice(2, 2, &[c, -p * s, s, p * c]);
            best = best.min(obj.value_for(&v));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsmetric::entanglement_distance;
    use crate::random::{random_density_matrix, random_local_unitaries, random_state};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn ket(m: usize, amps: &[(usize, f64)]) -> PureState {
        let mut a = vec![C64::new(0.0, 0.0); 1 << m];
        for (k, x) in amps {
            a[*k] = C64::new(*x, 0.0);
        }
        PureState::from_unnormalized(m, a).unwrap()
    }

    fn phi_plus() -> PureState {
        ket(2, &[(0, 1.0), (3, 1.0)])
    }

    fn phi_minus() -> PureState {
        ket(2, &[(0, 1.0), (3, -1.0)])
    }

    fn werner(p: f64) -> DensityMatrix {
        let bell = phi_plus().density_matrix();
        let mix = bell.matrix() * C64::new(p, 0.0) + DensityMatrix::maximally_mixed(2).matrix() * C64::new(1.0 - p, 0.0);
        DensityMatrix::new_lenient(2, mix, 1e-12).unwrap()
    }

    fn quick() -> RoofConfig {
        RoofConfig { restarts: 8, ..Default::default() }
    }

    #[test]
    fn mixing_unitary_is_unitary() {
        let mut r = rng(1);
        for n in 1..=5 {
            let params: Vec<f64> = (0..mixing_param_count(n)).map(|_| r.random_range(0.0..6.3)).collect();
            let u = mixing_unitary(n, &params).unwrap();
            let err = (&u * u.adjoint() - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-13);
        }
        assert!(mixing_unitary(3, &[0.0]).is_err());
    }

    #[test]
    fn ensembles_reproduce_rho() {
        let mut r = rng(2);
        for rank in 1..=4 {
            let rho = random_density_matrix(&mut r, 2, rank);
            let real = Realizer::new(&rho, None).unwrap();
            let params: Vec<f64> = (0..real.param_count()).map(|_| r.random_range(0.0..6.3)).collect();
            let ens = real.realize(&params).unwrap();
            assert_abs_diff_eq!(ens.total_weight(), 1.0, epsilon = 1e-10);
            assert!(ens.density_matrix().unwrap().max_abs_diff(&rho) < 1e-8);
        }
    }

    #[test]
    fn realize_examples() {
        let diag = DensityMatrix::mixture(&[(0.5, ket(2, &[(0, 1.0)])), (0.5, ket(2, &[(3, 1.0)]))]).unwrap();
        let eigen = realize_ensemble(&diag, 2, &[0.0, 0.0]).unwrap();
        assert_eq!(eigen.len(), 2);
        for (p, s) in eigen.members() {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-12);
            assert!(entanglement_distance(s).total < 1e-12);
        }
        let rotated = realize_ensemble(&diag, 2, &[FRAC_PI_4, 0.0]).unwrap();
        assert_eq!(rotated.len(), 2);
        for (p, s) in rotated.members() {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-12);
            let f = s.inner(&phi_plus()).unwrap().norm_sqr().max(s.inner(&phi_minus()).unwrap().norm_sqr());
            assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
        }
        let pure = phi_plus().density_matrix();
        assert_eq!(realize_ensemble(&pure, 3, &[0.0; 6]).unwrap().len(), 1);
        for (_, s) in realize_ensemble(&pure, 3, &[0.3; 6]).unwrap().members() {
            assert_abs_diff_eq!(s.inner(&phi_plus()).unwrap().norm(), 1.0, epsilon = 1e-12);
        }
        assert!(realize_ensemble(&diag, 1, &[]).is_err());
    }

    #[test]
    fn pure_inputs_give_pure_values() {
        let mut r = rng(3);
        for m in 2..=3 {
            let psi = random_state(&mut r, m);
            let rep = entanglement_distance(&psi);
            let mixed = mixed_ed(&psi.density_matrix(), &quick()).unwrap();
            for q in 0..m {
                assert_abs_diff_eq!(mixed.per_qubit[q].value, rep.per_qubit[q], epsilon = 1e-9);
            }
        }
        assert_abs_diff_eq!(mixed_ed(&phi_plus().density_matrix(), &quick()).unwrap().total, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn separable_bell_mixtures_vanish() {
        let a = DensityMatrix::mixture(&[(0.5, ket(2, &[(0, 1.0)])), (0.5, ket(2, &[(3, 1.0)]))]).unwrap();
        let b = DensityMatrix::mixture(&[(0.5, phi_plus()), (0.5, phi_minus())]).unwrap();
        for rho in [a, b] {
            for q in 0..2 {
                assert!(mixed_single_qubit_ed(&rho, q, &quick()).unwrap().value < 1e-6);
            }
        }
        assert!(mixed_ed(&DensityMatrix::maximally_mixed(2), &quick()).unwrap().total < 1e-6);
    }

    #[test]
    fn werner_family_matches_concurrence_roof() {
        let mut prev = -1.0;
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let rho = werner(p);
            let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence_mixed_2q(&rho).unwrap(), c, epsilon = 1e-9);
            let total = mixed_ed(&rho, &quick()).unwrap().total;
            assert_abs_diff_eq!(total, 2.0 * c * c, epsilon = 1e-6);
            assert!(total >= prev - 1e-6);
            prev = total;
        }
    }

    #[test]
    fn rank_two_states_match_concurrence_and_grid() {
        let mut r = rng(5);
        for _ in 0..4 {
            let rho = random_density_matrix(&mut r, 2, 2);
            let c = concurrence_mixed_2q(&rho).unwrap();
            let grid = grid_search_two_member(&rho, 0, 2.0).unwrap();
            let opt = mixed_single_qubit_ed(&rho, 0, &quick()).unwrap();
            assert!(opt.value <= opt.eigen_bound + 1e-15);
            assert_abs_diff_eq!(opt.value, c * c, epsilon = 1e-6);
            assert!(opt.value <= grid + 1e-9);
        }
    }

    #[test]
    fn lu_invariance_of_roof() {
        let mut r = rng(6);
        let rho = random_density_matrix(&mut r, 2, 2);
        let moved = rho.conjugate_local(&random_local_unitaries(&mut r, 2)).unwrap();
        let a = mixed_ed(&rho, &quick()).unwrap().total;
        let b = mixed_ed(&moved, &quick()).unwrap().total;
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
    }

    #[test]
    fn convexity_of_roof() {
        let mut r = rng(7);
        for _ in 0..3 {
            let r1 = random_density_matrix(&mut r, 2, 2);
            let r2 = random_density_matrix(&mut r, 2, 2);
            let e1 = mixed_single_qubit_ed(&r1, 0, &quick()).unwrap().value;
            let e2 = mixed_single_qubit_ed(&r2, 0, &quick()).unwrap().value;
            for lam in [0.25, 0.5, 0.75] {
                let m = r1.matrix() * C64::new(lam, 0.0) + r2.matrix() * C64::new(1.0 - lam, 0.0);
                let mix = DensityMatrix::new_lenient(2, m, 1e-12).unwrap();
                let e = mixed_single_qubit_ed(&mix, 0, &quick()).unwrap().value;
                assert!(e <= lam * e1 + (1.0 - lam) * e2 + 1e-6);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(mixed_single_qubit_ed(&rho, 2, &quick()).is_err());
        let small = RoofConfig { ensemble_size: Some(2), ..quick() };
        assert!(mixed_ed(&rho, &small).is_err());
        assert!(concurrence_mixed_2q(&DensityMatrix::maximally_mixed(3)).is_err());
    }
}
