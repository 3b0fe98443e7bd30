//! Executable checks of the monotone properties of the entanglement
//! distance: average non-increase under single-qubit measurements, LU
//! invariance, ancilla invariance, non-increase under removal of qubits,
//! concavity of `f(x) = 2 (1 - tr x^2)` and the purity identity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::convexroof::{mixed_ed, RoofConfig};
use crate::error::{Error, Result};
use crate::fsmetric::{entanglement_distance, entanglement_distance_value, single_qubit_ed_via_purity};
use crate::qstate::{apply_1q, DensityMatrix, PureState, C64};
use crate::random::{random_density_matrix, random_local_unitaries, random_state, random_su2, rng, sub_seed};

/// Slack on `sum_j M_j^dagger M_j <= I`.
pub const KRAUS_TOL: f64 = 1e-10;
/// Outcomes rarer than this are dropped.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

/// A generalized measurement acting on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnilocalKraus {
    qubit: usize,
    operators: Vec<Matrix2<C64>>,
    complete: bool,
}

fn hermitian_sqrt(m: &Matrix2<C64>) -> Matrix2<C64> {
    let eig = SymmetricEigen::new(*m);
    let mut out = Matrix2::<C64>::zeros();
    for k in 0..2 {
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * C64::new(eig.eigenvalues[k].max(0.0).sqrt(), 0.0);
    }
    out
}

impl UnilocalKraus {
    pub fn new(qubit: usize, operators: Vec<Matrix2<C64>>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::Empty("Kraus operators"));
        }
        let sum: Matrix2<C64> = operators.iter().map(|m| m.adjoint() * m).sum();
        let slack = Matrix2::<C64>::identity() - sum;
        let eig = SymmetricEigen::new((slack + slack.adjoint()) * C64::new(0.5, 0.0));
        let min = eig.eigenvalues.min();
        if min < -KRAUS_TOL {
            return Err(Error::invalid(format!("sum of M^dagger M exceeds the identity (eigenvalue {min:.3e})")));
        }
        let complete = slack.iter().all(|z| z.norm() <= KRAUS_TOL);
        Ok(Self { qubit, operators, complete })
    }

    /// Projective measurement of `sigma_3`.
    pub fn projective_z(qubit: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(qubit, vec![Matrix2::new(one, zero, zero, zero), Matrix2::new(zero, zero, zero, one)])
            .expect("projectors are complete")
    }

    /// The trivial measurement `{I}`.
    pub fn identity(qubit: usize) -> Self {
        Self::new(qubit, vec![Matrix2::identity()]).expect("identity is complete")
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn operators(&self) -> &[Matrix2<C64>] {
        &self.operators
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Same operators in reverse order.
    pub fn relabeled(&self) -> Self {
        Self { operators: self.operators.iter().rev().copied().collect(), ..self.clone() }
    }
}

/// Two-outcome measurement on `qubit`. `M_0` is a Ginibre matrix rescaled
/// to operator norm `sqrt(u)`, `u` uniform; `M_1 = V sqrt(I - M_0^dagger M_0)`
/// with Haar `V`, further scaled by a uniform factor when incomplete.
pub fn random_unilocal_measurement(seed: u64, qubit: usize, complete: bool) -> UnilocalKraus {
    let mut r = rng(seed);
    let mut g = Matrix2::<C64>::zeros();
    for z in g.iter_mut() {
        *z = C64::new(r.sample(StandardNormal), r.sample(StandardNormal));
    }
    let sigma_max = g.svd(false, false).singular_values.max().max(f64::MIN_POSITIVE);
    let u: f64 = r.random_range(0.0..1.0);
    let m0 = g * C64::new(u.sqrt() / sigma_max, 0.0);
    let rest = Matrix2::<C64>::identity() - m0.adjoint() * m0;
    let mut m1 = random_su2(&mut r) * hermitian_sqrt(&rest);
    if !complete {
        m1 *= C64::new(r.random_range(0.0..1.0), 0.0);
    }
    UnilocalKraus::new(qubit, vec![m0, m1]).expect("contraction by construction")
}

/// Outcomes `(p_j, M_j psi / sqrt(p_j))`, dropping `p_j < 1e-14`.
pub fn apply_measurement(state: &PureState, k: &UnilocalKraus) -> Result<Vec<(f64, PureState)>> {
    state.check_qubit(k.qubit)?;
    let mut out = Vec::new();
    for m in &k.operators {
        let amps = apply_1q(state.amplitudes(), k.qubit, m);
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p >= MIN_OUTCOME_PROB {
            out.push((p, PureState::from_unnormalized(state.num_qubits(), amps)?));
        }
    }
    Ok(out)
}

/// `E(psi) - sum_j p_j E(psi_j)`; non-negative for a monotone.
pub fn check_monotonicity(state: &PureState, k: &UnilocalKraus) -> Result<f64> {
    let before = entanglement_distance_value(state);
    let after: f64 = apply_measurement(state, k)?.iter().map(|(p, s)| p * entanglement_distance_value(s)).sum();
    Ok(before - after)
}

/// Per-qubit margins `E_mu(psi) - sum_j p_j E_mu(psi_j)` for every qubit.
pub fn per_qubit_monotonicity(state: &PureState, k: &UnilocalKraus) -> Result<Vec<f64>> {
    let mut margins = entanglement_distance(state).per_qubit;
    for (p, s) in apply_measurement(state, k)? {
        for (m, e) in margins.iter_mut().zip(entanglement_distance(&s).per_qubit) {
            *m -= p * e;
        }
    }
    Ok(margins)
}

/// `|E(U psi) - E(psi)|` for seeded random local unitaries.
pub fn check_lu_invariance(state: &PureState, seed: u64) -> Result<f64> {
    let us = random_local_unitaries(&mut rng(seed), state.num_qubits());
    let moved = state.apply_local_unitaries(&us)?;
    Ok((entanglement_distance_value(&moved) - entanglement_distance_value(state)).abs())
}

/// `|E(psi (x) chi) - E(psi)|`, summing only over the qubits of `psi`
/// (which occupy the low indices of the product).
pub fn check_ancilla(state: &PureState, ancilla: &PureState) -> Result<f64> {
    let joint = PureState::tensor_product(&[state.clone(), ancilla.clone()])?;
    let on_system: f64 = entanglement_distance(&joint).per_qubit[..state.num_qubits()].iter().sum();
    Ok((on_system - entanglement_distance_value(state)).abs())
}

/// Removing the qubits in `removed` cannot increase the entanglement of
/// the rest: returns `sum_{mu kept} E_mu(psi) - E(Tr_removed psi)`, the
/// right-hand side being the convex roof of the reduced state.
pub fn check_trace_removal(state: &PureState, removed: &[usize], cfg: &RoofConfig) -> Result<f64> {
    for &q in removed {
        state.check_qubit(q)?;
    }
    let keep: Vec<usize> = (0..state.num_qubits()).filter(|q| !removed.contains(q)).collect();
    if keep.is_empty() {
        return Err(Error::invalid("at least one qubit must remain"));
    }
    let before: f64 = keep.iter().map(|&q| single_qubit_ed_via_purity(state, q)).sum::<Result<f64>>()?;
    let reduced = state.reduced_density_matrix(&keep)?;
    Ok(before - mixed_ed(&reduced, cfg)?.total)
}

/// `f(x) = 2 (1 - tr x^2)`.
pub fn purity_deficit(rho: &DensityMatrix) -> f64 {
    2.0 * (1.0 - rho.purity())
}

/// Concavity of `f` on random single-qubit states: counts trials with
/// `f(l r1 + (1-l) r2) < l f(r1) + (1-l) f(r2) - 1e-12`.
pub fn check_concavity_f(seed: u64, trials: usize) -> Result<usize> {
    Ok(run_suite(Suite::Concavity, trials, seed)?.violations)
}

fn concavity_margin(seed: u64) -> f64 {
    let mut r = rng(seed);
    let (k1, k2) = (r.random_range(1..=2), r.random_range(1..=2));
    let r1 = random_density_matrix(&mut r, 1, k1);
    let r2 = random_density_matrix(&mut r, 1, k2);
    let lam: f64 = r.random_range(0.0..=1.0);
    let mix = r1.matrix() * C64::new(lam, 0.0) + r2.matrix() * C64::new(1.0 - lam, 0.0);
    let mix = DensityMatrix::new_lenient(1, mix, 1e-9).expect("convex combination of states");
    purity_deficit(&mix) - (lam * purity_deficit(&r1) + (1.0 - lam) * purity_deficit(&r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Monotonicity,
    Lu,
    Ancilla,
    Trace,
    Concavity,
    Purity,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Monotonicity, Suite::Lu, Suite::Ancilla, Suite::Trace, Suite::Concavity, Suite::Purity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Monotonicity => "monotonicity",
            Suite::Lu => "lu",
            Suite::Ancilla => "ancilla",
            Suite::Trace => "trace",
            Suite::Concavity => "concavity",
            Suite::Purity => "purity",
        }
    }

    /// A trial violates the property when its margin is below `-tolerance`.
    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Monotonicity => 1e-9,
            Suite::Lu | Suite::Ancilla => 1e-10,
            Suite::Trace => 1e-6,
            Suite::Concavity | Suite::Purity => 1e-12,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub trials: usize,
    pub violations: usize,
    /// Smallest margin seen; negative values point in the violating direction.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Margin of one seeded trial; a violation is a margin below `-tolerance`.
pub fn trial_margin(suite: Suite, seed: u64) -> Result<f64> {
    let mut r = rng(seed);
    let m = if r.random_bool(0.5) { 2 } else { 3 };
    match suite {
        Suite::Monotonicity => {
            let psi = random_state(&mut r, m);
            let k = random_unilocal_measurement(r.random(), r.random_range(0..m), r.random_bool(0.5));
            check_monotonicity(&psi, &k)
        }
        Suite::Lu => check_lu_invariance(&random_state(&mut r, m + 1), r.random()).map(|d| -d),
        Suite::Ancilla => {
            let psi = random_state(&mut r, m);
            let anc = PureState::qubit_along(crate::random::random_unit_vector(&mut r))?;
            check_ancilla(&psi, &anc).map(|d| -d)
        }
        Suite::Trace => {
            let psi = random_state(&mut r, 3);
            let removed = r.random_range(0..3);
            let cfg = RoofConfig { restarts: 8, seed: r.random(), ..Default::default() };
            check_trace_removal(&psi, &[removed], &cfg)
        }
        Suite::Concavity => Ok(concavity_margin(r.random())),
        Suite::Purity => {
            let psi = random_state(&mut r, m + 1);
            let rep = entanglement_distance(&psi);
            let mut worst: f64 = 0.0;
            for (q, e) in rep.per_qubit.iter().enumerate() {
                worst = worst.max((single_qubit_ed_via_purity(&psi, q)? - e).abs());
            }
            Ok(-worst)
        }
    }
}

/// Runs `trials` independent trials with seeds derived from `seed`.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let tol = suite.tolerance();
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let margin = trial_margin(suite, sub_seed(seed, t as u64))?;
        if margin < -tol {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    Ok(MonotonicityReport { schema_version: 1, suite, trials, violations, worst_margin: worst, tolerance: tol, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::ghzl_state;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn bell() -> PureState {
        ghzl_state(2, FRAC_PI_4).unwrap()
    }

    #[test]
    fn random_measurements_are_valid_and_seeded() {
        for seed in 0..200 {
            let k = random_unilocal_measurement(seed, 0, true);
            assert!(k.is_complete());
            let s: Matrix2<C64> = k.operators().iter().map(|m| m.adjoint() * m).sum();
            assert!((s - Matrix2::identity()).iter().all(|z| z.norm() < 1e-10));
            let inc = random_unilocal_measurement(seed, 1, false);
            assert_eq!(inc.operators().len(), 2);
        }
        assert_eq!(random_unilocal_measurement(9, 0, true), random_unilocal_measurement(9, 0, true));
        assert!(UnilocalKraus::new(0, vec![Matrix2::identity() * C64::new(1.1, 0.0)]).is_err());
    }

    #[test]
    fn measurement_examples() {
        let plus0 = PureState::tensor_product(&[
            PureState::qubit_along([1.0, 0.0, 0.0]).unwrap(),
            PureState::basis(1, 0).unwrap(),
        ])
        .unwrap();
        let out = apply_measurement(&plus0, &UnilocalKraus::projective_z(0)).unwrap();
        assert_eq!(out.len(), 2);
        for ((p, s), k) in out.iter().zip([0, 1]) {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(s.inner(&PureState::basis(2, k).unwrap()).unwrap().norm(), 1.0, epsilon = 1e-15);
        }
        let id = apply_measurement(&bell(), &UnilocalKraus::identity(1)).unwrap();
        assert_eq!(id.len(), 1);
        assert_abs_diff_eq!(id[0].0, 1.0, epsilon = 1e-15);
        let out = apply_measurement(&bell(), &UnilocalKraus::projective_z(0)).unwrap();
        for ((p, s), k) in out.iter().zip([0, 3]) {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(s.inner(&PureState::basis(2, k).unwrap()).unwrap().norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn monotonicity_examples() {
        let prod = PureState::basis(2, 1).unwrap();
        assert_abs_diff_eq!(check_monotonicity(&prod, &random_unilocal_measurement(3, 0, true)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(check_monotonicity(&bell(), &UnilocalKraus::projective_z(0)).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn margin_ignores_phase_and_labels() {
        let mut r = rng(12);
        for seed in 0..20 {
            let psi = random_state(&mut r, 3);
            let k = random_unilocal_measurement(seed, (seed % 3) as usize, seed % 2 == 0);
            let a = check_monotonicity(&psi, &k).unwrap();
            assert_abs_diff_eq!(a, check_monotonicity(&psi.with_global_phase(0.7), &k).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(a, check_monotonicity(&psi, &k.relabeled()).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn other_qubits_never_gain_on_average() {
        let mut r = rng(13);
        for seed in 0..100 {
            let psi = random_state(&mut r, 3);
            let q = (seed % 3) as usize;
            let margins = per_qubit_monotonicity(&psi, &random_unilocal_measurement(seed, q, true)).unwrap();
            for (mu, m) in margins.iter().enumerate() {
                if mu != q {
                    assert!(*m >= -1e-9, "qubit {mu} margin {m}");
                }
            }
        }
    }

    #[test]
    fn invariance_examples() {
        let mut r = rng(14);
        let psi = random_state(&mut r, 3);
        assert!(check_lu_invariance(&psi, 5).unwrap() < 1e-10);
        let zero = PureState::basis(1, 0).unwrap();
        assert!(check_ancilla(&bell(), &zero).unwrap() < 1e-15);
        let joint = PureState::tensor_product(&[bell(), zero]).unwrap();
        assert_abs_diff_eq!(entanglement_distance(&joint).total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_removal_examples() {
        let ghz = ghzl_state(3, FRAC_PI_4).unwrap();
        let cfg = RoofConfig { restarts: 8, ..Default::default() };
        assert_abs_diff_eq!(check_trace_removal(&ghz, &[2], &cfg).unwrap(), 2.0, epsilon = 1e-6);
        assert!(check_trace_removal(&ghz, &[0, 1, 2], &cfg).is_err());
        assert!(check_trace_removal(&ghz, &[5], &cfg).is_err());
    }

    #[test]
    fn concavity_examples() {
        let rho = random_density_matrix(&mut rng(1), 1, 2);
        let mix = DensityMatrix::new_lenient(1, rho.matrix().clone(), 1e-9).unwrap();
        assert_abs_diff_eq!(purity_deficit(&mix), purity_deficit(&rho), epsilon = 1e-15);
        let up = PureState::basis(1, 0).unwrap().density_matrix();
        let down = PureState::basis(1, 1).unwrap().density_matrix();
        let half = DensityMatrix::mixture(&[(0.5, PureState::basis(1, 0).unwrap()), (0.5, PureState::basis(1, 1).unwrap())]).unwrap();
        assert_abs_diff_eq!(purity_deficit(&half), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(purity_deficit(&up) + purity_deficit(&down), 0.0, epsilon = 1e-15);
        assert_eq!(check_concavity_f(3, 500).unwrap(), 0);
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Monotonicity, Suite::Lu, Suite::Ancilla, Suite::Purity] {
            let rep = run_suite(suite, 50, 1).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        assert_eq!("lu".parse::<Suite>().unwrap(), Suite::Lu);
        assert!("nope".parse::<Suite>().is_err());
        assert!(run_suite(Suite::Lu, 0, 1).is_err());
    }
}
