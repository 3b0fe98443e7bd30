//! Local-unitary equivalence test through metric matching: two states can
//! only be LU-equivalent if, for every frame `v` on the first, some frame
//! `n` on the second reproduces the same metric tensor.
//!
//! The "for every `v`" is sampled with a finite witness set and the "some
//! `n`" is a multi-start search, so a match is evidence rather than proof
//! except for two qubits, and a failed match is reported with its numeric
//! margin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsmetric::{entanglement_distance, metric_tensor, LocalStatistics, MetricTensor, UnitVectorFrame};
use crate::qstate::{norm3, PureState};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::random::{random_frame, random_unit_vector, rng, sub_seed};
use crate::simplex::NelderMead;

/// Tolerance on `|E(A) - E(B)|` for the optional measure precheck.
pub const MEASURE_PRECHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub grid_points_per_sphere: usize,
    /// Random witness frames tested on top of the optimal and axis frames.
    pub restarts: usize,
    /// Search starts per witness.
    pub starts: usize,
    /// Simplex iterations per polish stage.
    pub polish_iters: usize,
    pub match_tol: f64,
    pub inequivalence_margin: f64,
    pub seed: u64,
    /// Reject immediately when the entanglement distances differ.
    pub measure_precheck: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            grid_points_per_sphere: 256,
            restarts: 32,
            starts: 64,
            polish_iters: 200,
            match_tol: 1e-8,
            inequivalence_margin: 1e-3,
            seed: 0,
            measure_precheck: true,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_sphere == 0 || self.starts == 0 || self.polish_iters == 0 {
            return Err(Error::invalid("grid_points_per_sphere, starts and polish_iters must be positive"));
        }
        if !(self.match_tol > 0.0 && self.match_tol < self.inequivalence_margin) {
            return Err(Error::invalid("need 0 < match_tol < inequivalence_margin"));
        }
        Ok(())
    }
}

/// Best frame found on the second state and its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatch {
    pub frame: UnitVectorFrame,
    pub residual: f64,
    /// Residual after the grid stage, before polishing.
    pub grid_residual: f64,
    pub evaluations: usize,
}

/// Fibonacci lattice of `n` nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            [r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

/// Orthonormal tangent basis at a unit vector.
fn tangent_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
    let mut e1 = [helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]];
    let l = norm3(e1);
    e1 = e1.map(|x| x / l);
    let e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]];
    (e1, e2)
}

fn chart(n: [f64; 3], basis: &([f64; 3], [f64; 3]), u: f64, w: f64) -> [f64; 3] {
    let (e1, e2) = basis;
    let p = [0, 1, 2].map(|i| n[i] + u * e1[i] + w * e2[i]);
    let l = norm3(p);
    p.map(|x| x / l)
}

struct Search<'a> {
    stats: &'a LocalStatistics,
    target: &'a MetricTensor,
    grid: &'a [[f64; 3]],
    cfg: &'a MatchConfig,
    evaluations: usize,
}

impl Search<'_> {
    fn residual(&mut self, frame: &[[f64; 3]]) -> f64 {
        self.evaluations += 1;
        self.stats.residual(frame, self.target)
    }

    fn stop_value(&self) -> f64 {
        1e-3 * self.cfg.match_tol
    }

    /// Cyclic sweeps: each sphere jumps to its best grid point.
    fn grid_sweeps(&mut self, frame: &mut [[f64; 3]]) -> f64 {
        let mut best = self.residual(frame);
        for _ in 0..8 {
            let before = best;
            for mu in 0..frame.len() {
                let keep = frame[mu];
                let mut choice = keep;
                for &p in self.grid {
                    frame[mu] = p;
                    let r = self.residual(frame);
                    if r < best {
                        best = r;
                        choice = p;
                    }
                }
                frame[mu] = choice;
            }
            if best >= before {
                break;
            }
        }
        best
    }

    fn polish_sphere(&mut self, frame: &mut [[f64; 3]], mu: usize, current: f64, step: f64) -> f64 {
        let center = frame[mu];
        let basis = tangent_basis(center);
        let nm = NelderMead {
            max_iters: self.cfg.polish_iters,
            initial_step: step,
            ftol: 0.0,
            xtol: 1e-14,
            target: self.stop_value(),
        };
        let mut work = frame.to_vec();
        let m = nm.minimize(
            |x| {
                work[mu] = chart(center, &basis, x[0], x[1]);
                self.evaluations += 1;
                self.stats.residual(&work, self.target)
            },
            &[0.0, 0.0],
        );
        if m.value < current {
            frame[mu] = chart(center, &basis, m.x[0], m.x[1]);
            m.value
        } else {
            current
        }
    }

    fn polish_joint(&mut self, frame: &mut [[f64; 3]], current: f64, step: f64) -> f64 {
        let centers = frame.to_vec();
        let bases: Vec<_> = centers.iter().map(|c| tangent_basis(*c)).collect();
        let build = |x: &[f64], out: &mut Vec<[f64; 3]>| {
            for (q, (c, b)) in centers.iter().zip(&bases).enumerate() {
                out[q] = chart(*c, b, x[2 * q], x[2 * q + 1]);
            }
        };
        let nm = NelderMead {
            max_iters: self.cfg.polish_iters * centers.len(),
            initial_step: step,
            ftol: 0.0,
            xtol: 1e-14,
            target: self.stop_value(),
        };
        let mut work = centers.clone();
        let m = nm.minimize(
            |x| {
                build(x, &mut work);
                self.evaluations += 1;
                self.stats.residual(&work, self.target)
            },
            &vec![0.0; 2 * centers.len()],
        );
        if m.value < current {
            let mut out = centers.clone();
            build(&m.x, &mut out);
            frame.copy_from_slice(&out);
            m.value
        } else {
            current
        }
    }

    /// Alternating per-sphere and joint simplex stages, re-centred on the
    /// current frame each cycle, until the residual stalls.
    fn polish(&mut self, frame: &mut [[f64; 3]], mut current: f64) -> f64 {
        for _ in 0..60 {
            if current <= self.stop_value() {
                break;
            }
            let before = current;
            let step = current.sqrt().clamp(1e-9, 0.1);
            for mu in 0..frame.len() {
                current = self.polish_sphere(frame, mu, current, step);
            }
            current = self.polish_joint(frame, current, current.sqrt().clamp(1e-9, 0.1));
            if before - current <= 1e-3 * before {
                match self.jump(frame, current) {
                    Some(r) => current = r,
                    None => break,
                }
            }
        }
        current
    }

    /// Discrete moves that keep every diagonal entry fixed: negating one
    /// vector, or rotating it by pi about that qubit's Bloch axis. They
    /// connect solution branches that continuous descent cannot.
    fn jump(&mut self, frame: &mut [[f64; 3]], current: f64) -> Option<f64> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for mu in 0..frame.len() {
            let n = frame[mu];
            let b = self.stats.bloch(mu);
            let bn = norm3(b);
            let mut moves = vec![n.map(|x| -x)];
            if bn > 1e-9 {
                let axis = b.map(|x| x / bn);
                let d = axis[0] * n[0] + axis[1] * n[1] + axis[2] * n[2];
                let turned = [0, 1, 2].map(|i| 2.0 * d * axis[i] - n[i]);
                moves.push(turned);
                moves.push(turned.map(|x| -x));
            }
            for cand in moves {
                frame[mu] = cand;
                let r = self.residual(frame);
                if r < best.map_or(current, |b| b.2) {
                    best = Some((mu, cand, r));
                }
            }
            frame[mu] = n;
        }
        let (mu, cand, r) = best?;
        frame[mu] = cand;
        Some(r)
    }
}

fn check_same_size(target: &MetricTensor, state: &PureState) -> Result<()> {
    if target.dim() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: state.num_qubits() });
    }
    Ok(())
}

fn search(
    target: &MetricTensor,
    stats: &LocalStatistics,
    cfg: &MatchConfig,
    seed: u64,
    hints: &[UnitVectorFrame],
) -> FrameMatch {
    let m = stats.num_qubits();
    let grid = fibonacci_sphere(cfg.grid_points_per_sphere);
    let mut s = Search { stats, target, grid: &grid, cfg, evaluations: 0 };
    let mut best: Option<(Vec<[f64; 3]>, f64, f64)> = None;
    fn keep(best: &mut Option<(Vec<[f64; 3]>, f64, f64)>, frame: Vec<[f64; 3]>, r: f64, g: f64) -> f64 {
        if best.as_ref().is_none_or(|b| r < b.1) {
            *best = Some((frame, r, g));
        }
        r
    }
    for h in hints {
        let mut frame = h.vectors().to_vec();
        let g = s.residual(&frame);
        let r = s.polish(&mut frame, g);
        if keep(&mut best, frame, r, g) <= s.stop_value() {
            break;
        }
    }
    for k in 0..cfg.starts {
        if best.as_ref().is_some_and(|b| b.1 <= s.stop_value()) {
            break;
        }
        let mut r = rng(sub_seed(seed, k as u64));
        // odd starts hop away from the best minimum so far by re-drawing a
        // random subset of spheres; even starts are fresh
        let mut frame = match (&best, k % 2) {
            (Some(b), 1) => {
                let mut f = b.0.clone();
                let pick = r.random_range(0..m);
                for (q, v) in f.iter_mut().enumerate() {
                    if q == pick || r.random_bool(0.5) {
                        *v = random_unit_vector(&mut r);
                    }
                }
                f
            }
            _ if k == 0 => vec![[0.0, 0.0, 1.0]; m],
            _ => random_frame(&mut r, m).vectors().to_vec(),
        };
        let g = s.grid_sweeps(&mut frame);
        let res = s.polish(&mut frame, g);
        keep(&mut best, frame, res, g);
    }
    let (frame, residual, grid_residual) = best.expect("at least one start");
    let frame = UnitVectorFrame::new(frame.iter().map(|v| v.map(|x| x / norm3(*v))).collect()).expect("unit vectors");
    FrameMatch { frame, residual, grid_residual, evaluations: s.evaluations }
}

/// Minimizes `||g(B, n) - target||_F` over frames `n`.
pub fn frame_match(target: &MetricTensor, state_b: &PureState, cfg: &MatchConfig) -> Result<FrameMatch> {
    frame_match_with_hints(target, state_b, cfg, &[])
}

/// As [`frame_match`], additionally starting the polish from each hint frame.
pub fn frame_match_with_hints(
    target: &MetricTensor,
    state_b: &PureState,
    cfg: &MatchConfig,
    hints: &[UnitVectorFrame],
) -> Result<FrameMatch> {
    cfg.validate()?;
    check_same_size(target, state_b)?;
    for h in hints {
        if h.len() != state_b.num_qubits() {
            return Err(Error::DimensionMismatch { expected: state_b.num_qubits(), found: h.len() });
        }
    }
    Ok(search(target, &LocalStatistics::new(state_b), cfg, cfg.seed, hints))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchStatus {
    MatchAllWitnesses,
    NoMatchFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub witness_frame: UnitVectorFrame,
    pub best_frame: UnitVectorFrame,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub schema_version: u32,
    pub num_qubits: usize,
    pub status: MatchStatus,
    /// `"measure_mismatch"` when the precheck decided the outcome.
    pub reason: Option<String>,
    pub interpretation: String,
    pub conclusive_for_equivalence: bool,
    pub ed_a: f64,
    pub ed_b: f64,
    pub witnesses_tested: usize,
    pub min_residual: Option<f64>,
    pub max_residual: Option<f64>,
    pub match_tol: f64,
    pub inequivalence_margin: f64,
    pub seed: u64,
    pub witnesses: Vec<Witness>,
}

fn classify(residuals: &[f64], cfg: &MatchConfig) -> MatchStatus {
    if residuals.iter().any(|r| *r > cfg.inequivalence_margin) {
        MatchStatus::NoMatchFound
    } else if residuals.iter().all(|r| *r < cfg.match_tol) {
        MatchStatus::MatchAllWitnesses
    } else {
        MatchStatus::Inconclusive
    }
}

/// Witness frames: the optimal frame of `a`, the three axis frames and
/// `cfg.restarts` random frames.
pub fn witness_frames(a: &PureState, cfg: &MatchConfig) -> Vec<(String, UnitVectorFrame)> {
    let m = a.num_qubits();
    let mut out = vec![("optimal".to_string(), entanglement_distance(a).frame)];
    for (name, axis) in [("x", [1.0, 0.0, 0.0]), ("y", [0.0, 1.0, 0.0]), ("z", [0.0, 0.0, 1.0])] {
        out.push((format!("axis_{name}"), UnitVectorFrame::uniform(m, axis).expect("unit axis")));
    }
    for k in 0..cfg.restarts {
        let f = random_frame(&mut rng(sub_seed(cfg.seed ^ 0x5749_544e, k as u64)), m);
        out.push((format!("random_{k}"), f));
    }
    out
}

type FramePairs = Vec<([f64; 3], [f64; 3])>;

/// Per-qubit orthogonal fit `n = R_q v` over the frame pairs of matched
/// witnesses (one entry per witness, one pair per qubit), with the summed
/// squared fit error.
fn fit_rotations(groups: &[FramePairs], m: usize) -> Option<(Vec<Matrix3<f64>>, f64)> {
    let mut rots = Vec::with_capacity(m);
    let mut err = 0.0;
    for q in 0..m {
        let mut h = Matrix3::<f64>::zeros();
        for g in groups {
            let (v, n) = g[q];
            h += Vector3::from(n) * Vector3::from(v).transpose();
        }
        let svd = h.svd(true, true);
        let r = svd.u? * svd.v_t?;
        for g in groups {
            let (v, n) = g[q];
            err += (Vector3::from(n) - r * Vector3::from(v)).norm_squared();
        }
        rots.push(r);
    }
    Some((rots, err))
}

/// Summed squared fit error below which matched witnesses are taken to
/// share the same rotations.
const FIT_TOL: f64 = 1e-6;
const MAX_CLUSTERS: usize = 16;

/// Matched witnesses grouped by the rotations that explain them. When a
/// witness admits several discrete solutions, different witnesses may land
/// on different branches; only consistent groups are fitted together.
#[derive(Debug, Default)]
struct RotationClusters {
    clusters: Vec<Vec<FramePairs>>,
}

impl RotationClusters {
    fn record(&mut self, witness: &UnitVectorFrame, found: &UnitVectorFrame) {
        let m = witness.len();
        // metrics are blind to flipping every vector at once
        let pairs = |s: f64| -> FramePairs {
            witness.vectors().iter().zip(found.vectors()).map(|(v, n)| (*v, n.map(|x| s * x))).collect()
        };
        for cluster in &mut self.clusters {
            for sign in [1.0, -1.0] {
                cluster.push(pairs(sign));
                if fit_rotations(cluster, m).is_some_and(|f| f.1 < FIT_TOL) {
                    return;
                }
                cluster.pop();
            }
        }
        if self.clusters.len() < MAX_CLUSTERS {
            self.clusters.push(vec![pairs(1.0)]);
        }
    }

    /// Fitted rotations of every cluster applied to a new witness, largest
    /// cluster first.
    fn hints(&self, witness: &UnitVectorFrame) -> Vec<UnitVectorFrame> {
        let mut order: Vec<&Vec<FramePairs>> = self.clusters.iter().filter(|c| c.len() >= 2).collect();
        order.sort_by_key(|c| std::cmp::Reverse(c.len()));
        order.into_iter().filter_map(|c| transferred_frame(c, witness)).collect()
    }
}

/// Applies the rotations fitted to `groups` to a new witness.
fn transferred_frame(groups: &[FramePairs], witness: &UnitVectorFrame) -> Option<UnitVectorFrame> {
    let (rots, _) = fit_rotations(groups, witness.len())?;
    let out = rots
        .iter()
        .enumerate()
        .map(|(q, r)| {
            let n = r * Vector3::from(witness.get(q));
            [n[0], n[1], n[2]].map(|x| x / n.norm())
        })
        .collect();
    UnitVectorFrame::new(out).ok()
}

/// Tests whether `b` reproduces the metric of `a` on every witness frame.
pub fn equivalence_test(a: &PureState, b: &PureState, cfg: &MatchConfig) -> Result<EquivalenceReport> {
    cfg.validate()?;
    let m = a.num_qubits();
    if b.num_qubits() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.num_qubits() });
    }
    let ed_a = entanglement_distance(a).total;
    let ed_b = entanglement_distance(b).total;
    let mut report = EquivalenceReport {
        schema_version: 1,
        num_qubits: m,
        status: MatchStatus::Inconclusive,
        reason: None,
        interpretation: String::new(),
        conclusive_for_equivalence: false,
        ed_a,
        ed_b,
        witnesses_tested: 0,
        min_residual: None,
        max_residual: None,
        match_tol: cfg.match_tol,
        inequivalence_margin: cfg.inequivalence_margin,
        seed: cfg.seed,
        witnesses: Vec::new(),
    };
    if cfg.measure_precheck && (ed_a - ed_b).abs() >= MEASURE_PRECHECK_TOL {
        report.status = MatchStatus::NoMatchFound;
        report.reason = Some("measure_mismatch".into());
        report.interpretation = format!("not LU-equivalent: entanglement distances differ ({ed_a} vs {ed_b})");
        return Ok(report);
    }

    let stats = LocalStatistics::new(b);
    let mut clusters = RotationClusters::default();
    for (i, (label, v)) in witness_frames(a, cfg).into_iter().enumerate() {
        let target = metric_tensor(a, &v)?;
        let mut hints = clusters.hints(&v);
        hints.push(v.clone());
        let found = search(&target, &stats, cfg, sub_seed(cfg.seed, i as u64), &hints);
        if found.residual < cfg.match_tol {
            clusters.record(&v, &found.frame);
        }
        report.witnesses.push(Witness { label, witness_frame: v, best_frame: found.frame, residual: found.residual });
    }
    // retry early witnesses that missed, now that more rotations are known
    for (i, w) in report.witnesses.iter_mut().enumerate() {
        if w.residual < cfg.match_tol {
            continue;
        }
        let hints = clusters.hints(&w.witness_frame);
        if hints.is_empty() {
            break;
        }
        let target = metric_tensor(a, &w.witness_frame)?;
        let found = search(&target, &stats, &MatchConfig { starts: 0, ..*cfg }, sub_seed(cfg.seed, i as u64), &hints);
        if found.residual < w.residual {
            w.best_frame = found.frame;
            w.residual = found.residual;
        }
    }
    let residuals: Vec<f64> = report.witnesses.iter().map(|w| w.residual).collect();
    report.witnesses_tested = residuals.len();
    report.min_residual = residuals.iter().copied().reduce(f64::min);
    report.max_residual = residuals.iter().copied().reduce(f64::max);
    report.status = classify(&residuals, cfg);
    report.conclusive_for_equivalence = m == 2 && report.status == MatchStatus::MatchAllWitnesses;
    report.interpretation = match report.status {
        MatchStatus::MatchAllWitnesses if m == 2 => "LU-equivalent (metric matching is conclusive for two qubits)".into(),
        MatchStatus::MatchAllWitnesses => "consistent with equivalence (second-order only)".into(),
        MatchStatus::NoMatchFound => {
            format!("not LU-equivalent: some witness frame has residual above {}", cfg.inequivalence_margin)
        }
        MatchStatus::Inconclusive => "inconclusive: residuals between match tolerance and margin".into(),
    };
    Ok(report)
}
