//! The three parameterized state families with their closed-form
//! entanglement distances and metrics: GHZ-like, Briegel-Raussendorf (BRS)
//! chain states and W states.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsmetric::{entanglement_distance_value, MetricTensor, UnitVectorFrame};
use crate::qstate::{PureState, C64};

const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Ghzl,
    Brs,
    W,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Ghzl => "ghzl",
            FamilyKind::Brs => "brs",
            FamilyKind::W => "w",
        }
    }

    /// Names of the parameters, in order.
    pub fn param_names(self, num_qubits: usize) -> Vec<String> {
        match self {
            FamilyKind::Ghzl => vec!["theta".into()],
            FamilyKind::Brs => vec!["phi".into()],
            FamilyKind::W => (1..num_qubits).map(|j| format!("theta{j}")).collect(),
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghzl" | "ghz" => Ok(FamilyKind::Ghzl),
            "brs" => Ok(FamilyKind::Brs),
            "w" => Ok(FamilyKind::W),
            other => Err(Error::Parse(format!("unknown family '{other}' (expected ghzl, brs or w)"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated family member: kind, qubit count and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    kind: FamilyKind,
    num_qubits: usize,
    params: Vec<f64>,
}

fn check_range(name: &str, x: f64, hi: f64) -> Result<()> {
    if !x.is_finite() || x < -RANGE_SLACK || x > hi + RANGE_SLACK {
        return Err(Error::InvalidParameter(format!("{name} = {x} outside [0, {hi}]")));
    }
    Ok(())
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, num_qubits: usize, params: Vec<f64>) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::InvalidParameter(format!("family states need M >= 2, got {num_qubits}")));
        }
        let expected = match kind {
            FamilyKind::Ghzl | FamilyKind::Brs => 1,
            FamilyKind::W => num_qubits - 1,
        };
        if params.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{kind} with M = {num_qubits} takes {expected} parameter(s), got {}",
                params.len()
            )));
        }
        let hi = if kind == FamilyKind::Brs { 2.0 * PI } else { FRAC_PI_2 };
        for (name, x) in kind.param_names(num_qubits).iter().zip(&params) {
            check_range(name, *x, hi)?;
        }
        Ok(Self { kind, num_qubits, params })
    }

    pub fn ghzl(num_qubits: usize, theta: f64) -> Result<Self> {
        Self::new(FamilyKind::Ghzl, num_qubits, vec![theta])
    }

    pub fn brs(num_qubits: usize, phi: f64) -> Result<Self> {
        Self::new(FamilyKind::Brs, num_qubits, vec![phi])
    }

    pub fn w(num_qubits: usize, angles: Vec<f64>) -> Result<Self> {
        Self::new(FamilyKind::W, num_qubits, angles)
    }

    /// W state with equal weights on every one-hot term.
    pub fn w_uniform(num_qubits: usize) -> Result<Self> {
        let angles = (1..num_qubits).map(|j| (1.0 / ((num_qubits - j + 1) as f64).sqrt()).acos()).collect();
        Self::w(num_qubits, angles)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn state(&self) -> PureState {
        let p = &self.params;
        match self.kind {
            FamilyKind::Ghzl => ghzl_state(self.num_qubits, p[0]),
            FamilyKind::Brs => brs_state(self.num_qubits, p[0]),
            FamilyKind::W => w_state(self.num_qubits, p),
        }
        .expect("parameters validated")
    }
}

/// Parses `kind:M:p1[,p2...]`, e.g. `ghzl:4:0.785` or `w:3:0.9553,0.7854`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("family spec '{s}' should look like kind:M:p1[,p2...]")));
        }
        let kind: FamilyKind = parts[0].trim().parse()?;
        let m: usize =
            parts[1].trim().parse().map_err(|_| Error::Parse(format!("bad qubit count '{}'", parts[1])))?;
        let params = parts[2]
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad parameter '{x}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, m, params)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(|x| x.to_string()).collect();
        write!(f, "{}:{}:{}", self.kind, self.num_qubits, ps.join(","))
    }
}

/// `cos(theta)|0...0> + sin(theta)|1...1>`.
pub fn ghzl_state(num_qubits: usize, theta: f64) -> Result<PureState> {
    if num_qubits < 2 {
        return Err(Error::InvalidParameter(format!("M >= 2 required, got {num_qubits}")));
    }
    check_range("theta", theta, FRAC_PI_2)?;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
    amps[0] = C64::new(theta.cos(), 0.0);
    amps[(1 << num_qubits) - 1] = C64::new(theta.sin(), 0.0);
    PureState::new(num_qubits, amps)
}

/// Number of `01` substrings in the M-bit string of `k`, read from the
/// most significant bit.
pub fn count_01(k: usize, num_qubits: usize) -> u32 {
    (0..num_qubits.saturating_sub(1)).filter(|&j| (k >> (j + 1)) & 1 == 0 && (k >> j) & 1 == 1).count() as u32
}

/// BRS chain state: the uniform superposition acted on by the open-chain
/// phase gates `I + alpha P_j`, `alpha = e^{-i phi} - 1`, where `P_j`
/// projects bit `j + 1` on 0 and bit `j` on 1.
pub fn brs_state(num_qubits: usize, phi: f64) -> Result<PureState> {
    if num_qubits < 2 {
        return Err(Error::InvalidParameter(format!("M >= 2 required, got {num_qubits}")));
    }
    let dim = 1usize << num_qubits;
    let alpha = C64::from_polar(1.0, -phi) - 1.0;
    let mut amps = vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim];
    for j in 0..num_qubits - 1 {
        for (k, a) in amps.iter_mut().enumerate() {
            if (k >> (j + 1)) & 1 == 0 && (k >> j) & 1 == 1 {
                *a += alpha * *a;
            }
        }
    }
    PureState::new(num_qubits, amps)
}

/// BRS amplitudes from the binomial expansion `sum_j C(n, j) alpha^j`
/// with `n = count_01(k)`.
pub fn brs_state_combinatorial(num_qubits: usize, phi: f64) -> Result<PureState> {
    if num_qubits < 2 {
        return Err(Error::InvalidParameter(format!("M >= 2 required, got {num_qubits}")));
    }
    let dim = 1usize << num_qubits;
    let alpha = C64::from_polar(1.0, -phi) - 1.0;
    let norm = (dim as f64).sqrt().recip();
    let amps = (0..dim)
        .map(|k| {
            let n = count_01(k, num_qubits);
            let mut binom = 1.0;
            let mut power = C64::new(1.0, 0.0);
            let mut lambda = C64::new(0.0, 0.0);
            for j in 0..=n {
                lambda += power * binom;
                power *= alpha;
                binom = binom * f64::from(n - j) / f64::from(j + 1);
            }
            lambda * norm
        })
        .collect();
    PureState::new(num_qubits, amps)
}

/// Real W-state weights from the spherical chart: `a_1 = cos t_1`,
/// `a_k = sin t_1 ... sin t_{k-1} cos t_k`, `a_M = sin t_1 ... sin t_{M-1}`.
pub fn w_amplitudes(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len() + 1);
    let mut prefix = 1.0;
    for t in angles {
        out.push(prefix * t.cos());
        prefix *= t.sin();
    }
    out.push(prefix);
    out
}

/// `sum_j a_j |2^{j-1}>`: qubit `j - 1` carries the excitation of term `j`.
pub fn w_state(num_qubits: usize, angles: &[f64]) -> Result<PureState> {
    if num_qubits < 2 {
        return Err(Error::InvalidParameter(format!("M >= 2 required, got {num_qubits}")));
    }
    if angles.len() != num_qubits - 1 {
        return Err(Error::InvalidParameter(format!(
            "W state on {num_qubits} qubits takes {} angles, got {}",
            num_qubits - 1,
            angles.len()
        )));
    }
    for (j, t) in angles.iter().enumerate() {
        check_range(&format!("theta{}", j + 1), *t, FRAC_PI_2)?;
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
    for (q, a) in w_amplitudes(angles).into_iter().enumerate() {
        amps[1 << q] = C64::new(a, 0.0);
    }
    PureState::new(num_qubits, amps)
}

fn half_angle(phi: f64) -> (f64, f64) {
    ((phi / 2.0).cos(), (phi / 2.0).sin())
}

/// Closed-form per-qubit entanglement distance `E / M`.
pub fn family_ed_closed_form(spec: &FamilySpec) -> Result<f64> {
    let m = spec.num_qubits;
    let p = &spec.params;
    match spec.kind {
        FamilyKind::Ghzl => Ok((2.0 * p[0]).sin().powi(2)),
        FamilyKind::Brs => {
            let (c, s) = half_angle(p[0]);
            let (c2, s2) = (c * c, s * s);
            match m {
                2 => Ok(s2),
                3 => Ok(s2 * (3.0 + c2) / 3.0),
                4 => Ok(s2 * (4.0 + 2.0 * c2) / 4.0),
                _ => Err(Error::Unsupported(format!("BRS with M = {m}: no closed form; use numeric path"))),
            }
        }
        FamilyKind::W => {
            let quartic: f64 = w_amplitudes(p).iter().map(|a| a.powi(4)).sum();
            Ok(4.0 * (1.0 - quartic) / m as f64)
        }
    }
}

/// Closed-form entanglement metric together with the frame it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormMetric {
    pub em: MetricTensor,
    pub frame: UnitVectorFrame,
}

/// Closed-form EM. The numeric optimal frame agrees with `frame` up to the
/// sign of each vector.
pub fn family_em_closed_form(spec: &FamilySpec) -> Result<ClosedFormMetric> {
    let m = spec.num_qubits;
    let p = &spec.params;
    let z = [0.0, 0.0, 1.0];
    let (rows, frame): (Vec<Vec<f64>>, Vec<[f64; 3]>) = match (spec.kind, m) {
        (FamilyKind::Ghzl, _) => {
            let s = (2.0 * p[0]).sin().powi(2);
            (vec![vec![s; m]; m], vec![z; m])
        }
        (FamilyKind::Brs, 2..=4) => {
            let (c, s) = half_angle(p[0]);
            let c2 = c * c;
            let rows = match m {
                2 => vec![vec![1.0, 1.0], vec![1.0, 1.0]],
                3 => vec![vec![1.0, c, 0.0], vec![c, 1.0 + c2, c], vec![0.0, c, 1.0]],
                _ => vec![
                    vec![1.0, c, 0.0, 0.0],
                    vec![c, 1.0 + c2, c2, 0.0],
                    vec![0.0, c2, 1.0 + c2, c],
                    vec![0.0, 0.0, c, 1.0],
                ],
            };
            let rows = rows.into_iter().map(|r| r.into_iter().map(|x| s * s * x).collect()).collect();
            let mut frame = vec![[1.0, 0.0, 0.0]; m];
            frame[0] = [c, -s, 0.0];
            frame[m - 1] = [c, s, 0.0];
            (rows, frame)
        }
        (FamilyKind::W, 2 | 3) => {
            let w: Vec<f64> = w_amplitudes(p).iter().map(|a| a * a).collect();
            let signs: Vec<f64> = if m == 2 { vec![1.0, -1.0] } else { vec![1.0; m] };
            let rows = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if i == j { 4.0 * w[i] * (1.0 - w[i]) } else { -4.0 * w[i] * w[j] * signs[i] * signs[j] })
                        .collect()
                })
                .collect();
            (rows, signs.iter().map(|s| [0.0, 0.0, *s]).collect())
        }
        (kind, _) => return Err(Error::Unsupported(format!("no closed-form metric for {kind} with M = {m}"))),
    };
    Ok(ClosedFormMetric {
        em: MetricTensor::from_matrix(DMatrix::from_fn(m, m, |i, j| rows[i][j]))?,
        frame: UnitVectorFrame::new(frame)?,
    })
}

/// One point of the three-qubit W-state landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub theta1: f64,
    pub theta2: f64,
    pub ed_per_qubit: f64,
}

/// `E / 3` of the three-qubit W family on a `resolution x resolution` grid
/// over `[0, pi/2]^2`, computed numerically; row-major in `theta1`.
pub fn fig5_grid(resolution: usize) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 2, got {resolution}")));
    }
    let step = FRAC_PI_2 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let (t1, t2) = (i as f64 * step, j as f64 * step);
            let ed = entanglement_distance_value(&w_state(3, &[t1, t2])?);
            out.push(GridPoint { theta1: t1, theta2: t2, ed_per_qubit: ed / 3.0 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsmetric::{entanglement_distance, metric_tensor};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn ghzl_examples() {
        let s = ghzl_state(3, 0.0).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0));
        let bell = ghzl_state(2, FRAC_PI_4).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(bell.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.amplitudes()[3].re, r, epsilon = 1e-15);
        let e = entanglement_distance(&ghzl_state(5, FRAC_PI_8).unwrap()).total / 5.0;
        assert_abs_diff_eq!(e, 0.5, epsilon = 1e-14);
        assert!(ghzl_state(3, 2.0).is_err());
        assert!(ghzl_state(1, 0.1).is_err());
    }

    #[test]
    fn brs_coefficient_tables() {
        let phi = 0.83;
        let ph = |n: i32| C64::from_polar(1.0, -phi * n as f64);
        let s2 = brs_state(2, phi).unwrap();
        for k in 0..4 {
            let want = if k == 1 { ph(1) / 2.0 } else { c(0.5) };
            assert!((s2.amplitudes()[k] - want).norm() < 1e-15);
        }
        let s3 = brs_state(3, phi).unwrap();
        let n3 = 2f64.powf(-1.5);
        for k in 0..8 {
            let want = if [1, 2, 3, 5].contains(&k) { ph(1) * n3 } else { c(n3) };
            assert!((s3.amplitudes()[k] - want).norm() < 1e-15);
        }
        let s4 = brs_state(4, phi).unwrap();
        assert!((s4.amplitudes()[5] - ph(2) / 4.0).norm() < 1e-15);
        for k in [0, 8, 12, 14, 15] {
            assert!((s4.amplitudes()[k] - c(0.25)).norm() < 1e-15);
        }
    }

    #[test]
    fn brs_routes_agree() {
        for m in 2..=10 {
            for i in 0..20 {
                let phi = 2.0 * PI * i as f64 / 19.0;
                let a = brs_state(m, phi).unwrap();
                let b = brs_state_combinatorial(m, phi).unwrap();
                let d = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(d < 1e-12, "M={m} phi={phi} diff={d}");
            }
        }
    }

    #[test]
    fn brs_separable_at_multiples_of_two_pi() {
        for m in 2..=7 {
            for phi in [0.0, 2.0 * PI] {
                assert!(entanglement_distance(&brs_state(m, phi).unwrap()).total.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn w_examples() {
        let s = w_state(2, &[FRAC_PI_4]).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.amplitudes()[1].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[2].re, r, epsilon = 1e-15);
        let u = FamilySpec::w_uniform(3).unwrap();
        for a in w_amplitudes(u.params()) {
            assert_abs_diff_eq!(a, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(u.params()[1], FRAC_PI_4, epsilon = 1e-15);
        for angles in [[0.1, 0.2, 0.3], [1.5, 0.0, 0.7]] {
            let sum: f64 = w_amplitudes(&angles).iter().map(|a| a * a).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-15);
        }
        assert!(w_state(3, &[0.1]).is_err());
    }

    #[test]
    fn closed_form_ed_examples() {
        assert_abs_diff_eq!(family_ed_closed_form(&FamilySpec::ghzl(4, FRAC_PI_4).unwrap()).unwrap(), 1.0);
        assert_abs_diff_eq!(family_ed_closed_form(&FamilySpec::brs(4, PI).unwrap()).unwrap(), 1.0, epsilon = 1e-15);
        let w3 = family_ed_closed_form(&FamilySpec::w_uniform(3).unwrap()).unwrap();
        assert_abs_diff_eq!(w3, 8.0 / 9.0, epsilon = 1e-15);
        let err = family_ed_closed_form(&FamilySpec::brs(5, 1.0).unwrap());
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_form_ed_matches_numeric() {
        for i in 0..50 {
            let x = i as f64 / 49.0;
            for m in 2..=6 {
                let spec = FamilySpec::ghzl(m, x * FRAC_PI_2).unwrap();
                let num = entanglement_distance(&spec.state()).per_qubit_mean();
                assert_abs_diff_eq!(num, family_ed_closed_form(&spec).unwrap(), epsilon = 1e-10);
            }
            for m in 2..=4 {
                let spec = FamilySpec::brs(m, x * 2.0 * PI).unwrap();
                let num = entanglement_distance(&spec.state()).per_qubit_mean();
                assert_abs_diff_eq!(num, family_ed_closed_form(&spec).unwrap(), epsilon = 1e-10);
            }
            for m in 2..=5 {
                let angles = (0..m - 1).map(|j| (x + 0.13 * j as f64).fract() * FRAC_PI_2).collect();
                let spec = FamilySpec::w(m, angles).unwrap();
                let num = entanglement_distance(&spec.state()).per_qubit_mean();
                assert_abs_diff_eq!(num, family_ed_closed_form(&spec).unwrap(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_em_matches_numeric() {
        let mut specs = Vec::new();
        for i in 0..25 {
            let x = i as f64 / 24.0;
            for m in 2..=5 {
                specs.push(FamilySpec::ghzl(m, x * FRAC_PI_2).unwrap());
            }
            for m in 2..=4 {
                specs.push(FamilySpec::brs(m, x * 2.0 * PI).unwrap());
            }
            specs.push(FamilySpec::w(2, vec![x * FRAC_PI_2]).unwrap());
            specs.push(FamilySpec::w(3, vec![x * FRAC_PI_2, (1.0 - x) * FRAC_PI_2]).unwrap());
        }
        for spec in specs {
            let closed = family_em_closed_form(&spec).unwrap();
            let psi = spec.state();
            let g = metric_tensor(&psi, &closed.frame).unwrap();
            assert!(g.max_abs_diff(&closed.em) < 1e-10, "{spec}");
            let rep = entanglement_distance(&psi);
            for (q, v) in rep.frame.vectors().iter().enumerate() {
                if rep.degenerate_qubits.contains(&q) {
                    continue;
                }
                let d = crate::qstate::dot3(*v, closed.frame.get(q)).abs();
                assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn w3_uniform_metric_entries() {
        let closed = family_em_closed_form(&FamilySpec::w_uniform(3).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 8.0 / 9.0 } else { -4.0 / 9.0 };
                assert_abs_diff_eq!(closed.em.get(i, j), want, epsilon = 1e-15);
            }
        }
        assert!(family_em_closed_form(&FamilySpec::w_uniform(4).unwrap()).is_err());
        assert!(family_em_closed_form(&FamilySpec::brs(5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn spec_parsing_round_trips() {
        let s: FamilySpec = "ghzl:4:0.785".parse().unwrap();
        assert_eq!(s.kind(), FamilyKind::Ghzl);
        assert_eq!(s.to_string().parse::<FamilySpec>().unwrap(), s);
        let w: FamilySpec = "W:3:0.9553,0.7854".parse().unwrap();
        assert_eq!(w.params().len(), 2);
        assert!("brs:3".parse::<FamilySpec>().is_err());
        assert!("xyz:3:1".parse::<FamilySpec>().is_err());
        assert!("brs:3:7.0".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn fig5_examples() {
        let grid = fig5_grid(11).unwrap();
        assert_eq!(grid.len(), 121);
        for p in grid.iter().filter(|p| p.theta1 == 0.0) {
            assert!(p.ed_per_qubit.abs() < 1e-15);
        }
        let e = entanglement_distance(&w_state(3, &[FRAC_PI_4, 0.0]).unwrap()).total / 3.0;
        assert_abs_diff_eq!(e, 2.0 / 3.0, epsilon = 1e-14);
        let top = entanglement_distance(&w_state(3, &[(1.0 / 3f64.sqrt()).acos(), FRAC_PI_4]).unwrap()).total;
        assert_abs_diff_eq!(top / 3.0, 8.0 / 9.0, epsilon = 1e-14);
        assert!(fig5_grid(1).is_err());
    }
}
