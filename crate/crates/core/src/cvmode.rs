//! Entanglement distance of bosonic states on a truncated Fock space:
//! coherent states, symmetric two-mode cat states and displacements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::C64;

/// Largest per-mode cutoff tried before giving up.
pub const MAX_CUTOFF: usize = 256;
/// Tail norm accepted for a user-fixed cutoff.
pub const FIXED_TAIL_TOL: f64 = 1e-8;
/// Tail norm aimed for by the automatic cutoff.
pub const AUTO_TAIL_TARGET: f64 = 1e-18;
/// Maximal number of modes handled.
pub const MAX_MODES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cutoff {
    /// Smallest `N` with a Poisson tail below [`AUTO_TAIL_TARGET`].
    #[default]
    Auto,
    Fixed(usize),
}

/// Probability mass of `|alpha>` beyond photon number `n`.
pub fn coherent_tail(alpha: C64, n: usize) -> f64 {
    let mean = alpha.norm_sqr();
    if mean == 0.0 {
        return 0.0;
    }
    // Poisson weights in log space, stepped upward from 0.
    let log_mean = mean.ln();
    let mut log_w = -mean;
    let mut head = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_w += log_mean - (k as f64).ln();
        }
        head += log_w.exp();
    }
    if (n as f64) + 1.0 < 2.0 * mean {
        return (1.0 - head).max(0.0);
    }
    let mut tail = 0.0;
    let mut k = n;
    loop {
        k += 1;
        log_w += log_mean - (k as f64).ln();
        let w = log_w.exp();
        tail += w;
        if w <= tail * 1e-17 || w == 0.0 {
            break;
        }
    }
    tail
}

fn resolve_cutoff(alphas: &[C64], cutoff: Cutoff) -> Result<usize> {
    let worst = |n: usize| alphas.iter().map(|&a| coherent_tail(a, n)).sum::<f64>();
    match cutoff {
        Cutoff::Fixed(n) => {
            if n > MAX_CUTOFF {
                return Err(Error::invalid(format!("cutoff {n} exceeds the maximum {MAX_CUTOFF}")));
            }
            let tail = worst(n);
            if tail >= FIXED_TAIL_TOL {
                return Err(Error::invalid(format!("cutoff {n} leaves tail norm {tail:.3e} (need < {FIXED_TAIL_TOL:e})")));
            }
            Ok(n)
        }
        Cutoff::Auto => (1..=MAX_CUTOFF).find(|&n| worst(n) < AUTO_TAIL_TARGET).ok_or_else(|| {
            Error::invalid(format!("no cutoff up to {MAX_CUTOFF} reaches tail norm {AUTO_TAIL_TARGET:e}"))
        }),
    }
}

fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut a = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    out.push(a);
    for n in 1..=cutoff {
        a = a * alpha / (n as f64).sqrt();
        out.push(a);
    }
    out
}

/// State of one or two bosonic modes truncated at `cutoff` photons per
/// mode. Amplitude of `|n0, n1>` sits at `n0 + (cutoff + 1) n1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockState {
    num_modes: usize,
    cutoff: usize,
    amplitudes: Vec<C64>,
    tail_bound: f64,
}

impl FockState {
    /// Renormalizes `amplitudes`; `tail_bound` is the norm known to be
    /// missing from the truncation.
    pub fn new(num_modes: usize, cutoff: usize, amplitudes: Vec<C64>, tail_bound: f64) -> Result<Self> {
        if num_modes == 0 || num_modes > MAX_MODES {
            return Err(Error::invalid(format!("{num_modes} modes; supported are 1..={MAX_MODES}")));
        }
        if cutoff == 0 || cutoff > MAX_CUTOFF {
            return Err(Error::invalid(format!("cutoff {cutoff} outside 1..={MAX_CUTOFF}")));
        }
        let expected = (cutoff + 1).pow(num_modes as u32);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: amplitudes.len() });
        }
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::invalid("tail bound must be a non-negative number"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid("Fock amplitudes have zero or non-finite norm"));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { num_modes, cutoff, amplitudes, tail_bound })
    }

    /// Single-mode number state `|n>`.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::invalid(format!("photon number {n} exceeds cutoff {cutoff}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self::new(1, cutoff, amps, 0.0)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.num_modes {
            return Err(Error::QubitOutOfRange { qubit: mode, num_qubits: self.num_modes });
        }
        Ok(())
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow(mode as u32)
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        index / self.stride(mode) % (self.cutoff + 1)
    }

    /// `<a_mode^dagger a_mode>`.
    pub fn mean_number(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(self.amplitudes.iter().enumerate().map(|(i, a)| self.occupation(i, mode) as f64 * a.norm_sqr()).sum())
    }

    /// `<a_mode>`.
    pub fn mean_annihilation(&self, mode: usize) -> Result<C64> {
        self.check_mode(mode)?;
        let stride = self.stride(mode);
        let mut acc = C64::new(0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let n = self.occupation(i, mode);
            if n > 0 {
                acc += self.amplitudes[i - stride].conj() * a * (n as f64).sqrt();
            }
        }
        Ok(acc)
    }

    /// Overlap `<self|other>` on a common cutoff.
    pub fn inner(&self, other: &FockState) -> Result<C64> {
        if self.num_modes != other.num_modes || self.cutoff != other.cutoff {
            return Err(Error::invalid("Fock states differ in modes or cutoff"));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Same state with every mode displaced by `beta`. The cutoff grows so
    /// that the displaced support still fits; lost norm is added to the
    /// tail bound.
    pub fn displace(&self, beta: C64) -> Result<FockState> {
        let r = beta.norm();
        let out_cutoff = (self.cutoff + (r * r + 10.0 * r + 8.0).ceil() as usize).min(MAX_CUTOFF);
        let d = displacement_matrix(beta, out_cutoff, self.cutoff);
        let (n_in, n_out) = (self.cutoff + 1, out_cutoff + 1);
        let mut cur = self.amplitudes.clone();
        let mut dims = vec![n_in; self.num_modes];
        for mode in 0..self.num_modes {
            let inner: usize = dims[..mode].iter().product();
            let outer: usize = dims[mode + 1..].iter().product();
            let mut next = vec![C64::new(0.0, 0.0); inner * n_out * outer];
            for o in 0..outer {
                for m in 0..n_out {
                    for k in 0..n_in {
                        let dmk = d[m * n_in + k];
                        if dmk == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let src = (o * n_in + k) * inner;
                        let dst = (o * n_out + m) * inner;
                        for i in 0..inner {
                            next[dst + i] += dmk * cur[src + i];
                        }
                    }
                }
            }
            cur = next;
            dims[mode] = n_out;
        }
        let kept: f64 = cur.iter().map(|a| a.norm_sqr()).sum();
        FockState::new(self.num_modes, out_cutoff, cur, self.tail_bound + (1.0 - kept).max(0.0))
    }
}

/// Rows `0..=rows`, columns `0..=cols` of the displacement operator, row
/// major. Column 0 is the coherent state; later columns follow from
/// `D |n+1> = (a^dagger - conj(beta)) D |n> / sqrt(n+1)`.
pub fn displacement_matrix(beta: C64, rows: usize, cols: usize) -> Vec<C64> {
    let (nr, nc) = (rows + 1, cols + 1);
    let mut d = vec![C64::new(0.0, 0.0); nr * nc];
    for (m, a) in coherent_amplitudes(beta, rows).into_iter().enumerate() {
        d[m * nc] = a;
    }
    for n in 0..cols {
        let scale = 1.0 / ((n + 1) as f64).sqrt();
        for m in 0..nr {
            let raised = if m > 0 { d[(m - 1) * nc + n] * (m as f64).sqrt() } else { C64::new(0.0, 0.0) };
            d[m * nc + n + 1] = (raised - beta.conj() * d[m * nc + n]) * scale;
        }
    }
    d
}

/// Single-mode coherent state `|alpha>`.
pub fn coherent_state(alpha: C64, cutoff: Cutoff) -> Result<FockState> {
    coherent_product(&[alpha], cutoff)
}

/// Product `|alpha_0> |alpha_1> ...` of coherent states.
pub fn coherent_product(alphas: &[C64], cutoff: Cutoff) -> Result<FockState> {
    let n = resolve_cutoff(alphas, cutoff)?;
    let factors: Vec<Vec<C64>> = alphas.iter().map(|&a| coherent_amplitudes(a, n)).collect();
    let amps = product_amplitudes(&factors);
    let tail = alphas.iter().map(|&a| coherent_tail(a, n)).sum();
    FockState::new(alphas.len(), n, amps, tail)
}

fn product_amplitudes(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        out = f.iter().flat_map(|b| out.iter().map(move |a| a * b)).collect();
    }
    out
}

/// Two coherent amplitudes defining `c (|a1, a2> + |a2, a1>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub alpha1: C64,
    pub alpha2: C64,
}

impl CatSpec {
    pub fn new(alpha1: C64, alpha2: C64) -> Result<Self> {
        if !(alpha1.re.is_finite() && alpha1.im.is_finite() && alpha2.re.is_finite() && alpha2.im.is_finite()) {
            return Err(Error::invalid("coherent amplitudes must be finite"));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// `<a1, a2 | a2, a1> = exp(-|a1 - a2|^2)`.
    pub fn overlap(&self) -> f64 {
        (-(self.alpha1 - self.alpha2).norm_sqr()).exp()
    }

    pub fn normalization(&self) -> f64 {
        (2.0 * (1.0 + self.overlap())).powf(-0.5)
    }

    /// `2 (1 - p) / (1 + p) |a1 - a2|^2`.
    pub fn closed_form_ed(&self) -> f64 {
        let p = self.overlap();
        2.0 * (1.0 - p) / (1.0 + p) * (self.alpha1 - self.alpha2).norm_sqr()
    }
}

/// Truncated cat amplitudes with the analytic normalization.
fn cat_amplitudes(spec: &CatSpec, n: usize) -> Vec<C64> {
    let c = spec.normalization();
    let a = coherent_amplitudes(spec.alpha1, n);
    let b = coherent_amplitudes(spec.alpha2, n);
    let ab = product_amplitudes(&[a.clone(), b.clone()]);
    let ba = product_amplitudes(&[b, a]);
    ab.iter().zip(&ba).map(|(x, y)| (x + y) * c).collect()
}

/// Symmetric cat state `c (|a1, a2> + |a2, a1>)` with `c = (2 (1 + p))^{-1/2}`.
pub fn symmetric_cat(spec: &CatSpec, cutoff: Cutoff) -> Result<FockState> {
    let n = resolve_cutoff(&[spec.alpha1, spec.alpha2], cutoff)?;
    let amps = cat_amplitudes(spec, n);
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let tail = (1.0 - kept).max(0.0).max(coherent_tail(spec.alpha1, n) + coherent_tail(spec.alpha2, n));
    FockState::new(2, n, amps, tail)
}

/// Norm of the truncated cat state built with the analytic normalization;
/// 1 up to the truncation tail.
pub fn cat_normalization_check(spec: &CatSpec, cutoff: Cutoff) -> Result<f64> {
    let n = resolve_cutoff(&[spec.alpha1, spec.alpha2], cutoff)?;
    Ok(cat_amplitudes(spec, n).iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
}

/// Per-mode terms `<n_mu> - |<a_mu>|^2`.
pub fn cv_ed_terms(state: &FockState) -> Vec<f64> {
    (0..state.num_modes())
        .map(|m| {
            state.mean_number(m).expect("mode in range") - state.mean_annihilation(m).expect("mode in range").norm_sqr()
        })
        .collect()
}

/// `4 sum_mu (<n_mu> - |<a_mu>|^2)`.
pub fn cv_ed(state: &FockState) -> f64 {
    4.0 * cv_ed_terms(state).iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub schema_version: u32,
    pub alpha1: C64,
    pub alpha2: C64,
    pub cutoff: usize,
    pub tail_bound: f64,
    #[serde(rename = "E")]
    pub ed: f64,
    pub p: f64,
    pub closed_form: f64,
    pub difference: f64,
}

pub fn cat_report(spec: &CatSpec, cutoff: Cutoff) -> Result<CvReport> {
    let state = symmetric_cat(spec, cutoff)?;
    let ed = cv_ed(&state);
    let closed_form = spec.closed_form_ed();
    Ok(CvReport {
        schema_version: 1,
        alpha1: spec.alpha1,
        alpha2: spec.alpha2,
        cutoff: state.cutoff(),
        tail_bound: state.tail_bound(),
        ed,
        p: spec.overlap(),
        closed_form,
        difference: ed - closed_form,
    })
}
