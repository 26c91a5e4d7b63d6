//! Benchmark targets and cutoff selection.

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TargetState;

/// Default bound on the cutoff search in [`truncate_cutoffs`].
pub const DEFAULT_CUTOFF_CAP: usize = 200;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Cat,
    Correlated,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub alpha: C64,
    pub m_max: usize,
    pub n_max: usize,
    pub source: Option<PathBuf>,
}

/// A truncated, renormalized target and the probability that was cut away.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncated {
    pub state: TargetState,
    pub tail_mass: f64,
}

/// Coherent-state amplitude `e^{-|α|²/2} α^m / √(m!)`, computed in log space.
pub fn coherent_amplitude(alpha: C64, m: usize) -> C64 {
    let r = alpha.norm();
    if m == 0 {
        return C64::new((-r * r / 2.0).exp(), 0.0);
    }
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
    let ln_mag = -r * r / 2.0 + m as f64 * r.ln() - 0.5 * ln_fact;
    C64::from_polar(ln_mag.exp(), m as f64 * alpha.arg())
}

/// Untruncated amplitudes of `N (|α⟩|α⟩ + |−α⟩|−α⟩)`.
pub fn cat_rule(alpha: C64) -> impl Fn(usize, usize) -> C64 {
    let r2 = alpha.norm_sqr();
    let norm = 1.0 / (2.0 * (1.0 + (-4.0 * r2).exp())).sqrt();
    move |m, n| {
        if (m + n) % 2 == 1 {
            C64::new(0.0, 0.0)
        } else {
            2.0 * norm * coherent_amplitude(alpha, m) * coherent_amplitude(alpha, n)
        }
    }
}

/// Untruncated amplitudes of `e^{-|α|²/2} Σ α^m/√(m!) |m,m⟩`.
pub fn correlated_rule(alpha: C64) -> impl Fn(usize, usize) -> C64 {
    move |m, n| {
        if m == n {
            coherent_amplitude(alpha, m)
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

/// Restrict a unit-norm amplitude rule to the rectangle and renormalize.
pub fn truncate<F>(rule: F, m_max: usize, n_max: usize) -> Result<Truncated>
where
    F: Fn(usize, usize) -> C64,
{
    let coefficients: Vec<C64> = (0..=m_max)
        .flat_map(|m| (0..=n_max).map(move |n| (m, n)))
        .map(|(m, n)| rule(m, n))
        .collect();
    let kept: f64 = coefficients.iter().map(|z| z.norm_sqr()).sum();
    let (state, _) = TargetState::normalized(m_max, n_max, coefficients)?;
    Ok(Truncated {
        state,
        tail_mass: (1.0 - kept).max(0.0),
    })
}

pub fn cat_state(alpha: C64, m_max: usize, n_max: usize) -> Result<TargetState> {
    Ok(truncate(cat_rule(alpha), m_max, n_max)?.state)
}

pub fn correlated_state(alpha: C64, m_max: usize) -> Result<TargetState> {
    Ok(truncate(correlated_rule(alpha), m_max, m_max)?.state)
}

/// Construct a target from a spec. Custom targets are read from `source`.
pub fn build(spec: &TargetSpec) -> Result<Truncated> {
    match spec.kind {
        TargetKind::Cat | TargetKind::Correlated if spec.alpha.norm() == 0.0 => Err(
            Error::InvalidArgument("alpha must be nonzero for analytic targets".into()),
        ),
        TargetKind::Cat => truncate(cat_rule(spec.alpha), spec.m_max, spec.n_max),
        TargetKind::Correlated => {
            if spec.m_max != spec.n_max {
                return Err(Error::InvalidArgument(format!(
                    "correlated targets need m_max == n_max, got {} and {}",
                    spec.m_max, spec.n_max
                )));
            }
            truncate(correlated_rule(spec.alpha), spec.m_max, spec.m_max)
        }
        TargetKind::Custom => {
            let path = spec.source.as_ref().ok_or_else(|| {
                Error::InvalidArgument("custom targets need a source file".into())
            })?;
            let loaded = crate::io::load_target(path)?;
            Ok(Truncated {
                state: loaded.state,
                tail_mass: 0.0,
            })
        }
    }
}

/// Smallest cutoffs `(m_max, n_max)` whose excluded probability is at most
/// `epsilon`. Candidates are ranked by `m_max + n_max`, then by asymmetry
/// `|m_max − n_max|`, then by `m_max`.
pub fn truncate_cutoffs<F>(rule: F, epsilon: f64, cap: usize) -> Result<(usize, usize)>
where
    F: Fn(usize, usize) -> C64,
{
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let w = cap + 1;
    // kept[m][n] = Σ_{m' <= m, n' <= n} |Q|²
    let mut kept = vec![0.0f64; w * w];
    for m in 0..w {
        let mut row = 0.0;
        for n in 0..w {
            row += rule(m, n).norm_sqr();
            let above = if m > 0 { kept[(m - 1) * w + n] } else { 0.0 };
            kept[m * w + n] = above + row;
        }
    }
    for total in 0..=2 * cap {
        let lo = total.saturating_sub(cap);
        let hi = total.min(cap);
        let mut candidates: Vec<usize> = (lo..=hi).collect();
        candidates.sort_by_key(|&m| ((2 * m).abs_diff(total), m));
        for m in candidates {
            let n = total - m;
            if 1.0 - kept[m * w + n] <= epsilon {
                return Ok((m, n));
            }
        }
    }
    Err(Error::TruncationCap { cap })
}
