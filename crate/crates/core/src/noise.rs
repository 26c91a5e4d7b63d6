//! Monte Carlo fidelity under technical noise on the compiled pulse areas.
//!
//! Each emitted pulse has complex area `z = |g| t · e^{iθ}`. A noisy run adds
//! independent uniform offsets to `Re z` and `Im z` and prepares the state from
//! vacuum. Runs are seeded from `(seed, delta index, run index)` so serial and
//! parallel execution give identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{reduce_angle, Pulse};
use crate::error::{Error, Result};
use crate::fock::{fidelity_single, CompositeState, Level, TargetState};
use crate::synth::{Direction, PulseSequence};

pub const DEFAULT_RUNS: usize = 100;

/// Identifier recorded in every report.
pub const RNG_ALGORITHM: &str = "chacha20 (rand_chacha); stream = delta_index << 32 | run";

/// Support of the uniform offsets added to `Re z` and `Im z`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseInterval {
    /// `[−δ/2, δ/2]`
    #[default]
    Centered,
    /// `[−δ, δ]`
    Wide,
    /// `[0, δ]`
    OneSided,
}

impl NoiseInterval {
    fn bounds(self, delta: f64) -> (f64, f64) {
        match self {
            NoiseInterval::Centered => (-delta / 2.0, delta / 2.0),
            NoiseInterval::Wide => (-delta, delta),
            NoiseInterval::OneSided => (0.0, delta),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub interval: NoiseInterval,
}

impl NoiseSpec {
    pub fn new(delta: f64, runs: usize, seed: u64) -> Self {
        NoiseSpec {
            delta,
            runs,
            seed,
            interval: NoiseInterval::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "delta must be finite and nonnegative, got {}",
                self.delta
            )));
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub delta: f64,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub runs: usize,
    pub seed: u64,
    pub rng: String,
    pub interval: NoiseInterval,
}

/// Shift the complex area of `p` by `u_re + i·u_im`.
pub fn perturb_with(p: &Pulse, u_re: f64, u_im: f64) -> Pulse {
    let z = p.area() + num_complex::Complex64::new(u_re, u_im);
    Pulse {
        base_angle: z.norm(),
        theta: reduce_angle(z.arg()),
        ..*p
    }
}

/// Draw a centered perturbation of total width `delta` on each quadrature.
pub fn perturb<R: Rng + ?Sized>(p: &Pulse, delta: f64, rng: &mut R) -> Pulse {
    perturb_in(p, delta, NoiseInterval::Centered, rng)
}

pub fn perturb_in<R: Rng + ?Sized>(
    p: &Pulse,
    delta: f64,
    interval: NoiseInterval,
    rng: &mut R,
) -> Pulse {
    if delta == 0.0 {
        return *p;
    }
    let (lo, hi) = interval.bounds(delta);
    let u_re = rng.random_range(lo..=hi);
    let u_im = rng.random_range(lo..=hi);
    perturb_with(p, u_re, u_im)
}

fn run_rng(seed: u64, delta_index: usize, run: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((delta_index as u64) << 32) | run as u64);
    rng
}

fn single_run(
    seq: &PulseSequence,
    target: &TargetState,
    spec: &NoiseSpec,
    delta_index: usize,
    run: usize,
) -> Result<f64> {
    let mut rng = run_rng(spec.seed, delta_index, run);
    let mut state = CompositeState::vacuum(seq.j_max);
    for p in &seq.pulses {
        let noisy = perturb_in(p, spec.delta, spec.interval, &mut rng);
        crate::channels::apply_pulse(&mut state, &noisy)?;
    }
    fidelity_single(&state, target, Level::A)
}

fn check_inputs(seq: &PulseSequence, target: &TargetState) -> Result<()> {
    if seq.direction != Direction::Prepare {
        return Err(Error::WrongDirection {
            expected: Direction::Prepare.as_str(),
            got: seq.direction.as_str(),
        });
    }
    if seq.j_max < target.j_max() {
        return Err(Error::DimensionMismatch {
            left: seq.j_max,
            right: target.j_max(),
        });
    }
    Ok(())
}

fn report_at(
    seq: &PulseSequence,
    target: &TargetState,
    spec: &NoiseSpec,
    delta_index: usize,
) -> Result<FidelityReport> {
    spec.validate()?;
    let fidelities = (0..spec.runs)
        .into_par_iter()
        .map(|run| single_run(seq, target, spec, delta_index, run))
        .collect::<Result<Vec<f64>>>()?;
    let n = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / n;
    let std_error = if fidelities.len() > 1 {
        let var = fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(FidelityReport {
        delta: spec.delta,
        mean_fidelity: mean.clamp(0.0, 1.0),
        std_error,
        runs: spec.runs,
        seed: spec.seed,
        rng: RNG_ALGORITHM.to_string(),
        interval: spec.interval,
    })
}

/// Average preparation fidelity over `spec.runs` noisy realizations.
pub fn run_noisy(seq: &PulseSequence, target: &TargetState, spec: &NoiseSpec) -> Result<FidelityReport> {
    check_inputs(seq, target)?;
    report_at(seq, target, spec, 0)
}

/// One report per noise range, each on its own RNG substream.
pub fn sweep(
    seq: &PulseSequence,
    target: &TargetState,
    deltas: &[f64],
    runs: usize,
    seed: u64,
) -> Result<Vec<FidelityReport>> {
    sweep_with(seq, target, deltas, runs, seed, NoiseInterval::default())
}

pub fn sweep_with(
    seq: &PulseSequence,
    target: &TargetState,
    deltas: &[f64],
    runs: usize,
    seed: u64,
    interval: NoiseInterval,
) -> Result<Vec<FidelityReport>> {
    check_inputs(seq, target)?;
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("at least one delta is required".into()));
    }
    deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let spec = NoiseSpec {
                delta,
                runs,
                seed,
                interval,
            };
            report_at(seq, target, &spec, i)
        })
        .collect()
}
