//! Recursive de-evolution compiler.
//!
//! Starting from `|target⟩ ⊗ |a⟩`, the compiler empties the highest occupied
//! subspace `H_J ⊗ H_in` and hands its population down to `H_{J-1}`:
//!
//! * `A_J`: channels 3 and 1 gather all of `H_J` into `|J,0,a⟩`;
//! * `B_{J-1}`: channels 2 and 4 clear level `c` and all of level `b` except
//!   `|J-1,0,b⟩` in `H_{J-1}`, so that the next step cannot leak back up;
//! * `C_J`: channel 5 moves `|J,0,a⟩` into `|J-1,0,b⟩`.
//!
//! A final carrier pulse on `|0,0,b⟩` leaves the vacuum. Each pulse is solved
//! against the live state and applied immediately, so the compiled sequence is
//! exact for whatever amplitudes the earlier pulses produced.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_pulse, coupled_partner, inverse, is_source, relative_rabi, Channel, Pulse, RabiRegime,
};
use crate::error::{Error, Result};
use crate::fock::{BasisIndex, CompositeState, Level, TargetState};

/// Amplitudes below this magnitude are treated as already cancelled.
pub const SKIP_TOL: f64 = 1e-14;
/// Pair couplings below this magnitude cannot drive a transfer.
pub const RABI_TOL: f64 = 1e-12;
/// Largest residual vacuum infidelity accepted from [`de_evolve`].
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Deevolve,
    Prepare,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Deevolve => "deevolve",
            Direction::Prepare => "prepare",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pub direction: Direction,
    pub j_max: usize,
    pub regime: RabiRegime,
    /// Application order.
    pub pulses: Vec<Pulse>,
    /// Slots whose amplitude was already zero and produced no pulse.
    pub skipped: usize,
}

impl PulseSequence {
    /// Emitted plus skipped pulse slots.
    pub fn slots(&self) -> usize {
        self.pulses.len() + self.skipped
    }

    pub fn apply(&self, state: &mut CompositeState) -> Result<()> {
        if state.j_max() != self.j_max {
            return Err(Error::DimensionMismatch {
                left: state.j_max(),
                right: self.j_max,
            });
        }
        self.pulses.iter().try_for_each(|p| apply_pulse(state, p))
    }

    /// Run a `prepare` sequence on `|0,0,a⟩`.
    pub fn prepare_from_vacuum(&self) -> Result<CompositeState> {
        if self.direction != Direction::Prepare {
            return Err(Error::WrongDirection {
                expected: Direction::Prepare.as_str(),
                got: self.direction.as_str(),
            });
        }
        let mut s = CompositeState::vacuum(self.j_max);
        self.apply(&mut s)?;
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub sequence: PulseSequence,
    /// `1 − |⟨0,0,a|Ψ⟩|²` after de-evolution.
    pub residual_vacuum_infidelity: f64,
    /// Phase of the final vacuum amplitude. Preparation reproduces the target
    /// multiplied by `e^{-i·global_phase}`.
    pub global_phase: f64,
}

/// Which member of its coupled pair the cancelled component is.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CancelSide {
    /// The lower-level member (`u` in the rotation convention).
    Source,
    /// The upper-level member (`v`).
    Partner,
}

/// Pulse phase and area that zero `q_cancel` by rotating it into `q_partner`.
///
/// Returns `None` when the pair coupling is too weak to move a nonzero
/// amplitude. A negative coupling is absorbed into the phase.
pub fn solve_cancellation(
    q_cancel: C64,
    q_partner: C64,
    rel_rabi: f64,
    side: CancelSide,
) -> Option<(f64, f64)> {
    let c = q_cancel.norm();
    if c < SKIP_TOL {
        return Some((0.0, 0.0));
    }
    if rel_rabi.is_nan() || rel_rabi.abs() <= RABI_TOL {
        return None;
    }
    let p = q_partner.norm();
    let arg_p = if p == 0.0 { 0.0 } else { q_partner.arg() };
    let relative = arg_p - q_cancel.arg() + FRAC_PI_2;
    let mut theta = match side {
        CancelSide::Source => relative,
        CancelSide::Partner => -relative,
    };
    if rel_rabi < 0.0 {
        theta += PI;
    }
    let base_angle = c.atan2(p) / rel_rabi.abs();
    Some((crate::channels::reduce_angle(theta), base_angle))
}

/// Pulses emitted by one operator block, in application order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Block {
    pub pulses: Vec<Pulse>,
    pub skipped: usize,
}

impl Block {
    fn slot(
        &mut self,
        state: &mut CompositeState,
        channel: Channel,
        cancel: BasisIndex,
        regime: RabiRegime,
    ) -> Result<()> {
        let q_cancel = state.get(cancel);
        if q_cancel.norm() < SKIP_TOL {
            self.skipped += 1;
            return Ok(());
        }
        let partner = coupled_partner(channel, cancel, state.j_max()).ok_or(Error::NoPartner {
            channel: channel.id(),
            cancel,
        })?;
        let (side, source) = if is_source(channel, cancel) {
            (CancelSide::Source, cancel)
        } else {
            (CancelSide::Partner, partner)
        };
        let regime = regime.for_channel(channel);
        let rel = relative_rabi(channel, source, regime)?;
        let (theta, base_angle) = solve_cancellation(q_cancel, state.get(partner), rel, side)
            .ok_or(Error::PulseInfeasible {
                channel: channel.id(),
                cancel,
                rel_rabi: rel,
                amplitude: q_cancel.norm(),
            })?;
        let pulse = Pulse::new(channel, cancel, theta, base_angle, regime);
        apply_pulse(state, &pulse)?;
        self.pulses.push(pulse);
        Ok(())
    }
}

/// `A_J`: gather the population of `H_J ⊗ H_in` into `|J,0,a⟩`.
pub fn build_a(j: usize, state: &mut CompositeState, regime: RabiRegime) -> Result<Block> {
    let mut block = Block::default();
    for k in 0..j {
        block.slot(state, Channel::ExchangeAb, BasisIndex::new(k, j - k, Level::A), regime)?;
        block.slot(state, Channel::CarrierAb, BasisIndex::new(k + 1, j - k - 1, Level::B), regime)?;
    }
    Ok(block)
}

/// `B_J`: leave only level `a` and `|J,0,b⟩` in `H_J ⊗ H_in`.
pub fn build_b(j: usize, state: &mut CompositeState, regime: RabiRegime) -> Result<Block> {
    let mut block = Block::default();
    for k in 0..=j {
        block.slot(state, Channel::CarrierBc, BasisIndex::new(k, j - k, Level::C), regime)?;
        if k < j {
            block.slot(state, Channel::ExchangeBc, BasisIndex::new(k, j - k, Level::B), regime)?;
        }
    }
    Ok(block)
}

/// `C_J`: move `|J,0,a⟩` down into `|J-1,0,b⟩`.
pub fn build_c(j: usize, state: &mut CompositeState, regime: RabiRegime) -> Result<Block> {
    let mut block = Block::default();
    block.slot(state, Channel::SidebandX, BasisIndex::new(j, 0, Level::A), regime)?;
    Ok(block)
}

/// `A_0`: a single carrier pulse on `|0,0,b⟩`.
pub fn build_a0(state: &mut CompositeState, regime: RabiRegime) -> Result<Block> {
    let mut block = Block::default();
    block.slot(state, Channel::CarrierAb, BasisIndex::new(0, 0, Level::B), regime)?;
    Ok(block)
}

/// Compile `target` into a sequence mapping `|target⟩ ⊗ |a⟩` to `|0,0,a⟩`.
pub fn de_evolve(target: &TargetState, regime: RabiRegime) -> Result<SynthesisResult> {
    regime.validate()?;
    let mut state = target.embed(Level::A);
    let j_max = target.j_max();
    let mut pulses = Vec::with_capacity(op_count_expected(j_max));
    let mut skipped = 0;
    let mut absorb = |b: Block| {
        pulses.extend(b.pulses);
        skipped += b.skipped;
    };
    for j in (1..=j_max).rev() {
        absorb(build_a(j, &mut state, regime)?);
        absorb(build_b(j - 1, &mut state, regime)?);
        absorb(build_c(j, &mut state, regime)?);
    }
    absorb(build_a0(&mut state, regime)?);

    let vacuum = state.amplitudes()[0];
    let residual: f64 = state.amplitudes()[1..].iter().map(|z| z.norm_sqr()).sum();
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(Error::SynthesisFailed {
            residual,
            tolerance: RESIDUAL_TOL,
        });
    }
    Ok(SynthesisResult {
        sequence: PulseSequence {
            direction: Direction::Deevolve,
            j_max,
            regime,
            pulses,
            skipped,
        },
        residual_vacuum_infidelity: residual,
        global_phase: vacuum.arg(),
    })
}

/// Reverse a de-evolution and invert every pulse.
pub fn preparation_sequence(result: &SynthesisResult) -> PulseSequence {
    let seq = &result.sequence;
    PulseSequence {
        direction: Direction::Prepare,
        j_max: seq.j_max,
        regime: seq.regime,
        pulses: seq.pulses.iter().rev().map(inverse).collect(),
        skipped: seq.skipped,
    }
}

/// Pulse slots in a full de-evolution: `A_0` contributes one, and each `J`
/// contributes `2J` (`A_J`) + `2J − 1` (`B_{J-1}`) + 1 (`C_J`).
pub fn op_count_expected(j_max: usize) -> usize {
    1 + 2 * j_max * (j_max + 1)
}
