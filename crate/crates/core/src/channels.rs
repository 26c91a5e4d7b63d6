//! The five interaction channels.
//!
//! Every channel couples basis vectors in disjoint pairs, so its propagator is
//! a direct sum of 2×2 rotations. For a pair `(u, v)` where `u` carries the
//! lower internal level, the generator is
//! `rel(u) · (e^{-iθ} |u⟩⟨v| + e^{iθ} |v⟩⟨u|)` and a pulse of area `φ = |g| t`
//! applies
//!
//! ```text
//! u' =  cos(x) u − i e^{-iθ} sin(x) v
//! v' = −i e^{iθ} sin(x) u + cos(x) v,      x = φ · rel(u)
//! ```
//!
//! | id | coupling                          | kind                    |
//! |----|-----------------------------------|-------------------------|
//! | 1  | `(m,n,a) ↔ (m,n,b)`               | carrier `a–b`           |
//! | 2  | `(m,n,b) ↔ (m,n,c)`               | carrier `b–c`           |
//! | 3  | `(m,n,a) ↔ (m+1,n−1,b)`           | two-mode Raman exchange |
//! | 4  | `(m,n,b) ↔ (m+1,n−1,c)`           | two-mode Raman exchange |
//! | 5  | `(m,n,a) ↔ (m−1,n,b)`             | red sideband in `x`     |

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{offset_unchecked, BasisIndex, CompositeState, Level};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Channel {
    CarrierAb = 1,
    CarrierBc = 2,
    ExchangeAb = 3,
    ExchangeBc = 4,
    SidebandX = 5,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::CarrierAb,
        Channel::CarrierBc,
        Channel::ExchangeAb,
        Channel::ExchangeBc,
        Channel::SidebandX,
    ];

    #[inline]
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Channel::CarrierAb),
            2 => Ok(Channel::CarrierBc),
            3 => Ok(Channel::ExchangeAb),
            4 => Ok(Channel::ExchangeBc),
            5 => Ok(Channel::SidebandX),
            _ => Err(Error::UnknownChannel(id)),
        }
    }

    /// (source level, partner level) of each coupled pair.
    #[inline]
    pub fn levels(self) -> (Level, Level) {
        match self {
            Channel::CarrierAb | Channel::ExchangeAb | Channel::SidebandX => (Level::A, Level::B),
            Channel::CarrierBc | Channel::ExchangeBc => (Level::B, Level::C),
        }
    }

    /// Vibrational partner of a source lattice point, ignoring the triangle bound.
    #[inline]
    fn shift(self, m: usize, n: usize) -> Option<(usize, usize)> {
        match self {
            Channel::CarrierAb | Channel::CarrierBc => Some((m, n)),
            Channel::ExchangeAb | Channel::ExchangeBc => (n >= 1).then(|| (m + 1, n - 1)),
            Channel::SidebandX => (m >= 1).then(|| (m - 1, n)),
        }
    }

    /// Inverse of [`Channel::shift`]: the source lattice point of a partner.
    #[inline]
    fn unshift(self, m: usize, n: usize) -> Option<(usize, usize)> {
        match self {
            Channel::CarrierAb | Channel::CarrierBc => Some((m, n)),
            Channel::ExchangeAb | Channel::ExchangeBc => (m >= 1).then(|| (m - 1, n + 1)),
            Channel::SidebandX => Some((m + 1, n)),
        }
    }
}

impl TryFrom<u8> for Channel {
    type Error = Error;
    fn try_from(id: u8) -> Result<Self> {
        Channel::from_id(id)
    }
}

impl From<Channel> for u8 {
    fn from(c: Channel) -> u8 {
        c.id()
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// How coupling matrix elements depend on the vibrational quantum numbers.
#[derive(Copy, Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RabiRegime {
    #[default]
    LambDicke,
    Nonlinear { eps_x: f64, eps_y: f64 },
}

impl RabiRegime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RabiRegime::LambDicke => Ok(()),
            RabiRegime::Nonlinear { eps_x, eps_y } => {
                let ok = |e: f64| e > 0.0 && e < 1.0;
                if ok(eps_x) && ok(eps_y) {
                    Ok(())
                } else {
                    Err(Error::InvalidRegime(format!(
                        "Lamb-Dicke parameters must lie in (0, 1), got eps_x={eps_x}, eps_y={eps_y}"
                    )))
                }
            }
        }
    }

    /// Regime actually used for pulses on `channel`: the nonlinear element is
    /// only known for the two-mode exchange channels.
    pub fn for_channel(self, channel: Channel) -> RabiRegime {
        match (self, channel) {
            (RabiRegime::Nonlinear { .. }, Channel::ExchangeAb | Channel::ExchangeBc) => self,
            _ => RabiRegime::LambDicke,
        }
    }
}

/// One elementary unitary: a pulse of area `base_angle = |g| t` and laser
/// phase `theta` on a single channel, labelled by the component it cancels.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Pulse {
    pub channel: Channel,
    pub cancel: BasisIndex,
    pub theta: f64,
    pub base_angle: f64,
    pub regime: RabiRegime,
}

impl Pulse {
    pub fn new(
        channel: Channel,
        cancel: BasisIndex,
        theta: f64,
        base_angle: f64,
        regime: RabiRegime,
    ) -> Self {
        Pulse {
            channel,
            cancel,
            theta: reduce_angle(theta),
            base_angle,
            regime,
        }
    }

    /// Complex pulse area `|g| t · e^{iθ}`.
    pub fn area(&self) -> C64 {
        C64::from_polar(self.base_angle, self.theta)
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Partner of `b` under `channel`, or `None` if `b` is not coupled or the
/// partner would leave the triangle `m + n <= j_max`.
pub fn coupled_partner(channel: Channel, b: BasisIndex, j_max: usize) -> Option<BasisIndex> {
    if b.quanta() > j_max {
        return None;
    }
    let (lo, hi) = channel.levels();
    let partner = if b.level == lo {
        let (m, n) = channel.shift(b.m, b.n)?;
        BasisIndex::new(m, n, hi)
    } else if b.level == hi {
        let (m, n) = channel.unshift(b.m, b.n)?;
        BasisIndex::new(m, n, lo)
    } else {
        return None;
    };
    (partner.quanta() <= j_max).then_some(partner)
}

/// True when `b` sits on the source (lower-level) side of its pair.
#[inline]
pub fn is_source(channel: Channel, b: BasisIndex) -> bool {
    b.level == channel.levels().0
}

/// Associated Laguerre polynomial `L¹_m(x)` by the three-term recurrence.
pub fn laguerre_assoc1(m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 - x;
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 2.0 - x) * cur - (k + 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Dimensionless factor multiplying `|g| t` for the pair whose source is
/// `source`. Beyond the Lamb-Dicke limit the factor may be zero or negative.
pub fn relative_rabi(channel: Channel, source: BasisIndex, regime: RabiRegime) -> Result<f64> {
    let (m, n) = (source.m, source.n);
    match (channel, regime) {
        (Channel::CarrierAb | Channel::CarrierBc, _) => Ok(1.0),
        (Channel::ExchangeAb | Channel::ExchangeBc, RabiRegime::LambDicke) => {
            Ok((((m + 1) * n) as f64).sqrt())
        }
        (Channel::ExchangeAb | Channel::ExchangeBc, RabiRegime::Nonlinear { eps_x, eps_y }) => {
            if n == 0 {
                return Ok(0.0);
            }
            let (x, y) = (eps_x * eps_x, eps_y * eps_y);
            let debye_waller = (-(x + y) / 2.0).exp();
            Ok(debye_waller * laguerre_assoc1(m, x) * laguerre_assoc1(n - 1, y)
                / (((m + 1) * n) as f64).sqrt())
        }
        (Channel::SidebandX, RabiRegime::LambDicke) => Ok((m as f64).sqrt()),
        (Channel::SidebandX, RabiRegime::Nonlinear { .. }) => Err(Error::UnsupportedRegime {
            channel: channel.id(),
        }),
    }
}

/// Apply `pulse` to every coupled pair of `state` simultaneously.
pub fn apply_pulse(state: &mut CompositeState, pulse: &Pulse) -> Result<()> {
    let channel = pulse.channel;
    if pulse.base_angle == 0.0 {
        return Ok(());
    }
    let j_max = state.j_max();
    let (lo, hi) = channel.levels();
    let phase = C64::from_polar(1.0, -pulse.theta);
    let minus_i = C64::new(0.0, -1.0);
    let to_partner = minus_i * phase.conj();
    let to_source = minus_i * phase;

    // Carriers share one angle for every pair.
    let uniform = match channel {
        Channel::CarrierAb | Channel::CarrierBc => Some(pulse.base_angle.sin_cos()),
        _ => None,
    };

    let amps = state.amplitudes_mut();
    for j in 0..=j_max {
        for m in 0..=j {
            let n = j - m;
            let Some((pm, pn)) = channel.shift(m, n) else {
                continue;
            };
            if pm + pn > j_max {
                continue;
            }
            let (s, c) = match uniform {
                Some(sc) => sc,
                None => {
                    let rel = relative_rabi(channel, BasisIndex::new(m, n, lo), pulse.regime)?;
                    (pulse.base_angle * rel).sin_cos()
                }
            };
            let iu = offset_unchecked(m, n, lo);
            let iv = offset_unchecked(pm, pn, hi);
            let (u, v) = (amps[iu], amps[iv]);
            amps[iu] = u * c + to_source * (v * s);
            amps[iv] = to_partner * (u * s) + v * c;
        }
    }
    Ok(())
}

/// Functional form of [`apply_pulse`].
pub fn applied(state: &CompositeState, pulse: &Pulse) -> Result<CompositeState> {
    let mut s = state.clone();
    apply_pulse(&mut s, pulse)?;
    Ok(s)
}

/// The same pulse with the laser phase shifted by `π`, which inverts it.
pub fn inverse(p: &Pulse) -> Pulse {
    Pulse {
        theta: reduce_angle(p.theta + PI),
        ..*p
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityParams {
    pub g_mag: f64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub m_max: usize,
    pub n_max: usize,
    pub margin: f64,
}

pub const DEFAULT_FEASIBILITY_MARGIN: f64 = 0.1;
/// Minimum ratio between the larger and the smaller trap frequency.
pub const MIN_TRAP_ANISOTROPY: f64 = 5.0;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `|g| ε_x ε_y max(N, M) / min(ν_x, ν_y)`.
    pub coupling_ratio: f64,
    pub margin: f64,
    pub coupling_pass: bool,
    /// `max(ν_x, ν_y) / min(ν_x, ν_y)`.
    pub anisotropy: f64,
    pub min_anisotropy: f64,
    pub anisotropy_pass: bool,
    pub pass: bool,
}

/// Validity check for the second rotating-wave approximation at trap frequencies.
pub fn check_feasibility(fp: &FeasibilityParams) -> FeasibilityReport {
    let nu_min = fp.nu_x.min(fp.nu_y);
    let nu_max = fp.nu_x.max(fp.nu_y);
    let cutoff = fp.m_max.max(fp.n_max) as f64;
    let coupling_ratio = fp.g_mag * fp.eps_x * fp.eps_y * cutoff / nu_min;
    let anisotropy = nu_max / nu_min;
    let coupling_pass = coupling_ratio <= fp.margin;
    let anisotropy_pass = anisotropy >= MIN_TRAP_ANISOTROPY;
    FeasibilityReport {
        coupling_ratio,
        margin: fp.margin,
        coupling_pass,
        anisotropy,
        min_anisotropy: MIN_TRAP_ANISOTROPY,
        anisotropy_pass,
        pass: coupling_pass && anisotropy_pass,
    }
}
