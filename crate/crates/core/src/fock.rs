//! Composite Hilbert space of two vibrational modes and a three-level ion.
//!
//! Basis vectors are `|m, n⟩ ⊗ |i⟩` with `m + n <= j_max` and `i ∈ {a, b, c}`.
//! Amplitudes are stored densely, ordered by total quanta `J = m + n`, then by
//! `m`, then by internal level. The layout is part of the file formats and
//! must not change.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for normalization checks throughout the crate.
pub const NORM_TOL: f64 = 1e-12;

/// Internal electronic level of the ion.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    A,
    B,
    C,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A, Level::B, Level::C];

    #[inline]
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(k: usize) -> Option<Level> {
        Level::ALL.get(k).copied()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::A => "a",
            Level::B => "b",
            Level::C => "c",
        })
    }
}

/// A basis vector `|m, n⟩ ⊗ |level⟩`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub m: usize,
    pub n: usize,
    pub level: Level,
}

impl BasisIndex {
    pub const fn new(m: usize, n: usize, level: Level) -> Self {
        BasisIndex { m, n, level }
    }

    /// Total number of vibrational quanta.
    #[inline]
    pub fn quanta(&self) -> usize {
        self.m + self.n
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}⟩", self.m, self.n, self.level)
    }
}

/// Number of vibrational lattice points with `m + n <= j_max`.
#[inline]
pub fn lattice_points(j_max: usize) -> usize {
    (j_max + 1) * (j_max + 2) / 2
}

/// Dimension of the composite space: three levels per lattice point.
#[inline]
pub fn dim(j_max: usize) -> usize {
    3 * lattice_points(j_max)
}

#[inline]
pub(crate) fn offset_unchecked(m: usize, n: usize, level: Level) -> usize {
    let j = m + n;
    3 * (j * (j + 1) / 2 + m) + level.ordinal()
}

pub fn index_of(b: BasisIndex, j_max: usize) -> Result<usize> {
    if b.quanta() > j_max {
        return Err(Error::IndexOutOfRange { index: b, j_max });
    }
    Ok(offset_unchecked(b.m, b.n, b.level))
}

pub fn inverse_index(offset: usize, j_max: usize) -> Result<BasisIndex> {
    let d = dim(j_max);
    if offset >= d {
        return Err(Error::OffsetOutOfRange { offset, dim: d });
    }
    let level = Level::from_ordinal(offset % 3).expect("remainder is below 3");
    let point = offset / 3;
    // Largest J with J(J+1)/2 <= point.
    let mut j = ((((8 * point + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while j * (j + 1) / 2 > point {
        j -= 1;
    }
    while (j + 1) * (j + 2) / 2 <= point {
        j += 1;
    }
    let m = point - j * (j + 1) / 2;
    Ok(BasisIndex::new(m, j - m, level))
}

/// Pure state of the vibrational ⊗ internal system.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    j_max: usize,
    amplitudes: Vec<C64>,
}

impl CompositeState {
    pub fn zeros(j_max: usize) -> Self {
        CompositeState {
            j_max,
            amplitudes: vec![C64::new(0.0, 0.0); dim(j_max)],
        }
    }

    /// `|0,0⟩ ⊗ |a⟩`.
    pub fn vacuum(j_max: usize) -> Self {
        let mut s = Self::zeros(j_max);
        s.amplitudes[0] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_amplitudes(j_max: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dim(j_max) {
            return Err(Error::CoefficientCount {
                got: amplitudes.len(),
                expected: dim(j_max),
            });
        }
        Ok(CompositeState { j_max, amplitudes })
    }

    pub fn basis(j_max: usize, b: BasisIndex) -> Result<Self> {
        let mut s = Self::zeros(j_max);
        let k = index_of(b, j_max)?;
        s.amplitudes[k] = C64::new(1.0, 0.0);
        Ok(s)
    }

    #[inline]
    pub fn j_max(&self) -> usize {
        self.j_max
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    /// Amplitude of `b`, or zero when `b` lies outside the triangle.
    pub fn get(&self, b: BasisIndex) -> C64 {
        if b.quanta() > self.j_max {
            return C64::new(0.0, 0.0);
        }
        self.amplitudes[offset_unchecked(b.m, b.n, b.level)]
    }

    pub fn set(&mut self, b: BasisIndex, value: C64) -> Result<()> {
        let k = index_of(b, self.j_max)?;
        self.amplitudes[k] = value;
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn overlap(&self, other: &CompositeState) -> Result<C64> {
        if self.j_max != other.j_max {
            return Err(Error::DimensionMismatch {
                left: self.j_max,
                right: other.j_max,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Mean number of vibrational quanta, `Σ |Q_{m,n;i}|² (m + n)`.
    pub fn mean_quanta(&self) -> f64 {
        (0..=self.j_max)
            .map(|j| j as f64 * self.subspace_probability(j))
            .sum()
    }

    /// Probability carried by the subspace `H_J ⊗ H_in`.
    pub fn subspace_probability(&self, j: usize) -> f64 {
        if j > self.j_max {
            return 0.0;
        }
        let start = 3 * (j * (j + 1) / 2);
        let end = start + 3 * (j + 1);
        self.amplitudes[start..end].iter().map(|z| z.norm_sqr()).sum()
    }

    /// Probability on a given internal level, summed over the lattice.
    pub fn level_probability(&self, level: Level) -> f64 {
        self.amplitudes
            .iter()
            .skip(level.ordinal())
            .step_by(3)
            .map(|z| z.norm_sqr())
            .sum()
    }
}

/// Two-mode target `Σ Q_mn |m, n⟩` on the rectangle `m <= m_max`, `n <= n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetState {
    m_max: usize,
    n_max: usize,
    /// Row-major, `m * (n_max + 1) + n`.
    coefficients: Vec<C64>,
}

impl TargetState {
    /// Build a target from an already normalized table.
    pub fn new(m_max: usize, n_max: usize, coefficients: Vec<C64>) -> Result<Self> {
        let t = Self::unchecked(m_max, n_max, coefficients)?;
        let norm = t.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(t)
    }

    /// Build a target, rescaling to unit norm. Returns the state and the
    /// original norm (the factor that was divided out).
    pub fn normalized(m_max: usize, n_max: usize, coefficients: Vec<C64>) -> Result<(Self, f64)> {
        let mut t = Self::unchecked(m_max, n_max, coefficients)?;
        let norm = t.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            t.coefficients.iter_mut().for_each(|z| *z /= norm);
            Ok((t, norm))
        } else {
            Ok((t, 1.0))
        }
    }

    fn unchecked(m_max: usize, n_max: usize, coefficients: Vec<C64>) -> Result<Self> {
        let expected = (m_max + 1) * (n_max + 1);
        if coefficients.len() != expected {
            return Err(Error::CoefficientCount {
                got: coefficients.len(),
                expected,
            });
        }
        Ok(TargetState {
            m_max,
            n_max,
            coefficients,
        })
    }

    /// A single Fock component `|m, n⟩`.
    pub fn fock(m: usize, n: usize) -> Self {
        let mut coefficients = vec![C64::new(0.0, 0.0); (m + 1) * (n + 1)];
        coefficients[m * (n + 1) + n] = C64::new(1.0, 0.0);
        TargetState {
            m_max: m,
            n_max: n,
            coefficients,
        }
    }

    #[inline]
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Size of the triangle needed to host the target.
    #[inline]
    pub fn j_max(&self) -> usize {
        self.m_max + self.n_max
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        if m > self.m_max || n > self.n_max {
            return C64::new(0.0, 0.0);
        }
        self.coefficients[m * (self.n_max + 1) + n]
    }

    /// Iterate `(m, n, Q_mn)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let w = self.n_max + 1;
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(k, &q)| (k / w, k % w, q))
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn nonzero_count(&self) -> usize {
        self.coefficients.iter().filter(|z| z.norm_sqr() > 0.0).count()
    }

    /// `Σ |Q_mn|² (m + n)`.
    pub fn mean_quanta(&self) -> f64 {
        self.iter().map(|(m, n, q)| q.norm_sqr() * (m + n) as f64).sum()
    }

    /// `|target⟩ ⊗ |level⟩` in a space of `j_max = m_max + n_max`.
    pub fn embed(&self, level: Level) -> CompositeState {
        let mut s = CompositeState::zeros(self.j_max());
        for (m, n, q) in self.iter() {
            s.amplitudes[offset_unchecked(m, n, level)] = q;
        }
        s
    }
}

pub fn embed_target(t: &TargetState, level: Level) -> CompositeState {
    t.embed(level)
}

/// `|⟨s | target ⊗ level⟩|²`. `s` may live in a larger triangle than the target.
pub fn fidelity_single(s: &CompositeState, t: &TargetState, level: Level) -> Result<f64> {
    if s.j_max() < t.j_max() {
        return Err(Error::DimensionMismatch {
            left: s.j_max(),
            right: t.j_max(),
        });
    }
    let amp: C64 = t
        .iter()
        .map(|(m, n, q)| s.amplitudes[offset_unchecked(m, n, level)].conj() * q)
        .sum();
    Ok(amp.norm_sqr().min(1.0))
}
