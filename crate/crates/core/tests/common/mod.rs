#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomode::{Channel, Complex64 as C64, CompositeState, Level, TargetState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Dense normalized target with every coefficient populated.
pub fn random_target<R: Rng>(rng: &mut R, m_max: usize, n_max: usize) -> TargetState {
    let coefficients = (0..(m_max + 1) * (n_max + 1))
        .map(|_| random_c64(rng))
        .collect();
    TargetState::normalized(m_max, n_max, coefficients).unwrap().0
}

pub fn random_state<R: Rng>(rng: &mut R, j_max: usize) -> CompositeState {
    let d = twomode::dim(j_max);
    let amps: Vec<C64> = (0..d).map(|_| random_c64(rng)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CompositeState::from_amplitudes(j_max, amps.into_iter().map(|z| z / norm).collect()).unwrap()
}

/// Basis enumeration written out independently of the library's indexing:
/// J ascending, m ascending, level a, b, c.
pub struct Basis {
    pub j_max: usize,
    pub labels: Vec<(usize, usize, usize)>,
    pub lookup: HashMap<(usize, usize, usize), usize>,
}

impl Basis {
    pub fn new(j_max: usize) -> Self {
        let mut labels = Vec::new();
        for j in 0..=j_max {
            for m in 0..=j {
                for level in 0..3 {
                    labels.push((m, j - m, level));
                }
            }
        }
        let lookup = labels.iter().enumerate().map(|(k, &l)| (l, k)).collect();
        Basis { j_max, labels, lookup }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Raising part of each channel Hamiltonian (lower level to upper level),
/// built from truncated ladder operators.
pub fn raising_operator(basis: &Basis, channel: Channel) -> DMatrix<C64> {
    let d = basis.dim();
    let mut op = DMatrix::<C64>::zeros(d, d);
    let (lo, hi) = match channel {
        Channel::CarrierAb | Channel::ExchangeAb | Channel::SidebandX => (0, 1),
        Channel::CarrierBc | Channel::ExchangeBc => (1, 2),
    };
    for (col, &(m, n, level)) in basis.labels.iter().enumerate() {
        if level != lo {
            continue;
        }
        // (target m, target n, matrix element)
        let image = match channel {
            Channel::CarrierAb | Channel::CarrierBc => Some((m, n, 1.0)),
            // a_x† a_y
            Channel::ExchangeAb | Channel::ExchangeBc => {
                (n >= 1).then(|| (m + 1, n - 1, ((n as f64).sqrt()) * ((m + 1) as f64).sqrt()))
            }
            // a_x
            Channel::SidebandX => (m >= 1).then(|| (m - 1, n, (m as f64).sqrt())),
        };
        if let Some((tm, tn, amp)) = image {
            if let Some(&row) = basis.lookup.get(&(tm, tn, hi)) {
                op[(row, col)] = C64::new(amp, 0.0);
            }
        }
    }
    op
}

/// `exp(−i φ (e^{iθ} O + e^{−iθ} O†))` by Padé scaling and squaring.
pub fn channel_propagator(basis: &Basis, channel: Channel, theta: f64, base_angle: f64) -> DMatrix<C64> {
    let o = raising_operator(basis, channel);
    let h = o.map(|z| z * C64::from_polar(1.0, theta)) + o.adjoint().map(|z| z * C64::from_polar(1.0, -theta));
    (h * C64::new(0.0, -base_angle)).exp()
}

pub fn to_vector(basis: &Basis, s: &CompositeState) -> nalgebra::DVector<C64> {
    let mut v = nalgebra::DVector::<C64>::zeros(basis.dim());
    for (k, &(m, n, level)) in basis.labels.iter().enumerate() {
        let level = Level::from_ordinal(level).unwrap();
        v[k] = s.get(twomode::BasisIndex::new(m, n, level));
    }
    v
}

/// Series definition of `L¹_m(x) = Σ_k (−1)^k C(m+1, m−k) x^k / k!`.
pub fn laguerre_series(m: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..=m {
        let mut binom = 1.0;
        for i in 0..(m - k) {
            binom *= (m + 1 - i) as f64 / (i + 1) as f64;
        }
        let mut fact = 1.0;
        for i in 1..=k {
            fact *= i as f64;
        }
        total += if k % 2 == 0 { 1.0 } else { -1.0 } * binom * x.powi(k as i32) / fact;
    }
    total
}
