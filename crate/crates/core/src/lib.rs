//! Deterministic synthesis of arbitrary two-mode vibrational states of a
//! trapped ion.
//!
//! The ion's two vibrational modes are coupled to three internal levels
//! `a`, `b`, `c` through five laser-driven channels. A target state is compiled
//! into a pulse sequence by de-evolving `|target⟩ ⊗ |a⟩` to `|0,0⟩ ⊗ |a⟩`
//! ([`synth::de_evolve`]); reversing that sequence with inverted laser phases
//! prepares the target from the ground state ([`synth::preparation_sequence`]).
//! [`noise`] estimates preparation fidelity when the pulse areas fluctuate.
//!
//! ```
//! use twomode::{cat_state, de_evolve, preparation_sequence, run_noisy, Complex64, NoiseSpec, RabiRegime};
//!
//! # fn main() -> twomode::Result<()> {
//! let target = cat_state(Complex64::new(2.0, 0.0), 6, 6)?;
//! let result = de_evolve(&target, RabiRegime::LambDicke)?;
//! let prepare = preparation_sequence(&result);
//! let report = run_noisy(&prepare, &target, &NoiseSpec::new(0.0, 4, 7))?;
//! assert!(report.mean_fidelity > 1.0 - 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod channels;
pub mod error;
pub mod fock;
pub mod io;
pub mod noise;
pub mod synth;
pub mod targets;

pub use channels::{
    apply_pulse, check_feasibility, coupled_partner, inverse, laguerre_assoc1, relative_rabi,
    Channel, FeasibilityParams, FeasibilityReport, Pulse, RabiRegime,
};
pub use error::{Error, Result};
pub use fock::{
    dim, embed_target, fidelity_single, index_of, inverse_index, BasisIndex, CompositeState,
    Level, TargetState,
};
pub use noise::{run_noisy, sweep, FidelityReport, NoiseInterval, NoiseSpec};
pub use synth::{
    de_evolve, op_count_expected, preparation_sequence, solve_cancellation, Direction,
    PulseSequence, SynthesisResult,
};
pub use targets::{cat_state, correlated_state, truncate_cutoffs, TargetKind, TargetSpec};

pub use num_complex::Complex64;
