//! Exactly solvable dephasing system-bath models for cavity optomechanics.
//!
//! A two-level system (or a cavity photon ladder) couples to a bath of
//! harmonic modes through an interaction that commutes with the system
//! Hamiltonian. Populations never change, so the system's effective energy
//! is a closed-form Fourier series over the bath modes. Choosing the bath's
//! initial amplitudes and phases on an odd-harmonic comb turns that series
//! into a square wave, and the square wave's plateaus and jumps form a
//! four-stroke cycle.
//!
//! Modules:
//!
//! * [`fockspace`]: dense truncated-Fock numerics, used as a brute-force
//!   oracle for every closed form.
//! * [`analytic`]: the closed-form energy traces.
//! * [`bathdesign`]: inverse design of the bath for a square-wave target.
//! * [`thermocycle`]: stroke segmentation and heat bookkeeping.
//! * [`cli`]: scenario configs, CSV/JSON emitters and the command-line runner.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bathdesign;
pub mod cli;
mod error;
pub mod fockspace;
pub mod quadrature;
pub mod thermocycle;

pub use analytic::{CavitySpec, EnergyTrace, ModeSpec, TraceKind, TwoLevelSpec};
pub use bathdesign::{CouplingProfile, SpectralDensity, SquareWaveDesign};
pub use error::{Error, Result};
pub use thermocycle::{CycleReport, Stroke, StrokeKind};

/// Library version echoed into every emitted file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
