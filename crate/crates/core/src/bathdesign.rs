//! Inverse design of a bath whose modes make the system energy a square wave.
//!
//! The Fourier form of the energy has cosine coefficients
//! `2 eta_j (alpha_j cos phi_j + d eta_j / omega_j)` and sine coefficients
//! `2 eta_j alpha_j sin phi_j`, where `d` is the inversion (or the cavity
//! `mu`). A square wave on the odd harmonics `omega_j = (2j - 1) omega_0`
//! needs every cosine coefficient to vanish and sine coefficient `j` to be
//! `A / omega_j`. Together those fix the initial mode amplitude uniquely:
//!
//! ```text
//! alpha_j e^{i phi_j} = -d eta_j / omega_j + i A / (2 eta_j omega_j)
//! alpha_j = sqrt(4 d^2 eta_j^4 + A^2) / (2 eta_j omega_j)
//! tan phi_j = -A / (2 d eta_j^2)
//! ```
//!
//! The phase is the branch of `-arctan(A / (2 d eta_j^2))` that satisfies
//! both conditions: for `d > 0` it lies in the second quadrant, `pi` away
//! from the principal value. Both are kept; see [`SquareWaveDesign::printed_phases`].

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analytic::{ContinuumBath, FourierSeries, ModeDensity, ModeSpec, SpectralFn};
use crate::{Error, Result};

const MAX_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    Constant,
    GaussianSampled,
}

/// How the per-harmonic couplings `eta_j` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub kind: CouplingKind,
    pub mean: f64,
    #[serde(default)]
    pub std_dev: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CouplingProfile {
    pub fn constant(eta: f64) -> Self {
        Self {
            kind: CouplingKind::Constant,
            mean: eta,
            std_dev: 0.0,
            seed: 0,
        }
    }

    pub fn gaussian(mean: f64, std_dev: f64, seed: u64) -> Self {
        Self {
            kind: CouplingKind::GaussianSampled,
            mean,
            std_dev,
            seed,
        }
    }
}

/// Draws `n` couplings. Gaussian draws come from a ChaCha8 stream seeded
/// with `profile.seed`; nonpositive draws are redrawn.
pub fn sample_couplings(profile: &CouplingProfile, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "at least one coupling is required"));
    }
    if !(profile.mean > 0.0) || !profile.mean.is_finite() {
        return Err(Error::param("mean", format!("coupling mean must be positive, got {}", profile.mean)));
    }
    if !(profile.std_dev >= 0.0) || !profile.std_dev.is_finite() {
        return Err(Error::param(
            "std_dev",
            format!("standard deviation must be nonnegative, got {}", profile.std_dev),
        ));
    }
    match profile.kind {
        CouplingKind::Constant => Ok(vec![profile.mean; n]),
        CouplingKind::GaussianSampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
            let normal = Normal::new(profile.mean, profile.std_dev)
                .map_err(|e| Error::param("std_dev", e.to_string()))?;
            (0..n)
                .map(|_| {
                    for _ in 0..MAX_RESAMPLES {
                        let eta = normal.sample(&mut rng);
                        if eta > 0.0 {
                            return Ok(eta);
                        }
                    }
                    Err(Error::param("mean", "could not draw a positive coupling"))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareWaveDesign {
    amplitude: f64,
    omega0: f64,
    n_harmonics: usize,
    inversion: f64,
    profile: CouplingProfile,
    modes: Vec<ModeSpec>,
    printed_phases: Vec<f64>,
    degenerate: bool,
}

/// Principal-branch phase `-arctan(A / (2 d eta^2))`, with the `d = 0`
/// limit taken as `-pi/2` (and `0` when `A = 0` too).
fn principal_phase(amplitude: f64, drive_weight: f64, eta: f64) -> f64 {
    if drive_weight == 0.0 {
        if amplitude == 0.0 {
            0.0
        } else {
            -0.5 * PI
        }
    } else {
        -(amplitude / (2.0 * drive_weight * eta * eta)).atan()
    }
}

/// Designs `n` odd-harmonic modes with couplings drawn from `profile`.
///
/// `inversion` is `P_e - P_g` for a two-level system or `mu` for a cavity.
/// `A = 0` together with `inversion = 0` gives the all-zero bath, flagged
/// by [`SquareWaveDesign::is_degenerate`].
pub fn design_square_wave(
    amplitude: f64,
    omega0: f64,
    n: usize,
    inversion: f64,
    profile: &CouplingProfile,
) -> Result<SquareWaveDesign> {
    let couplings = sample_couplings(profile, n)?;
    SquareWaveDesign::from_couplings(amplitude, omega0, inversion, &couplings, *profile)
}

impl SquareWaveDesign {
    pub fn from_couplings(
        amplitude: f64,
        omega0: f64,
        inversion: f64,
        couplings: &[f64],
        profile: CouplingProfile,
    ) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::param("amplitude", format!("must be nonnegative, got {amplitude}")));
        }
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::param("omega0", format!("must be positive, got {omega0}")));
        }
        if !inversion.is_finite() {
            return Err(Error::param("inversion", "must be finite"));
        }
        if couplings.is_empty() {
            return Err(Error::param("n_harmonics", "at least one harmonic is required"));
        }
        // Normalize -0.0 so atan2 picks the upper half plane.
        let amplitude = amplitude + 0.0;
        let inversion = inversion + 0.0;
        let degenerate = amplitude == 0.0 && inversion == 0.0;
        let mut modes = Vec::with_capacity(couplings.len());
        let mut printed_phases = Vec::with_capacity(couplings.len());
        for (idx, &eta) in couplings.iter().enumerate() {
            if !(eta > 0.0) {
                return Err(Error::param("eta", format!("coupling {} is {eta}, must be positive", idx + 1)));
            }
            let omega = (2 * idx + 1) as f64 * omega0;
            let radius = (4.0 * inversion * inversion * eta.powi(4) + amplitude * amplitude).sqrt();
            let alpha = radius / (2.0 * eta * omega);
            let phi = if degenerate {
                0.0
            } else {
                amplitude.atan2(-2.0 * inversion * eta * eta)
            };
            modes.push(ModeSpec::new(omega, eta, alpha, phi)?);
            printed_phases.push(principal_phase(amplitude, inversion, eta));
        }
        Ok(Self {
            amplitude,
            omega0,
            n_harmonics: couplings.len(),
            inversion,
            profile,
            modes,
            printed_phases,
            degenerate,
        })
    }

    /// Same couplings, different inversion.
    pub fn with_inversion(&self, inversion: f64) -> Result<Self> {
        let couplings: Vec<f64> = self.modes.iter().map(ModeSpec::eta).collect();
        Self::from_couplings(self.amplitude, self.omega0, inversion, &couplings, self.profile)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn n_harmonics(&self) -> usize {
        self.n_harmonics
    }

    pub fn inversion(&self) -> f64 {
        self.inversion
    }

    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    /// The principal-branch phases `-arctan(A / (2 d eta_j^2))`, in
    /// `(-pi/2, pi/2]`. They share `tan` with the mode phases and differ
    /// from them by `pi` when `d > 0`.
    pub fn printed_phases(&self) -> &[f64] {
        &self.printed_phases
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Period of the synthesized wave, `2 pi / omega_0`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    /// Plateau magnitude of the infinite series `sum_j (A / omega_j) sin(omega_j t)`,
    /// which is `pi A / (4 omega_0)`.
    pub fn limit_plateau(&self) -> f64 {
        PI * self.amplitude / (4.0 * self.omega0)
    }

    /// Fourier coefficients of the designed energy trace.
    pub fn fourier_series(&self, omega_sys: f64) -> FourierSeries {
        FourierSeries::from_modes(omega_sys, self.inversion, &self.modes)
    }
}

/// Bath spectral density, either a delta comb stored as integrated weights
/// or a continuous function.
#[derive(Clone)]
pub enum SpectralDensity {
    Discrete { omegas: Vec<f64>, weights: Vec<f64> },
    Continuum { magnitude: SpectralFn, phase: SpectralFn },
}

impl std::fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralDensity::Discrete { omegas, weights } => f
                .debug_struct("Discrete")
                .field("omegas", omegas)
                .field("weights", weights)
                .finish(),
            SpectralDensity::Continuum { .. } => f.write_str("Continuum { .. }"),
        }
    }
}

impl SpectralDensity {
    /// Continuous density at `omega`, or the comb weight when `omega` is
    /// exactly one of the comb frequencies (zero elsewhere).
    pub fn magnitude_at(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::Discrete { omegas, weights } => omegas
                .iter()
                .zip(weights)
                .filter(|(w, _)| **w == omega)
                .map(|(_, j)| *j)
                .sum(),
            SpectralDensity::Continuum { magnitude, .. } => magnitude(omega),
        }
    }

    pub fn phase_at(&self, omega: f64) -> Option<f64> {
        match self {
            SpectralDensity::Discrete { .. } => None,
            SpectralDensity::Continuum { phase, .. } => Some(phase(omega)),
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            SpectralDensity::Discrete { weights, .. } => Some(weights),
            SpectralDensity::Continuum { .. } => None,
        }
    }
}

/// `J(omega) = sum_j (4 d^2 eta_j^4 + A^2) / (4 eta_j^2 omega_j^2) delta(omega - omega_j)`.
pub fn spectral_density_discrete(design: &SquareWaveDesign) -> SpectralDensity {
    let a2 = design.amplitude * design.amplitude;
    let d2 = design.inversion * design.inversion;
    let (omegas, weights) = design
        .modes
        .iter()
        .map(|m| {
            let eta2 = m.eta() * m.eta();
            let w = (4.0 * d2 * eta2 * eta2 + a2) / (4.0 * eta2 * m.omega() * m.omega());
            (m.omega(), w)
        })
        .unzip();
    SpectralDensity::Discrete { omegas, weights }
}

/// Row of the plot-ready spectral table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralRow {
    pub j: usize,
    pub omega: f64,
    pub eta: f64,
    pub weight: f64,
    pub alpha: f64,
    pub phase: f64,
    pub printed_phase: f64,
}

pub fn spectral_table(design: &SquareWaveDesign) -> Vec<SpectralRow> {
    let density = spectral_density_discrete(design);
    let weights = density.weights().expect("discrete density");
    design
        .modes
        .iter()
        .zip(weights)
        .zip(&design.printed_phases)
        .enumerate()
        .map(|(idx, ((m, &weight), &printed_phase))| SpectralRow {
            j: idx + 1,
            omega: m.omega(),
            eta: m.eta(),
            weight,
            alpha: m.alpha(),
            phase: m.phi(),
            printed_phase,
        })
        .collect()
}

fn check_continuum_inputs(amplitude: f64, omega0: f64, mu: f64) -> Result<()> {
    if !(amplitude >= 0.0) || !amplitude.is_finite() {
        return Err(Error::param("amplitude", format!("must be nonnegative, got {amplitude}")));
    }
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::param("omega0", format!("must be positive, got {omega0}")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::param("mu", format!("mean photon number must be nonnegative, got {mu}")));
    }
    Ok(())
}

/// Continuum design functions:
/// `phi(omega) = -arctan(A omega_0 / (2 mu eta^2))` and
/// `J(omega) = (4 mu^2 eta^4 + A^2 omega_0^2) / (4 eta^2 omega^2)`.
pub fn spectral_density_continuum(amplitude: f64, omega0: f64, mu: f64, eta: SpectralFn) -> Result<SpectralDensity> {
    check_continuum_inputs(amplitude, omega0, mu)?;
    let coupling = eta.clone();
    let magnitude: SpectralFn = Arc::new(move |w: f64| {
        let eta2 = coupling(w).powi(2);
        (4.0 * mu * mu * eta2 * eta2 + amplitude * amplitude * omega0 * omega0) / (4.0 * eta2 * w * w)
    });
    let phase: SpectralFn = Arc::new(move |w: f64| principal_phase(amplitude * omega0, mu, eta(w)));
    Ok(SpectralDensity::Continuum { magnitude, phase })
}

/// Square-wave design for a continuous mirror spectrum.
#[derive(Clone)]
pub struct ContinuumDesign {
    amplitude: f64,
    omega0: f64,
    mu: f64,
    n_harmonics: usize,
    coupling: SpectralFn,
}

impl std::fmt::Debug for ContinuumDesign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuumDesign")
            .field("amplitude", &self.amplitude)
            .field("omega0", &self.omega0)
            .field("mu", &self.mu)
            .field("n_harmonics", &self.n_harmonics)
            .finish_non_exhaustive()
    }
}

impl ContinuumDesign {
    pub fn new(amplitude: f64, omega0: f64, mu: f64, n_harmonics: usize, coupling: SpectralFn) -> Result<Self> {
        check_continuum_inputs(amplitude, omega0, mu)?;
        if n_harmonics == 0 {
            return Err(Error::param("n_harmonics", "at least one harmonic is required"));
        }
        Ok(Self {
            amplitude,
            omega0,
            mu,
            n_harmonics,
            coupling,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn harmonics(&self) -> Vec<f64> {
        (1..=self.n_harmonics)
            .map(|j| (2 * j - 1) as f64 * self.omega0)
            .collect()
    }

    /// `[omega_0 / 2, (2 n + 1) omega_0]`.
    pub fn default_window(&self) -> (f64, f64) {
        (0.5 * self.omega0, (2 * self.n_harmonics + 1) as f64 * self.omega0)
    }

    pub fn spectral_density(&self) -> SpectralDensity {
        spectral_density_continuum(self.amplitude, self.omega0, self.mu, self.coupling.clone())
            .expect("inputs validated at construction")
    }

    /// Bath functions `eta(omega)`, `alpha(omega) = sqrt(J(omega))` and the
    /// phase branch that cancels the cosine part of the integrand.
    pub fn bath(&self, density: ModeDensity, window: Option<(f64, f64)>) -> ContinuumBath {
        let (amplitude, omega0, mu) = (self.amplitude, self.omega0, self.mu);
        let magnitude = match self.spectral_density() {
            SpectralDensity::Continuum { magnitude, .. } => magnitude,
            SpectralDensity::Discrete { .. } => unreachable!(),
        };
        let coupling = self.coupling.clone();
        let phase: SpectralFn = Arc::new(move |w: f64| {
            let eta = coupling(w);
            if mu == 0.0 && amplitude == 0.0 {
                0.0
            } else {
                (amplitude * omega0).atan2(-2.0 * mu * eta * eta)
            }
        });
        ContinuumBath {
            coupling: self.coupling.clone(),
            amplitude: Arc::new(move |w: f64| magnitude(w).sqrt()),
            phase,
            density,
            window: window.unwrap_or_else(|| self.default_window()),
            omega0,
            required: self.harmonics(),
        }
    }

    /// Bath concentrated on the odd harmonics: unit-mass Gaussians of
    /// standard deviation `width` at each `(2j - 1) omega_0`.
    pub fn comb_bath(&self, width: f64) -> ContinuumBath {
        self.bath(
            ModeDensity::Comb {
                centers: self.harmonics(),
                width,
            },
            None,
        )
    }
}
