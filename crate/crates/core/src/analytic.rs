//! Closed-form energy traces of the dephasing models.
//!
//! Units throughout: angular frequencies and energies in Mrad/s (hbar = 1),
//! times in microseconds.
//!
//! For a two-level system with inversion `d = P_e - P_g` coupled to modes
//! `(omega_j, eta_j, alpha_j, phi_j)`, the controller-averaged coefficient of
//! `sigma_z` is
//!
//! ```text
//! S(t) = Omega + sum_j 2 eta_j [ alpha_j cos(omega_j t - phi_j)
//!                               + (eta_j / omega_j) d (cos(omega_j t) - 1) ]
//! ```
//!
//! The cavity version replaces `d` by the mean photon number `mu`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quadrature;
use crate::{Error, Result};

const PROBABILITY_TOL: f64 = 1e-12;

/// One bath mode: frequency, coupling, and the initial coherent amplitude
/// `alpha e^{i phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpec {
    omega: f64,
    eta: f64,
    alpha: f64,
    phi: f64,
}

impl ModeSpec {
    /// `phi` is wrapped into `(-pi, pi]`.
    pub fn new(omega: f64, eta: f64, alpha: f64, phi: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::param("omega", format!("mode frequency must be positive, got {omega}")));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("coupling must be nonnegative, got {eta}")));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::param("alpha", format!("amplitude must be nonnegative, got {alpha}")));
        }
        if !phi.is_finite() {
            return Err(Error::param("phi", "phase must be finite"));
        }
        Ok(Self {
            omega,
            eta,
            alpha,
            phi: wrap_phase(phi),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Initial bath amplitude `<a(0)> = alpha e^{i phi}`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.alpha, self.phi)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    if phi > -PI && phi <= PI {
        phi
    } else {
        phi - 2.0 * PI * ((phi - PI) / (2.0 * PI)).ceil()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelSpec {
    omega_sys: f64,
    p_e: f64,
    p_g: f64,
}

impl TwoLevelSpec {
    pub fn new(omega_sys: f64, p_e: f64, p_g: f64) -> Result<Self> {
        if !omega_sys.is_finite() {
            return Err(Error::param("omega_sys", "must be finite"));
        }
        for (name, p) in [("p_e", p_e), ("p_g", p_g)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("probability must lie in [0, 1], got {p}")));
            }
        }
        if (p_e + p_g - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::param("p_e", format!("p_e + p_g = {} != 1", p_e + p_g)));
        }
        Ok(Self { omega_sys, p_e, p_g })
    }

    /// `p_g = 1 - p_e`.
    pub fn with_excited(omega_sys: f64, p_e: f64) -> Result<Self> {
        Self::new(omega_sys, p_e, 1.0 - p_e)
    }

    pub fn omega_sys(&self) -> f64 {
        self.omega_sys
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    pub fn p_g(&self) -> f64 {
        self.p_g
    }

    /// `P_e - P_g`.
    pub fn inversion(&self) -> f64 {
        self.p_e - self.p_g
    }
}

/// Cavity photon ladder with populations `P_m` on Fock levels `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavitySpec {
    omega_sys: f64,
    level_populations: Vec<(u32, f64)>,
}

impl CavitySpec {
    pub fn new(omega_sys: f64, mut level_populations: Vec<(u32, f64)>) -> Result<Self> {
        if !omega_sys.is_finite() {
            return Err(Error::param("omega_sys", "must be finite"));
        }
        if level_populations.is_empty() {
            return Err(Error::param("level_populations", "at least one level is required"));
        }
        level_populations.sort_by_key(|&(m, _)| m);
        if level_populations.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("level_populations", "duplicate Fock level"));
        }
        if let Some(&(m, p)) = level_populations.iter().find(|(_, p)| !(0.0..=1.0).contains(p)) {
            return Err(Error::param(
                "level_populations",
                format!("P_{m} = {p} outside [0, 1]"),
            ));
        }
        let total: f64 = level_populations.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::param(
                "level_populations",
                format!("populations sum to {total}, not 1"),
            ));
        }
        Ok(Self {
            omega_sys,
            level_populations,
        })
    }

    pub fn omega_sys(&self) -> f64 {
        self.omega_sys
    }

    pub fn level_populations(&self) -> &[(u32, f64)] {
        &self.level_populations
    }

    /// Weighted mean photon number `mu = sum_m m P_m`.
    pub fn mu(&self) -> f64 {
        self.level_populations.iter().map(|&(m, p)| m as f64 * p).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    SigmaZCoefficient,
    CavityOmegaT,
}

/// Sampled energy time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTrace {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: TraceKind,
    baseline: f64,
}

impl EnergyTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: TraceKind, baseline: f64) -> Result<Self> {
        check_time_grid(&times)?;
        if values.len() != times.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: values.len(),
            });
        }
        Ok(Self {
            times,
            values,
            kind,
            baseline,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    /// `Omega` for two-level traces, the renormalized offset `Omega_0` for
    /// cavity traces.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_difference(&self, other: &EnergyTrace) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn check_time_grid(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("non-finite time {t}")));
    }
    if let Some(k) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid(format!(
            "times must be strictly increasing (t[{}] = {} >= t[{}] = {})",
            k,
            times[k],
            k + 1,
            times[k + 1]
        )));
    }
    Ok(())
}

/// `n` equally spaced times from `t_start` to `t_end` inclusive.
pub fn time_grid(t_start: f64, t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_start],
        _ => {
            let dt = (t_end - t_start) / (n - 1) as f64;
            (0..n).map(|k| t_start + k as f64 * dt).collect()
        }
    }
}

/// Contribution of one mode with drive weight `d` (inversion or `mu`).
fn mode_term(mode: &ModeSpec, drive_weight: f64, t: f64) -> f64 {
    let wt = mode.omega * t;
    2.0 * mode.eta
        * (mode.alpha * (wt - mode.phi).cos() + mode.eta / mode.omega * drive_weight * (wt.cos() - 1.0))
}

fn dephasing_trace(
    omega_sys: f64,
    drive_weight: f64,
    modes: &[ModeSpec],
    times: &[f64],
    kind: TraceKind,
    baseline: f64,
) -> Result<EnergyTrace> {
    check_time_grid(times)?;
    let values = times
        .iter()
        .map(|&t| omega_sys + modes.iter().map(|m| mode_term(m, drive_weight, t)).sum::<f64>())
        .collect();
    EnergyTrace::new(times.to_vec(), values, kind, baseline)
}

/// Single-mode oscillating energy
/// `S(t) = Omega + 2 eta alpha cos(omega t - phi) + (2 eta^2 / omega)(P_e - P_g)(cos omega t - 1)`.
pub fn energy_single(spec: &TwoLevelSpec, mode: &ModeSpec, times: &[f64]) -> Result<EnergyTrace> {
    dephasing_trace(
        spec.omega_sys,
        spec.inversion(),
        std::slice::from_ref(mode),
        times,
        TraceKind::SigmaZCoefficient,
        spec.omega_sys,
    )
}

/// Multi-mode energy: `Omega` plus the sum of the per-mode single-mode terms.
pub fn energy_multi(spec: &TwoLevelSpec, modes: &[ModeSpec], times: &[f64]) -> Result<EnergyTrace> {
    if modes.is_empty() {
        return Err(Error::param("modes", "at least one bath mode is required"));
    }
    dephasing_trace(
        spec.omega_sys,
        spec.inversion(),
        modes,
        times,
        TraceKind::SigmaZCoefficient,
        spec.omega_sys,
    )
}

/// The energy rearranged as a Fourier series in `t`:
/// `dc + sum_j (cosine_j cos(omega_j t) + sine_j sin(omega_j t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSeries {
    pub dc: f64,
    pub frequencies: Vec<f64>,
    pub cosine: Vec<f64>,
    pub sine: Vec<f64>,
}

impl FourierSeries {
    /// Coefficients for drive weight `d` (inversion or `mu`):
    ///
    /// * `dc = Omega - d sum_j 2 eta_j^2 / omega_j`
    /// * `cosine_j = 2 eta_j (alpha_j cos phi_j + d eta_j / omega_j)`
    /// * `sine_j = 2 eta_j alpha_j sin phi_j`
    pub fn from_modes(omega_sys: f64, drive_weight: f64, modes: &[ModeSpec]) -> Self {
        let dc = omega_sys
            - drive_weight * modes.iter().map(|m| 2.0 * m.eta * m.eta / m.omega).sum::<f64>();
        Self {
            dc,
            frequencies: modes.iter().map(|m| m.omega).collect(),
            cosine: modes
                .iter()
                .map(|m| 2.0 * m.eta * (m.alpha * m.phi.cos() + drive_weight * m.eta / m.omega))
                .collect(),
            sine: modes.iter().map(|m| 2.0 * m.eta * m.alpha * m.phi.sin()).collect(),
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.dc
            + self
                .frequencies
                .iter()
                .zip(self.cosine.iter().zip(&self.sine))
                .map(|(w, (c, s))| {
                    let (sin, cos) = (w * t).sin_cos();
                    c * cos + s * sin
                })
                .sum::<f64>()
    }
}

/// Same values as [`energy_multi`], computed from the Fourier coefficients,
/// which are returned alongside.
pub fn energy_multi_fourier(
    spec: &TwoLevelSpec,
    modes: &[ModeSpec],
    times: &[f64],
) -> Result<(EnergyTrace, FourierSeries)> {
    if modes.is_empty() {
        return Err(Error::param("modes", "at least one bath mode is required"));
    }
    check_time_grid(times)?;
    let series = FourierSeries::from_modes(spec.omega_sys, spec.inversion(), modes);
    let values = times.iter().map(|&t| series.evaluate(t)).collect();
    let trace = EnergyTrace::new(times.to_vec(), values, TraceKind::SigmaZCoefficient, spec.omega_sys)?;
    Ok((trace, series))
}

/// Renormalized cavity offset `Omega_0 = Omega - 2 mu sum_j eta_j^2 / omega_j`.
pub fn cavity_offset(spec: &CavitySpec, modes: &[ModeSpec]) -> f64 {
    FourierSeries::from_modes(spec.omega_sys, spec.mu(), modes).dc
}

/// Effective cavity eigenenergy per photon for a discrete bath:
/// the two-level formula with `P_e - P_g` replaced by `mu`. The baseline is
/// the renormalized offset `Omega_0`.
pub fn cavity_omega_t_discrete(spec: &CavitySpec, modes: &[ModeSpec], times: &[f64]) -> Result<EnergyTrace> {
    if modes.is_empty() {
        return Err(Error::param("modes", "at least one bath mode is required"));
    }
    dephasing_trace(
        spec.omega_sys,
        spec.mu(),
        modes,
        times,
        TraceKind::CavityOmegaT,
        cavity_offset(spec, modes),
    )
}

pub type SpectralFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which factor divides the coupling inside the continuum integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaOver {
    /// `eta / omega_0`, the printed form.
    #[default]
    Omega0,
    /// `eta / omega`.
    Omega,
}

impl std::str::FromStr for EtaOver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "omega0" => Ok(EtaOver::Omega0),
            "omega" => Ok(EtaOver::Omega),
            other => Err(format!("expected `omega0` or `omega`, got `{other}`")),
        }
    }
}

/// Measure the continuum integral is taken against.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeDensity {
    /// `d omega` itself: a flat continuum.
    Uniform,
    /// Unit-mass Gaussians of standard deviation `width` centred on each
    /// frequency; approaches a delta comb as `width -> 0`.
    Comb { centers: Vec<f64>, width: f64 },
}

impl ModeDensity {
    fn value(&self, omega: f64) -> f64 {
        match self {
            ModeDensity::Uniform => 1.0,
            ModeDensity::Comb { centers, width } => {
                let norm = 1.0 / (width * (2.0 * PI).sqrt());
                centers
                    .iter()
                    .map(|c| {
                        let z = (omega - c) / width;
                        if z.abs() > 12.0 {
                            0.0
                        } else {
                            norm * (-0.5 * z * z).exp()
                        }
                    })
                    .sum()
            }
        }
    }

    /// Integration intervals: the whole window, or a `+-8 width` span
    /// around each comb tooth clipped to the window.
    fn intervals(&self, window: (f64, f64)) -> Vec<(f64, f64)> {
        match self {
            ModeDensity::Uniform => vec![window],
            ModeDensity::Comb { centers, width } => centers
                .iter()
                .filter_map(|c| {
                    let lo = (c - 8.0 * width).max(window.0);
                    let hi = (c + 8.0 * width).min(window.1);
                    (hi > lo).then_some((lo, hi))
                })
                .collect(),
        }
    }
}

/// A bath described by smooth functions of frequency.
#[derive(Clone)]
pub struct ContinuumBath {
    pub coupling: SpectralFn,
    pub amplitude: SpectralFn,
    pub phase: SpectralFn,
    pub density: ModeDensity,
    pub window: (f64, f64),
    pub omega0: f64,
    /// Frequencies the integration window must contain.
    pub required: Vec<f64>,
}

impl std::fmt::Debug for ContinuumBath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuumBath")
            .field("density", &self.density)
            .field("window", &self.window)
            .field("omega0", &self.omega0)
            .field("required", &self.required.len())
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub nodes_per_panel: usize,
    pub initial_panels: usize,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_panel: 16,
            initial_panels: 2,
            tolerance: 1e-6,
            max_panels: 1 << 14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuumTrace {
    pub trace: EnergyTrace,
    /// Panels per integration interval at convergence.
    pub panels: usize,
    pub last_change: f64,
}

/// Effective cavity eigenenergy for a continuous bath,
///
/// ```text
/// Omega(t) = Omega_0 - 2 int d rho(w) (eta / X) [ (alpha cos phi + mu eta / w) cos w t
///                                                 + alpha sin phi sin w t ]
/// Omega_0  = Omega - 2 mu int d rho(w) eta^2 / w
/// ```
///
/// with `X = omega_0` or `X = w` per `eta_over` and `rho` the bath's
/// [`ModeDensity`]. Composite Gauss-Legendre panels are doubled until the
/// whole trace changes by less than `quad.tolerance`.
pub fn cavity_omega_t_continuum(
    spec: &CavitySpec,
    bath: &ContinuumBath,
    times: &[f64],
    eta_over: EtaOver,
    quad: &QuadratureConfig,
) -> Result<ContinuumTrace> {
    check_time_grid(times)?;
    let (lo, hi) = bath.window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::param("window", format!("invalid frequency window [{lo}, {hi}]")));
    }
    if let Some(&missing) = bath.required.iter().find(|&&w| w < lo || w > hi) {
        return Err(Error::QuadratureWindow { lo, hi, missing });
    }
    if let ModeDensity::Comb { centers, width } = &bath.density {
        if !(*width > 0.0) {
            return Err(Error::param("width", "comb width must be positive"));
        }
        if let Some(&missing) = centers.iter().find(|&&c| c - 6.0 * width < lo || c + 6.0 * width > hi) {
            return Err(Error::QuadratureWindow { lo, hi, missing });
        }
    }
    let intervals = bath.density.intervals(bath.window);
    let mu = spec.mu();

    let evaluate = |panels: usize| -> (f64, Vec<f64>) {
        let (nodes, weights) = quadrature::composite(&intervals, panels, quad.nodes_per_panel);
        let mut cos_w = Vec::with_capacity(nodes.len());
        let mut sin_w = Vec::with_capacity(nodes.len());
        let mut shift = 0.0;
        for (&w, &q) in nodes.iter().zip(&weights) {
            let rho = bath.density.value(w) * q;
            let eta = (bath.coupling)(w);
            let alpha = (bath.amplitude)(w);
            let (sin_phi, cos_phi) = (bath.phase)(w).sin_cos();
            let divisor = match eta_over {
                EtaOver::Omega0 => bath.omega0,
                EtaOver::Omega => w,
            };
            let prefactor = rho * eta / divisor;
            cos_w.push(prefactor * (alpha * cos_phi + mu * eta / w));
            sin_w.push(prefactor * alpha * sin_phi);
            shift += rho * eta * eta / w;
        }
        let offset = spec.omega_sys - 2.0 * mu * shift;
        let values = times
            .iter()
            .map(|&t| {
                let integral: f64 = nodes
                    .iter()
                    .zip(cos_w.iter().zip(&sin_w))
                    .map(|(w, (c, s))| {
                        let (sin, cos) = (w * t).sin_cos();
                        c * cos + s * sin
                    })
                    .sum();
                offset - 2.0 * integral
            })
            .collect();
        (offset, values)
    };

    let mut panels = quad.initial_panels.max(1);
    let (mut offset, mut values) = evaluate(panels);
    loop {
        let next_panels = panels * 2;
        let (next_offset, next_values) = evaluate(next_panels);
        let change = values
            .iter()
            .zip(&next_values)
            .map(|(a, b)| (a - b).abs())
            .fold((offset - next_offset).abs(), f64::max);
        panels = next_panels;
        offset = next_offset;
        values = next_values;
        if change < quad.tolerance {
            let trace = EnergyTrace::new(times.to_vec(), values, TraceKind::CavityOmegaT, offset)?;
            return Ok(ContinuumTrace {
                trace,
                panels,
                last_change: change,
            });
        }
        if panels >= quad.max_panels {
            return Err(Error::QuadratureNotConverged { panels, change });
        }
    }
}
