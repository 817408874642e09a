//! Scenario files.
//!
//! A scenario is a TOML document. Top-level keys: `name`, `model`, `seed`,
//! `outputs`; tables `system`, `design` (or an array `modes`), `time_grid`,
//! `oracle`, `continuum`, `analysis`, `spectral`. The README lists every key.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{CavitySpec, EtaOver, TwoLevelSpec};
use crate::bathdesign::{CouplingKind, CouplingProfile};
use crate::fockspace::FockTruncation;

/// Largest bath Hilbert space the tensor-product oracle will build from a scenario.
pub const MAX_ORACLE_DIM: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    TwoLevelSingleMode,
    TwoLevelMultiMode,
    CavityDiscrete,
    CavityContinuum,
}

impl Model {
    pub fn is_cavity(self) -> bool {
        matches!(self, Model::CavityDiscrete | Model::CavityContinuum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    TraceCsv,
    SpectralCsv,
    CycleJson,
    LevelDiagramCsv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub m: u32,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// System frequency `Omega`.
    pub omega: f64,
    /// Excited population, two-level models only.
    #[serde(default)]
    pub p_e: Option<f64>,
    /// Photon-number populations, cavity models only.
    #[serde(default)]
    pub levels: Option<Vec<LevelConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub kind: CouplingKind,
    pub mean: f64,
    #[serde(default)]
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub amplitude: f64,
    pub omega0: f64,
    pub n_harmonics: usize,
    pub coupling: CouplingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub omega: f64,
    pub eta: f64,
    pub alpha: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    #[serde(default)]
    pub t_start: f64,
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Length in design periods, instead of `t_end`.
    #[serde(default)]
    pub periods: Option<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub enabled: bool,
    /// Fock cutoff per mode; sized from the mode amplitudes when absent.
    #[serde(default)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Comb,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumConfig {
    #[serde(default)]
    pub eta_over: EtaOver,
    #[serde(default = "default_density")]
    pub density: DensityKind,
    /// Standard deviation of each comb tooth.
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_density() -> DensityKind {
    DensityKind::Comb
}

fn default_width() -> f64 {
    0.05
}

fn default_tolerance() -> f64 {
    1e-6
}

impl Default for ContinuumConfig {
    fn default() -> Self {
        Self {
            eta_over: EtaOver::default(),
            density: default_density(),
            width: default_width(),
            window: None,
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Highest Fock level in the level diagram.
    #[serde(default = "default_levels")]
    pub levels: u32,
}

fn default_levels() -> u32 {
    2
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            levels: default_levels(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    /// Inversions (or `mu` values) to tabulate; defaults to the scenario's own.
    #[serde(default)]
    pub inversions: Option<Vec<f64>>,
    /// Gaussian kernel width for the plot-ready broadened spectrum; 0 disables it.
    #[serde(default)]
    pub broadening: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    2000
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            inversions: None,
            broadening: 0.0,
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: Model,
    #[serde(default)]
    pub seed: u64,
    pub outputs: Vec<OutputKind>,
    pub system: SystemConfig,
    #[serde(default)]
    pub design: Option<DesignConfig>,
    #[serde(default)]
    pub modes: Option<Vec<ModeConfig>>,
    pub time_grid: TimeGridConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub continuum: ContinuumConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub spectral: SpectralConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub eta_over: Option<EtaOver>,
}

fn positive(field: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {value}")))
    }
}

impl ScenarioConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "document".into());
            ConfigError::new(field, e.message().trim().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(eta_over) = overrides.eta_over {
            self.continuum.eta_over = eta_over;
        }
    }

    /// SHA-256 of the canonical JSON form of the effective config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn two_level_spec(&self) -> Option<TwoLevelSpec> {
        self.system
            .p_e
            .and_then(|p| TwoLevelSpec::with_excited(self.system.omega, p).ok())
    }

    pub fn cavity_spec(&self) -> Option<CavitySpec> {
        let levels = self.system.levels.as_ref()?;
        CavitySpec::new(self.system.omega, levels.iter().map(|l| (l.m, l.p)).collect()).ok()
    }

    /// `P_e - P_g` or `mu`.
    pub fn drive_weight(&self) -> f64 {
        if self.model.is_cavity() {
            self.cavity_spec().map(|s| s.mu()).unwrap_or(0.0)
        } else {
            self.two_level_spec().map(|s| s.inversion()).unwrap_or(0.0)
        }
    }

    pub fn coupling_profile(&self) -> Option<CouplingProfile> {
        self.design.as_ref().map(|d| CouplingProfile {
            kind: d.coupling.kind,
            mean: d.coupling.mean,
            std_dev: d.coupling.std_dev,
            seed: self.seed,
        })
    }

    /// Design period `2 pi / omega_0`, when there is a design.
    pub fn period(&self) -> Option<f64> {
        self.design.as_ref().map(|d| 2.0 * PI / d.omega0)
    }

    pub fn t_end(&self) -> f64 {
        match (self.time_grid.t_end, self.time_grid.periods, self.period()) {
            (Some(t), _, _) => t,
            (None, Some(p), Some(period)) => self.time_grid.t_start + p * period,
            _ => self.time_grid.t_start,
        }
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(ConfigError::new("name", "must be non-empty and use only [A-Za-z0-9_-]"));
        }
        if !self.system.omega.is_finite() {
            return Err(ConfigError::new("system.omega", "must be finite"));
        }
        if self.model.is_cavity() {
            if self.system.p_e.is_some() {
                return Err(ConfigError::new("system.p_e", "cavity models take `system.levels`"));
            }
            let Some(levels) = &self.system.levels else {
                return Err(ConfigError::new("system.levels", "required for cavity models"));
            };
            CavitySpec::new(self.system.omega, levels.iter().map(|l| (l.m, l.p)).collect())
                .map_err(|e| ConfigError::new("system.levels", e.to_string()))?;
        } else {
            if self.system.levels.is_some() {
                return Err(ConfigError::new("system.levels", "two-level models take `system.p_e`"));
            }
            let Some(p_e) = self.system.p_e else {
                return Err(ConfigError::new("system.p_e", "required for two-level models"));
            };
            TwoLevelSpec::with_excited(self.system.omega, p_e)
                .map_err(|e| ConfigError::new("system.p_e", e.to_string()))?;
        }

        match (&self.design, &self.modes) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(ConfigError::new("design, modes", "exactly one of the two must be present"));
            }
            (Some(d), None) => {
                if !(d.amplitude >= 0.0) || !d.amplitude.is_finite() {
                    return Err(ConfigError::new("design.amplitude", "must be nonnegative and finite"));
                }
                positive("design.omega0", d.omega0)?;
                if d.n_harmonics == 0 {
                    return Err(ConfigError::new("design.n_harmonics", "must be at least 1"));
                }
                positive("design.coupling.mean", d.coupling.mean)?;
                if !(d.coupling.std_dev >= 0.0) || !d.coupling.std_dev.is_finite() {
                    return Err(ConfigError::new("design.coupling.std_dev", "must be nonnegative"));
                }
            }
            (None, Some(modes)) => {
                if modes.is_empty() {
                    return Err(ConfigError::new("modes", "at least one mode is required"));
                }
                for (i, m) in modes.iter().enumerate() {
                    crate::analytic::ModeSpec::new(m.omega, m.eta, m.alpha, m.phi)
                        .map_err(|e| ConfigError::new(format!("modes[{i}]"), e.to_string()))?;
                }
            }
        }
        let n_modes = self
            .design
            .as_ref()
            .map(|d| d.n_harmonics)
            .or(self.modes.as_ref().map(Vec::len))
            .unwrap_or(0);
        if self.model == Model::TwoLevelSingleMode && n_modes != 1 {
            return Err(ConfigError::new(
                if self.design.is_some() { "design.n_harmonics" } else { "modes" },
                "single-mode model needs exactly one mode",
            ));
        }
        if self.model == Model::CavityContinuum {
            let Some(d) = &self.design else {
                return Err(ConfigError::new("design", "continuum model is defined by a design"));
            };
            if d.coupling.kind != CouplingKind::Constant {
                return Err(ConfigError::new("design.coupling.kind", "continuum model needs a constant coupling"));
            }
            positive("continuum.tolerance", self.continuum.tolerance)?;
            if self.continuum.density == DensityKind::Comb {
                positive("continuum.width", self.continuum.width)?;
            }
            if let Some([lo, hi]) = self.continuum.window {
                if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(ConfigError::new("continuum.window", "need 0 < lo < hi"));
                }
            }
            if self.oracle.enabled {
                return Err(ConfigError::new("oracle.enabled", "no Fock-space oracle for a continuous bath"));
            }
        }

        let grid = &self.time_grid;
        if !grid.t_start.is_finite() {
            return Err(ConfigError::new("time_grid.t_start", "must be finite"));
        }
        match (grid.t_end, grid.periods) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(ConfigError::new("time_grid", "give exactly one of `t_end` and `periods`"));
            }
            (Some(t), None) if !(t > grid.t_start) || !t.is_finite() => {
                return Err(ConfigError::new("time_grid.t_end", "must exceed t_start"));
            }
            (None, Some(p)) => {
                positive("time_grid.periods", p)?;
                if self.design.is_none() {
                    return Err(ConfigError::new("time_grid.periods", "needs a design to define the period"));
                }
            }
            _ => {}
        }
        if grid.n_samples < 2 {
            return Err(ConfigError::new("time_grid.n_samples", "must be at least 2"));
        }

        if self.outputs.is_empty() {
            return Err(ConfigError::new("outputs", "request at least one output"));
        }
        let cycle = self.wants(OutputKind::CycleJson) || self.wants(OutputKind::LevelDiagramCsv);
        if self.design.is_none() {
            if cycle {
                return Err(ConfigError::new("outputs", "cycle analysis needs a design (for omega0)"));
            }
            if self.wants(OutputKind::SpectralCsv) {
                return Err(ConfigError::new("outputs", "spectral_csv needs a design"));
            }
        }
        if cycle {
            let period = self.period().expect("design present");
            let per_period = (grid.n_samples - 1) as f64 * period / (self.t_end() - grid.t_start);
            if per_period < 64.0 {
                return Err(ConfigError::new(
                    "time_grid.n_samples",
                    format!("cycle analysis needs at least 64 samples per period, got {per_period:.1}"),
                ));
            }
        }
        if self.wants(OutputKind::LevelDiagramCsv) && self.analysis.levels < 1 {
            return Err(ConfigError::new("analysis.levels", "must be at least 1"));
        }
        if let Some(inv) = &self.spectral.inversions {
            if inv.is_empty() || inv.iter().any(|x| !x.is_finite()) {
                return Err(ConfigError::new("spectral.inversions", "need finite values"));
            }
            if self.model == Model::CavityContinuum && inv.iter().any(|&x| x < 0.0) {
                return Err(ConfigError::new("spectral.inversions", "mu must be nonnegative"));
            }
        }
        if !(self.spectral.broadening >= 0.0) || !self.spectral.broadening.is_finite() {
            return Err(ConfigError::new("spectral.broadening", "must be nonnegative"));
        }
        if self.spectral.points < 2 {
            return Err(ConfigError::new("spectral.points", "must be at least 2"));
        }

        if self.oracle.enabled {
            if let Some(t) = self.oracle.truncation {
                FockTruncation::new(t).map_err(|e| ConfigError::new("oracle.truncation", e.to_string()))?;
                let total = (t as f64).powi(n_modes as i32);
                if total > MAX_ORACLE_DIM as f64 {
                    return Err(ConfigError::new(
                        "oracle.truncation",
                        format!("bath space {t}^{n_modes} exceeds {MAX_ORACLE_DIM} states"),
                    ));
                }
            } else if n_modes > 4 {
                return Err(ConfigError::new(
                    "oracle.enabled",
                    format!("{n_modes} modes is too many for the tensor-product oracle"),
                ));
            }
        }
        Ok(())
    }
}
