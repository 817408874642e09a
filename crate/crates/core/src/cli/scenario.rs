//! Design, simulate, analyze, write.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use super::config::{ConfigError, DensityKind, Model, OutputKind, ScenarioConfig, MAX_ORACLE_DIM};
use super::emit;
use super::CliError;
use crate::analytic::{
    cavity_omega_t_continuum, cavity_omega_t_discrete, energy_multi, energy_single, time_grid, EnergyTrace,
    ModeDensity, ModeSpec, QuadratureConfig,
};
use crate::bathdesign::{
    design_square_wave, spectral_density_continuum, spectral_table, ContinuumDesign, SpectralDensity,
    SquareWaveDesign,
};
use crate::fockspace::{
    oracle_cavity, oracle_energy_multi, oracle_energy_single, FockTruncation, OracleState, SingleModeParams,
};
use crate::thermocycle::{detect_strokes, level_diagram, CycleReport, DetectionConfig};

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config_hash: String,
    pub files: Vec<PathBuf>,
    pub trace: EnergyTrace,
    pub report: Option<CycleReport>,
    pub oracle_deviation: Option<f64>,
    pub lines: Vec<String>,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn model_err(stage: &'static str) -> impl Fn(crate::Error) -> CliError {
    move |source| CliError::Model { stage, source }
}

fn build_design(config: &ScenarioConfig) -> Result<Option<SquareWaveDesign>, CliError> {
    let (Some(d), Some(profile)) = (&config.design, config.coupling_profile()) else {
        return Ok(None);
    };
    let design = design_square_wave(d.amplitude, d.omega0, d.n_harmonics, config.drive_weight(), &profile)
        .map_err(model_err("bathdesign"))?;
    if design.is_degenerate() {
        log::warn!("design with zero amplitude and zero drive weight: every mode amplitude is zero");
    }
    Ok(Some(design))
}

fn explicit_modes(config: &ScenarioConfig) -> Result<Vec<ModeSpec>, CliError> {
    config
        .modes
        .iter()
        .flatten()
        .map(|m| ModeSpec::new(m.omega, m.eta, m.alpha, m.phi))
        .collect::<crate::Result<_>>()
        .map_err(model_err("analytic"))
}

fn continuum_design(config: &ScenarioConfig) -> Result<ContinuumDesign, CliError> {
    let d = config.design.as_ref().expect("validated: continuum has a design");
    let eta = d.coupling.mean;
    ContinuumDesign::new(d.amplitude, d.omega0, config.drive_weight(), d.n_harmonics, Arc::new(move |_| eta))
        .map_err(model_err("bathdesign"))
}

fn continuum_trace(config: &ScenarioConfig, times: &[f64]) -> Result<EnergyTrace, CliError> {
    let spec = config.cavity_spec().expect("validated cavity spec");
    let design = continuum_design(config)?;
    let c = &config.continuum;
    let window = c.window.map(|[lo, hi]| (lo, hi));
    let density = match c.density {
        DensityKind::Comb => ModeDensity::Comb {
            centers: design.harmonics(),
            width: c.width,
        },
        DensityKind::Uniform => ModeDensity::Uniform,
    };
    let bath = design.bath(density, window);
    let quad = QuadratureConfig {
        tolerance: c.tolerance,
        ..QuadratureConfig::default()
    };
    let out = cavity_omega_t_continuum(&spec, &bath, times, c.eta_over, &quad).map_err(model_err("analytic"))?;
    log::info!("continuum quadrature converged at {} panels per interval", out.panels);
    Ok(out.trace)
}

fn oracle_trace(config: &ScenarioConfig, modes: &[ModeSpec], times: &[f64]) -> Result<EnergyTrace, CliError> {
    let max_level = config
        .system
        .levels
        .iter()
        .flatten()
        .map(|l| l.m)
        .max()
        .unwrap_or(1) as f64;
    let truncs: Vec<FockTruncation> = modes
        .iter()
        .map(|m| match config.oracle.truncation {
            Some(dim) => FockTruncation::new(dim),
            None => Ok(FockTruncation::sized_for(m.alpha(), 2.0 * max_level * m.eta() / m.omega())),
        })
        .collect::<crate::Result<_>>()
        .map_err(model_err("fockspace"))?;
    let total: f64 = truncs.iter().map(|t| t.dim() as f64).product();
    if total > MAX_ORACLE_DIM as f64 {
        return Err(ConfigError::new(
            "oracle",
            format!("bath space of {total} states exceeds {MAX_ORACLE_DIM}; set oracle.truncation"),
        )
        .into());
    }
    let betas: Vec<Complex64> = modes.iter().map(ModeSpec::amplitude).collect();
    let fock = model_err("fockspace");
    let out = match config.model {
        Model::TwoLevelSingleMode => {
            let spec = config.two_level_spec().expect("validated");
            let state = OracleState::two_level_coherent(spec.p_e(), betas[0], truncs[0]).map_err(&fock)?;
            let params = SingleModeParams {
                omega_sys: spec.omega_sys(),
                omega: modes[0].omega(),
                eta: modes[0].eta(),
            };
            oracle_energy_single(&state, &params, times).map_err(&fock)?
        }
        Model::TwoLevelMultiMode => {
            let spec = config.two_level_spec().expect("validated");
            let state = OracleState::multi_mode_coherent(spec.p_e(), &betas, &truncs).map_err(&fock)?;
            oracle_energy_multi(&state, spec.omega_sys(), modes, times).map_err(&fock)?
        }
        Model::CavityDiscrete => {
            let spec = config.cavity_spec().expect("validated");
            let state = OracleState::cavity_coherent(&spec, &betas, &truncs).map_err(&fock)?;
            oracle_cavity(&state, spec.omega_sys(), modes, times).map_err(&fock)?
        }
        Model::CavityContinuum => unreachable!("rejected by validation"),
    };
    Ok(out.trace)
}

fn gaussian_broadening(omegas: &[f64], weights: &[f64], width: f64, grid: &[f64]) -> Vec<f64> {
    let norm = 1.0 / (width * (2.0 * PI).sqrt());
    grid.iter()
        .map(|w| {
            omegas
                .iter()
                .zip(weights)
                .map(|(c, j)| {
                    let z = (w - c) / width;
                    j * norm * (-0.5 * z * z).exp()
                })
                .sum()
        })
        .collect()
}

fn spectral_outputs(
    config: &ScenarioConfig,
    design: Option<&SquareWaveDesign>,
    out_dir: &Path,
    hash: &str,
    files: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let d = config.design.as_ref().expect("validated: spectral output has a design");
    let inversions = config
        .spectral
        .inversions
        .clone()
        .unwrap_or_else(|| vec![config.drive_weight()]);
    let path = out_dir.join(format!("{}_spectral.csv", config.name));
    let lo = 0.5 * d.omega0;
    let hi = (2 * d.n_harmonics + 1) as f64 * d.omega0;
    let grid = time_grid(lo, hi, config.spectral.points);

    if let Some(design) = design {
        let tables = inversions
            .iter()
            .map(|&inv| Ok((inv, spectral_table(&design.with_inversion(inv)?))))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(model_err("bathdesign"))?;
        emit::emit_spectral_csv(&tables, &path, hash)?;
        files.push(path);
        if config.spectral.broadening > 0.0 {
            let mut rows = Vec::new();
            for (inv, table) in &tables {
                let omegas: Vec<f64> = table.iter().map(|r| r.omega).collect();
                let weights: Vec<f64> = table.iter().map(|r| r.weight).collect();
                let smooth = gaussian_broadening(&omegas, &weights, config.spectral.broadening, &grid);
                rows.extend(grid.iter().zip(smooth).map(|(w, j)| vec![*inv, *w, j]));
            }
            let path = out_dir.join(format!("{}_spectral_broadened.csv", config.name));
            emit::emit_columns_csv("inversion,omega,density", &rows, &path, hash)?;
            files.push(path);
        }
    } else {
        // continuous bath: sample the design functions
        let eta = d.coupling.mean;
        let mut rows = Vec::new();
        for &mu in &inversions {
            let density = spectral_density_continuum(d.amplitude, d.omega0, mu, Arc::new(move |_| eta))
                .map_err(model_err("bathdesign"))?;
            if let SpectralDensity::Continuum { magnitude, phase } = density {
                rows.extend(grid.iter().map(|&w| vec![mu, w, magnitude(w), phase(w)]));
            }
        }
        emit::emit_columns_csv("inversion,omega,density,printed_phase", &rows, &path, hash)?;
        files.push(path);
    }
    Ok(())
}

/// Runs one validated scenario and writes its outputs to `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let hash = config.hash();
    let times = time_grid(config.time_grid.t_start, config.t_end(), config.time_grid.n_samples);
    let mut files = Vec::new();
    let mut lines = vec![format!(
        "scenario {} ({:?}), config_sha256={hash}",
        config.name, config.model
    )];

    let design = if config.model == Model::CavityContinuum {
        None
    } else {
        build_design(config)?
    };
    let modes = match &design {
        Some(d) => d.modes().to_vec(),
        None => explicit_modes(config)?,
    };

    let analytic = model_err("analytic");
    let trace = match config.model {
        Model::TwoLevelSingleMode => {
            energy_single(&config.two_level_spec().expect("validated"), &modes[0], &times).map_err(&analytic)?
        }
        Model::TwoLevelMultiMode => {
            energy_multi(&config.two_level_spec().expect("validated"), &modes, &times).map_err(&analytic)?
        }
        Model::CavityDiscrete => {
            cavity_omega_t_discrete(&config.cavity_spec().expect("validated"), &modes, &times).map_err(&analytic)?
        }
        Model::CavityContinuum => continuum_trace(config, &times)?,
    };
    lines.push(format!(
        "trace: {} samples over [{}, {}], baseline {:.6}",
        trace.len(),
        times[0],
        times[times.len() - 1],
        trace.baseline()
    ));

    let mut oracle_deviation = None;
    if config.oracle.enabled {
        let oracle = oracle_trace(config, &modes, &times)?;
        let dev = trace.max_abs_difference(&oracle);
        lines.push(format!("oracle: max |analytic - brute force| = {dev:.3e}"));
        oracle_deviation = Some(dev);
        if config.wants(OutputKind::TraceCsv) {
            let path = out_dir.join(format!("{}_oracle_trace.csv", config.name));
            emit::emit_trace_csv(&oracle, &path, &hash)?;
            files.push(path);
        }
    }

    if config.wants(OutputKind::TraceCsv) {
        let path = out_dir.join(format!("{}_trace.csv", config.name));
        emit::emit_trace_csv(&trace, &path, &hash)?;
        files.push(path);
    }
    if config.wants(OutputKind::SpectralCsv) {
        spectral_outputs(config, design.as_ref(), out_dir, &hash, &mut files)?;
    }

    let mut report = None;
    if config.wants(OutputKind::CycleJson) || config.wants(OutputKind::LevelDiagramCsv) {
        let omega0 = config.design.as_ref().expect("validated").omega0;
        let mut r = detect_strokes(&trace, omega0, &DetectionConfig::default()).map_err(model_err("thermocycle"))?;
        if let Some(spec) = config.cavity_spec() {
            r = r.with_heat(&spec);
        }
        lines.push(format!(
            "cycle: {} period(s), plateaus {:.6} / {:.6}, ripple {:.3e}",
            r.n_periods_analyzed, r.plateau_high, r.plateau_low, r.ripple
        ));
        if config.wants(OutputKind::CycleJson) {
            let path = out_dir.join(format!("{}_cycle.json", config.name));
            emit::emit_cycle_json(&r, &path, &hash)?;
            files.push(path);
        }
        if config.wants(OutputKind::LevelDiagramCsv) {
            let path = out_dir.join(format!("{}_levels.csv", config.name));
            emit::emit_level_csv(&level_diagram(&r, config.analysis.levels), &path, &hash)?;
            files.push(path);
        }
        report = Some(r);
    }

    lines.extend(files.iter().map(|p| format!("wrote {}", p.display())));
    Ok(RunSummary {
        config_hash: hash,
        files,
        trace,
        report,
        oracle_deviation,
        lines,
    })
}
