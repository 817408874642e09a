//! Closed forms against the brute-force Fock-space oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CliError;
use crate::analytic::{cavity_omega_t_discrete, energy_multi, energy_single, time_grid, CavitySpec, ModeSpec, TwoLevelSpec};
use crate::fockspace::{
    oracle_cavity, oracle_energy_multi, oracle_energy_single, FockTruncation, OracleState, SingleModeParams,
};

const SUITE_SEED: u64 = 7;
const MULTI_MODE_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<32} max deviation {:.3e} (tolerance {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.deviation,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

fn model_err(source: crate::Error) -> CliError {
    CliError::Model {
        stage: "fockspace",
        source,
    }
}

/// The single-mode reference point used throughout the suite.
pub fn reference_single_mode() -> (TwoLevelSpec, ModeSpec) {
    (
        TwoLevelSpec::with_excited(1.0, 0.7).expect("valid"),
        ModeSpec::new(1.0, 0.2, 0.5, PI / 3.0).expect("valid"),
    )
}

fn random_modes(rng: &mut ChaCha8Rng, n: usize, eta_max: f64) -> Vec<ModeSpec> {
    (0..n)
        .map(|_| {
            let omega = rng.random_range(0.8..2.0);
            let eta = rng.random_range(0.05..eta_max);
            let alpha = rng.random_range(0.0..0.8);
            let phi = rng.random_range(-PI..PI);
            ModeSpec::new(omega, eta, alpha, phi).expect("sampled in range")
        })
        .collect()
}

/// Runs every check. `truncation` replaces the sized cutoff of the
/// single-mode checks; the multi-mode checks use at most 16 states per mode.
pub fn validate_suite(truncation: Option<usize>) -> Result<ValidationReport, CliError> {
    let mut checks = Vec::new();
    let times = time_grid(0.0, 4.0 * PI, 401);

    let (spec, mode) = reference_single_mode();
    let trunc = match truncation {
        Some(dim) => FockTruncation::new(dim).map_err(model_err)?,
        None => FockTruncation::sized_for(mode.alpha(), 2.0 * mode.eta() / mode.omega()),
    };
    let params = SingleModeParams {
        omega_sys: spec.omega_sys(),
        omega: mode.omega(),
        eta: mode.eta(),
    };
    let analytic = energy_single(&spec, &mode, &times).map_err(model_err)?;
    let state = OracleState::two_level_coherent(spec.p_e(), mode.amplitude(), trunc).map_err(model_err)?;
    let oracle = oracle_energy_single(&state, &params, &times).map_err(model_err)?;
    checks.push(Check {
        name: "single-mode coherent",
        deviation: analytic.max_abs_difference(&oracle.trace),
        tolerance: 1e-6,
    });
    checks.push(Check {
        name: "total energy conservation",
        deviation: oracle.energy_drift(),
        tolerance: 1e-8,
    });

    let shift = mode.eta() / mode.omega();
    let stationary = OracleState::two_level_displaced_fock(spec.p_e(), shift, shift, 2, trunc).map_err(model_err)?;
    let still = oracle_energy_single(&stationary, &params, &times).map_err(model_err)?;
    let level = spec.omega_sys() - 2.0 * mode.eta() * shift * spec.inversion();
    checks.push(Check {
        name: "displaced Fock stationarity",
        deviation: still.trace.values().iter().map(|v| (v - level).abs()).fold(0.0, f64::max),
        tolerance: 1e-8,
    });

    let doubled = FockTruncation::new(2 * trunc.dim()).map_err(model_err)?;
    let state2 = OracleState::two_level_coherent(spec.p_e(), mode.amplitude(), doubled).map_err(model_err)?;
    let oracle2 = oracle_energy_single(&state2, &params, &times).map_err(model_err)?;
    checks.push(Check {
        name: "truncation convergence",
        deviation: oracle.trace.max_abs_difference(&oracle2.trace),
        tolerance: 1e-8,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let multi_dim = truncation.map_or(MULTI_MODE_DIM, |d| d.min(MULTI_MODE_DIM));
    let truncs = vec![FockTruncation::new(multi_dim).map_err(model_err)?; 3];
    let coarse = time_grid(0.0, 4.0 * PI, 161);

    let modes = random_modes(&mut rng, 3, 0.2);
    let p_e = rng.random_range(0.0..1.0);
    let spec = TwoLevelSpec::with_excited(0.8, p_e).map_err(model_err)?;
    let betas: Vec<Complex64> = modes.iter().map(ModeSpec::amplitude).collect();
    let analytic = energy_multi(&spec, &modes, &coarse).map_err(model_err)?;
    let state = OracleState::multi_mode_coherent(p_e, &betas, &truncs).map_err(model_err)?;
    let oracle = oracle_energy_multi(&state, spec.omega_sys(), &modes, &coarse).map_err(model_err)?;
    checks.push(Check {
        name: "three-mode coherent",
        deviation: analytic.max_abs_difference(&oracle.trace),
        tolerance: 1e-6,
    });

    let cavity = CavitySpec::new(1.5, vec![(0, 0.5), (1, 0.3), (2, 0.2)]).map_err(model_err)?;
    let modes = random_modes(&mut rng, 3, 0.12);
    let betas: Vec<Complex64> = modes.iter().map(ModeSpec::amplitude).collect();
    let analytic = cavity_omega_t_discrete(&cavity, &modes, &coarse).map_err(model_err)?;
    let state = OracleState::cavity_coherent(&cavity, &betas, &truncs).map_err(model_err)?;
    let oracle = oracle_cavity(&state, cavity.omega_sys(), &modes, &coarse).map_err(model_err)?;
    checks.push(Check {
        name: "cavity three-mode, mu = 0.7",
        deviation: analytic.max_abs_difference(&oracle.trace),
        tolerance: 1e-6,
    });

    Ok(ValidationReport { checks })
}
