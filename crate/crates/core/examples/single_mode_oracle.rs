//! Closed-form single-mode energy against the Fock-space oracle.

use std::f64::consts::PI;

use optocycle::analytic::{energy_single, time_grid};
use optocycle::fockspace::{oracle_energy_single, FockTruncation, OracleState, SingleModeParams};
use optocycle::{ModeSpec, TwoLevelSpec};

fn main() -> optocycle::Result<()> {
    let spec = TwoLevelSpec::with_excited(1.0, 0.7)?;
    let mode = ModeSpec::new(1.0, 0.2, 0.5, PI / 3.0)?;
    let times = time_grid(0.0, 4.0 * PI, 9);

    let analytic = energy_single(&spec, &mode, &times)?;
    let trunc = FockTruncation::sized_for(mode.alpha(), 2.0 * mode.eta() / mode.omega());
    let state = OracleState::two_level_coherent(spec.p_e(), mode.amplitude(), trunc)?;
    let params = SingleModeParams {
        omega_sys: spec.omega_sys(),
        omega: mode.omega(),
        eta: mode.eta(),
    };
    let oracle = oracle_energy_single(&state, &params, &times)?;

    println!("Fock cutoff {}", trunc.dim());
    println!("{:>8} {:>12} {:>12}", "t", "closed form", "oracle");
    for ((t, a), o) in times.iter().zip(analytic.values()).zip(oracle.trace.values()) {
        println!("{t:8.4} {a:12.8} {o:12.8}");
    }
    println!("max deviation {:.2e}", analytic.max_abs_difference(&oracle.trace));
    println!("energy drift  {:.2e}", oracle.energy_drift());
    Ok(())
}
