//! Cavity eigenenergy under a designed bath, split into four strokes,
//! with the photon-number level diagram and per-stroke heat.

use optocycle::analytic::{cavity_omega_t_discrete, time_grid};
use optocycle::bathdesign::{design_square_wave, CouplingProfile};
use optocycle::thermocycle::{detect_strokes, heat_ledger, level_diagram, DetectionConfig};
use optocycle::CavitySpec;

fn main() -> optocycle::Result<()> {
    let spec = CavitySpec::new(12.0, vec![(0, 0.5), (1, 0.3), (2, 0.2)])?;
    let omega0 = 40.0;
    let design = design_square_wave(30.0, omega0, 50, spec.mu(), &CouplingProfile::gaussian(10.0, 0.1, 2014))?;
    let times = time_grid(0.0, 4.0 * design.period(), 8192);
    let trace = cavity_omega_t_discrete(&spec, design.modes(), &times)?;

    let report = detect_strokes(&trace, omega0, &DetectionConfig::default())?.with_heat(&spec);
    println!(
        "{} periods, plateaus {:.4} / {:.4}, ripple {:.2e}",
        report.n_periods_analyzed, report.plateau_high, report.plateau_low, report.ripple
    );
    for (stroke, q) in report.strokes.iter().zip(heat_ledger(&spec, &report)) {
        println!(
            "period {} {:<11} [{:.4}, {:.4}] heat {q:+.4}",
            stroke.period_index,
            stroke.kind.as_str(),
            stroke.t_start,
            stroke.t_end
        );
    }
    for row in level_diagram(&report, 2).iter().filter(|r| r.period_index == 0) {
        println!(
            "{:<11} m={} {:.4} -> {:.4}",
            row.kind.as_str(),
            row.level,
            row.energy_start,
            row.energy_end
        );
    }
    Ok(())
}
