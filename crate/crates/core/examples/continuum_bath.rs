//! Square-wave design for a continuous spectrum, integrated numerically.

use std::f64::consts::PI;
use std::sync::Arc;

use optocycle::analytic::{cavity_omega_t_continuum, time_grid, EtaOver, QuadratureConfig};
use optocycle::bathdesign::ContinuumDesign;
use optocycle::thermocycle::{detect_strokes, DetectionConfig};
use optocycle::CavitySpec;

fn main() -> optocycle::Result<()> {
    let spec = CavitySpec::new(5.0, vec![(0, 0.5), (1, 0.3), (2, 0.2)])?;
    let omega0 = 4.0;
    let design = ContinuumDesign::new(3.0, omega0, spec.mu(), 12, Arc::new(|_| 0.8))?;
    let bath = design.comb_bath(0.05);

    let times = time_grid(0.0, 3.0 * 2.0 * PI / omega0, 2048);
    let out = cavity_omega_t_continuum(&spec, &bath, &times, EtaOver::Omega0, &QuadratureConfig::default())?;
    println!("quadrature: {} panels per tooth, last change {:.1e}", out.panels, out.last_change);

    let report = detect_strokes(&out.trace, omega0, &DetectionConfig::default())?;
    println!(
        "period {:.4}, plateaus {:.4} / {:.4}, {} strokes",
        report.period,
        report.plateau_high,
        report.plateau_low,
        report.strokes.len()
    );
    Ok(())
}
