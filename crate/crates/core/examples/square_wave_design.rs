//! Design a bath whose energy trace is a square wave, then look at it.

use optocycle::analytic::{energy_multi, time_grid};
use optocycle::bathdesign::{design_square_wave, CouplingProfile};
use optocycle::TwoLevelSpec;

fn main() -> optocycle::Result<()> {
    let (amplitude, omega0, inversion) = (30.0, 40.0, 1.0);
    let profile = CouplingProfile::gaussian(10.0, 0.1, 2014);
    let design = design_square_wave(amplitude, omega0, 50, inversion, &profile)?;

    let series = design.fourier_series(0.0);
    let worst_cos = series.cosine.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    println!("largest cosine coefficient {worst_cos:.1e}");
    println!("plateau in the many-harmonic limit {:.4}", design.limit_plateau());

    let spec = TwoLevelSpec::with_excited(0.0, 0.5 * (1.0 + inversion))?;
    let times = time_grid(0.0, design.period(), 24);
    let trace = energy_multi(&spec, design.modes(), &times)?;
    for (t, v) in times.iter().zip(trace.values()) {
        let bar = ((v - series.dc + 0.8) * 30.0).max(0.0) as usize;
        println!("{t:7.4} {v:9.4} {}", "#".repeat(bar));
    }
    Ok(())
}
