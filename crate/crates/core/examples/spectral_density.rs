//! Spectral weights of the designed bath for three population inversions.

use optocycle::bathdesign::{design_square_wave, spectral_table, CouplingProfile};

fn main() -> optocycle::Result<()> {
    let profile = CouplingProfile::gaussian(10.0, 0.1, 2014);
    for inversion in [-1.0, 0.001, 1.0] {
        let design = design_square_wave(30.0, 40.0, 50, inversion, &profile)?;
        let rows = spectral_table(&design);
        println!("inversion {inversion}");
        for row in rows.iter().take(4) {
            println!(
                "  j={:2} omega={:7.1} eta={:8.4} weight={:10.4e} printed phase={:+.4}",
                row.j, row.omega, row.eta, row.weight, row.printed_phase
            );
        }
        println!("  first/second weight ratio {:.4}", rows[0].weight / rows[1].weight);
    }
    Ok(())
}
