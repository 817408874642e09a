use std::f64::consts::PI;
use std::sync::Arc;

use optocycle::analytic::{
    cavity_omega_t_continuum, cavity_omega_t_discrete, time_grid, EtaOver, ModeDensity, QuadratureConfig,
};
use optocycle::bathdesign::{design_square_wave, ContinuumDesign, CouplingProfile};
use optocycle::thermocycle::{detect_strokes, DetectionConfig};
use optocycle::CavitySpec;

const AMPLITUDE: f64 = 3.0;
const OMEGA0: f64 = 4.0;
const ETA: f64 = 0.8;
const HARMONICS: usize = 12;

fn spec() -> CavitySpec {
    CavitySpec::new(5.0, vec![(0, 0.5), (1, 0.3), (2, 0.2)]).unwrap()
}

fn continuum_design(spec: &CavitySpec) -> ContinuumDesign {
    ContinuumDesign::new(AMPLITUDE, OMEGA0, spec.mu(), HARMONICS, Arc::new(|_| ETA)).unwrap()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig {
        tolerance: 1e-9,
        ..QuadratureConfig::default()
    }
}

/// Deviation between the comb continuum and the discrete design delayed by
/// half a period.
fn comb_deviation(eta_over: EtaOver) -> f64 {
    let spec = spec();
    let period = 2.0 * PI / OMEGA0;
    let times = time_grid(0.0, 2.0 * period, 301);
    let bath = continuum_design(&spec).comb_bath(1e-3);
    let continuum = cavity_omega_t_continuum(&spec, &bath, &times, eta_over, &quad()).unwrap();

    let design = design_square_wave(AMPLITUDE, OMEGA0, HARMONICS, spec.mu(), &CouplingProfile::constant(ETA)).unwrap();
    let shifted: Vec<f64> = times.iter().map(|t| t + 0.5 * period).collect();
    let discrete = cavity_omega_t_discrete(&spec, design.modes(), &shifted).unwrap();
    continuum
        .trace
        .values()
        .iter()
        .zip(discrete.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn narrow_comb_reproduces_shifted_discrete_trace() {
    let dev = comb_deviation(EtaOver::Omega0);
    assert!(dev < 1e-4, "{dev:e}");
}

#[test]
fn dividing_by_omega_breaks_the_correspondence() {
    let dev = comb_deviation(EtaOver::Omega);
    assert!(dev > 1e-2, "{dev:e}");
}

#[test]
fn continuum_trace_has_strokes_at_the_design_period() {
    let spec = spec();
    let period = 2.0 * PI / OMEGA0;
    let times = time_grid(0.0, 4.0 * period, 4096);
    let bath = continuum_design(&spec).comb_bath(1e-3);
    let out = cavity_omega_t_continuum(&spec, &bath, &times, EtaOver::Omega0, &quad()).unwrap();
    let report = detect_strokes(&out.trace, OMEGA0, &DetectionConfig::default()).unwrap();
    assert!((report.period - period).abs() < 1e-12);
    assert!(report.n_periods_analyzed >= 2);
    assert!(report.gap() > 0.0);
}

#[test]
fn uniform_density_needs_the_harmonics_inside_the_window() {
    let spec = spec();
    let design = continuum_design(&spec);
    let bath = design.bath(ModeDensity::Uniform, Some((0.5 * OMEGA0, 10.0 * OMEGA0)));
    let err = cavity_omega_t_continuum(&spec, &bath, &[0.0, 0.1], EtaOver::Omega0, &quad()).unwrap_err();
    assert!(err.to_string().contains("window"), "{err}");
}
