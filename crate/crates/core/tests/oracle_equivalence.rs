use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use optocycle::analytic::{cavity_omega_t_discrete, energy_multi, energy_single, time_grid};
use optocycle::bathdesign::{design_square_wave, CouplingProfile};
use optocycle::fockspace::{
    oracle_cavity, oracle_energy_multi, oracle_energy_single, FockTruncation, OracleState, SingleModeParams,
};
use optocycle::{CavitySpec, ModeSpec, TwoLevelSpec};

fn reference() -> (TwoLevelSpec, ModeSpec, SingleModeParams) {
    let spec = TwoLevelSpec::with_excited(1.0, 0.7).unwrap();
    let mode = ModeSpec::new(1.0, 0.2, 0.5, PI / 3.0).unwrap();
    let params = SingleModeParams {
        omega_sys: 1.0,
        omega: 1.0,
        eta: 0.2,
    };
    (spec, mode, params)
}

fn single_oracle(spec: &TwoLevelSpec, mode: &ModeSpec, params: &SingleModeParams, dim: usize, times: &[f64]) -> Vec<f64> {
    let state = OracleState::two_level_coherent(spec.p_e(), mode.amplitude(), FockTruncation::new(dim).unwrap()).unwrap();
    oracle_energy_single(&state, params, times).unwrap().trace.values().to_vec()
}

#[test]
fn reference_point_at_pi() {
    let (spec, mode, params) = reference();
    let by_hand = 1.0 + 0.2 * (PI - PI / 3.0).cos() * 2.0 * 0.5 + 2.0 * 0.04 * 0.4 * (-2.0);
    let analytic = energy_single(&spec, &mode, &[PI]).unwrap().values()[0];
    let oracle = single_oracle(&spec, &mode, &params, 32, &[PI])[0];
    assert!((analytic - by_hand).abs() < 1e-14);
    assert!((oracle - by_hand).abs() < 1e-6);
}

#[test]
fn uncoupled_bath_leaves_energy_flat() {
    let params = SingleModeParams {
        omega_sys: 1.3,
        omega: 0.7,
        eta: 0.0,
    };
    let times = time_grid(0.0, 20.0, 101);
    let state =
        OracleState::two_level_coherent(0.25, Complex64::from_polar(1.1, 0.4), FockTruncation::new(32).unwrap())
            .unwrap();
    let out = oracle_energy_single(&state, &params, &times).unwrap();
    assert!(out.trace.values().iter().all(|v| (v - 1.3).abs() < 1e-12));
}

#[test]
fn truncation_convergence() {
    let (spec, mode, params) = reference();
    let times = time_grid(0.0, 4.0 * PI, 201);
    let dim = FockTruncation::sized_for(mode.alpha(), 2.0 * mode.eta() / mode.omega()).dim();
    let coarse = single_oracle(&spec, &mode, &params, dim, &times);
    let fine = single_oracle(&spec, &mode, &params, 2 * dim, &times);
    let change = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(change < 1e-8, "{change:e}");
}

#[test]
fn conservation_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let times = time_grid(0.0, 30.0, 121);
    for _ in 0..5 {
        let params = SingleModeParams {
            omega_sys: rng.random_range(-2.0..2.0),
            omega: rng.random_range(0.3..2.0),
            eta: rng.random_range(0.0..0.4),
        };
        let beta = Complex64::from_polar(rng.random_range(0.0..1.5), rng.random_range(-PI..PI));
        let state = OracleState::two_level_coherent(rng.random_range(0.0..1.0), beta, FockTruncation::new(48).unwrap())
            .unwrap();
        let out = oracle_energy_single(&state, &params, &times).unwrap();
        assert!(out.energy_drift() < 1e-8, "{}", out.energy_drift());
    }
}

#[test]
fn displaced_fock_states_are_stationary() {
    let (spec, mode, params) = reference();
    let shift = mode.eta() / mode.omega();
    let times = time_grid(0.0, 10.0, 51);
    for n in 0..4 {
        let state = OracleState::two_level_displaced_fock(spec.p_e(), shift, shift, n, FockTruncation::new(40).unwrap())
            .unwrap();
        let out = oracle_energy_single(&state, &params, &times).unwrap();
        let level = 1.0 - 2.0 * 0.2 * shift * spec.inversion();
        assert!(out.trace.values().iter().all(|v| (v - level).abs() < 1e-9), "n = {n}");
    }
}

#[test]
fn three_modes_at_dim_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let modes: Vec<ModeSpec> = (0..3)
        .map(|_| {
            ModeSpec::new(
                rng.random_range(0.8..1.6),
                rng.random_range(0.05..0.15),
                rng.random_range(0.0..0.6),
                rng.random_range(-PI..PI),
            )
            .unwrap()
        })
        .collect();
    let spec = TwoLevelSpec::with_excited(0.9, 0.35).unwrap();
    let betas: Vec<Complex64> = modes.iter().map(ModeSpec::amplitude).collect();
    let truncs = vec![FockTruncation::new(12).unwrap(); 3];
    let times = time_grid(0.0, 4.0 * PI, 101);
    let state = OracleState::multi_mode_coherent(0.35, &betas, &truncs).unwrap();
    let oracle = oracle_energy_multi(&state, 0.9, &modes, &times).unwrap();
    let analytic = energy_multi(&spec, &modes, &times).unwrap();
    assert!(analytic.max_abs_difference(&oracle.trace) < 1e-6);
    assert!(oracle.energy_drift() < 1e-8);
}

#[test]
fn cavity_ladder_matches_block_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let spec = CavitySpec::new(2.0, vec![(0, 0.5), (1, 0.3), (2, 0.2)]).unwrap();
    assert!((spec.mu() - 0.7).abs() < 1e-15);
    let modes: Vec<ModeSpec> = (0..3)
        .map(|_| {
            ModeSpec::new(
                rng.random_range(0.8..1.6),
                rng.random_range(0.03..0.1),
                rng.random_range(0.0..0.6),
                rng.random_range(-PI..PI),
            )
            .unwrap()
        })
        .collect();
    let betas: Vec<Complex64> = modes.iter().map(ModeSpec::amplitude).collect();
    let truncs = vec![FockTruncation::new(14).unwrap(); 3];
    let times = time_grid(0.0, 4.0 * PI, 101);
    let state = OracleState::cavity_coherent(&spec, &betas, &truncs).unwrap();
    let oracle = oracle_cavity(&state, 2.0, &modes, &times).unwrap();
    let analytic = cavity_omega_t_discrete(&spec, &modes, &times).unwrap();
    assert!(analytic.max_abs_difference(&oracle.trace) < 1e-6);
    assert!(oracle.energy_drift() < 1e-8);
}

/// A 50-mode designed bath is out of reach for the tensor product, but the
/// modes do not interact: check each against its own single-mode oracle
/// and the sum against the multi-mode closed form.
#[test]
fn designed_bath_mode_by_mode() {
    let design = design_square_wave(30.0, 40.0, 50, 1.0, &CouplingProfile::gaussian(10.0, 0.1, 2014)).unwrap();
    let spec = TwoLevelSpec::with_excited(0.0, 1.0).unwrap();
    let period = 2.0 * PI / 40.0;
    let times = time_grid(0.0, 1.5 * period, 97);
    let mut summed = vec![0.0; times.len()];
    for mode in design.modes() {
        let params = SingleModeParams {
            omega_sys: 0.0,
            omega: mode.omega(),
            eta: mode.eta(),
        };
        let dim = FockTruncation::sized_for(mode.alpha(), 2.0 * mode.eta() / mode.omega()).dim();
        let oracle = single_oracle(&spec, mode, &params, dim, &times);
        let analytic = energy_single(&spec, mode, &times).unwrap();
        for ((s, o), a) in summed.iter_mut().zip(&oracle).zip(analytic.values()) {
            assert!((o - a).abs() < 1e-6, "mode at {}", mode.omega());
            *s += o;
        }
    }
    let full = energy_multi(&spec, design.modes(), &times).unwrap();
    let dev = full.values().iter().zip(&summed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-6, "{dev:e}");
}
