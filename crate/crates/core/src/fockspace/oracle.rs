//! Brute-force energy traces.
//!
//! The system-bath Hamiltonians here commute with the system observable
//! (`sigma_z`, or the cavity photon number), so the density matrix stays
//! block diagonal in the system label. Each block is a pure bath state
//! evolved under its own bath Hamiltonian; the full system-bath matrix is
//! never formed.

use nalgebra::DVector;
use num_complex::Complex64;

use super::{
    build_hamiltonian_single, build_ops, displacement, fock_state, tensor_product, ChebyshevPropagator,
    FockTruncation, Propagator, SparseOperator, TripletBuilder, LEAKAGE_WARN,
};
use crate::analytic::{check_time_grid, CavitySpec, EnergyTrace, ModeSpec, TraceKind};
use crate::{Error, Result};

const PROBABILITY_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    Excited,
    Ground,
    /// Cavity Fock level `m`.
    Photons(u32),
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub label: BranchLabel,
    pub probability: f64,
    pub bath_state: DVector<Complex64>,
}

/// Block-diagonal initial state: one bath state per system label.
#[derive(Debug, Clone)]
pub struct OracleState {
    branches: Vec<Branch>,
    mode_dims: Vec<usize>,
    fock_seed: usize,
}

impl OracleState {
    pub fn new(branches: Vec<Branch>, mode_dims: Vec<usize>, fock_seed: usize) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::param("branches", "at least one branch is required"));
        }
        if mode_dims.is_empty() || mode_dims.iter().any(|&d| d < 2) {
            return Err(Error::param("mode_dims", "every mode needs a Fock cutoff >= 2"));
        }
        let full: usize = mode_dims.iter().product();
        let mut total = 0.0;
        for b in &branches {
            if !(b.probability >= 0.0) {
                return Err(Error::param("probability", format!("negative branch weight {}", b.probability)));
            }
            total += b.probability;
            if b.bath_state.len() != full {
                return Err(Error::DimensionMismatch {
                    expected: full,
                    actual: b.bath_state.len(),
                });
            }
            let deviation = (b.bath_state.norm() - 1.0).abs();
            if deviation > NORM_TOL {
                return Err(Error::NotNormalized { deviation });
            }
        }
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::param("probability", format!("branch weights sum to {total}")));
        }
        Ok(Self {
            branches,
            mode_dims,
            fock_seed,
        })
    }

    /// Both `sigma_z` branches share the coherent bath state `|beta>`,
    /// prepared as `D(beta)|0>`.
    pub fn two_level_coherent(p_e: f64, beta: Complex64, trunc: FockTruncation) -> Result<Self> {
        Self::multi_mode_coherent(p_e, &[beta], &[trunc])
    }

    /// The excited branch starts in `D(-d_e)|n>`, the ground branch in
    /// `D(d_g)|n>` (`n = fock_seed`). With `d_e = d_g = eta / omega` these are
    /// the stationary displaced Fock eigenstates of the two blocks.
    pub fn two_level_displaced_fock(
        p_e: f64,
        displacement_e: f64,
        displacement_g: f64,
        fock_seed: usize,
        trunc: FockTruncation,
    ) -> Result<Self> {
        let ops = build_ops(trunc);
        let n = fock_state(fock_seed, trunc)?;
        let psi_e = displacement(Complex64::new(-displacement_e, 0.0), &ops) * &n;
        let psi_g = displacement(Complex64::new(displacement_g, 0.0), &ops) * &n;
        Self::new(
            vec![
                Branch {
                    label: BranchLabel::Excited,
                    probability: p_e,
                    bath_state: psi_e,
                },
                Branch {
                    label: BranchLabel::Ground,
                    probability: 1.0 - p_e,
                    bath_state: psi_g,
                },
            ],
            vec![trunc.dim()],
            fock_seed,
        )
    }

    /// Product of coherent states `|beta_1> x ... x |beta_k>` shared by both branches.
    pub fn multi_mode_coherent(p_e: f64, betas: &[Complex64], truncs: &[FockTruncation]) -> Result<Self> {
        let bath = coherent_product(betas, truncs)?;
        Self::new(
            vec![
                Branch {
                    label: BranchLabel::Excited,
                    probability: p_e,
                    bath_state: bath.clone(),
                },
                Branch {
                    label: BranchLabel::Ground,
                    probability: 1.0 - p_e,
                    bath_state: bath,
                },
            ],
            truncs.iter().map(|t| t.dim()).collect(),
            0,
        )
    }

    /// One branch per cavity level, all sharing the coherent bath product.
    pub fn cavity_coherent(spec: &CavitySpec, betas: &[Complex64], truncs: &[FockTruncation]) -> Result<Self> {
        let bath = coherent_product(betas, truncs)?;
        let branches = spec
            .level_populations()
            .iter()
            .map(|&(m, p)| Branch {
                label: BranchLabel::Photons(m),
                probability: p,
                bath_state: bath.clone(),
            })
            .collect();
        Self::new(branches, truncs.iter().map(|t| t.dim()).collect(), 0)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn fock_seed(&self) -> usize {
        self.fock_seed
    }
}

fn coherent_product(betas: &[Complex64], truncs: &[FockTruncation]) -> Result<DVector<Complex64>> {
    if betas.len() != truncs.len() || betas.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: truncs.len(),
            actual: betas.len(),
        });
    }
    let factors: Vec<_> = betas
        .iter()
        .zip(truncs)
        .map(|(&beta, &trunc)| displacement(beta, &build_ops(trunc)) * fock_state(0, trunc).unwrap())
        .collect();
    Ok(tensor_product(&factors))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeParams {
    pub omega_sys: f64,
    pub omega: f64,
    pub eta: f64,
}

#[derive(Debug, Clone)]
pub struct OracleTrace {
    /// Controller-averaged system energy: `S(t)` or the cavity `Omega(t)`.
    pub trace: EnergyTrace,
    /// `<H(t)>` of the full system-bath state.
    pub total_energy: Vec<f64>,
    /// Largest population found on any state touching a Fock cutoff.
    pub max_edge_population: f64,
}

impl OracleTrace {
    /// `max_t |<H(t)> - <H(0)>|`.
    pub fn energy_drift(&self) -> f64 {
        let first = self.total_energy.first().copied().unwrap_or(0.0);
        self.total_energy
            .iter()
            .map(|e| (e - first).abs())
            .fold(0.0, f64::max)
    }
}

fn edge_population(psi: &[Complex64], dims: &[usize]) -> f64 {
    let mut total = 0.0;
    for (idx, amp) in psi.iter().enumerate() {
        let mut rest = idx;
        let mut at_edge = false;
        for &d in dims.iter().rev() {
            if rest % d == d - 1 {
                at_edge = true;
                break;
            }
            rest /= d;
        }
        if at_edge {
            total += amp.norm_sqr();
        }
    }
    total
}

fn warn_leakage(edge: f64, what: &str) {
    if edge > LEAKAGE_WARN {
        log::warn!("{what}: population {edge:.2e} reached the Fock cutoff; enlarge the truncation");
    }
}

/// Single-mode two-level model by dense eigendecomposition of each block.
///
/// `S(t) = sum_g P_g (Omega + eta <psi_g(t)| a + a^dagger |psi_g(t)>)` with
/// each branch evolved under its own `sigma_z` block.
pub fn oracle_energy_single(state: &OracleState, params: &SingleModeParams, times: &[f64]) -> Result<OracleTrace> {
    check_time_grid(times)?;
    if state.mode_dims.len() != 1 {
        return Err(Error::param("state", "single-mode oracle needs a one-mode bath state"));
    }
    let trunc = FockTruncation::new(state.mode_dims[0])?;
    let ops = build_ops(trunc);
    let (h_e, h_g) = build_hamiltonian_single(params.omega_sys, params.omega, params.eta, &ops)?;
    let quadrature = ops.quadrature();

    let mut values = vec![0.0; times.len()];
    let mut total = vec![0.0; times.len()];
    let mut worst_edge: f64 = 0.0;
    for branch in &state.branches {
        let h = match branch.label {
            BranchLabel::Excited => &h_e,
            BranchLabel::Ground => &h_g,
            BranchLabel::Photons(_) => {
                return Err(Error::param("state", "two-level oracle got a cavity branch"));
            }
        };
        let propagator = Propagator::new(h)?;
        let trajectory = propagator.trajectory(&branch.bath_state)?;
        for (k, &t) in times.iter().enumerate() {
            let psi = trajectory.at(t);
            let x = psi.dotc(&(&quadrature * &psi)).re;
            let e = psi.dotc(&(h * &psi)).re;
            values[k] += branch.probability * (params.omega_sys + params.eta * x);
            total[k] += branch.probability * e;
            worst_edge = worst_edge.max(edge_population(psi.as_slice(), &state.mode_dims));
        }
    }
    warn_leakage(worst_edge, "single-mode oracle");
    Ok(OracleTrace {
        trace: EnergyTrace::new(times.to_vec(), values, TraceKind::SigmaZCoefficient, params.omega_sys)?,
        total_energy: total,
        max_edge_population: worst_edge,
    })
}

/// `drive * sum_j eta_j (a_j + a_j^dagger)` and `sum_j omega_j a_j^dagger a_j`
/// on the full tensor product.
fn tensor_operators(modes: &[ModeSpec], dims: &[usize]) -> (TripletBuilder, TripletBuilder) {
    let full: usize = dims.iter().product();
    let mut oscillators = TripletBuilder::new(full);
    let mut coupling = TripletBuilder::new(full);
    for (j, (mode, &d)) in modes.iter().zip(dims).enumerate() {
        let ops = build_ops(FockTruncation::new(d).expect("validated cutoff"));
        oscillators.push_embedded(&ops.number, j, dims, mode.omega());
        coupling.push_embedded(&ops.quadrature(), j, dims, mode.eta());
    }
    (oscillators, coupling)
}

/// Evolves each branch with its own Hamiltonian by Chebyshev propagation on
/// the full tensor-product space and accumulates `system + <observable>`.
fn evolve_branches(
    state: &OracleState,
    hamiltonians: &[(f64, SparseOperator)],
    observable: &SparseOperator,
    times: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut values = vec![0.0; times.len()];
    let mut total = vec![0.0; times.len()];
    let mut worst_edge: f64 = 0.0;
    for (branch, (system_energy, h)) in state.branches.iter().zip(hamiltonians) {
        if branch.probability == 0.0 {
            continue;
        }
        let propagator = ChebyshevPropagator::new(h)?;
        let mut psi: Vec<Complex64> = branch.bath_state.as_slice().to_vec();
        let mut t_prev = 0.0;
        for (k, &t) in times.iter().enumerate() {
            psi = propagator.step(&psi, t - t_prev);
            t_prev = t;
            values[k] += branch.probability * (system_energy + observable.expectation(&psi).re);
            total[k] += branch.probability * h.expectation(&psi).re;
            worst_edge = worst_edge.max(edge_population(&psi, &state.mode_dims));
        }
    }
    Ok((values, total, worst_edge))
}

fn check_modes(state: &OracleState, modes: &[ModeSpec]) -> Result<()> {
    if modes.len() != state.mode_dims.len() {
        return Err(Error::DimensionMismatch {
            expected: state.mode_dims.len(),
            actual: modes.len(),
        });
    }
    Ok(())
}

/// Multi-mode two-level model on the full bath tensor product.
///
/// Branch `e` evolves under `Omega + sum_j omega_j N_j + sum_j eta_j X_j`,
/// branch `g` under `-Omega + sum_j omega_j N_j - sum_j eta_j X_j`. Only the
/// frequencies and couplings of `modes` are used; the initial amplitudes
/// live in `state`.
pub fn oracle_energy_multi(
    state: &OracleState,
    omega_sys: f64,
    modes: &[ModeSpec],
    times: &[f64],
) -> Result<OracleTrace> {
    check_time_grid(times)?;
    check_modes(state, modes)?;
    let dims = &state.mode_dims;
    let (oscillators, coupling) = tensor_operators(modes, dims);
    let observable = coupling.clone().build();
    let hamiltonians = state
        .branches
        .iter()
        .map(|b| {
            let sign = match b.label {
                BranchLabel::Excited => 1.0,
                BranchLabel::Ground => -1.0,
                BranchLabel::Photons(_) => {
                    return Err(Error::param("state", "two-level oracle got a cavity branch"));
                }
            };
            let mut h = oscillators.clone();
            h.push_identity(sign * omega_sys);
            let mut drive = coupling.clone();
            scale_builder(&mut drive, sign);
            Ok((omega_sys, merge(h, drive)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, total, edge) = evolve_branches(state, &hamiltonians, &observable, times)?;
    warn_leakage(edge, "multi-mode oracle");
    Ok(OracleTrace {
        trace: EnergyTrace::new(times.to_vec(), values, TraceKind::SigmaZCoefficient, omega_sys)?,
        total_energy: total,
        max_edge_population: edge,
    })
}

/// Cavity model: level `m` evolves under
/// `H^m = m Omega + sum_j omega_j N_j + m sum_j eta_j X_j` and
/// `Omega(t) = Omega + sum_m P_m sum_j eta_j <X_j>_m`.
pub fn oracle_cavity(state: &OracleState, omega_sys: f64, modes: &[ModeSpec], times: &[f64]) -> Result<OracleTrace> {
    check_time_grid(times)?;
    check_modes(state, modes)?;
    let dims = &state.mode_dims;
    let (oscillators, coupling) = tensor_operators(modes, dims);
    let observable = coupling.clone().build();
    let hamiltonians = state
        .branches
        .iter()
        .map(|b| {
            let m = match b.label {
                BranchLabel::Photons(m) => m as f64,
                _ => return Err(Error::param("state", "cavity oracle needs photon-number branches")),
            };
            let mut h = oscillators.clone();
            h.push_identity(m * omega_sys);
            let mut drive = coupling.clone();
            scale_builder(&mut drive, m);
            Ok((omega_sys, merge(h, drive)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (values, total, edge) = evolve_branches(state, &hamiltonians, &observable, times)?;
    warn_leakage(edge, "cavity oracle");
    // Baseline: the trace mean is not known in closed form here, so report
    // the bare cavity frequency.
    Ok(OracleTrace {
        trace: EnergyTrace::new(times.to_vec(), values, TraceKind::CavityOmegaT, omega_sys)?,
        total_energy: total,
        max_edge_population: edge,
    })
}

fn scale_builder(b: &mut TripletBuilder, factor: f64) {
    let dim = b.dim();
    let entries = std::mem::replace(b, TripletBuilder::new(dim)).into_entries();
    for (r, c, v) in entries {
        b.push(r, c, v * factor);
    }
}

fn merge(a: TripletBuilder, b: TripletBuilder) -> SparseOperator {
    let mut out = a;
    for (r, c, v) in b.into_entries() {
        out.push(r, c, v);
    }
    out.build()
}
