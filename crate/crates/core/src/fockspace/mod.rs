//! Truncated Fock-space numerics.
//!
//! Everything here works with explicit complex matrices over the states
//! `|0>, ..., |N-1>` of one or more bosonic modes. Nothing in this module
//! uses the closed-form solutions from [`crate::analytic`]; it exists to
//! check them by brute force.

mod oracle;
mod propagate;

pub use oracle::{
    oracle_cavity, oracle_energy_multi, oracle_energy_single, Branch, BranchLabel, OracleState,
    OracleTrace, SingleModeParams,
};
pub use propagate::{
    bessel_j_sequence, evolve_state, ChebyshevPropagator, Propagator, SparseOperator,
    TripletBuilder,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance on `max |H - H^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Coherent-state tail weight above which a truncation is reported as leaky.
pub const LEAKAGE_WARN: f64 = 1e-8;

/// Fock-space cutoff: the states `|0>` through `|dim - 1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    dim: usize,
}

impl FockTruncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::param("dim", format!("Fock cutoff must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }

    /// Cutoff large enough for a coherent state of magnitude `amplitude`
    /// that the drive can push a further `drive_displacement` (at most
    /// `2 eta / omega`): `ceil((|alpha| + d + 4)^2)`, clamped to `[16, 256]`.
    pub fn sized_for(amplitude: f64, drive_displacement: f64) -> Self {
        let reach = amplitude.abs() + drive_displacement.abs() + 4.0;
        let dim = (reach * reach).ceil();
        let dim = if dim.is_finite() { dim as usize } else { 256 };
        Self {
            dim: dim.clamp(16, 256),
        }
    }

    pub fn dim(self) -> usize {
        self.dim
    }
}

/// Ladder operators of one truncated mode.
#[derive(Debug, Clone)]
pub struct BosonicOps {
    pub annihilate: DMatrix<Complex64>,
    pub create: DMatrix<Complex64>,
    pub number: DMatrix<Complex64>,
}

impl BosonicOps {
    pub fn dim(&self) -> usize {
        self.annihilate.nrows()
    }

    /// `a + a^dagger`.
    pub fn quadrature(&self) -> DMatrix<Complex64> {
        &self.annihilate + &self.create
    }
}

/// `a|n> = sqrt(n)|n-1>`, `a^dagger` its adjoint and `N = a^dagger a`.
pub fn build_ops(trunc: FockTruncation) -> BosonicOps {
    let dim = trunc.dim();
    let mut annihilate = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        annihilate[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let create = annihilate.adjoint();
    let number = &create * &annihilate;
    BosonicOps {
        annihilate,
        create,
        number,
    }
}

/// Probability mass of a coherent state `|beta>` above the cutoff, i.e. the
/// Poisson tail `1 - sum_{n<dim} e^{-|beta|^2} |beta|^{2n} / n!`.
pub fn coherent_leakage(beta: Complex64, trunc: FockTruncation) -> f64 {
    let mean = beta.norm_sqr();
    if mean == 0.0 {
        return 0.0;
    }
    // Summing the tail directly avoids cancellation in 1 - (sum of head).
    let mut term = (-mean).exp();
    for n in 1..trunc.dim() {
        term *= mean / n as f64;
    }
    let mut tail = 0.0;
    let mut n = trunc.dim();
    loop {
        term *= mean / n as f64;
        tail += term;
        if term < 1e-300 || (n as f64 > mean && term < tail * 1e-17) {
            break;
        }
        n += 1;
    }
    tail
}

/// Displacement operator `D(beta) = exp(beta a^dagger - beta^* a)` on the
/// truncated space.
///
/// The generator is anti-Hermitian, so `D` is computed exactly from the
/// eigendecomposition of the Hermitian matrix `i (beta a^dagger - beta^* a)`
/// and is unitary to machine precision. It only approximates the
/// untruncated operator; a warning is logged when the coherent state
/// `D(beta)|0>` loses more than [`LEAKAGE_WARN`] of its norm above the cutoff.
pub fn displacement(beta: Complex64, ops: &BosonicOps) -> DMatrix<Complex64> {
    let dim = ops.dim();
    let trunc = FockTruncation { dim };
    let leakage = coherent_leakage(beta, trunc);
    if leakage > LEAKAGE_WARN {
        log::warn!("displacement |beta| = {:.3} leaks {leakage:.2e} above Fock cutoff {dim}", beta.norm());
    }
    if beta == Complex64::new(0.0, 0.0) {
        return DMatrix::identity(dim, dim);
    }
    let generator = ops.create.map(|z| z * beta) - ops.annihilate.map(|z| z * beta.conj());
    // D = exp(G) = exp(-i K) with K = i G Hermitian.
    let hermitian = generator.map(|z| z * Complex64::i());
    Propagator::new(&hermitian)
        .expect("i (beta a^dagger - beta^* a) is Hermitian by construction")
        .unitary(1.0)
}

/// The two `sigma_z` blocks of `H = Omega sigma_z + omega a^dagger a + eta (a + a^dagger) sigma_z`:
///
/// * excited: `H_e =  Omega + omega a^dagger a + eta (a + a^dagger)`
/// * ground:  `H_g = -Omega + omega a^dagger a - eta (a + a^dagger)`
pub fn build_hamiltonian_single(
    omega_sys: f64,
    omega: f64,
    eta: f64,
    ops: &BosonicOps,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::param("omega", format!("bath frequency must be positive, got {omega}")));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::param("eta", format!("coupling must be nonnegative, got {eta}")));
    }
    if !omega_sys.is_finite() {
        return Err(Error::param("omega_sys", "must be finite"));
    }
    let dim = ops.dim();
    let identity = DMatrix::<Complex64>::identity(dim, dim);
    let oscillator = ops.number.map(|z| z * omega);
    let drive = ops.quadrature().map(|z| z * eta);
    let h_e = identity.map(|z| z * omega_sys) + &oscillator + &drive;
    let h_g = identity.map(|z| z * -omega_sys) + &oscillator - &drive;
    Ok((h_e, h_g))
}

/// `max_ij |H_ij - conj(H_ji)|`.
pub fn hermitian_deviation(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `<psi| op |psi>`.
pub fn expectation(op: &DMatrix<Complex64>, psi: &DVector<Complex64>) -> Complex64 {
    psi.dotc(&(op * psi))
}

/// Fock basis vector `|n>`.
pub fn fock_state(n: usize, trunc: FockTruncation) -> Result<DVector<Complex64>> {
    if n >= trunc.dim() {
        return Err(Error::param("n", format!("Fock index {n} outside cutoff {}", trunc.dim())));
    }
    let mut v = DVector::zeros(trunc.dim());
    v[n] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// Kronecker product of state vectors, first factor most significant.
pub fn tensor_product(factors: &[DVector<Complex64>]) -> DVector<Complex64> {
    let mut out = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}
