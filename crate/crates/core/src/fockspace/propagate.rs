use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{hermitian_deviation, HERMITIAN_TOL};
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// `exp(-i H t)` for a time-independent Hermitian `H`, from one
/// eigendecomposition reused for every `t`.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<Complex64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                actual: h.ncols(),
            });
        }
        let max_deviation = hermitian_deviation(h);
        if !(max_deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { max_deviation });
        }
        // Symmetrize so round-off in the input cannot leak into the solver.
        let sym = (h + h.adjoint()).map(|z| z * 0.5);
        let eig = sym.symmetric_eigen();
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        self.energies.as_slice()
    }

    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let phases = self.energies.map(|e| Complex64::from_polar(1.0, -e * t));
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.vectors[(i, j)] * phases[j]);
        scaled * self.vectors.adjoint()
    }

    /// Expands `psi0` in the eigenbasis once; the returned handle evaluates
    /// `psi(t)` at `O(dim^2)` per time.
    pub fn trajectory(&self, psi0: &DVector<Complex64>) -> Result<Trajectory<'_>> {
        if psi0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi0.len(),
            });
        }
        Ok(Trajectory {
            propagator: self,
            coeffs: self.vectors.adjoint() * psi0,
        })
    }
}

pub struct Trajectory<'a> {
    propagator: &'a Propagator,
    coeffs: DVector<Complex64>,
}

impl Trajectory<'_> {
    pub fn at(&self, t: f64) -> DVector<Complex64> {
        let rotated = DVector::from_fn(self.coeffs.len(), |k, _| {
            self.coeffs[k] * Complex64::from_polar(1.0, -self.propagator.energies[k] * t)
        });
        &self.propagator.vectors * rotated
    }
}

/// `|psi(t)> = exp(-i H t)|psi(0)>`.
pub fn evolve_state(h: &DMatrix<Complex64>, psi0: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    let deviation = (psi0.norm() - 1.0).abs();
    if !(deviation <= NORM_TOL) {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(Propagator::new(h)?.trajectory(psi0)?.at(t))
}

/// Compressed-row complex matrix, enough for tensor-product Hamiltonians.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn into_entries(self) -> Vec<(usize, usize, Complex64)> {
        self.entries
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    pub fn push_identity(&mut self, scale: f64) {
        for i in 0..self.dim {
            self.push(i, i, Complex64::new(scale, 0.0));
        }
    }

    /// Adds `scale * (I x ... x local x ... x I)` with `local` acting on
    /// factor `mode` of a tensor product with factor sizes `dims`
    /// (first factor most significant).
    pub fn push_embedded(&mut self, local: &DMatrix<Complex64>, mode: usize, dims: &[usize], scale: f64) {
        let d = dims[mode];
        assert_eq!(local.nrows(), d, "local operator does not match factor size");
        let inner: usize = dims[mode + 1..].iter().product();
        let outer: usize = dims[..mode].iter().product();
        for r in 0..d {
            for c in 0..d {
                let v = local[(r, c)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for o in 0..outer {
                    for i in 0..inner {
                        let row = (o * d + r) * inner + i;
                        let col = (o * d + c) * inner + i;
                        self.push(row, col, v * scale);
                    }
                }
            }
        }
    }

    pub fn build(mut self) -> SparseOperator {
        self.entries.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseOperator {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (row, amp) in psi.iter().enumerate() {
            let mut row_acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                row_acc += self.vals[k] * psi[self.cols[k]];
            }
            acc += amp.conj() * row_acc;
        }
        acc
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                let col = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(col, row).conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin enclosure of the spectrum of a Hermitian operator.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in 0..self.dim {
            let mut diag = 0.0;
            let mut radius = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                if self.cols[k] == row {
                    diag = self.vals[k].re;
                } else {
                    radius += self.vals[k].norm();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                m[(row, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

/// Bessel functions `J_0(x), ..., J_{order}(x)` by Miller's downward
/// recurrence normalized with `J_0 + 2 sum_k J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = {
        let m = order.max(ax.ceil() as usize);
        let m = m + 20 + (40.0 * m as f64).sqrt() as usize;
        m + (m % 2)
    };
    let mut next = 0.0f64;
    let mut current = 1e-300f64;
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * current - next;
        next = current;
        current = prev;
        let idx = k - 1;
        if idx <= order {
            out[idx] = current;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += current;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `exp(-i H dt)` applied to a vector by Chebyshev expansion, using only
/// matrix-vector products with a sparse `H`.
#[derive(Debug, Clone)]
pub struct ChebyshevPropagator<'a> {
    h: &'a SparseOperator,
    center: f64,
    half_width: f64,
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(h: &'a SparseOperator) -> Result<Self> {
        let max_deviation = h.hermitian_deviation();
        if !(max_deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { max_deviation });
        }
        let (lo, hi) = h.spectral_bounds();
        let center = 0.5 * (hi + lo);
        // Pad the enclosure so the scaled spectrum sits strictly inside [-1, 1].
        let half_width = (0.5 * (hi - lo)).max(1e-12) * 1.01;
        Ok(Self { h, center, half_width })
    }

    pub fn step(&self, psi: &[Complex64], dt: f64) -> Vec<Complex64> {
        let n = psi.len();
        if dt == 0.0 {
            return psi.to_vec();
        }
        let x = self.half_width * dt;
        let order = (x.abs() + 12.0 * x.abs().cbrt() + 25.0).ceil() as usize;
        let bessel = bessel_j_sequence(x, order);

        // Scaled operator H' = (H - center) / half_width.
        let apply_scaled = |v: &[Complex64], out: &mut [Complex64]| {
            self.h.apply(v, out);
            for (o, vi) in out.iter_mut().zip(v) {
                *o = (*o - vi * self.center) / self.half_width;
            }
        };

        let mut acc: Vec<Complex64> = psi.iter().map(|z| z * bessel[0]).collect();
        let mut prev = psi.to_vec();
        let mut curr = vec![Complex64::new(0.0, 0.0); n];
        apply_scaled(&prev, &mut curr);
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        // (-i)^k cycles through 1, -i, -1, i.
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for k in 1..=order {
            let coeff = phase[k % 4] * (2.0 * bessel[k]);
            for (a, c) in acc.iter_mut().zip(&curr) {
                *a += coeff * c;
            }
            if k == order {
                break;
            }
            apply_scaled(&curr, &mut scratch);
            for (s, p) in scratch.iter_mut().zip(&prev) {
                *s = *s * 2.0 - p;
            }
            std::mem::swap(&mut prev, &mut curr);
            std::mem::swap(&mut curr, &mut scratch);
        }
        let global = Complex64::from_polar(1.0, -self.center * dt);
        acc.iter_mut().for_each(|z| *z *= global);
        acc
    }
}
