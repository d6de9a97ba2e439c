//! Truncated one- and two-mode Fock-space representations.
//!
//! Every state lives on a photon-number grid truncated at `n_max` per mode.
//! Constructors reject states whose probability outside the grid exceeds the
//! configured tail tolerance instead of silently renormalizing, so closed-form
//! comparisons against truncated objects stay meaningful. All types are
//! immutable after construction and freely shareable across threads.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::linalg;

/// Hard floor applied on top of the tail tolerance when validating norms and
/// traces, so exactly-normalized inputs survive floating-point noise.
const NORM_FLOOR: f64 = 1e-10;
const TRACE_FLOOR: f64 = 1e-9;
const HERMITICITY_TOL: f64 = 1e-10;

/// Basis truncation: maximum photon number per mode plus the largest
/// admissible probability left outside the truncated basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    n_max: usize,
    tail_tolerance: f64,
}

impl TruncationConfig {
    pub fn new(n_max: usize, tail_tolerance: f64) -> Result<Self> {
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(SimError::InvalidParameter(format!(
                "tail_tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self {
            n_max,
            tail_tolerance,
        })
    }

    /// Truncation at `n_max` with the default 1e-10 tail tolerance.
    pub fn with_n_max(n_max: usize) -> Self {
        Self {
            n_max,
            tail_tolerance: 1e-10,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Single-mode dimension, n_max + 1.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Two-mode dimension, (n_max + 1)².
    pub fn two_mode_dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(SimError::TruncationMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(())
    }

    fn norm_tolerance(&self) -> f64 {
        self.tail_tolerance.max(NORM_FLOOR)
    }

    fn trace_tolerance(&self) -> f64 {
        self.tail_tolerance.max(TRACE_FLOOR)
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n_max: 80,
            tail_tolerance: 1e-10,
        }
    }
}

/// Photon numbers (n_a, n_b) of a two-mode basis ket.
///
/// Mode `a` is the first polarization mode, mode `b` its orthogonal partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoModeIndex {
    pub n_a: usize,
    pub n_b: usize,
}

impl TwoModeIndex {
    pub fn new(n_a: usize, n_b: usize) -> Self {
        Self { n_a, n_b }
    }
}

/// Row-major flat index of a two-mode basis ket: n_a · (n_max + 1) + n_b.
pub fn flat_index(index: TwoModeIndex, cfg: &TruncationConfig) -> Result<usize> {
    if index.n_a > cfg.n_max || index.n_b > cfg.n_max {
        return Err(SimError::IndexOutOfRange {
            n_a: index.n_a,
            n_b: index.n_b,
            n_max: cfg.n_max,
        });
    }
    Ok(index.n_a * cfg.dim() + index.n_b)
}

/// Inverse of [`flat_index`].
pub fn index_from_flat(flat: usize, cfg: &TruncationConfig) -> Result<TwoModeIndex> {
    if flat >= cfg.two_mode_dim() {
        return Err(SimError::IndexOutOfRange {
            n_a: flat / cfg.dim(),
            n_b: flat % cfg.dim(),
            n_max: cfg.n_max,
        });
    }
    Ok(TwoModeIndex {
        n_a: flat / cfg.dim(),
        n_b: flat % cfg.dim(),
    })
}

fn check_norm(norm_sqr: f64, cfg: &TruncationConfig) -> Result<()> {
    let deficit = (1.0 - norm_sqr).abs();
    if deficit > cfg.norm_tolerance() {
        return Err(SimError::TailBound {
            deficit,
            tolerance: cfg.norm_tolerance(),
            n_max: cfg.n_max,
        });
    }
    Ok(())
}

fn max_hermiticity_deviation(m: ArrayView2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut max_dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > max_dev {
                max_dev = dev;
            }
        }
    }
    max_dev
}

fn validate_density(entries: ArrayView2<Complex64>, dim: usize, cfg: &TruncationConfig) -> Result<()> {
    if entries.dim() != (dim, dim) {
        return Err(SimError::ShapeMismatch(format!(
            "expected {dim}x{dim} density matrix, got {}x{}",
            entries.nrows(),
            entries.ncols()
        )));
    }
    let herm = max_hermiticity_deviation(entries);
    if herm > HERMITICITY_TOL {
        return Err(SimError::NotHermitian { max_dev: herm });
    }
    let trace: f64 = (0..dim).map(|i| entries[(i, i)].re).sum();
    let dev = (trace - 1.0).abs();
    if dev > cfg.trace_tolerance() {
        return Err(SimError::TraceNotOne { deviation: dev });
    }
    Ok(())
}

/// Pure state of a single bosonic mode over the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct SingleModeStateVector {
    amplitudes: Array1<Complex64>,
    truncation: TruncationConfig,
}

impl SingleModeStateVector {
    pub fn new(amplitudes: Array1<Complex64>, truncation: TruncationConfig) -> Result<Self> {
        if amplitudes.len() != truncation.dim() {
            return Err(SimError::ShapeMismatch(format!(
                "expected {} amplitudes, got {}",
                truncation.dim(),
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        check_norm(norm_sqr, &truncation)?;
        Ok(Self {
            amplitudes,
            truncation,
        })
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    /// Outer product |ψ⟩⟨ψ|.
    pub fn to_density(&self) -> SingleModeDensityMatrix {
        let entries = outer_product(&self.amplitudes);
        SingleModeDensityMatrix {
            entries,
            truncation: self.truncation,
        }
    }
}

/// Pure state of two bosonic modes over the truncated Fock basis,
/// row-major flat layout (n_a major, n_b minor).
#[derive(Debug, Clone)]
pub struct TwoModeStateVector {
    amplitudes: Array1<Complex64>,
    truncation: TruncationConfig,
}

impl TwoModeStateVector {
    pub fn new(amplitudes: Array1<Complex64>, truncation: TruncationConfig) -> Result<Self> {
        if amplitudes.len() != truncation.two_mode_dim() {
            return Err(SimError::ShapeMismatch(format!(
                "expected {} amplitudes, got {}",
                truncation.two_mode_dim(),
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        check_norm(norm_sqr, &truncation)?;
        Ok(Self {
            amplitudes,
            truncation,
        })
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    pub fn amplitude(&self, index: TwoModeIndex) -> Result<Complex64> {
        Ok(self.amplitudes[flat_index(index, &self.truncation)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total mean photon number ⟨n_a + n_b⟩.
    pub fn mean_photon_number(&self) -> f64 {
        let dim = self.truncation.dim();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| ((i / dim + i % dim) as f64) * a.norm_sqr())
            .sum()
    }

    /// Outer product |ψ⟩⟨ψ|.
    pub fn to_density(&self) -> TwoModeDensityMatrix {
        let entries = outer_product(&self.amplitudes);
        TwoModeDensityMatrix {
            entries,
            truncation: self.truncation,
        }
    }
}

fn outer_product(v: &Array1<Complex64>) -> Array2<Complex64> {
    let n = v.len();
    let mut out = Array2::zeros((n, n));
    for j in 0..n {
        let vj = v[j];
        if vj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..n {
            out[(j, k)] = vj * v[k].conj();
        }
    }
    out
}

/// Outer product |ψ⟩⟨ψ| of a two-mode pure state.
pub fn pure_to_density(v: &TwoModeStateVector) -> TwoModeDensityMatrix {
    v.to_density()
}

/// Density matrix of a single mode.
#[derive(Debug, Clone)]
pub struct SingleModeDensityMatrix {
    entries: Array2<Complex64>,
    truncation: TruncationConfig,
}

impl SingleModeDensityMatrix {
    pub fn new(entries: Array2<Complex64>, truncation: TruncationConfig) -> Result<Self> {
        validate_density(entries.view(), truncation.dim(), &truncation)?;
        Ok(Self {
            entries,
            truncation,
        })
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    pub fn dim(&self) -> usize {
        self.truncation.dim()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim())
            .map(|n| n as f64 * self.entries[(n, n)].re)
            .sum()
    }

    /// Probability mass on even and odd photon numbers.
    pub fn parity_masses(&self) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for n in 0..self.dim() {
            let p = self.entries[(n, n)].re;
            if n % 2 == 0 {
                even += p;
            } else {
                odd += p;
            }
        }
        (even, odd)
    }

    /// Smallest eigenvalue, for positivity diagnostics.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::eigh_values(self.entries.view())?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }
}

/// Density matrix over the truncated two-mode Fock basis. The universal state
/// representation after loss.
#[derive(Debug, Clone)]
pub struct TwoModeDensityMatrix {
    entries: Array2<Complex64>,
    truncation: TruncationConfig,
}

impl TwoModeDensityMatrix {
    /// Validates Hermiticity (1e-10 elementwise) and unit trace (1e-9, relaxed
    /// to the tail tolerance for truncated states). Positivity is checked on
    /// demand through [`TwoModeDensityMatrix::min_eigenvalue`] since it costs
    /// a full eigendecomposition.
    pub fn new(entries: Array2<Complex64>, truncation: TruncationConfig) -> Result<Self> {
        validate_density(entries.view(), truncation.two_mode_dim(), &truncation)?;
        Ok(Self {
            entries,
            truncation,
        })
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    pub fn dim(&self) -> usize {
        self.truncation.two_mode_dim()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Total mean photon number ⟨n_a + n_b⟩.
    pub fn mean_photon_number(&self) -> f64 {
        let dim = self.truncation.dim();
        (0..self.dim())
            .map(|i| ((i / dim + i % dim) as f64) * self.entries[(i, i)].re)
            .sum()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.truncation.check_compatible(&other.truncation)
    }

    /// Smallest eigenvalue, for positivity diagnostics.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::eigh_values(self.entries.view())?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }

    /// Probability mass per photon-number-parity sector.
    pub fn parity_spectrum(&self) -> ParitySpectrum {
        let dim = self.truncation.dim();
        let mut masses = [0.0f64; 4];
        for i in 0..self.dim() {
            let n_a = i / dim;
            let n_b = i % dim;
            masses[(n_a % 2) * 2 + n_b % 2] += self.entries[(i, i)].re;
        }
        ParitySpectrum {
            even_even: masses[0],
            even_odd: masses[1],
            odd_even: masses[2],
            odd_odd: masses[3],
        }
    }

    /// Reduced state of the first mode after tracing out the second.
    pub fn trace_out_second_mode(&self) -> Result<SingleModeDensityMatrix> {
        let dim = self.truncation.dim();
        let reduced = partial_trace_second_system(self.entries.view(), dim, dim)?;
        SingleModeDensityMatrix::new(reduced, self.truncation)
    }
}

/// Probability mass of a two-mode state per (parity of n_a, parity of n_b)
/// sector. The comb structure of a cat or amplified state shows up here as
/// all mass sitting in one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParitySpectrum {
    pub even_even: f64,
    pub even_odd: f64,
    pub odd_even: f64,
    pub odd_odd: f64,
}

impl ParitySpectrum {
    pub fn sum(&self) -> f64 {
        self.even_even + self.even_odd + self.odd_even + self.odd_odd
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.even_even, self.even_odd, self.odd_even, self.odd_odd]
    }
}

/// Partial trace over the second factor of a system⊗environment matrix.
///
/// The joint index is row-major: flat = i_sys · dim_env + i_env. Trace and
/// Hermiticity are preserved exactly up to floating-point addition.
pub fn partial_trace_second_system(
    joint: ArrayView2<Complex64>,
    dim_sys: usize,
    dim_env: usize,
) -> Result<Array2<Complex64>> {
    let expected = dim_sys * dim_env;
    if joint.dim() != (expected, expected) {
        return Err(SimError::ShapeMismatch(format!(
            "expected {expected}x{expected} joint matrix for dims {dim_sys}x{dim_env}, got {}x{}",
            joint.nrows(),
            joint.ncols()
        )));
    }
    let mut out = Array2::zeros((dim_sys, dim_sys));
    for i in 0..dim_sys {
        for j in 0..dim_sys {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..dim_env {
                acc += joint[(i * dim_env + e, j * dim_env + e)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
