//! Small numeric helpers: log-factorials, Kronecker products, phase alignment.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex64;

/// Table of ln(n!) values, built once and shared by the series evaluators.
///
/// Binomial coefficients such as C(80, 40) overflow 64-bit integers, so all
/// combinatorial factors are assembled in log space and exponentiated at the
/// end.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    /// Table covering 0! through `max`!.
    pub fn up_to(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for n in 1..=max {
            acc += (n as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.table[n]
    }

    /// ln C(n, k) for k <= n.
    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.table[n] - self.table[k] - self.table[n - k]
    }

    pub fn max_n(&self) -> usize {
        self.table.len() - 1
    }
}

/// Kronecker product of two complex matrices, row-major composite indexing:
/// (A ⊗ B)[(i·rb + j), (k·cb + l)] = A[i,k] · B[j,l].
pub fn kron(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for k in 0..ca {
            let aik = a[(i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..rb {
                for l in 0..cb {
                    out[(i * rb + j, k * cb + l)] = aik * b[(j, l)];
                }
            }
        }
    }
    out
}

/// Rotate a global phase so the largest-magnitude amplitude is real positive.
///
/// Kets are defined up to a global phase; comparisons of amplitude vectors go
/// through this alignment first.
pub fn align_global_phase(amps: &mut Array1<Complex64>) {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (idx, a) in amps.iter().enumerate() {
        let mag = a.norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best = idx;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let phase = amps[best] / amps[best].norm();
    let correction = phase.conj();
    amps.mapv_inplace(|a| a * correction);
}

/// Largest elementwise |a - b| between two complex vectors.
pub fn max_abs_diff_vec(a: ArrayView1<Complex64>, b: ArrayView1<Complex64>) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise |a - b| between two complex matrices.
pub fn max_abs_diff(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
