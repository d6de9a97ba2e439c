//! Orthogonality filter: post-selection on the photon-number difference
//! between the two polarization modes.
//!
//! The filter keeps an outcome exactly when |n_a - n_b| > k, trading success
//! probability for a sharper discrimination between orthogonally seeded
//! macrostates. It acts as an ideal projective POVM element applied after the
//! lossy channel.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::fock::{TruncationConfig, TwoModeDensityMatrix};

/// Threshold k: events survive when |n_a - n_b| > k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OFilterParams {
    pub threshold: usize,
}

impl OFilterParams {
    pub fn new(threshold: usize) -> Self {
        Self { threshold }
    }
}

/// Diagonal projector over the two-mode basis selecting |n_a - n_b| > k.
///
/// Entries are exactly 0 or 1, so idempotence holds exactly.
#[derive(Debug, Clone)]
pub struct OFilterProjector {
    keep: Vec<bool>,
    truncation: TruncationConfig,
}

impl OFilterProjector {
    /// Whether the flat basis index passes the filter.
    pub fn keeps(&self, flat: usize) -> bool {
        self.keep[flat]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    /// Dense matrix form of the projector.
    pub fn matrix(&self) -> Array2<f64> {
        let n = self.keep.len();
        let mut m = Array2::zeros((n, n));
        for (i, &keep) in self.keep.iter().enumerate() {
            if keep {
                m[(i, i)] = 1.0;
            }
        }
        m
    }
}

/// Build the filter projector for threshold k on the truncated basis.
pub fn ofilter_projector(params: &OFilterParams, cfg: &TruncationConfig) -> OFilterProjector {
    let dim = cfg.dim();
    let keep = (0..cfg.two_mode_dim())
        .map(|flat| {
            let n_a = flat / dim;
            let n_b = flat % dim;
            n_a.abs_diff(n_b) > params.threshold
        })
        .collect();
    OFilterProjector {
        keep,
        truncation: *cfg,
    }
}

/// Apply the filter: (P ρ P / Tr(P ρ P), Tr(P ρ P)).
///
/// Errors when the success probability falls below 1e-12, i.e. the filter
/// annihilates the state.
pub fn apply_ofilter(
    rho: &TwoModeDensityMatrix,
    params: &OFilterParams,
) -> Result<(TwoModeDensityMatrix, f64)> {
    let cfg = *rho.truncation();
    let projector = ofilter_projector(params, &cfg);
    let dim2 = cfg.two_mode_dim();
    let success: f64 = (0..dim2)
        .filter(|&i| projector.keeps(i))
        .map(|i| rho.entries()[(i, i)].re)
        .sum();
    if success < 1e-12 {
        return Err(SimError::FilterAnnihilatesState {
            probability: success,
        });
    }
    let mut filtered = Array2::<Complex64>::zeros((dim2, dim2));
    for i in 0..dim2 {
        if !projector.keeps(i) {
            continue;
        }
        for j in 0..dim2 {
            if projector.keeps(j) {
                filtered[(i, j)] = rho.entries()[(i, j)] / success;
            }
        }
    }
    Ok((TwoModeDensityMatrix::new(filtered, cfg)?, success))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{flat_index, TwoModeIndex, TwoModeStateVector};
    use crate::linalg;
    use ndarray::Array1;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n_max: usize) -> TruncationConfig {
        TruncationConfig::with_n_max(n_max)
    }

    fn random_density_matrix(rng: &mut ChaCha8Rng, cfg: &TruncationConfig) -> TwoModeDensityMatrix {
        let dim = cfg.two_mode_dim();
        let g = Array2::from_shape_fn((dim, dim), |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut rho = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += g[(i, k)] * g[(j, k)].conj();
                }
                rho[(i, j)] = acc;
            }
        }
        let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
        rho.mapv_inplace(|z| z / tr);
        TwoModeDensityMatrix::new(rho, *cfg).unwrap()
    }

    #[test]
    fn threshold_zero_rejects_only_the_diagonal() {
        let cfg = cfg(4);
        let p = ofilter_projector(&OFilterParams::new(0), &cfg);
        for n_a in 0..=4usize {
            for n_b in 0..=4usize {
                let flat = flat_index(TwoModeIndex::new(n_a, n_b), &cfg).unwrap();
                assert_eq!(p.keeps(flat), n_a != n_b);
            }
        }
    }

    #[test]
    fn oversized_threshold_gives_zero_projector() {
        let cfg = cfg(5);
        let p = ofilter_projector(&OFilterParams::new(10), &cfg);
        assert_eq!(p.kept_count(), 0);
    }

    #[test]
    fn threshold_four_example_kets() {
        let cfg = cfg(10);
        let p = ofilter_projector(&OFilterParams::new(4), &cfg);
        let kept = flat_index(TwoModeIndex::new(8, 2), &cfg).unwrap();
        let rejected = flat_index(TwoModeIndex::new(6, 3), &cfg).unwrap();
        assert!(p.keeps(kept));
        assert!(!p.keeps(rejected));
    }

    #[test]
    fn projector_matrix_is_idempotent_exactly() {
        let cfg = cfg(5);
        let p = ofilter_projector(&OFilterParams::new(2), &cfg).matrix();
        let pc = p.mapv(|x| Complex64::new(x, 0.0));
        let sq = linalg::matmul(pc.view(), pc.view());
        assert_eq!(
            crate::math::max_abs_diff(sq.view(), pc.view()),
            0.0,
            "diagonal 0/1 projector must square to itself exactly"
        );
    }

    #[test]
    fn filter_passes_single_photon_state_untouched_at_k0() {
        let cfg = cfg(3);
        let mut v = Array1::zeros(cfg.two_mode_dim());
        v[flat_index(TwoModeIndex::new(1, 0), &cfg).unwrap()] = Complex64::new(1.0, 0.0);
        let rho = TwoModeStateVector::new(v, cfg).unwrap().to_density();
        let (filtered, prob) = apply_ofilter(&rho, &OFilterParams::new(0)).unwrap();
        assert!((prob - 1.0).abs() < 1e-12);
        assert!(
            crate::math::max_abs_diff(filtered.entries().view(), rho.entries().view()) < 1e-12
        );
    }

    #[test]
    fn annihilating_filter_is_an_error() {
        let cfg = cfg(3);
        let mut v = Array1::zeros(cfg.two_mode_dim());
        v[flat_index(TwoModeIndex::new(1, 1), &cfg).unwrap()] = Complex64::new(1.0, 0.0);
        let rho = TwoModeStateVector::new(v, cfg).unwrap().to_density();
        assert!(matches!(
            apply_ofilter(&rho, &OFilterParams::new(0)),
            Err(SimError::FilterAnnihilatesState { .. })
        ));
    }

    #[test]
    fn filtering_twice_equals_filtering_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = cfg(4);
        let rho = random_density_matrix(&mut rng, &cfg);
        let params = OFilterParams::new(1);
        let (once, _) = apply_ofilter(&rho, &params).unwrap();
        let (twice, p2) = apply_ofilter(&once, &params).unwrap();
        assert!((p2 - 1.0).abs() < 1e-12);
        assert!(
            crate::math::max_abs_diff(once.entries().view(), twice.entries().view()) < 1e-12
        );
    }

    #[test]
    fn success_probability_non_increasing_in_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let cfg = cfg(6);
        let rho = random_density_matrix(&mut rng, &cfg);
        let mut last = 1.0;
        for k in 0..6 {
            let p = match apply_ofilter(&rho, &OFilterParams::new(k)) {
                Ok((_, p)) => p,
                Err(_) => 0.0,
            };
            assert!(p <= last + 1e-12, "success probability grew with k");
            last = p;
        }
    }
}
