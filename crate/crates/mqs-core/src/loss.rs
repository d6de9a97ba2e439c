//! Photon-loss channel of a beam splitter with transmittivity T.
//!
//! Loss is applied through the single-mode Kraus decomposition
//! ⟨n-k|E_k|n⟩ = √(C(n,k) T^(n-k) R^k), mathematically equivalent to mixing
//! the mode with a vacuum environment on a beam splitter and tracing out the
//! reflected port. The Kraus route needs only the system dimension; the
//! explicit beam-splitter route is also implemented here (as a matrix
//! exponential of the mixing generator) and serves as an independent oracle
//! at small truncation.
//!
//! Both polarization modes of a two-mode state see the same transmittivity:
//! the physical beam carries both polarizations through one lossy channel.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::fock::{
    partial_trace_second_system, SingleModeDensityMatrix, TruncationConfig, TwoModeDensityMatrix,
};
use crate::linalg;
use crate::math::LnFactorial;

/// Beam-splitter transmittivity T with derived reflectivity R = 1 - T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    transmittivity: f64,
}

impl ChannelParams {
    pub fn new(transmittivity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittivity) {
            return Err(SimError::InvalidParameter(format!(
                "transmittivity must lie in [0, 1], got {transmittivity}"
            )));
        }
        Ok(Self { transmittivity })
    }

    /// Channel specified through the reflectivity R instead of T.
    pub fn from_reflectivity(reflectivity: f64) -> Result<Self> {
        Self::new(1.0 - reflectivity)
    }

    pub fn transmittivity(&self) -> f64 {
        self.transmittivity
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.transmittivity
    }
}

/// Table of loss amplitudes c_k[m] = ⟨m|E_k|m+k⟩, k = photons lost.
///
/// Each E_k has support only on the k-th subdiagonal, so the full operator
/// set is stored as one coefficient vector per k.
fn loss_coefficients(params: &ChannelParams, cfg: &TruncationConfig) -> Vec<Vec<f64>> {
    let dim = cfg.dim();
    let t = params.transmittivity();
    let r = params.reflectivity();
    let lf = LnFactorial::up_to(2 * cfg.n_max() + 2);
    let mut table = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut row = Vec::with_capacity(dim - k);
        for m in 0..dim - k {
            // Log-space binomial avoids overflow at n_max = 80.
            let ln_binom = lf.ln_binomial(m + k, k);
            let magnitude = (0.5 * ln_binom).exp();
            row.push(magnitude * t.powi(m as i32).sqrt() * r.powi(k as i32).sqrt());
        }
        table.push(row);
    }
    table
}

/// The Kraus operators of the loss channel on one mode.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<Array2<f64>>,
    params: ChannelParams,
    truncation: TruncationConfig,
}

impl KrausSet {
    pub fn operators(&self) -> &[Array2<f64>] {
        &self.operators
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.truncation
    }

    /// Σ_k E_k† E_k, which must equal the identity.
    pub fn completeness_matrix(&self) -> Array2<f64> {
        let dim = self.truncation.dim();
        let mut acc = Array2::zeros((dim, dim));
        for e in &self.operators {
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = 0.0;
                    for l in 0..dim {
                        s += e[(l, i)] * e[(l, j)];
                    }
                    acc[(i, j)] += s;
                }
            }
        }
        acc
    }

    /// Largest deviation of Σ E_k† E_k from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.truncation.dim();
        let m = self.completeness_matrix();
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((m[(i, j)] - target).abs());
            }
        }
        max_dev
    }
}

/// Build the single-mode Kraus set E_k, k = 0..n_max.
pub fn build_kraus_set(params: &ChannelParams, cfg: &TruncationConfig) -> KrausSet {
    let dim = cfg.dim();
    let coeffs = loss_coefficients(params, cfg);
    let mut operators = Vec::with_capacity(dim);
    for (k, row) in coeffs.iter().enumerate() {
        let mut e = Array2::zeros((dim, dim));
        for (m, &c) in row.iter().enumerate() {
            e[(m, m + k)] = c;
        }
        operators.push(e);
    }
    KrausSet {
        operators,
        params: *params,
        truncation: *cfg,
    }
}

/// Loss superoperator on a raw single-mode matrix:
/// out[m1, m2] = Σ_k c_k[m1] c_k[m2] · in[m1+k, m2+k].
fn damp_matrix(input: ArrayView2<Complex64>, coeffs: &[Vec<f64>]) -> Array2<Complex64> {
    let dim = input.nrows();
    let mut out = Array2::zeros((dim, dim));
    for m1 in 0..dim {
        for m2 in 0..dim {
            let k_max = dim - 1 - m1.max(m2);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, row) in coeffs.iter().take(k_max + 1).enumerate() {
                acc += row[m1] * row[m2] * input[(m1 + k, m2 + k)];
            }
            out[(m1, m2)] = acc;
        }
    }
    out
}

/// Apply the loss channel to a single-mode density matrix.
pub fn apply_loss_single_mode(
    rho: &SingleModeDensityMatrix,
    params: &ChannelParams,
) -> Result<SingleModeDensityMatrix> {
    let cfg = *rho.truncation();
    let coeffs = loss_coefficients(params, &cfg);
    let out = damp_matrix(rho.entries().view(), &coeffs);
    SingleModeDensityMatrix::new(out, cfg)
}

/// Apply the loss channel to both modes of a two-mode density matrix:
/// ρ' = Σ_{k,l} (E_k ⊗ E_l) ρ (E_k ⊗ E_l)†.
///
/// Evaluated mode by mode (the per-mode maps commute), with a fixed
/// ascending summation order over the lost-photon index, so results are
/// bit-reproducible. Work is parallelized over output rows; each output
/// element is still accumulated in a fixed order.
pub fn apply_loss_two_mode(
    rho: &TwoModeDensityMatrix,
    params: &ChannelParams,
) -> Result<TwoModeDensityMatrix> {
    let cfg = *rho.truncation();
    let coeffs = loss_coefficients(params, &cfg);
    let dim = cfg.dim();

    // Mode a: out[(a1, b1), (a2, b2)] = Σ_k c_k[a1] c_k[a2] in[(a1+k, b1), (a2+k, b2)]
    let input = rho.entries();
    let mut stage = Array2::zeros((cfg.two_mode_dim(), cfg.two_mode_dim()));
    {
        let in_slice = input.as_slice().expect("contiguous layout");
        let full = cfg.two_mode_dim();
        stage
            .axis_chunks_iter_mut(ndarray::Axis(0), dim)
            .into_par_iter()
            .enumerate()
            .for_each(|(a1, mut rows)| {
                for a2 in 0..dim {
                    let k_max = dim - 1 - a1.max(a2);
                    for (k, c_row) in coeffs.iter().take(k_max + 1).enumerate() {
                        let w = c_row[a1] * c_row[a2];
                        for b1 in 0..dim {
                            let src_row = ((a1 + k) * dim + b1) * full + (a2 + k) * dim;
                            let src = &in_slice[src_row..src_row + dim];
                            for (b2, &s) in src.iter().enumerate() {
                                rows[(b1, a2 * dim + b2)] += w * s;
                            }
                        }
                    }
                }
            });
    }

    // Mode b: standard single-mode damping of every (a1, a2) block.
    let mut out = Array2::zeros((cfg.two_mode_dim(), cfg.two_mode_dim()));
    {
        let stage_view = stage.view();
        out.axis_chunks_iter_mut(ndarray::Axis(0), dim)
            .into_par_iter()
            .enumerate()
            .for_each(|(a1, mut rows)| {
                for a2 in 0..dim {
                    let block = stage_view.slice(ndarray::s![
                        a1 * dim..(a1 + 1) * dim,
                        a2 * dim..(a2 + 1) * dim
                    ]);
                    let damped = damp_matrix(block, &coeffs);
                    for b1 in 0..dim {
                        for b2 in 0..dim {
                            rows[(b1, a2 * dim + b2)] = damped[(b1, b2)];
                        }
                    }
                }
            });
    }

    TwoModeDensityMatrix::new(out, cfg)
}

/// Apply the loss channel through an explicit Kraus set, checking that the
/// truncations agree. Mostly useful for cross-validating the fast route.
pub fn apply_loss_two_mode_with_kraus(
    rho: &TwoModeDensityMatrix,
    kraus: &KrausSet,
) -> Result<TwoModeDensityMatrix> {
    if rho.truncation().n_max() != kraus.truncation.n_max() {
        return Err(SimError::TruncationMismatch {
            left: rho.truncation().n_max(),
            right: kraus.truncation.n_max(),
        });
    }
    apply_loss_two_mode(rho, &kraus.params)
}

/// Amplitude of a coherent state after loss: α ↦ √T α.
///
/// Coherent states stay coherent under beam-splitter scattering; only the
/// amplitude shrinks.
pub fn coherent_loss_analytic(alpha: Complex64, params: &ChannelParams) -> Complex64 {
    alpha * params.transmittivity().sqrt()
}

/// Unitary of a beam splitter mixing the system mode with an environment
/// mode, exp(θ(a†e - ae†)) with cos θ = √T, on the truncated joint space.
///
/// Built by exponentiating the mixing generator through a Hermitian
/// eigendecomposition; photon-number conservation keeps every shell reachable
/// from a vacuum environment exactly inside the truncated joint basis.
pub fn beam_splitter_unitary(
    params: &ChannelParams,
    cfg: &TruncationConfig,
) -> Result<Array2<Complex64>> {
    let dim = cfg.dim();
    let joint = dim * dim;
    let theta = params.transmittivity().sqrt().acos();
    // K = iθ(a†e - ae†) is Hermitian; U = exp(-iK).
    let mut k_mat = Array2::<Complex64>::zeros((joint, joint));
    for m in 0..dim {
        for l in 0..dim {
            if m + 1 < dim && l > 0 {
                let amp = theta * (((m + 1) * l) as f64).sqrt();
                let row = (m + 1) * dim + (l - 1);
                let col = m * dim + l;
                k_mat[(row, col)] += Complex64::new(0.0, amp);
                k_mat[(col, row)] += Complex64::new(0.0, -amp);
            }
        }
    }
    let (vals, vecs) = linalg::eigh(k_mat.view())?;
    let phases: Vec<Complex64> = vals
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l))
        .collect();
    let mut scaled = vecs.clone();
    for (j, &p) in phases.iter().enumerate() {
        for i in 0..joint {
            scaled[(i, j)] *= p;
        }
    }
    let mut u = Array2::zeros((joint, joint));
    for i in 0..joint {
        for j in 0..joint {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..joint {
                acc += scaled[(i, l)] * vecs[(j, l)].conj();
            }
            u[(i, j)] = acc;
        }
    }
    Ok(u)
}

/// Loss through the explicit beam-splitter route: embed a vacuum environment,
/// scatter, trace out the reflected mode. Quartic in the dimension, intended
/// as an oracle at small n_max.
pub fn apply_loss_via_beam_splitter(
    rho: &SingleModeDensityMatrix,
    params: &ChannelParams,
) -> Result<SingleModeDensityMatrix> {
    let cfg = *rho.truncation();
    let dim = cfg.dim();
    let joint_dim = dim * dim;
    let u = beam_splitter_unitary(params, &cfg)?;
    // joint = ρ ⊗ |0⟩⟨0| without materializing the kron: entries at env index 0.
    let mut joint = Array2::<Complex64>::zeros((joint_dim, joint_dim));
    for i in 0..dim {
        for j in 0..dim {
            joint[(i * dim, j * dim)] = rho.entries()[(i, j)];
        }
    }
    let tmp = linalg::matmul(u.view(), joint.view());
    let mut u_dag = Array2::zeros((joint_dim, joint_dim));
    for i in 0..joint_dim {
        for j in 0..joint_dim {
            u_dag[(i, j)] = u[(j, i)].conj();
        }
    }
    let scattered = linalg::matmul(tmp.view(), u_dag.view());
    let reduced = partial_trace_second_system(scattered.view(), dim, dim)?;
    SingleModeDensityMatrix::new(reduced, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TwoModeStateVector;
    use ndarray::Array1;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n_max: usize) -> TruncationConfig {
        TruncationConfig::with_n_max(n_max)
    }

    fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> Array2<Complex64> {
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
        rho
    }

    fn random_two_mode_density(rng: &mut ChaCha8Rng, cfg: &TruncationConfig) -> TwoModeDensityMatrix {
        TwoModeDensityMatrix::new(random_density(rng, cfg.two_mode_dim()), *cfg).unwrap()
    }

    #[test]
    fn lossless_kraus_set_is_identity() {
        let cfg = cfg(6);
        let kraus = build_kraus_set(&ChannelParams::new(1.0).unwrap(), &cfg);
        let e0 = &kraus.operators()[0];
        for i in 0..cfg.dim() {
            for j in 0..cfg.dim() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((e0[(i, j)] - expect).abs() < 1e-15);
            }
        }
        for e in &kraus.operators()[1..] {
            assert!(e.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn full_reflection_maps_everything_to_vacuum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = cfg(5);
        let rho = random_two_mode_density(&mut rng, &cfg);
        let out = apply_loss_two_mode(&rho, &ChannelParams::new(0.0).unwrap()).unwrap();
        assert!((out.entries()[(0, 0)].re - 1.0).abs() < 1e-12);
        let off_mass: f64 = out
            .entries()
            .indexed_iter()
            .filter(|((i, j), _)| !(*i == 0 && *j == 0))
            .map(|(_, z)| z.norm())
            .sum();
        assert!(off_mass < 1e-12);
    }

    #[test]
    fn kraus_element_matches_binomial_formula() {
        // ⟨1|E_1|2⟩ = sqrt(2 · 0.5 · 0.5) = sqrt(0.5) at T = 0.5.
        let cfg = cfg(4);
        let kraus = build_kraus_set(&ChannelParams::new(0.5).unwrap(), &cfg);
        let expect = 0.5f64.sqrt();
        assert!((kraus.operators()[1][(1, 2)] - expect).abs() < 1e-14);
    }

    #[test]
    fn completeness_holds_at_large_truncation() {
        let cfg = cfg(80);
        for t in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let kraus = build_kraus_set(&ChannelParams::new(t).unwrap(), &cfg);
            assert!(
                kraus.completeness_deviation() < 1e-12,
                "completeness violated at T = {t}"
            );
        }
    }

    #[test]
    fn lossless_channel_leaves_states_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = cfg(4);
        let rho = random_two_mode_density(&mut rng, &cfg);
        let out = apply_loss_two_mode(&rho, &ChannelParams::new(1.0).unwrap()).unwrap();
        assert!(
            crate::math::max_abs_diff(rho.entries().view(), out.entries().view()) < 1e-12
        );
    }

    #[test]
    fn single_photon_loss_is_bernoulli() {
        let cfg = cfg(3);
        let mut v = Array1::zeros(cfg.two_mode_dim());
        v[cfg.dim()] = Complex64::new(1.0, 0.0); // |1, 0⟩
        let rho = TwoModeStateVector::new(v, cfg).unwrap().to_density();
        let out = apply_loss_two_mode(&rho, &ChannelParams::new(0.7).unwrap()).unwrap();
        assert!((out.entries()[(cfg.dim(), cfg.dim())].re - 0.7).abs() < 1e-12);
        assert!((out.entries()[(0, 0)].re - 0.3).abs() < 1e-12);
    }

    #[test]
    fn trace_preservation_and_positivity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = cfg(3);
        for _ in 0..40 {
            let rho = random_two_mode_density(&mut rng, &cfg);
            let t: f64 = rng.random::<f64>();
            let out = apply_loss_two_mode(&rho, &ChannelParams::new(t).unwrap()).unwrap();
            assert!((out.trace() - 1.0).abs() < 1e-9);
            assert!(out.min_eigenvalue().unwrap() >= -1e-9);
        }
    }

    #[test]
    fn loss_channels_compose_as_a_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = cfg(4);
        let rho = random_two_mode_density(&mut rng, &cfg);
        for (t1, t2) in [(0.9, 0.8), (0.5, 0.5), (0.3, 0.95)] {
            let step1 = apply_loss_two_mode(&rho, &ChannelParams::new(t1).unwrap()).unwrap();
            let step2 = apply_loss_two_mode(&step1, &ChannelParams::new(t2).unwrap()).unwrap();
            let direct = apply_loss_two_mode(&rho, &ChannelParams::new(t1 * t2).unwrap()).unwrap();
            assert!(
                crate::math::max_abs_diff(step2.entries().view(), direct.entries().view())
                    < 1e-9
            );
        }
    }

    #[test]
    fn mean_photon_number_scales_linearly_with_transmittivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = cfg(5);
        let rho = random_two_mode_density(&mut rng, &cfg);
        let n_in = rho.mean_photon_number();
        for t in [0.25, 0.6, 0.85] {
            let out = apply_loss_two_mode(&rho, &ChannelParams::new(t).unwrap()).unwrap();
            assert!((out.mean_photon_number() - t * n_in).abs() < 1e-9);
        }
    }

    #[test]
    fn kraus_route_matches_literal_operator_sum() {
        // Σ_{k,l} (E_k ⊗ E_l) ρ (E_k ⊗ E_l)† assembled from dense Kronecker
        // products, against the subdiagonal fast path.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = cfg(3);
        let dim2 = cfg.two_mode_dim();
        let rho = random_two_mode_density(&mut rng, &cfg);
        let params = ChannelParams::new(0.6).unwrap();
        let kraus = build_kraus_set(&params, &cfg);
        let as_complex: Vec<Array2<Complex64>> = kraus
            .operators()
            .iter()
            .map(|e| e.mapv(|x| Complex64::new(x, 0.0)))
            .collect();
        let mut literal = Array2::<Complex64>::zeros((dim2, dim2));
        for ek in &as_complex {
            for el in &as_complex {
                let op = crate::math::kron(ek.view(), el.view());
                let tmp = linalg::matmul(op.view(), rho.entries().view());
                let mut op_dag = Array2::zeros((dim2, dim2));
                for i in 0..dim2 {
                    for j in 0..dim2 {
                        op_dag[(i, j)] = op[(j, i)].conj();
                    }
                }
                let term = linalg::matmul(tmp.view(), op_dag.view());
                literal += &term;
            }
        }
        let fast = apply_loss_two_mode_with_kraus(&rho, &kraus).unwrap();
        assert!(
            crate::math::max_abs_diff(literal.view(), fast.entries().view()) < 1e-12
        );
    }

    #[test]
    fn kraus_mismatch_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_two_mode_density(&mut rng, &cfg(3));
        let kraus = build_kraus_set(&ChannelParams::new(0.5).unwrap(), &cfg(4));
        assert!(matches!(
            apply_loss_two_mode_with_kraus(&rho, &kraus),
            Err(SimError::TruncationMismatch { .. })
        ));
    }

    #[test]
    fn beam_splitter_route_agrees_with_kraus_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = cfg(6);
        for t in [0.2, 0.5, 0.9] {
            let params = ChannelParams::new(t).unwrap();
            let rho =
                SingleModeDensityMatrix::new(random_density(&mut rng, cfg.dim()), cfg).unwrap();
            let via_bs = apply_loss_via_beam_splitter(&rho, &params).unwrap();
            let via_kraus = apply_loss_single_mode(&rho, &params).unwrap();
            assert!(
                crate::math::max_abs_diff(via_bs.entries().view(), via_kraus.entries().view())
                    < 1e-10,
                "beam-splitter oracle disagrees with Kraus route at T = {t}"
            );
        }
    }

    #[test]
    fn beam_splitter_unitary_is_unitary() {
        let cfg = cfg(4);
        let u = beam_splitter_unitary(&ChannelParams::new(0.35).unwrap(), &cfg).unwrap();
        let n = cfg.dim() * cfg.dim();
        let mut u_dag = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                u_dag[(i, j)] = u[(j, i)].conj();
            }
        }
        let prod = linalg::matmul(u_dag.view(), u.view());
        let id = Array2::from_diag_elem(n, Complex64::new(1.0, 0.0));
        assert!(crate::math::max_abs_diff(prod.view(), id.view()) < 1e-12);
    }

    #[test]
    fn coherent_loss_analytic_scales_amplitude() {
        let p = ChannelParams::new(1.0).unwrap();
        assert_eq!(
            coherent_loss_analytic(Complex64::new(4.0, 0.0), &p),
            Complex64::new(4.0, 0.0)
        );
        let p = ChannelParams::new(0.25).unwrap();
        assert_eq!(
            coherent_loss_analytic(Complex64::new(4.0, 0.0), &p),
            Complex64::new(2.0, 0.0)
        );
    }

    #[test]
    fn channel_params_validate_range() {
        assert!(ChannelParams::new(-0.1).is_err());
        assert!(ChannelParams::new(1.1).is_err());
        let p = ChannelParams::new(0.3).unwrap();
        assert!((p.reflectivity() - 0.7).abs() < 1e-15);
        assert!((p.transmittivity() + p.reflectivity() - 1.0).abs() < 1e-15);
    }
}
