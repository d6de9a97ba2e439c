//! Coherent states and their macroscopic superpositions (cat states).
//!
//! The two branches are |α e^{iφ}⟩ and |α e^{-iφ}⟩; the canonical cat
//! |α⟩ ± |-α⟩ sits at φ = π/2 up to a phase-space rotation. Loss acts on the
//! branches in closed form (coherent states stay coherent, amplitudes shrink
//! by √T, coherences shrink by an overlap power), which makes this family the
//! analytically solvable benchmark for the numerical pipeline.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::fock::{SingleModeDensityMatrix, SingleModeStateVector, TruncationConfig};
use crate::loss::ChannelParams;
use crate::states::MqsSign;

/// Parameters of the coherent-state superposition
/// (N±/√2)(|α e^{iφ}⟩ ± |α e^{-iφ}⟩), with phi in [0, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentMqsParams {
    pub alpha: Complex64,
    pub phi: f64,
    pub sign: MqsSign,
}

impl CoherentMqsParams {
    pub fn new(alpha: Complex64, phi: f64, sign: MqsSign) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&phi) {
            return Err(SimError::InvalidParameter(format!(
                "cat phase phi must lie in [0, pi], got {phi}"
            )));
        }
        Ok(Self { alpha, phi, sign })
    }

    /// The canonical cat |α⟩ ± |-α⟩ (φ = π/2 branch geometry).
    pub fn canonical(alpha: Complex64, sign: MqsSign) -> Self {
        Self {
            alpha,
            phi: std::f64::consts::FRAC_PI_2,
            sign,
        }
    }

    fn branch_amplitudes(&self) -> (Complex64, Complex64) {
        let rot = Complex64::from_polar(1.0, self.phi);
        (self.alpha * rot, self.alpha * rot.conj())
    }
}

/// Overlap ⟨u|v⟩ = exp(-|u|²/2 - |v|²/2 + ū v) of two coherent states.
pub fn coherent_overlap(u: Complex64, v: Complex64) -> Complex64 {
    (-0.5 * u.norm_sqr() - 0.5 * v.norm_sqr() + u.conj() * v).exp()
}

/// Normalization constant N± of the superposition, from the closed-form
/// branch overlap: N± = (1 ± Re⟨α e^{iφ}|α e^{-iφ}⟩)^{-1/2}.
pub fn cat_normalization(params: &CoherentMqsParams) -> Result<f64> {
    let (a, b) = params.branch_amplitudes();
    let denom = 1.0 + params.sign.factor() * coherent_overlap(a, b).re;
    if denom <= 1e-14 {
        return Err(SimError::InvalidParameter(format!(
            "cat normalization diverges: branches nearly identical (1 ± Re<a|b> = {denom:.3e})"
        )));
    }
    Ok(1.0 / denom.sqrt())
}

/// Glauber coherent state truncated to the Fock basis:
/// amplitudes e^{-|α|²/2} α^n / √(n!).
pub fn coherent_state_vector(
    alpha: Complex64,
    cfg: &TruncationConfig,
) -> Result<SingleModeStateVector> {
    let amps = coherent_amplitudes(alpha, cfg.dim());
    SingleModeStateVector::new(amps, *cfg)
}

fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Array1<Complex64> {
    let mut amps = Array1::zeros(dim);
    // Recurrence a_{n+1} = a_n · α / √(n+1) sidesteps factorial overflow.
    let mut a = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        amps[n] = a;
        a *= alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

/// Pure cat state (N±/√2)(|α e^{iφ}⟩ ± |α e^{-iφ}⟩) on the truncated basis.
pub fn coherent_mqs_state(
    params: &CoherentMqsParams,
    cfg: &TruncationConfig,
) -> Result<SingleModeStateVector> {
    let (a, b) = params.branch_amplitudes();
    let norm = cat_normalization(params)?;
    let branch_a = coherent_amplitudes(a, cfg.dim());
    let branch_b = coherent_amplitudes(b, cfg.dim());
    let scale = norm / 2.0f64.sqrt();
    let sign = params.sign.factor();
    let amps = Array1::from_shape_fn(cfg.dim(), |n| scale * (branch_a[n] + sign * branch_b[n]));
    SingleModeStateVector::new(amps, *cfg)
}

/// Lossy cat in closed form:
/// (N±²/2)[|A⟩⟨A| + |B⟩⟨B| ± (η|A⟩⟨B| + η̄|B⟩⟨A|)] with A = √T α e^{iφ},
/// B = √T α e^{-iφ} and coherence attenuation η = exp(R|α|²(e^{2iφ} - 1)),
/// |η| = exp(-2R|α|² sin²φ).
pub fn coherent_mqs_lossy_density(
    params: &CoherentMqsParams,
    channel: &ChannelParams,
    cfg: &TruncationConfig,
) -> Result<SingleModeDensityMatrix> {
    let (a, b) = params.branch_amplitudes();
    let norm = cat_normalization(params)?;
    let sqrt_t = channel.transmittivity().sqrt();
    let r = channel.reflectivity();
    let branch_a = coherent_amplitudes(a * sqrt_t, cfg.dim());
    let branch_b = coherent_amplitudes(b * sqrt_t, cfg.dim());
    let eta = (r * (b.conj() * a - a.norm_sqr())).exp();
    let weight = norm * norm / 2.0;
    let sign = params.sign.factor();
    let dim = cfg.dim();
    let mut entries = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let direct = branch_a[i] * branch_a[j].conj() + branch_b[i] * branch_b[j].conj();
            let cross = eta * branch_a[i] * branch_b[j].conj()
                + eta.conj() * branch_b[i] * branch_a[j].conj();
            entries[(i, j)] = weight * (direct + sign * cross);
        }
    }
    SingleModeDensityMatrix::new(entries, *cfg)
}

/// Closed-form visibility decay D(x) = √(1 - √(1 - e^{-4x})) with
/// x = R |α|² sin²φ, the mean number of lost photons weighted by branch
/// separation. Exact in the macroscopic regime where the branch overlap
/// e^{-2|α|² sin²φ} is negligible.
pub fn coherent_mqs_distance_analytic(alpha: Complex64, phi: f64, reflectivity: f64) -> f64 {
    let x = reflectivity * alpha.norm_sqr() * phi.sin().powi(2);
    visibility_law(x)
}

/// The universal decay law D(x) itself.
pub fn visibility_law(x: f64) -> f64 {
    (1.0 - (1.0 - (-4.0 * x).exp()).sqrt()).sqrt()
}

/// Distance between the lossy pointer states |±√T α⟩:
/// D = √(1 - e^{-2T|α|²}).
pub fn coherent_pointer_distance(alpha: Complex64, transmittivity: f64) -> f64 {
    (1.0 - (-2.0 * transmittivity * alpha.norm_sqr()).exp()).sqrt()
}

/// Smallest n_max whose Poisson tail beats `tail_tolerance` for a plain
/// coherent state of amplitude α.
pub fn coherent_required_n_max(alpha: Complex64, tail_tolerance: f64) -> usize {
    let lambda = alpha.norm_sqr();
    let mut term = (-lambda).exp();
    let mut cum = term;
    let mut n = 0usize;
    while 1.0 - cum > 0.25 * tail_tolerance && n < 4096 {
        n += 1;
        term *= lambda / n as f64;
        cum += term;
    }
    n
}

/// Smallest n_max keeping the cat-state tail below `tail_tolerance`,
/// computed from the actual superposition amplitudes.
pub fn coherent_mqs_required_n_max(params: &CoherentMqsParams, tail_tolerance: f64) -> Result<usize> {
    const CAP: usize = 4096;
    let (a, b) = params.branch_amplitudes();
    let norm = cat_normalization(params)?;
    let branch_a = coherent_amplitudes(a, CAP + 1);
    let branch_b = coherent_amplitudes(b, CAP + 1);
    let scale = norm / 2.0f64.sqrt();
    let sign = params.sign.factor();
    let probs: Vec<f64> = (0..=CAP)
        .map(|n| (scale * (branch_a[n] + sign * branch_b[n])).norm_sqr())
        .collect();
    let mut tail = 0.0;
    for n in (0..=CAP).rev() {
        tail += probs[n];
        if tail > 0.5 * tail_tolerance {
            return Ok((n + 1).min(CAP));
        }
    }
    Ok(0)
}
