//! NOON states (|N,0⟩ ± |0,N⟩)/√2 and their loss scaling laws.
//!
//! The pointer pair {|N,0⟩, |0,N⟩} stays distinguishable until almost all
//! photons are gone, D = √(1 - R^N), while the superposition's coherence
//! rides on the N-photon coincidence and collapses as D = √((1-R)^N): one
//! lost photon on average is enough to erase it.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::fock::{flat_index, TruncationConfig, TwoModeIndex, TwoModeStateVector};
use crate::states::MqsSign;

/// Total photon number N and branch sign of a NOON state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoonParams {
    pub photons: usize,
    pub sign: MqsSign,
}

impl NoonParams {
    pub fn new(photons: usize, sign: MqsSign) -> Result<Self> {
        if photons == 0 {
            return Err(SimError::InvalidParameter(
                "NOON state needs at least one photon".into(),
            ));
        }
        Ok(Self { photons, sign })
    }
}

/// The superposition (|N,0⟩ ± |0,N⟩)/√2. The branches are orthogonal, so the
/// normalization constant is exactly 1/√2.
pub fn noon_state(params: &NoonParams, cfg: &TruncationConfig) -> Result<TwoModeStateVector> {
    let n = params.photons;
    if n > cfg.n_max() {
        return Err(SimError::IndexOutOfRange {
            n_a: n,
            n_b: 0,
            n_max: cfg.n_max(),
        });
    }
    let mut amps = Array1::zeros(cfg.two_mode_dim());
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[flat_index(TwoModeIndex::new(n, 0), cfg)?] = amp;
    amps[flat_index(TwoModeIndex::new(0, n), cfg)?] = params.sign.factor() * amp;
    TwoModeStateVector::new(amps, *cfg)
}

/// One pointer branch: |N,0⟩ when `first_mode` is true, |0,N⟩ otherwise.
pub fn noon_pointer_state(
    photons: usize,
    first_mode: bool,
    cfg: &TruncationConfig,
) -> Result<TwoModeStateVector> {
    if photons > cfg.n_max() {
        return Err(SimError::IndexOutOfRange {
            n_a: photons,
            n_b: 0,
            n_max: cfg.n_max(),
        });
    }
    let mut amps = Array1::zeros(cfg.two_mode_dim());
    let idx = if first_mode {
        TwoModeIndex::new(photons, 0)
    } else {
        TwoModeIndex::new(0, photons)
    };
    amps[flat_index(idx, cfg)?] = Complex64::new(1.0, 0.0);
    TwoModeStateVector::new(amps, *cfg)
}

/// Scaling laws after loss at reflectivity R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoonDistances {
    /// Distance between the lossy pointer branches, √(1 - R^N).
    pub pointer: f64,
    /// Visibility of the lossy superposition pair, √((1-R)^N).
    pub mqs: f64,
}

/// Closed-form pointer distance and superposition visibility at
/// reflectivity R.
pub fn noon_distances(params: &NoonParams, reflectivity: f64) -> NoonDistances {
    let n = params.photons as i32;
    NoonDistances {
        pointer: (1.0 - reflectivity.powi(n)).sqrt(),
        mqs: (1.0 - reflectivity).powi(n).sqrt(),
    }
}
