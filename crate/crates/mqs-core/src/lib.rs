//! Numerical toolkit for macroscopic quantum superpositions of light under
//! photon loss.
//!
//! The crate builds coherent-state cats, NOON states and the multiphoton
//! macrostates produced by amplifying a single-photon qubit, sends them
//! through a beam-splitter loss channel, and quantifies how distinguishable
//! the resulting mixed states remain via the Bures distance.
//!
//! Modules:
//! - [`fock`]: truncated one- and two-mode Fock representations.
//! - [`loss`]: the photon-loss channel as a Kraus map, plus a beam-splitter
//!   plus partial-trace oracle used to validate it.
//! - [`metrics`]: Uhlmann fidelity and Bures distance via Hermitian
//!   eigendecomposition.
//! - [`states`]: constructors for every state family and their closed-form
//!   decoherence laws.
//! - [`ofilter`]: the photon-number-difference post-selection filter.
//!
//! All public types are immutable after construction; everything is safe to
//! share across threads.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod loss;
pub mod math;
pub mod metrics;
pub mod ofilter;
pub mod states;

pub use error::{Result, SimError};
pub use fock::{
    flat_index, index_from_flat, partial_trace_second_system, pure_to_density, ParitySpectrum,
    SingleModeDensityMatrix, SingleModeStateVector, TruncationConfig, TwoModeDensityMatrix,
    TwoModeIndex, TwoModeStateVector,
};
pub use loss::{
    apply_loss_single_mode, apply_loss_two_mode, build_kraus_set, coherent_loss_analytic,
    ChannelParams, KrausSet,
};
pub use metrics::{bures_distance, fidelity, hermitian_sqrt, DistanceReport};
pub use ofilter::{apply_ofilter, ofilter_projector, OFilterParams};
