//! Constructors for every state family under study and their closed-form
//! decoherence laws: coherent-state superpositions, NOON states, and the
//! multiphoton macrostates of a phase-covariant cloning amplifier.

mod coherent;
mod noon;
mod qiopa;

pub use coherent::{
    cat_normalization, coherent_mqs_distance_analytic, coherent_mqs_lossy_density,
    coherent_mqs_required_n_max, coherent_mqs_state, coherent_overlap, coherent_pointer_distance,
    coherent_required_n_max, coherent_state_vector, visibility_law, CoherentMqsParams,
};
pub use noon::{noon_distances, noon_pointer_state, noon_state, NoonDistances, NoonParams};
pub use qiopa::{
    equatorial_basis_change, qiopa_equatorial_lossy_density, qiopa_equatorial_pair_canonical,
    qiopa_equatorial_state, qiopa_hv_lossy_density, qiopa_mean_photon_number,
    qiopa_minus_state_canonical, qiopa_pi_orthogonal_state, qiopa_pi_state, qiopa_plus_state,
    qiopa_required_n_max, qiopa_slope_limit, qiopa_superposition_identity_check, QiopaParams,
};

/// Relative sign between the two branches of a macroscopic superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MqsSign {
    Plus,
    Minus,
}

impl MqsSign {
    pub fn factor(&self) -> f64 {
        match self {
            MqsSign::Plus => 1.0,
            MqsSign::Minus => -1.0,
        }
    }
}
