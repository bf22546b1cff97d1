//! Photon-number inference from `Z` records.

mod em;
mod moments;
mod posterior;

pub use em::{
    em_reconstruct, loglikelihood, EMConfig, EMResult, DEFAULT_CONVERGENCE_TOL,
    DEFAULT_MAX_ITERATIONS, MAX_HEURISTIC_N_MAX,
};
pub use moments::{moment_estimates, MomentSummary, G2_GUARD_STANDARD_ERRORS};
pub use posterior::{single_shot_posterior, POSTERIOR_TRUNCATION_TOLERANCE};
