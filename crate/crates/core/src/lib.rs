//! Simulation and inference for conjugate optical homodyne detection.
//!
//! Two homodyne detectors measure conjugate quadratures `x3`, `p4` of the two
//! outputs of a symmetric beam splitter. The observable `z = x3² + p4²`
//! follows the Gamma mixture `P_Z(z) = e^{−z} Σ_n p(n) zⁿ/n!`, which depends
//! only on the photon-number distribution `p(n)` and not on the phase of the
//! local oscillator. This crate
//!
//! * builds truncated photon-number distributions and applies detector
//!   efficiency as binomial thinning ([`states`]),
//! * simulates `z` and quadrature records and evaluates outcome densities
//!   ([`measurement`]),
//! * estimates `⟨n⟩`, `⟨Δn²⟩`, `g²(0)` and the full `p(n)` from data
//!   ([`estimation`]),
//! * characterizes the scheme as a threshold photon detector ([`spd`]).

pub mod error;
pub mod estimation;
pub mod io;
pub mod math;
pub mod measurement;
pub mod rng;
pub mod spd;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
pub use estimation::{
    em_reconstruct, loglikelihood, moment_estimates, single_shot_posterior, EMConfig, EMResult,
    MomentSummary,
};
pub use measurement::{
    loss_equivalence_report, pr_density, pz_density, sample_quadratures, sample_z, to_z,
    DetectorModel, EquivalenceReport, GaussianSourceSpec, PhaseMode, QuadratureBatch, SourceKind,
    ZBatch,
};
pub use spd::{spd_curve, spd_point, ThresholdCurvePoint};
pub use states::{InversionReport, PhotonDistribution};
