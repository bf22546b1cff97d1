//! Per-port detector loss versus a single input-port loss.
//!
//! Model (a) places a virtual beam splitter of power transmittance `η` at
//! each output of the symmetric splitter; model (b) places one at its signal
//! input. With amplitude factors `c = √η`, `s = √(1−η)`:
//!
//! ```text
//! (a)  X3 = c/√2·X1 + c/√2·X2 + s·X5        P4 = c/√2·P1 − c/√2·P2 + s·P6
//! (b)  X3 = c/√2·X1 + s/√2·X5' + 1/√2·X2'   P4 = c/√2·P1 + s/√2·P5' − 1/√2·P2'
//! ```
//!
//! Modes other than 1 carry vacuum. Both models are checked analytically
//! (first and second moments of `(X3, P4)`) and by Monte Carlo, sampling the
//! Gaussian Wigner function of every input mode and pushing it through the
//! linear map. `X3` and `P4` belong to different output modes, so that
//! marginal is their joint outcome law.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{GaussianSourceSpec, PhaseMode, SourceKind};
use crate::error::{invalid, Result};
use crate::rng::seeded_stream;
use crate::states::check_eta;
use crate::stats::{ks_two_sample, KsOutcome};

pub const MIN_EQUIVALENCE_COUNT: usize = 10_000;

const VACUUM_VARIANCE: f64 = 0.5;
const KS_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    /// `(⟨X3⟩, ⟨P4⟩)`
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
}

impl GaussianMoments {
    fn max_abs_diff(&self, other: &GaussianMoments) -> f64 {
        let means = self
            .mean
            .iter()
            .zip(&other.mean)
            .map(|(a, b)| (a - b).abs());
        let covs = self
            .covariance
            .iter()
            .flatten()
            .zip(other.covariance.iter().flatten())
            .map(|(a, b)| (a - b).abs());
        means.chain(covs).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub source: GaussianSourceSpec,
    pub eta: f64,
    pub count: usize,
    pub seed: u64,
    /// Phase `δ` the analytic moments are conditioned on (0 for random-phase sources).
    pub reference_phase: f64,
    pub model_a: GaussianMoments,
    pub model_b: GaussianMoments,
    pub analytic_discrepancy: f64,
    pub ks_x3: KsOutcome,
    pub ks_p4: KsOutcome,
}

/// Linear map from input-mode quadratures to `(X3, P4)`.
///
/// Inputs are laid out `[X1, P1, X_a, P_a, X_b, P_b, ...]`; mode 1 is the signal.
struct LossModel {
    x_row: Vec<f64>,
    p_row: Vec<f64>,
}

impl LossModel {
    /// Inputs: signal 1, vacua 2, 5, 6.
    fn per_port(eta: f64) -> Self {
        let (c, s) = (eta.sqrt(), (1.0 - eta).sqrt());
        let k = c * FRAC_1_SQRT_2;
        Self {
            //          X1   P1   X2   P2   X5   P5   X6   P6
            x_row: vec![k, 0.0, k, 0.0, s, 0.0, 0.0, 0.0],
            p_row: vec![0.0, k, 0.0, -k, 0.0, 0.0, 0.0, s],
        }
    }

    /// Inputs: signal 1, vacua 2', 5'.
    fn input_port(eta: f64) -> Self {
        let (c, s) = (eta.sqrt(), (1.0 - eta).sqrt());
        let k = c * FRAC_1_SQRT_2;
        let v = s * FRAC_1_SQRT_2;
        Self {
            //          X1   P1   X2'              P2'               X5'  P5'
            x_row: vec![k, 0.0, FRAC_1_SQRT_2, 0.0, v, 0.0],
            p_row: vec![0.0, k, 0.0, -FRAC_1_SQRT_2, 0.0, v],
        }
    }

    fn modes(&self) -> usize {
        self.x_row.len() / 2
    }

    /// Input means and variances: signal first, vacuum elsewhere, no X–P correlation.
    fn inputs(&self, signal_mean: [f64; 2], signal_var: f64) -> (Vec<f64>, Vec<f64>) {
        let mut mean = vec![0.0; self.x_row.len()];
        let mut var = vec![VACUUM_VARIANCE; self.x_row.len()];
        mean[0] = signal_mean[0];
        mean[1] = signal_mean[1];
        var[0] = signal_var;
        var[1] = signal_var;
        (mean, var)
    }

    fn moments(&self, signal_mean: [f64; 2], signal_var: f64) -> GaussianMoments {
        let (mean, var) = self.inputs(signal_mean, signal_var);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let weighted = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .zip(&var)
                .map(|((x, y), v)| x * y * v)
                .sum::<f64>()
        };
        let xp = weighted(&self.x_row, &self.p_row);
        GaussianMoments {
            mean: [dot(&self.x_row, &mean), dot(&self.p_row, &mean)],
            covariance: [
                [weighted(&self.x_row, &self.x_row), xp],
                [xp, weighted(&self.p_row, &self.p_row)],
            ],
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R, signal_mean: [f64; 2], signal_var: f64) -> (f64, f64) {
        let (mean, var) = self.inputs(signal_mean, signal_var);
        debug_assert_eq!(mean.len(), 2 * self.modes());
        let (mut x3, mut p4) = (0.0, 0.0);
        for i in 0..mean.len() {
            let g: f64 = StandardNormal.sample(rng);
            let q = mean[i] + var[i].sqrt() * g;
            x3 += self.x_row[i] * q;
            p4 += self.p_row[i] * q;
        }
        (x3, p4)
    }
}

/// Signal-mode quadrature mean `(⟨X1⟩, ⟨P1⟩)` at relative phase `delta`, and its variance.
fn signal_moments(spec: &GaussianSourceSpec, delta: f64) -> ([f64; 2], f64) {
    match spec.kind {
        SourceKind::Coherent => {
            let amp = (2.0 * spec.mean_photons).sqrt();
            ([amp * delta.cos(), amp * delta.sin()], VACUUM_VARIANCE)
        }
        SourceKind::Thermal => ([0.0, 0.0], spec.mean_photons + VACUUM_VARIANCE),
    }
}

/// Compares per-port and input-port loss models for a Gaussian source.
pub fn loss_equivalence_report(
    spec: &GaussianSourceSpec,
    eta: f64,
    count: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    check_eta(eta)?;
    let spec = GaussianSourceSpec::new(spec.kind, spec.mean_photons, spec.phase_mode)?;
    if count < MIN_EQUIVALENCE_COUNT {
        return Err(invalid(format!(
            "equivalence check needs count >= {MIN_EQUIVALENCE_COUNT}, got {count}"
        )));
    }
    let reference_phase = match spec.phase_mode {
        PhaseMode::Fixed(d) => d,
        PhaseMode::RandomUniform => 0.0,
    };
    let model_a = LossModel::per_port(eta);
    let model_b = LossModel::input_port(eta);
    let (mean, var) = signal_moments(&spec, reference_phase);
    let moments_a = model_a.moments(mean, var);
    let moments_b = model_b.moments(mean, var);

    let run = |model: &LossModel, stream: u64| {
        let mut rng = seeded_stream(seed, stream);
        let mut xs = Vec::with_capacity(count);
        let mut ps = Vec::with_capacity(count);
        for _ in 0..count {
            let delta = match spec.phase_mode {
                PhaseMode::Fixed(d) => d,
                PhaseMode::RandomUniform => rng.random::<f64>() * TAU,
            };
            let (m, v) = signal_moments(&spec, delta);
            let (x, p) = model.sample(&mut rng, m, v);
            xs.push(x);
            ps.push(p);
        }
        (xs, ps)
    };
    let (xa, pa) = run(&model_a, 1);
    let (xb, pb) = run(&model_b, 2);

    Ok(EquivalenceReport {
        source: spec,
        eta,
        count,
        seed,
        reference_phase,
        analytic_discrepancy: moments_a.max_abs_diff(&moments_b),
        model_a: moments_a,
        model_b: moments_b,
        ks_x3: ks_two_sample(&xa, &xb, KS_ALPHA),
        ks_p4: ks_two_sample(&pa, &pb, KS_ALPHA),
    })
}
