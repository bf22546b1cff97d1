use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::{mean, sample_variance};
use crate::measurement::ZBatch;

/// `g²(0)` is reported undefined when `|⟨Z⟩ − 1|` is within this many
/// standard errors of the sample mean (near-vacuum input).
pub const G2_GUARD_STANDARD_ERRORS: f64 = 4.0;

const G2_GUARD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    /// `⟨n⟩ = ⟨Z⟩ − 1`
    pub mean_n: f64,
    /// `⟨Δn²⟩ = Var(Z) − ⟨n⟩ − 1`
    pub var_n: f64,
    /// `None` when the denominator guard trips.
    pub g2: Option<f64>,
    pub mean_z: f64,
    pub mean_z2: f64,
    pub sample_count: usize,
    /// Threshold applied to `|⟨Z⟩ − 1|`.
    pub g2_guard: f64,
}

impl MomentSummary {
    pub fn g2_defined(&self) -> bool {
        self.g2.is_some()
    }
}

/// Moment estimators of the input photon statistics.
///
/// `⟨Z⟩ = ⟨n⟩ + 1`, `⟨ΔZ²⟩ = ⟨Δn²⟩ + ⟨n⟩ + 1` and
/// `g²(0) = (⟨Z²⟩ − 4⟨Z⟩ + 2)/(⟨Z⟩ − 1)²`.
pub fn moment_estimates(batch: &ZBatch) -> Result<MomentSummary> {
    let z = batch.values();
    if z.len() < 2 {
        return Err(invalid("moment estimates need at least 2 samples"));
    }
    let mean_z = mean(z);
    let mean_z2 = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
    let var_z = sample_variance(z);
    let mean_n = mean_z - 1.0;
    let var_n = var_z - mean_n - 1.0;
    let g2_guard = (G2_GUARD_STANDARD_ERRORS * (var_z / z.len() as f64).sqrt()).max(G2_GUARD_FLOOR);
    let g2 = (mean_n.abs() >= g2_guard).then(|| (mean_z2 - 4.0 * mean_z + 2.0) / (mean_n * mean_n));
    Ok(MomentSummary {
        mean_n,
        var_n,
        g2,
        mean_z,
        mean_z2,
        sample_count: z.len(),
        g2_guard,
    })
}
