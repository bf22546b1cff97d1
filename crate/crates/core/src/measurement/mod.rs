//! Conjugate homodyne measurement records and their simulation.
//!
//! Quadratures are in units where the vacuum variance of each quadrature is
//! 1/2, so `z = x3² + p4²` has mean `⟨n⟩ + 1`.

mod calibration;
mod density;
mod equivalence;
mod sampling;

pub use calibration::{calibrate, CalibrationParams, MIN_VACUUM_ROWS};
pub use density::{ln_pz_density, pr_density, pz_density};
pub use equivalence::{
    loss_equivalence_report, EquivalenceReport, GaussianMoments, MIN_EQUIVALENCE_COUNT,
};
pub use sampling::{sample_quadratures, sample_z, to_z};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::states::check_eta;

/// Paired homodyne outcomes `(x3, p4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureBatch {
    samples: Vec<(f64, f64)>,
    phases: Option<Vec<f64>>,
    calibrated: bool,
    source_tag: String,
}

impl QuadratureBatch {
    pub fn new(
        samples: Vec<(f64, f64)>,
        phases: Option<Vec<f64>>,
        calibrated: bool,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("quadrature batch is empty"));
        }
        if let Some(i) = samples
            .iter()
            .position(|(x, p)| !(x.is_finite() && p.is_finite()))
        {
            return Err(invalid(format!("quadrature sample {i} is not finite")));
        }
        if let Some(ph) = &phases {
            if ph.len() != samples.len() {
                return Err(invalid(format!(
                    "{} phases for {} samples",
                    ph.len(),
                    samples.len()
                )));
            }
        }
        Ok(Self {
            samples,
            phases,
            calibrated,
            source_tag: source_tag.into(),
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn phases(&self) -> Option<&[f64]> {
        self.phases.as_deref()
    }

    pub fn calibrated(&self) -> bool {
        self.calibrated
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x3(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn p4(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }
}

/// Nonnegative outcomes of the `Z = X3² + P4²` observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ZBatch {
    values: Vec<f64>,
    source_tag: String,
}

impl ZBatch {
    pub fn new(values: Vec<f64>, source_tag: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("z batch is empty"));
        }
        if let Some(i) = values.iter().position(|z| !(z.is_finite() && *z >= 0.0)) {
            return Err(invalid(format!(
                "z value {} at index {i} is not a finite nonnegative number",
                values[i]
            )));
        }
        Ok(Self {
            values,
            source_tag: source_tag.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Detector efficiency and additive Gaussian noise on each quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub eta: f64,
    pub sigma2_x: f64,
    pub sigma2_p: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, sigma2_x: f64, sigma2_p: f64) -> Result<Self> {
        check_eta(eta)?;
        for (name, v) in [("sigma2_x", sigma2_x), ("sigma2_p", sigma2_p)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            eta,
            sigma2_x,
            sigma2_p,
        })
    }

    pub fn ideal() -> Self {
        Self {
            eta: 1.0,
            sigma2_x: 0.0,
            sigma2_p: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Coherent,
    Thermal,
}

/// Relative phase `δ = φ − θ` between signal and local oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// Fresh uniform phase on `[0, 2π)` for every pulse.
    RandomUniform,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSourceSpec {
    pub kind: SourceKind,
    pub mean_photons: f64,
    pub phase_mode: PhaseMode,
}

impl GaussianSourceSpec {
    pub fn new(kind: SourceKind, mean_photons: f64, phase_mode: PhaseMode) -> Result<Self> {
        if !(mean_photons.is_finite() && mean_photons >= 0.0) {
            return Err(invalid(format!(
                "mean photon number must be finite and >= 0, got {mean_photons}"
            )));
        }
        if let PhaseMode::Fixed(phi) = phase_mode {
            if !phi.is_finite() {
                return Err(invalid("fixed phase must be finite"));
            }
        }
        Ok(Self {
            kind,
            mean_photons,
            phase_mode,
        })
    }

    pub fn coherent(mean_photons: f64, phase_mode: PhaseMode) -> Result<Self> {
        Self::new(SourceKind::Coherent, mean_photons, phase_mode)
    }

    pub fn thermal(mean_photons: f64) -> Result<Self> {
        Self::new(SourceKind::Thermal, mean_photons, PhaseMode::RandomUniform)
    }

    /// Short provenance label, e.g. `coherent(mu=5)`.
    pub fn tag(&self) -> String {
        match self.kind {
            SourceKind::Coherent => format!("coherent(mu={})", self.mean_photons),
            SourceKind::Thermal => format!("thermal(nbar={})", self.mean_photons),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_validation() {
        assert!(ZBatch::new(vec![], "t").is_err());
        assert!(ZBatch::new(vec![1.0, -0.1], "t").is_err());
        assert!(ZBatch::new(vec![f64::NAN], "t").is_err());
        assert_eq!(ZBatch::new(vec![0.0, 2.0], "t").unwrap().len(), 2);

        assert!(QuadratureBatch::new(vec![], None, false, "q").is_err());
        assert!(QuadratureBatch::new(vec![(0.0, 1.0)], Some(vec![0.0, 1.0]), false, "q").is_err());
        assert!(QuadratureBatch::new(vec![(f64::INFINITY, 1.0)], None, false, "q").is_err());
    }

    #[test]
    fn detector_validation() {
        assert!(DetectorModel::new(0.0, 0.0, 0.0).is_err());
        assert!(DetectorModel::new(1.0, -0.1, 0.0).is_err());
        assert!(DetectorModel::new(0.9, 0.21, 0.16).is_ok());
        assert!(GaussianSourceSpec::coherent(-1.0, PhaseMode::RandomUniform).is_err());
    }

    #[test]
    fn spec_serializes_with_snake_case_tags() {
        let spec = GaussianSourceSpec::coherent(5.0, PhaseMode::Fixed(0.5)).unwrap();
        let json = serde_json::to_value(spec).unwrap();
        assert_eq!(json["kind"], "coherent");
        assert_eq!(json["phase_mode"]["fixed"], 0.5);
        let json = serde_json::to_value(GaussianSourceSpec::thermal(1.0).unwrap()).unwrap();
        assert_eq!(json["phase_mode"], "random_uniform");
    }
}
