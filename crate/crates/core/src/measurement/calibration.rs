//! Vacuum calibration of raw quadrature captures.
//!
//! A signal-blocked capture fixes both the DC offset and the gain of each
//! homodyne channel: after calibration the vacuum record has zero mean and
//! variance exactly 1/2 per quadrature.

use serde::{Deserialize, Serialize};

use super::QuadratureBatch;
use crate::error::{Error, Result};
use crate::math::{mean, sample_variance};

pub const MIN_VACUUM_ROWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    pub offset_x: f64,
    pub offset_p: f64,
    pub scale_x: f64,
    pub scale_p: f64,
    pub vacuum_rows: usize,
}

impl CalibrationParams {
    pub fn from_vacuum(vacuum: &QuadratureBatch) -> Result<Self> {
        if vacuum.len() < MIN_VACUUM_ROWS {
            return Err(Error::Calibration(format!(
                "vacuum record has {} rows, at least {MIN_VACUUM_ROWS} are required",
                vacuum.len()
            )));
        }
        let (x, p) = (vacuum.x3(), vacuum.p4());
        let scale = |name: &str, v: &[f64]| {
            let var = sample_variance(v);
            if var.is_finite() && var > 0.0 {
                Ok((0.5 / var).sqrt())
            } else {
                Err(Error::Calibration(format!(
                    "vacuum variance of {name} is {var}"
                )))
            }
        };
        Ok(Self {
            offset_x: mean(&x),
            offset_p: mean(&p),
            scale_x: scale("x3", &x)?,
            scale_p: scale("p4", &p)?,
            vacuum_rows: vacuum.len(),
        })
    }

    pub fn apply(&self, raw: &QuadratureBatch) -> Result<QuadratureBatch> {
        let samples = raw
            .samples()
            .iter()
            .map(|&(x, p)| {
                (
                    (x - self.offset_x) * self.scale_x,
                    (p - self.offset_p) * self.scale_p,
                )
            })
            .collect();
        QuadratureBatch::new(
            samples,
            raw.phases().map(<[f64]>::to_vec),
            true,
            raw.source_tag(),
        )
    }
}

/// Calibrates `raw` against a vacuum capture; returns the calibrated batch and the parameters used.
pub fn calibrate(
    raw: &QuadratureBatch,
    vacuum: &QuadratureBatch,
) -> Result<(QuadratureBatch, CalibrationParams)> {
    let params = CalibrationParams::from_vacuum(vacuum)?;
    Ok((params.apply(raw)?, params))
}
