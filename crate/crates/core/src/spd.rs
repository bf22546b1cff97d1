//! The `Z` measurement used as a threshold single-photon detector.
//!
//! A click is reported when `z > T`. For a single photon `z ~ Gamma(2, 1)`
//! and for vacuum `z ~ Exp(1)`, which gives closed forms
//! `η(T) = (1+T)e^{−T}`, `D(T) = e^{−T}` and `R = η/D = 1 + T`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurvePoint {
    pub threshold: f64,
    pub efficiency: f64,
    pub dark_count: f64,
    pub ratio: f64,
}

pub fn spd_point(threshold: f64) -> Result<ThresholdCurvePoint> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(invalid(format!(
            "threshold must be finite and >= 0, got {threshold}"
        )));
    }
    let dark_count = (-threshold).exp();
    Ok(ThresholdCurvePoint {
        threshold,
        efficiency: (1.0 + threshold) * dark_count,
        dark_count,
        ratio: 1.0 + threshold,
    })
}

/// `points` evenly spaced thresholds on `[t_min, t_max]`, endpoints included.
pub fn spd_curve(t_min: f64, t_max: f64, points: usize) -> Result<Vec<ThresholdCurvePoint>> {
    if !(t_min >= 0.0 && t_min < t_max && t_max.is_finite()) {
        return Err(invalid(format!(
            "need 0 <= t_min < t_max, got [{t_min}, {t_max}]"
        )));
    }
    if points < 2 {
        return Err(invalid(format!("need at least 2 points, got {points}")));
    }
    let step = (t_max - t_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let t = if i == points - 1 {
                t_max
            } else {
                t_min + step * i as f64
            };
            spd_point(t)
        })
        .collect()
}
