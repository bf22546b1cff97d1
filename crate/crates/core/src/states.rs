//! Truncated photon-number distributions.
//!
//! A [`PhotonDistribution`] stores the diagonal `p(n) = ρ_nn` of a single-mode
//! state for `n = 0..=n_max`. The analytic constructors (Fock, coherent,
//! thermal) refuse to truncate away more than a configurable tail mass, so a
//! too-small `n_max` is reported instead of silently renormalized.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::math::{ln_binomial, ln_factorials};

/// Default bound on the probability mass a constructor may drop beyond `n_max`.
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-8;

/// Default bound on per-entry negative excursions that [`PhotonDistribution::inverse_bernoulli`]
/// clips to zero.
pub const DEFAULT_CLIP_TOLERANCE: f64 = 1e-6;

const NORMALIZATION_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRecord", into = "DistributionRecord")]
pub struct PhotonDistribution {
    probs: Vec<f64>,
    truncated_mass: f64,
}

/// JSON shape of a distribution: `{"n_max", "probs", "truncated_mass"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistributionRecord {
    n_max: usize,
    probs: Vec<f64>,
    truncated_mass: f64,
}

impl TryFrom<DistributionRecord> for PhotonDistribution {
    type Error = Error;

    fn try_from(rec: DistributionRecord) -> Result<Self> {
        if rec.probs.len() != rec.n_max + 1 {
            return Err(invalid(format!(
                "probs has {} entries but n_max = {}",
                rec.probs.len(),
                rec.n_max
            )));
        }
        if !(rec.truncated_mass >= 0.0 && rec.truncated_mass < 1.0) {
            return Err(invalid(format!(
                "truncated_mass {} outside [0, 1)",
                rec.truncated_mass
            )));
        }
        let mut dist = Self::from_probs(rec.probs)?;
        dist.truncated_mass = rec.truncated_mass;
        Ok(dist)
    }
}

impl From<PhotonDistribution> for DistributionRecord {
    fn from(d: PhotonDistribution) -> Self {
        DistributionRecord {
            n_max: d.n_max(),
            truncated_mass: d.truncated_mass,
            probs: d.probs,
        }
    }
}

/// Diagnostics from an inverse Bernoulli transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    /// Largest magnitude of a negative entry before clipping (0 if none).
    pub max_negative_excursion: f64,
    /// Worst-case rounding error of any entry of the raw inverse.
    pub rounding_bound: f64,
}

impl PhotonDistribution {
    /// Builds an empirical distribution from probabilities that already sum to one
    /// (within 1e-6). Values summing to one within 1e-12 are kept as given;
    /// otherwise the vector is renormalized.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let total = validate_weights(&probs)?;
        if (total - 1.0).abs() > NORMALIZATION_SLACK {
            return Err(invalid(format!("probabilities sum to {total}, expected 1")));
        }
        if (total - 1.0).abs() <= 1e-12 {
            return Ok(Self {
                probs,
                truncated_mass: 0.0,
            });
        }
        Ok(Self::normalized(probs, total, 0.0))
    }

    /// Builds a distribution from nonnegative weights with a positive sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total = validate_weights(&weights)?;
        Ok(Self::normalized(weights, total, 0.0))
    }

    /// Uniform distribution over `0..=n_max`.
    pub fn uniform(n_max: usize) -> Self {
        let p = 1.0 / (n_max + 1) as f64;
        Self {
            probs: vec![p; n_max + 1],
            truncated_mass: 0.0,
        }
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut probs = vec![0.0; n_max + 1];
        probs[0] = 1.0;
        Self {
            probs,
            truncated_mass: 0.0,
        }
    }

    /// Fock state `|n⟩` truncated at `n_max`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(invalid(format!("Fock index {n} exceeds n_max {n_max}")));
        }
        let mut probs = vec![0.0; n_max + 1];
        probs[n] = 1.0;
        Ok(Self {
            probs,
            truncated_mass: 0.0,
        })
    }

    /// Coherent state with mean photon number `mean_photons` (Poisson statistics).
    pub fn coherent(mean_photons: f64, n_max: usize) -> Result<Self> {
        Self::coherent_with_tolerance(mean_photons, n_max, DEFAULT_TRUNCATION_TOLERANCE)
    }

    pub fn coherent_with_tolerance(
        mean_photons: f64,
        n_max: usize,
        tolerance: f64,
    ) -> Result<Self> {
        check_mean(mean_photons)?;
        check_tolerance(tolerance)?;
        if mean_photons == 0.0 {
            return Ok(Self::vacuum(n_max));
        }
        let tail = poisson_tail(mean_photons, n_max);
        if tail >= tolerance {
            let mut required = n_max + 1;
            while poisson_tail(mean_photons, required) >= tolerance {
                required += 1;
            }
            return Err(Error::Truncation {
                n_max,
                tail_mass: tail,
                tolerance,
                required_n_max: required,
            });
        }
        let ln_fact = ln_factorials(n_max);
        let ln_mu = mean_photons.ln();
        let probs: Vec<f64> = (0..=n_max)
            .map(|n| (-mean_photons + n as f64 * ln_mu - ln_fact[n]).exp())
            .collect();
        let total = probs.iter().sum();
        Ok(Self::normalized(probs, total, tail))
    }

    /// Single-mode thermal state with mean photon number `mean_photons`
    /// (Bose–Einstein statistics `n̄ⁿ/(n̄+1)ⁿ⁺¹`).
    pub fn thermal(mean_photons: f64, n_max: usize) -> Result<Self> {
        Self::thermal_with_tolerance(mean_photons, n_max, DEFAULT_TRUNCATION_TOLERANCE)
    }

    pub fn thermal_with_tolerance(mean_photons: f64, n_max: usize, tolerance: f64) -> Result<Self> {
        check_mean(mean_photons)?;
        check_tolerance(tolerance)?;
        if mean_photons == 0.0 {
            return Ok(Self::vacuum(n_max));
        }
        // ratio r = n̄/(n̄+1); tail beyond N is r^(N+1)
        let ln_r = (mean_photons / (mean_photons + 1.0)).ln();
        let tail = ((n_max + 1) as f64 * ln_r).exp();
        if tail >= tolerance {
            let required = ((tolerance.ln() / ln_r).floor() as usize).max(n_max + 1);
            return Err(Error::Truncation {
                n_max,
                tail_mass: tail,
                tolerance,
                required_n_max: required,
            });
        }
        let ln_first = -(mean_photons + 1.0).ln();
        let probs: Vec<f64> = (0..=n_max)
            .map(|n| (ln_first + n as f64 * ln_r).exp())
            .collect();
        let total = probs.iter().sum();
        Ok(Self::normalized(probs, total, tail))
    }

    fn normalized(mut probs: Vec<f64>, total: f64, truncated_mass: f64) -> Self {
        for p in probs.iter_mut() {
            *p /= total;
        }
        Self {
            probs,
            truncated_mass,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// Analytic mass beyond `n_max` dropped at construction (0 for empirical distributions).
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    /// `(⟨n⟩, ⟨Δn²⟩)`.
    pub fn moments(&self) -> (f64, f64) {
        let (m1, m2) = self
            .probs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(m1, m2), (n, &p)| {
                let n = n as f64;
                (m1 + n * p, m2 + n * n * p)
            });
        (m1, m2 - m1 * m1)
    }

    /// Total variation distance, with the shorter vector padded by zeros.
    pub fn total_variation(&self, other: &PhotonDistribution) -> f64 {
        let len = self.probs.len().max(other.probs.len());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        0.5 * (0..len)
            .map(|i| (at(&self.probs, i) - at(&other.probs, i)).abs())
            .sum::<f64>()
    }

    /// Binomial thinning by efficiency `eta`:
    /// `p'(n) = Σ_{m≥n} C(m,n) ηⁿ (1−η)^{m−n} p(m)`.
    pub fn bernoulli_transform(&self, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let n_max = self.n_max();
        let ln_fact = ln_factorials(n_max);
        let (ln_keep, ln_lose) = (eta.ln(), (1.0 - eta).ln());
        let out: Vec<f64> = (0..=n_max)
            .map(|n| {
                (n..=n_max)
                    .filter(|&m| self.probs[m] > 0.0)
                    .map(|m| {
                        let ln_w = ln_binomial(&ln_fact, m, n)
                            + n as f64 * ln_keep
                            + (m - n) as f64 * ln_lose;
                        ln_w.exp() * self.probs[m]
                    })
                    .sum()
            })
            .collect();
        let total = out.iter().sum();
        Ok(Self::normalized(out, total, self.truncated_mass))
    }

    /// Inverse Bernoulli transform with the default clip tolerance.
    pub fn inverse_bernoulli(&self, eta: f64) -> Result<(Self, InversionReport)> {
        self.inverse_bernoulli_with(eta, DEFAULT_CLIP_TOLERANCE)
    }

    /// Undoes binomial thinning by `eta`:
    /// `p(n) = Σ_{m≥n} C(m,n) η⁻ⁿ (−(1−η)/η)^{m−n} p'(m)`.
    ///
    /// The alternating sum is ill-conditioned for small `eta` and amplifies
    /// noise in estimated inputs. Negative entries no larger than
    /// `clip_tolerance` in magnitude are set to zero and the result is
    /// renormalized; anything larger, or a rounding bound above
    /// `clip_tolerance`, is an [`Error::IllConditioned`].
    pub fn inverse_bernoulli_with(
        &self,
        eta: f64,
        clip_tolerance: f64,
    ) -> Result<(Self, InversionReport)> {
        check_eta(eta)?;
        if !(clip_tolerance >= 0.0 && clip_tolerance.is_finite()) {
            return Err(invalid(format!(
                "clip tolerance must be finite and >= 0, got {clip_tolerance}"
            )));
        }
        if eta == 1.0 {
            let report = InversionReport {
                max_negative_excursion: 0.0,
                rounding_bound: 0.0,
            };
            return Ok((self.clone(), report));
        }
        let n_max = self.n_max();
        let ln_fact = ln_factorials(n_max);
        let ln_gain = -eta.ln();
        let ln_ratio = ((1.0 - eta) / eta).ln();

        let mut raw = Vec::with_capacity(n_max + 1);
        let mut rounding_bound: f64 = 0.0;
        for n in 0..=n_max {
            let (mut sum, mut abs_sum) = (0.0, 0.0);
            for m in n..=n_max {
                if self.probs[m] == 0.0 {
                    continue;
                }
                let ln_w =
                    ln_binomial(&ln_fact, m, n) + n as f64 * ln_gain + (m - n) as f64 * ln_ratio;
                let term = ln_w.exp() * self.probs[m];
                if (m - n) % 2 == 0 {
                    sum += term;
                } else {
                    sum -= term;
                }
                abs_sum += term;
            }
            rounding_bound = rounding_bound.max(abs_sum * (n_max + 1) as f64 * f64::EPSILON);
            raw.push(sum);
        }
        if !rounding_bound.is_finite() || rounding_bound > clip_tolerance {
            return Err(Error::IllConditioned(format!(
                "rounding bound {rounding_bound:.3e} at eta={eta} exceeds clip tolerance {clip_tolerance:.1e}"
            )));
        }
        let max_negative_excursion = raw.iter().fold(0.0_f64, |acc, &x| acc.max(-x));
        if max_negative_excursion > clip_tolerance {
            return Err(Error::IllConditioned(format!(
                "negative entry of magnitude {max_negative_excursion:.3e} exceeds clip tolerance {clip_tolerance:.1e}"
            )));
        }
        let clipped: Vec<f64> = raw.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::IllConditioned("inverse has no positive mass".into()));
        }
        let report = InversionReport {
            max_negative_excursion,
            rounding_bound,
        };
        Ok((
            Self::normalized(clipped, total, self.truncated_mass),
            report,
        ))
    }
}

fn validate_weights(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(invalid("distribution needs at least one entry"));
    }
    if let Some((n, p)) = weights
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
    {
        return Err(invalid(format!(
            "entry {n} is {p}; probabilities must be finite and >= 0"
        )));
    }
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(invalid("weights sum to zero"));
    }
    Ok(total)
}

fn check_mean(mean_photons: f64) -> Result<()> {
    if mean_photons.is_finite() && mean_photons >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "mean photon number must be finite and >= 0, got {mean_photons}"
        )))
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "truncation tolerance must lie in (0, 1), got {tolerance}"
        )))
    }
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "efficiency eta must lie in (0, 1], got {eta}"
        )))
    }
}

/// Poisson(μ) mass strictly above `n_max`, summed term by term.
fn poisson_tail(mu: f64, n_max: usize) -> f64 {
    let first = n_max + 1;
    let ln_fact_first: f64 = (2..=first).map(|k| (k as f64).ln()).sum();
    let mut term = (-mu + first as f64 * mu.ln() - ln_fact_first).exp();
    let mut tail = 0.0;
    let mut n = first;
    loop {
        tail += term;
        n += 1;
        term *= mu / n as f64;
        if (n as f64 > mu && term <= tail * 1e-17) || term == 0.0 {
            break;
        }
    }
    tail
}
