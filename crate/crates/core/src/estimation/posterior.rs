use crate::error::{invalid, Result};
use crate::states::PhotonDistribution;

/// Largest tail mass the single-shot posterior may drop beyond `n_max`.
pub const POSTERIOR_TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Photon-number posterior after one outcome `z` under a uniform prior over `n`.
///
/// `P(n|z) ∝ e^{−z} zⁿ/n!` is Poisson with mean and variance `z`, so a
/// single-shot reading is intrinsically noisy.
pub fn single_shot_posterior(z: f64, n_max: usize) -> Result<PhotonDistribution> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(invalid(format!("z must be finite and >= 0, got {z}")));
    }
    PhotonDistribution::coherent_with_tolerance(z, n_max, POSTERIOR_TRUNCATION_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn zero_outcome_is_vacuum() {
        assert_eq!(
            single_shot_posterior(0.0, 10).unwrap(),
            PhotonDistribution::vacuum(10)
        );
    }

    #[test]
    fn poisson_shape() {
        let p = single_shot_posterior(1.0, 20).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((p.probs()[0] - e1).abs() < 1e-12);
        assert!((p.probs()[1] - e1).abs() < 1e-12);

        let (m, v) = single_shot_posterior(5.0, 40).unwrap().moments();
        assert!((m - 5.0).abs() < 1e-6 && (v - 5.0).abs() < 1e-6);
        let total: f64 = single_shot_posterior(9.0, 40).unwrap().probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            single_shot_posterior(5.0, 8),
            Err(Error::Truncation { .. })
        ));
        assert!(single_shot_posterior(-1.0, 8).is_err());
    }
}
