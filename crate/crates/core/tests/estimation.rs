use photonz::stats::bootstrap_standard_error;
use photonz::{
    em_reconstruct, loglikelihood, moment_estimates, sample_z, single_shot_posterior, EMConfig,
    PhotonDistribution, ZBatch,
};
use proptest::prelude::*;

fn l1(a: &PhotonDistribution, b: &PhotonDistribution) -> f64 {
    a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn em_loglikelihood_never_decreases(
        weights in prop::collection::vec(0.0f64..1.0, 1..10),
        prior in prop::collection::vec(0.05f64..1.0, 4..16),
        seed in any::<u64>(),
    ) {
        prop_assume!(weights.iter().sum::<f64>() > 0.0);
        let truth = PhotonDistribution::from_weights(weights).unwrap();
        let batch = sample_z(&truth, 400, seed).unwrap();
        let mut config = EMConfig::with_prior(PhotonDistribution::from_weights(prior).unwrap()).unwrap();
        config.max_iterations = 60;
        config.convergence_tol = 1e-12;
        let result = em_reconstruct(&batch, &config).unwrap();
        for w in result.loglik_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10, "{} -> {}", w[0], w[1]);
        }
        let last = *result.loglik_trace.last().unwrap();
        let direct = loglikelihood(&batch, &result.distribution).unwrap();
        prop_assert!((last - direct).abs() <= 1e-9, "{} vs {}", last, direct);
    }

    #[test]
    fn posterior_is_normalized(z in 0.0f64..30.0) {
        let post = single_shot_posterior(z, 80).unwrap();
        prop_assert!((post.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn em_result_is_a_fixed_point() {
    let truth = PhotonDistribution::coherent(5.0, 40).unwrap();
    let batch = sample_z(&truth, 10_000, 11).unwrap();
    for tol in [1e-5, 1e-7] {
        let config = EMConfig {
            convergence_tol: tol,
            ..EMConfig::uniform(20)
        };
        let first = em_reconstruct(&batch, &config).unwrap();
        assert!(first.converged);
        let mut again = EMConfig::with_prior(first.distribution.clone()).unwrap();
        again.convergence_tol = tol;
        let second = em_reconstruct(&batch, &again).unwrap();
        let gain = second.loglik_trace.last().unwrap() - second.loglik_trace[0];
        assert!(
            second.iterations == 1,
            "tol {tol}: {} further iterations",
            second.iterations
        );
        assert!(gain < tol, "tol {tol}: gain {gain}");
        let change = l1(&first.distribution, &second.distribution);
        assert!(
            change <= 100.0 * tol.sqrt(),
            "tol {tol}: L1 change {change}"
        );
    }
}

#[test]
fn em_mean_agrees_with_moment_estimate() {
    let cases = [
        PhotonDistribution::coherent(5.0, 40).unwrap(),
        PhotonDistribution::thermal(3.0, 120).unwrap(),
        PhotonDistribution::fock(2, 6).unwrap(),
    ];
    for (i, truth) in cases.iter().enumerate() {
        let batch = sample_z(truth, 10_000, 100 + i as u64).unwrap();
        let moments = moment_estimates(&batch).unwrap();
        let config = EMConfig::uniform(EMConfig::heuristic_n_max(&batch));
        let em = em_reconstruct(&batch, &config).unwrap();
        let se = bootstrap_standard_error(
            batch.values(),
            |z| z.iter().sum::<f64>() / z.len() as f64,
            200,
            7,
        );
        let gap = (em.distribution.mean() - moments.mean_n).abs();
        assert!(
            gap <= 3.0 * se,
            "case {i}: EM mean {} vs moment {} (se {se})",
            em.distribution.mean(),
            moments.mean_n
        );
    }
}

#[test]
fn moment_estimator_error_halves_when_samples_quadruple() {
    const SEEDS: u64 = 200;
    for mu in [1.0, 5.0, 10.0] {
        let truth = PhotonDistribution::coherent(mu, 60).unwrap();
        let rms = |m: usize| {
            let sq: f64 = (0..SEEDS)
                .map(|s| {
                    let batch = sample_z(&truth, m, 1_000 * m as u64 + s).unwrap();
                    (moment_estimates(&batch).unwrap().mean_n - mu).powi(2)
                })
                .sum();
            (sq / SEEDS as f64).sqrt()
        };
        let (small, large) = (rms(1_000), rms(4_000));
        // Var z = Var n + ⟨n⟩ + 1 = 2μ + 1 for coherent light.
        let predicted = |m: usize| ((2.0 * mu + 1.0) / m as f64).sqrt();
        assert!(
            (0.8..1.2).contains(&(small / predicted(1_000))),
            "mu {mu}: rms {small}"
        );
        assert!(
            (0.8..1.2).contains(&(large / predicted(4_000))),
            "mu {mu}: rms {large}"
        );
        assert!(
            (0.35..0.65).contains(&(large / small)),
            "mu {mu}: ratio {}",
            large / small
        );
    }
}

#[test]
fn all_zero_batch_collapses_to_vacuum() {
    let batch = ZBatch::new(vec![0.0; 50], "zeros").unwrap();
    let result = em_reconstruct(&batch, &EMConfig::uniform(8)).unwrap();
    assert!(result.distribution.probs()[0] > 1.0 - 1e-9);
}
