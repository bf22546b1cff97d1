use std::f64::consts::TAU;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use super::{DetectorModel, GaussianSourceSpec, PhaseMode, QuadratureBatch, SourceKind, ZBatch};
use crate::error::{invalid, Result};
use crate::rng::seeded;
use crate::states::PhotonDistribution;

/// Draws `count` outcomes of `Z` for a state with photon statistics `dist`.
///
/// Two stages per sample: a latent photon number `n ~ dist`, then
/// `z ~ Gamma(n + 1, 1)`, the outcome law of a Fock state `|n⟩`.
pub fn sample_z(dist: &PhotonDistribution, count: usize, seed: u64) -> Result<ZBatch> {
    if count == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    let latent =
        WeightedIndex::new(dist.probs()).map_err(|e| invalid(format!("bad distribution: {e}")))?;
    let gammas: Vec<Gamma<f64>> = (0..=dist.n_max())
        .map(|n| Gamma::new((n + 1) as f64, 1.0).expect("shape >= 1"))
        .collect();
    let mut rng = seeded(seed);
    let values = (0..count)
        .map(|_| {
            let n = latent.sample(&mut rng);
            gammas[n].sample(&mut rng)
        })
        .collect();
    ZBatch::new(values, format!("sample_z(seed={seed})"))
}

/// Simulates conjugate homodyne outcomes for a Gaussian source.
///
/// Detector loss is applied at the input port, so the detected state is the
/// same kind of source with mean photon number `η·n̄`. Detector noise is
/// zero-mean Gaussian, added independently to each quadrature after loss.
/// For coherent sources the per-pulse relative phase `δ` is recorded.
pub fn sample_quadratures(
    spec: &GaussianSourceSpec,
    det: &DetectorModel,
    count: usize,
    seed: u64,
) -> Result<QuadratureBatch> {
    if count == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    let spec = GaussianSourceSpec::new(spec.kind, spec.mean_photons, spec.phase_mode)?;
    let det = DetectorModel::new(det.eta, det.sigma2_x, det.sigma2_p)?;
    let detected = det.eta * spec.mean_photons;
    let mut rng = seeded(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    let tag = format!("{} eta={} seed={seed}", spec.tag(), det.eta);
    match spec.kind {
        SourceKind::Coherent => {
            let amplitude = detected.sqrt();
            let (sx, sp) = ((0.5 + det.sigma2_x).sqrt(), (0.5 + det.sigma2_p).sqrt());
            let mut samples = Vec::with_capacity(count);
            let mut phases = Vec::with_capacity(count);
            for _ in 0..count {
                let delta = match spec.phase_mode {
                    PhaseMode::RandomUniform => rng.random::<f64>() * TAU,
                    PhaseMode::Fixed(d) => d,
                };
                let x: f64 = std_normal.sample(&mut rng);
                let p: f64 = std_normal.sample(&mut rng);
                samples.push((
                    amplitude * delta.cos() + sx * x,
                    amplitude * delta.sin() + sp * p,
                ));
                phases.push(delta);
            }
            QuadratureBatch::new(samples, Some(phases), false, tag)
        }
        SourceKind::Thermal => {
            let base = (detected + 1.0) / 2.0;
            let (sx, sp) = ((base + det.sigma2_x).sqrt(), (base + det.sigma2_p).sqrt());
            let samples = (0..count)
                .map(|_| {
                    let x: f64 = std_normal.sample(&mut rng);
                    let p: f64 = std_normal.sample(&mut rng);
                    (sx * x, sp * p)
                })
                .collect();
            QuadratureBatch::new(samples, None, false, tag)
        }
    }
}

/// `z = x3² + p4²` for every pulse.
pub fn to_z(batch: &QuadratureBatch) -> ZBatch {
    let values = batch
        .samples()
        .iter()
        .map(|&(x, p)| x * x + p * p)
        .collect();
    ZBatch::new(values, batch.source_tag())
        .expect("squares of finite values are finite and nonnegative")
}
