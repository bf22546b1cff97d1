use crate::error::{invalid, Result};
use crate::math::{ln_factorials, logsumexp, n_ln_z};
use crate::states::PhotonDistribution;

/// `ln P_Z(z)` with `P_Z(z) = e^{−z} Σ_n p(n) zⁿ/n!`, summed in log space.
pub fn ln_pz_density(dist: &PhotonDistribution, z: f64) -> Result<f64> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(invalid(format!("z must be finite and >= 0, got {z}")));
    }
    let ln_fact = ln_factorials(dist.n_max());
    let ln_z = z.ln();
    let terms: Vec<f64> = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(n, &p)| p.ln() + n_ln_z(n, ln_z) - ln_fact[n] - z)
        .collect();
    Ok(logsumexp(&terms))
}

/// Density of the `Z` outcome for photon statistics `dist`.
pub fn pz_density(dist: &PhotonDistribution, z: f64) -> Result<f64> {
    ln_pz_density(dist, z).map(f64::exp)
}

/// Density of the radius `r = √z`: `2 e^{−r²} Σ_n p(n) r^{2n+1}/n!`.
pub fn pr_density(dist: &PhotonDistribution, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid(format!("r must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let ln_fact = ln_factorials(dist.n_max());
    let ln_r = r.ln();
    let terms: Vec<f64> = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(n, &p)| {
            std::f64::consts::LN_2 + p.ln() + (2 * n + 1) as f64 * ln_r - ln_fact[n] - r * r
        })
        .collect();
    Ok(logsumexp(&terms).exp())
}
