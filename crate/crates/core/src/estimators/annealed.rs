use rayon::prelude::*;
use serde::Serialize;

use super::EstimateResult;
use crate::error::{Error, Result};
use crate::numeric::binomial_half_width;

#[derive(Debug, Clone, Serialize)]
pub struct AnnealedEstimate {
    /// Grand mean over environments, weighted by replica count.
    pub estimate: EstimateResult,
    /// Replica-weighted spread of the per-environment means.
    pub between_variance: f64,
    /// Replica-weighted mean of the per-environment Bernoulli variances.
    pub within_variance: f64,
    pub per_environment: Vec<EstimateResult>,
}

/// Averages a quenched estimator over environments. `estimator` is called
/// once per seed; results are combined in seed order.
pub fn annealed_average<F>(env_seeds: &[u64], estimator: F) -> Result<AnnealedEstimate>
where
    F: Fn(u64) -> Result<EstimateResult> + Sync,
{
    if env_seeds.len() < 2 {
        return Err(Error::Precondition(
            "annealed averages need at least two environments".into(),
        ));
    }
    let per_environment: Vec<EstimateResult> = env_seeds
        .par_iter()
        .map(|&s| estimator(s))
        .collect::<Result<_>>()?;
    Ok(combine(per_environment))
}

fn combine(per_environment: Vec<EstimateResult>) -> AnnealedEstimate {
    let k = per_environment.len() as f64;
    let total: u64 = per_environment.iter().map(|e| e.replicas).sum();
    let weight = |e: &EstimateResult| {
        if total == 0 {
            1.0 / k
        } else {
            e.replicas as f64 / total as f64
        }
    };
    // centred on the first estimate so identical environments reproduce it exactly
    let base = per_environment[0].point;
    let mean: f64 = base
        + per_environment
            .iter()
            .map(|e| weight(e) * (e.point - base))
            .sum::<f64>();
    let censored: f64 = per_environment
        .iter()
        .map(|e| weight(e) * e.censored_fraction)
        .sum();
    let between: f64 = per_environment
        .iter()
        .map(|e| weight(e) * (e.point - mean).powi(2))
        .sum();
    let within: f64 = per_environment
        .iter()
        .map(|e| weight(e) * e.point * (1.0 - e.point))
        .sum();
    let sample_var = per_environment
        .iter()
        .map(|e| (e.point - mean).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    let half_width = (1.96 * (sample_var / k).sqrt()).max(binomial_half_width(mean, total.max(1)));
    AnnealedEstimate {
        estimate: EstimateResult {
            point: mean,
            half_width,
            replicas: total,
            censored_fraction: censored,
        },
        between_variance: between,
        within_variance: within,
        per_environment,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_average() {
        let a = annealed_average(&[0, 1], |s| {
            Ok(EstimateResult::proportion(if s == 0 { 30 } else { 70 }, 100, 0))
        })
        .unwrap();
        assert!((a.estimate.point - 0.5).abs() < 1e-15);
        assert!((a.between_variance - 0.04).abs() < 1e-15);
        assert!((a.within_variance - 0.21).abs() < 1e-15);
    }

    #[test]
    fn identical_environments_match_quenched() {
        let q = EstimateResult::proportion(42, 100, 0);
        let a = annealed_average(&[5, 6, 7], |_| Ok(q)).unwrap();
        assert_eq!(a.estimate.point, q.point);
        assert_eq!(a.between_variance, 0.0);
    }

    #[test]
    fn needs_two_environments() {
        assert!(annealed_average(&[1], |_| Ok(EstimateResult::proportion(1, 2, 0))).is_err());
    }
}
