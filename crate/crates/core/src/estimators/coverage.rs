use rayon::prelude::*;

use super::EstimateResult;
use crate::environment::{Environment, Model, RadiusDistribution, Region};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};
use crate::rng::env_seed;

/// Mean fraction of window vertices covered by `R` over independent
/// environments `env_seed(master_seed, i)`.
pub fn estimate_coverage(
    dist: &RadiusDistribution,
    model: Model,
    spec: &GraphSpec,
    window: Window,
    env_replicas: u64,
    master_seed: u64,
) -> Result<EstimateResult> {
    if env_replicas == 0 {
        return Err(Error::Config("env_replicas must be at least 1".into()));
    }
    let graph = WindowGraph::new(spec, window)?;
    let values: Vec<f64> = (0..env_replicas)
        .into_par_iter()
        .map(|i| {
            let env = Environment::sample_for_window(model, dist, window, env_seed(master_seed, i));
            Ok(Region::build(&env, spec, window)?.coverage(&graph))
        })
        .collect::<Result<_>>()?;
    Ok(EstimateResult::mean_of(&values))
}
