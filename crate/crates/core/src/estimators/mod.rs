//! Monte Carlo estimators. Replica `j` of environment `i` always uses the
//! streams derived from `(master_seed, i, j)`, and every aggregate is an
//! integer count or an ordered sum, so results do not depend on the number
//! of worker threads.

mod annealed;
mod coverage;
mod crossing;
mod decay;
mod pc;
mod stack;
mod theta;

pub use annealed::{annealed_average, AnnealedEstimate};
pub use coverage::estimate_coverage;
pub use crossing::{estimate_crossing, CrossingCounts};
pub use decay::{fit_decay_rate, DecayFit, MIN_SUCCESSES};
pub use pc::{scan_pc_curve, PcPoint, PcScan, QChoice, MAX_DOUBLINGS, PC_RESOLUTION};
pub use stack::{kaplan_meier, t_plus_survival, SurvivalCurve, TPlusSetup};
pub use theta::{estimate_theta, estimate_theta_annealed, theta_nested};

use serde::Serialize;

use crate::environment::{Environment, Model, RadiusDistribution, Region};
use crate::error::Result;
use crate::graph::{GraphSpec, Window};
use crate::numeric::binomial_half_width;

/// A point estimate with its 95% half width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub point: f64,
    pub half_width: f64,
    pub replicas: u64,
    /// Fraction of replicas whose outcome was cut off by the window.
    pub censored_fraction: f64,
}

impl EstimateResult {
    /// Binomial proportion `successes / replicas`.
    pub fn proportion(successes: u64, replicas: u64, censored: u64) -> Self {
        let n = replicas.max(1) as f64;
        let p = successes as f64 / n;
        Self {
            point: p,
            half_width: binomial_half_width(p, replicas.max(1)),
            replicas,
            censored_fraction: censored as f64 / n,
        }
    }

    /// Sample mean of real-valued observations, with a normal-theory half
    /// width.
    pub fn mean_of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            point: mean,
            half_width: 1.96 * (var / n).sqrt(),
            replicas: values.len() as u64,
            censored_fraction: 0.0,
        }
    }

    pub fn std_error(&self) -> f64 {
        self.half_width / 1.96
    }
}

/// How the reinforced region of a replica is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionModel {
    /// No reinforced edges.
    Empty,
    /// A fresh environment per environment seed.
    Random {
        model: Model,
        dist: RadiusDistribution,
    },
}

impl RegionModel {
    pub fn random(model: Model, dist: RadiusDistribution) -> Self {
        RegionModel::Random { model, dist }
    }

    /// Environment for `env_seed` covering `window`, if the model has one.
    pub fn environment(&self, window: Window, env_seed: u64) -> Option<Environment> {
        match self {
            RegionModel::Empty => None,
            RegionModel::Random { model, dist } => {
                Some(Environment::sample_for_window(*model, dist, window, env_seed))
            }
        }
    }

    pub fn region(&self, spec: &GraphSpec, window: Window, env_seed: u64) -> Result<Region> {
        match self.environment(window, env_seed) {
            None => Ok(Region::empty(spec, window)),
            Some(env) => Region::build(&env, spec, window),
        }
    }
}
