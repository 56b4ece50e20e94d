//! Random environments: radius sequences, reinforced regions, cones and the
//! moment functions that control cone growth.

mod cones;
mod distribution;
mod moments;
mod region;
mod table;

pub use cones::{
    classify_good_environment, in_stack_support, stack_event_ak, stack_index_set, ConeSpec,
    Direction, Phi,
};
pub use distribution::{RadiusDistribution, RadiusLaw, DEFAULT_POWER_CAP, MAX_POWER_CAP};
pub use moments::MomentFunctions;
pub use region::{AxisBox, Region};
pub use table::{parse_environment_table, write_environment_table};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Window;
use crate::rng::{hash_words, unit_f64, TAG_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// A box `B(n, X_n)` at every height `n`.
    Overlap,
    /// Boxes `B(Z(n), X_n)` stacked so that consecutive boxes touch.
    Stack,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Overlap => "overlap",
            Model::Stack => "stack",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlap" => Ok(Model::Overlap),
            "stack" => Ok(Model::Stack),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// Expected number of ignored boxes tolerated when truncating unbounded laws.
pub const HORIZON_EPS: f64 = 1e-9;

/// Radius of index `n` in the environment with seed `env_seed`.
pub fn radius_at(dist: &RadiusDistribution, env_seed: u64, n: i64) -> u64 {
    dist.sample(unit_f64(hash_words(&[env_seed, TAG_RADIUS, n as u64])))
}

/// One realisation of the radii `{X_n : |n| <= N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    model: Model,
    dist: RadiusDistribution,
    env_seed: u64,
    half_range: u64,
    radii: Vec<u64>,
}

impl Environment {
    /// I.i.d. radii for `n` in `[-half_range, half_range]`. Each radius is a
    /// pure function of `(env_seed, n)`, so ranges are nested consistently.
    pub fn sample(model: Model, dist: &RadiusDistribution, half_range: u64, env_seed: u64) -> Self {
        let n = half_range as i64;
        let radii = (-n..=n).map(|i| radius_at(dist, env_seed, i)).collect();
        Self {
            model,
            dist: dist.clone(),
            env_seed,
            half_range,
            radii,
        }
    }

    /// Sample just enough indices for `build_region` on `window`.
    pub fn sample_for_window(
        model: Model,
        dist: &RadiusDistribution,
        window: Window,
        env_seed: u64,
    ) -> Self {
        let half_range = match model {
            Model::Overlap => window.height + dist.coverage_horizon(HORIZON_EPS),
            Model::Stack => {
                // smallest N with Z(N) + X_N > H and Z(-N) - X_{-N} < -H
                let h = window.height as i64;
                let side = |sign: i64| {
                    let mut top = radius_at(dist, env_seed, 0) as i64;
                    let mut n = 0i64;
                    while top <= h {
                        n += 1;
                        top += 2 * radius_at(dist, env_seed, sign * n) as i64;
                    }
                    n as u64
                };
                side(1).max(side(-1))
            }
        };
        Self::sample(model, dist, half_range, env_seed)
    }

    pub fn from_radii(
        model: Model,
        dist: &RadiusDistribution,
        env_seed: u64,
        radii: Vec<u64>,
    ) -> Result<Self> {
        if radii.len().is_multiple_of(2) {
            return Err(Error::Precondition(
                "radius table must cover [-N, N] (odd length)".into(),
            ));
        }
        if radii.contains(&0) {
            return Err(Error::Precondition("radii must be >= 1".into()));
        }
        let half_range = (radii.len() / 2) as u64;
        Ok(Self {
            model,
            dist: dist.clone(),
            env_seed,
            half_range,
            radii,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn distribution(&self) -> &RadiusDistribution {
        &self.dist
    }

    pub fn env_seed(&self) -> u64 {
        self.env_seed
    }

    pub fn half_range(&self) -> u64 {
        self.half_range
    }

    pub fn radius(&self, n: i64) -> Option<u64> {
        if n.unsigned_abs() > self.half_range {
            return None;
        }
        Some(self.radii[(n + self.half_range as i64) as usize])
    }

    /// `(n, X_n)` in increasing `n`.
    pub fn max_radius(&self) -> u64 {
        self.radii.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let n = self.half_range as i64;
        (-n..=n).zip(self.radii.iter().copied())
    }

    /// Same environment with `X_n` and `X_{-n}` exchanged.
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.radii.reverse();
        out
    }

    /// Stack centre `Z(n) = X_0 + 2 sum_{i=1}^{n-1} X_i + X_n` (mirrored for
    /// `n < 0`), for `|n| <= N`.
    pub fn stack_center(&self, n: i64) -> Option<i64> {
        if n.unsigned_abs() > self.half_range {
            return None;
        }
        let x = |i: i64| self.radius(i).expect("in range") as i64;
        let sign = n.signum();
        let mut z = 0i64;
        for i in 1..=n.abs() {
            z += sign * (x(sign * (i - 1)) + x(sign * i));
        }
        Some(z)
    }

    /// All stack centres for `n` in `[-N, N]`.
    pub fn stack_centers(&self) -> Vec<i64> {
        let n = self.half_range as usize;
        let mut z = vec![0i64; 2 * n + 1];
        for i in 1..=n {
            z[n + i] = z[n + i - 1] + (self.radii[n + i - 1] + self.radii[n + i]) as i64;
            z[n - i] = z[n - i + 1] - (self.radii[n - i + 1] + self.radii[n - i]) as i64;
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(model: Model, radii: &[u64]) -> Environment {
        let d = RadiusDistribution::constant(1).unwrap();
        Environment::from_radii(model, &d, 0, radii.to_vec()).unwrap()
    }

    #[test]
    fn constant_radii() {
        let d = RadiusDistribution::constant(3).unwrap();
        let e = Environment::sample(Model::Overlap, &d, 50, 17);
        assert!(e.iter().all(|(_, x)| x == 3));
    }

    #[test]
    fn radii_are_reproducible_and_nested() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let a = Environment::sample(Model::Overlap, &d, 10, 5);
        let b = Environment::sample(Model::Overlap, &d, 20, 5);
        for n in -10..=10 {
            assert_eq!(a.radius(n), b.radius(n));
        }
        assert_ne!(a, Environment::sample(Model::Overlap, &d, 10, 6));
    }

    #[test]
    fn stack_centers_follow_recursion() {
        // X_{-1}=1, X_0=2, X_1=1
        let e = env(Model::Stack, &[1, 2, 1]);
        assert_eq!(e.stack_center(1), Some(3));
        assert_eq!(e.stack_center(-1), Some(-3));
        let e = env(Model::Stack, &[1, 1, 1, 1, 1]);
        assert_eq!(e.stack_center(2), Some(4));
        assert_eq!(e.stack_centers(), vec![-4, -2, 0, 2, 4]);
    }

    #[test]
    fn stack_sampling_reaches_past_window() {
        let d = RadiusDistribution::geometric(0.4).unwrap();
        let w = Window::new(3, 40);
        for seed in 0..20 {
            let e = Environment::sample_for_window(Model::Stack, &d, w, seed);
            let z = e.stack_centers();
            let n = e.half_range() as usize;
            assert!(z[2 * n] + e.radii[2 * n] as i64 > 40);
            assert!(z[0] - (e.radii[0] as i64) < -40);
        }
    }
}
