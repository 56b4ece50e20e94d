use std::sync::Arc;

use super::{Environment, Model, MomentFunctions, RadiusDistribution};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;

/// Cap on `phi^{-1}`; radii past this are never needed inside a window.
const PHI_INV_CAP: u64 = 1 << 40;
const PHI_TABLE: usize = 256;

/// `phi(n) = (2 / c) ln |B_G(n)|` with its integer generalised inverse
/// `phi^{-1}(y) = max{n : phi(n) <= y}`.
#[derive(Debug, Clone)]
pub struct Phi {
    spec: GraphSpec,
    decay_rate: f64,
    inverse_table: Arc<Vec<u64>>,
}

impl Phi {
    pub fn new(spec: &GraphSpec, decay_rate: f64) -> Result<Self> {
        if !(decay_rate > 0.0 && decay_rate.is_finite()) {
            return Err(Error::Precondition(format!(
                "decay rate must be positive, got {decay_rate}"
            )));
        }
        let mut phi = Self {
            spec: spec.clone(),
            decay_rate,
            inverse_table: Arc::new(Vec::new()),
        };
        let table = (0..PHI_TABLE).map(|y| phi.search_inverse(y as f64)).collect();
        phi.inverse_table = Arc::new(table);
        Ok(phi)
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// `alpha = c / 2`.
    pub fn alpha(&self) -> f64 {
        self.decay_rate / 2.0
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.spec.ball_count(n) as f64).ln() / self.alpha()
    }

    fn search_inverse(&self, y: f64) -> u64 {
        if y < 0.0 {
            return 0;
        }
        let mut hi = 1u64;
        while self.eval(hi) <= y {
            if hi >= PHI_INV_CAP {
                return PHI_INV_CAP;
            }
            hi *= 2;
        }
        let mut lo = hi / 2; // phi(lo) <= y (phi(0) = 0)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn inverse(&self, y: f64) -> u64 {
        if y >= 0.0 && y.fract() == 0.0 && (y as usize) < self.inverse_table.len() {
            return self.inverse_table[y as usize];
        }
        if y >= self.inverse_table.len() as f64 && self.inverse_table.last() == Some(&PHI_INV_CAP) {
            return PHI_INV_CAP;
        }
        self.search_inverse(y)
    }

    pub fn inverse_int(&self, y: u64) -> u64 {
        self.inverse(y as f64)
    }

    /// Smallest integer `y` with `phi^{-1}(y) >= n`, i.e. `ceil(phi(n))`.
    pub fn min_level_for_radius(&self, n: u64) -> u64 {
        let v = self.eval(n);
        let mut y = v.ceil().max(0.0) as u64;
        // guard against rounding at integer values
        while y > 0 && self.inverse_int(y - 1) >= n {
            y -= 1;
        }
        while self.inverse_int(y) < n {
            y += 1;
        }
        y
    }

    /// `L = min{l >= 1 : P(phi(X) <= l) > 0}`.
    pub fn level_floor(&self, dist: &RadiusDistribution) -> u64 {
        self.min_level_for_radius(dist.min_support()).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// Deterministic cones around the axis, evaluated through their layered
/// radius profile.
#[derive(Debug, Clone)]
pub enum ConeSpec {
    /// Layers `B_G(g(2|h|)) x {h}` for `|h| >= n0` on one side of the origin.
    Overlap {
        direction: Direction,
        n0: u64,
        moments: Arc<MomentFunctions>,
    },
    /// `W^+_k`: layers `B_G(phi^{-1}(h - tip + L + 1)) x {h}` for `h >= tip`,
    /// `tip = Z(k) + l0`; `W^-_k` mirrored with `tip = Z(k) - l0`.
    Stack {
        direction: Direction,
        tip: i64,
        level_floor: u64,
        phi: Phi,
    },
}

impl ConeSpec {
    pub fn overlap(direction: Direction, n0: u64, moments: Arc<MomentFunctions>) -> Self {
        ConeSpec::Overlap {
            direction,
            n0,
            moments,
        }
    }

    /// Cone `W^±_k` for the stack environment `env`.
    pub fn stack(
        direction: Direction,
        env: &Environment,
        k: i64,
        l0: u64,
        level_floor: u64,
        phi: &Phi,
    ) -> Result<Self> {
        let z = env.stack_center(k).ok_or_else(|| {
            Error::Precondition(format!("index {k} outside the environment range"))
        })?;
        Ok(Self::stack_at(direction, z, l0, level_floor, phi))
    }

    pub fn stack_at(direction: Direction, center: i64, l0: u64, level_floor: u64, phi: &Phi) -> Self {
        let tip = match direction {
            Direction::Up => center + l0 as i64,
            Direction::Down => center - l0 as i64,
        };
        ConeSpec::Stack {
            direction,
            tip,
            level_floor,
            phi: phi.clone(),
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            ConeSpec::Overlap { direction, .. } | ConeSpec::Stack { direction, .. } => *direction,
        }
    }

    /// Base radius of the cone at height `h`, or `None` if the layer is empty.
    pub fn radius_at(&self, h: i64) -> Option<u64> {
        match self {
            ConeSpec::Overlap {
                direction,
                n0,
                moments,
            } => {
                let inside = match direction {
                    Direction::Up => h >= *n0 as i64,
                    Direction::Down => h <= -(*n0 as i64),
                };
                inside.then(|| moments.g(2 * h.unsigned_abs()))
            }
            ConeSpec::Stack {
                direction,
                tip,
                level_floor,
                phi,
            } => {
                let depth = match direction {
                    Direction::Up => h - tip,
                    Direction::Down => tip - h,
                };
                (depth >= 0).then(|| phi.inverse_int(depth as u64 + level_floor + 1))
            }
        }
    }

    #[inline]
    pub fn contains_at(&self, dist: u64, h: i64) -> bool {
        self.radius_at(h).is_some_and(|r| dist <= r)
    }
}

/// Checks the three conditions of a good overlap environment on the sampled
/// index range: `X_n <= g(n)` and `X_{-n} <= g(n)` for `n >= 2 n0`, and
/// `X_n <= g(2 n0)` for `|n| < 2 n0`.
pub fn classify_good_environment(
    env: &Environment,
    moments: &MomentFunctions,
    n0: u64,
) -> Result<bool> {
    if env.model() != Model::Overlap {
        return Err(Error::Precondition("good environments are defined for the overlap model".into()));
    }
    let range = env.half_range();
    if let Some(n) = (n0.max(1)..=range.max(n0)).find(|&n| 2 * moments.g(n) >= n) {
        return Err(Error::Precondition(format!(
            "g({n}) = {} is not below n/2; n0 = {n0} is too small",
            moments.g(n)
        )));
    }
    let central = moments.g(2 * n0);
    Ok(env.iter().all(|(n, x)| {
        let m = n.unsigned_abs();
        if m >= 2 * n0 {
            x <= moments.g(m)
        } else {
            x <= central
        }
    }))
}

/// Whether `P(m <= X <= 2m) > 0`.
pub fn in_stack_support(dist: &RadiusDistribution, m: u64) -> bool {
    m >= 1 && dist.prob_between(m, 2 * m) > 0.0
}

/// The event `A_k`: `l0 <= X_k <= 2 l0` and `X_{k +- j} <= phi^{-1}(j + L)`
/// for every `j >= 1` with `k +- j` in the sampled range.
pub fn stack_event_ak(
    env: &Environment,
    phi: &Phi,
    k: i64,
    l0: u64,
    level_floor: u64,
) -> Result<bool> {
    if env.model() != Model::Stack {
        return Err(Error::Precondition("A_k is defined for the stack model".into()));
    }
    if !in_stack_support(env.distribution(), l0) {
        return Err(Error::Precondition(format!(
            "l0 = {l0} has P(l0 <= X <= 2 l0) = 0"
        )));
    }
    let Some(xk) = env.radius(k) else {
        return Err(Error::Precondition(format!("index {k} outside the environment range")));
    };
    if xk < l0 || xk > 2 * l0 {
        return Ok(false);
    }
    let n = env.half_range() as i64;
    let reach = (n - k).max(n + k);
    let largest = env.max_radius();
    for j in 1..=reach {
        let bound = phi.inverse_int(j as u64 + level_floor);
        if bound >= largest {
            break;
        }
        for i in [k + j, k - j] {
            if let Some(x) = env.radius(i) {
                if x > bound {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The index set `{k >= 1 : A_k}` restricted to the sampled range.
pub fn stack_index_set(env: &Environment, phi: &Phi, l0: u64, level_floor: u64) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for k in 1..=env.half_range() as i64 {
        if stack_event_ak(env, phi, k, l0, level_floor)? {
            out.push(k);
        }
    }
    Ok(out)
}


#[cfg(test)]
mod event_tests {
    use super::*;

    fn overlap(radii: Vec<u64>) -> Environment {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        Environment::from_radii(Model::Overlap, &d, 0, radii).unwrap()
    }

    #[test]
    fn unit_radii_are_good() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let mf = MomentFunctions::with_domain(&d, 1 << 14).unwrap();
        let n0 = (1..200).find(|&n0| (n0..4000).all(|n| 2 * mf.g(n) < n)).unwrap();
        assert!(mf.g(n0) >= 1);
        let env = overlap(vec![1; 101]);
        assert!(classify_good_environment(&env, &mf, n0).unwrap());
        let mut radii = vec![1; 101];
        let idx = 50 + 2 * n0 as usize;
        radii[idx] = mf.g(2 * n0) + 1;
        assert!(!classify_good_environment(&overlap(radii), &mf, n0).unwrap());
    }

    #[test]
    fn small_n0_violates_precondition() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let mf = MomentFunctions::with_domain(&d, 1 << 14).unwrap();
        assert!(classify_good_environment(&overlap(vec![1; 41]), &mf, 1).is_err());
    }

    #[test]
    fn constant_stack_event() {
        let d = RadiusDistribution::constant(2).unwrap();
        let env = Environment::sample(Model::Stack, &d, 12, 3);
        let phi = Phi::new(&GraphSpec::lattice(1).unwrap(), 1.0).unwrap();
        let big_l = phi.level_floor(&d);
        // phi^{-1}(1 + L) >= 2 = c, so every A_k holds
        assert!(phi.inverse_int(1 + big_l) >= 2);
        for k in -12..=12 {
            assert!(stack_event_ak(&env, &phi, k, 2, big_l).unwrap());
        }
        assert!(stack_event_ak(&env, &phi, 0, 3, big_l).is_err());
    }

    #[test]
    fn stack_event_rejects_large_center() {
        let d = RadiusDistribution::geometric(0.5).unwrap();
        let env = Environment::from_radii(Model::Stack, &d, 0, vec![1, 1, 3, 1, 1]).unwrap();
        let phi = Phi::new(&GraphSpec::lattice(1).unwrap(), 1.0).unwrap();
        assert!(!stack_event_ak(&env, &phi, 0, 1, 3).unwrap());
        assert!(stack_event_ak(&env, &phi, 0, 2, 3).unwrap());
    }
}
