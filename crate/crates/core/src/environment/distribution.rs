use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Law of the radii `X_n`, supported on `{1, 2, ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusLaw {
    Constant { radius: u64 },
    /// `P(X = k) = theta (1 - theta)^(k - 1)`.
    Geometric { theta: f64 },
    /// `P(X = k) ∝ k^(-exponent)` for `k <= cap`.
    PowerTail { exponent: f64, cap: u64 },
}

pub const DEFAULT_POWER_CAP: u64 = 1_000_000;
/// Largest accepted cap; the sampling tables take 24 bytes per support point.
pub const MAX_POWER_CAP: u64 = 10_000_000;

impl fmt::Display for RadiusLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusLaw::Constant { radius } => write!(f, "constant radius={radius}"),
            RadiusLaw::Geometric { theta } => write!(f, "geometric theta={theta}"),
            RadiusLaw::PowerTail { exponent, cap } => {
                write!(f, "power_tail exponent={exponent} cap={cap}")
            }
        }
    }
}

impl FromStr for RadiusLaw {
    type Err = Error;

    /// Parses the `Display` form, e.g. `geometric theta=0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidDistribution(msg);
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| bad("empty law".into()))?;
        let mut fields = std::collections::BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {p:?}")))?;
            if fields.insert(k, v).is_some() {
                return Err(bad(format!("duplicate field {k}")));
            }
        }
        let mut take = |name: &str| -> Result<&str> {
            fields
                .remove(name)
                .ok_or_else(|| bad(format!("{kind}: missing field {name}")))
        };
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| bad(format!("not a number: {v:?}")))
        };
        let int = |v: &str| -> Result<u64> {
            v.parse::<u64>()
                .map_err(|_| bad(format!("not an integer: {v:?}")))
        };
        let law = match kind {
            "constant" => RadiusLaw::Constant {
                radius: int(take("radius")?)?,
            },
            "geometric" => RadiusLaw::Geometric {
                theta: num(take("theta")?)?,
            },
            "power_tail" => RadiusLaw::PowerTail {
                exponent: num(take("exponent")?)?,
                cap: int(take("cap")?)?,
            },
            other => return Err(bad(format!("unknown law {other:?}"))),
        };
        if let Some(extra) = fields.keys().next() {
            return Err(bad(format!("{kind}: unknown field {extra}")));
        }
        Ok(law)
    }
}

/// Exact tail tables for the capped power law.
#[derive(Debug)]
struct PowerTable {
    /// `tail[k] = P(X >= k)` for `k = 0..=cap + 1`.
    tail: Vec<f64>,
    /// `moment[k] = E[X 1{X >= k}]` for `k = 0..=cap + 1`.
    moment: Vec<f64>,
}

impl PowerTable {
    fn new(exponent: f64, cap: u64) -> Self {
        let cap = cap as usize;
        let weights: Vec<f64> = (1..=cap).map(|k| (k as f64).powf(-exponent)).collect();
        let total = weights.iter().rev().copied().collect::<CompensatedSum>().value();
        let mut tail = vec![0.0; cap + 2];
        let mut moment = vec![0.0; cap + 2];
        let mut t = CompensatedSum::new();
        let mut m = CompensatedSum::new();
        for k in (1..=cap).rev() {
            let p = weights[k - 1] / total;
            t.add(p);
            m.add(k as f64 * p);
            tail[k] = t.value();
            moment[k] = m.value();
        }
        tail[0] = tail[1];
        moment[0] = moment[1];
        Self { tail, moment }
    }
}

/// A validated radius law with whatever tables it needs for exact sampling.
#[derive(Debug, Clone)]
pub struct RadiusDistribution {
    law: RadiusLaw,
    table: Option<Arc<PowerTable>>,
}

impl PartialEq for RadiusDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.law == other.law
    }
}

impl RadiusDistribution {
    pub fn new(law: RadiusLaw) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        let table = match law {
            RadiusLaw::Constant { radius } => {
                if radius == 0 {
                    return bad("constant radius must be >= 1".into());
                }
                None
            }
            RadiusLaw::Geometric { theta } => {
                if !(theta > 0.0 && theta < 1.0) {
                    return bad(format!("geometric theta must lie in (0, 1), got {theta}"));
                }
                None
            }
            RadiusLaw::PowerTail { exponent, cap } => {
                if !(exponent > 1.0 && exponent.is_finite()) {
                    return bad(format!("power tail exponent must be > 1, got {exponent}"));
                }
                if cap == 0 || cap > MAX_POWER_CAP {
                    return bad(format!("power tail cap must lie in 1..={MAX_POWER_CAP}, got {cap}"));
                }
                Some(Arc::new(PowerTable::new(exponent, cap)))
            }
        };
        Ok(Self { law, table })
    }

    pub fn constant(radius: u64) -> Result<Self> {
        Self::new(RadiusLaw::Constant { radius })
    }

    pub fn geometric(theta: f64) -> Result<Self> {
        Self::new(RadiusLaw::Geometric { theta })
    }

    pub fn power_tail(exponent: f64, cap: u64) -> Result<Self> {
        Self::new(RadiusLaw::PowerTail { exponent, cap })
    }

    pub fn law(&self) -> RadiusLaw {
        self.law
    }

    /// Whether the idealised (uncapped) law has a finite mean.
    pub fn mean_is_finite(&self) -> bool {
        match self.law {
            RadiusLaw::PowerTail { exponent, .. } => exponent > 2.0,
            _ => true,
        }
    }

    pub fn min_support(&self) -> u64 {
        match self.law {
            RadiusLaw::Constant { radius } => radius,
            _ => 1,
        }
    }

    pub fn max_support(&self) -> Option<u64> {
        match self.law {
            RadiusLaw::Constant { radius } => Some(radius),
            RadiusLaw::PowerTail { cap, .. } => Some(cap),
            RadiusLaw::Geometric { .. } => None,
        }
    }

    /// `P(X >= k)`.
    pub fn tail(&self, k: u64) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        match self.law {
            RadiusLaw::Constant { radius } => {
                if k <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            RadiusLaw::Geometric { theta } => ((k - 1) as f64 * (1.0 - theta).ln()).exp(),
            RadiusLaw::PowerTail { cap, .. } => {
                if k > cap {
                    0.0
                } else {
                    self.table.as_ref().expect("power table").tail[k as usize]
                }
            }
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.law {
            RadiusLaw::Geometric { theta } => theta * ((k - 1) as f64 * (1.0 - theta).ln()).exp(),
            _ => self.tail(k) - self.tail(k + 1),
        }
    }

    /// `P(lo <= X <= hi)`.
    pub fn prob_between(&self, lo: u64, hi: u64) -> f64 {
        if lo > hi {
            return 0.0;
        }
        match self.law {
            RadiusLaw::Constant { radius } => f64::from(u8::from(lo <= radius && radius <= hi)),
            _ => (self.tail(lo) - self.tail(hi.saturating_add(1))).max(0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        self.partial_moment(0)
    }

    /// `E[X 1{X >= a}]`.
    pub fn partial_moment(&self, a: u64) -> f64 {
        self.ln_partial_moment(a).exp()
    }

    /// `ln E[X 1{X >= a}]`, `-inf` beyond the support.
    pub fn ln_partial_moment(&self, a: u64) -> f64 {
        let a = a.max(1);
        match self.law {
            RadiusLaw::Constant { radius } => {
                if a <= radius {
                    (radius as f64).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            RadiusLaw::Geometric { theta } => {
                // sum_{x >= a} x theta (1-theta)^(x-1) = (1-theta)^(a-1) (a + (1-theta)/theta)
                (a - 1) as f64 * (1.0 - theta).ln() + (a as f64 + (1.0 - theta) / theta).ln()
            }
            RadiusLaw::PowerTail { cap, .. } => {
                if a > cap {
                    f64::NEG_INFINITY
                } else {
                    self.table.as_ref().expect("power table").moment[a as usize].ln()
                }
            }
        }
    }

    /// Inverse-tail transform: the largest `k` with `P(X >= k) > u`, for
    /// `u` in `[0, 1)`. Hence `sample(u) >= m` iff `u < tail(m)`.
    pub fn sample(&self, u: f64) -> u64 {
        match self.law {
            RadiusLaw::Constant { radius } => radius,
            RadiusLaw::Geometric { theta } => {
                if u <= 0.0 {
                    return u64::MAX / 4;
                }
                let t = u.ln() / (1.0 - theta).ln();
                let k = t.ceil();
                if k >= (u64::MAX / 4) as f64 {
                    u64::MAX / 4
                } else {
                    (k as u64).max(1)
                }
            }
            RadiusLaw::PowerTail { cap, .. } => {
                let tail = &self.table.as_ref().expect("power table").tail;
                // tail[1..=cap] is decreasing; count the prefix with tail > u
                let mut k = 1usize;
                while k < 16 && k < cap as usize {
                    if tail[k + 1] <= u {
                        return k as u64;
                    }
                    k += 1;
                }
                let slice = &tail[1..=cap as usize];
                slice.partition_point(|&t| t > u).max(1) as u64
            }
        }
    }

    /// Smallest `m` such that the expected number of radii `X_j` with
    /// `X_j >= j - m` over `j > m` stays below `eps` on each side; boxes
    /// further than `m` beyond a height range can then be ignored.
    pub fn coverage_horizon(&self, eps: f64) -> u64 {
        match self.law {
            RadiusLaw::Constant { radius } => radius,
            RadiusLaw::PowerTail { cap, .. } => cap,
            RadiusLaw::Geometric { theta } => {
                // sum_{j > m} (1-theta)^(j-1) = (1-theta)^m / theta
                let m = (eps * theta).ln() / (1.0 - theta).ln();
                m.ceil().max(1.0) as u64
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RadiusDistribution::constant(0).is_err());
        assert!(RadiusDistribution::geometric(0.0).is_err());
        assert!(RadiusDistribution::geometric(1.0).is_err());
        assert!(RadiusDistribution::power_tail(1.0, 10).is_err());
        assert!(RadiusDistribution::power_tail(2.0, 0).is_err());
    }

    #[test]
    fn finite_mean_flag() {
        assert!(RadiusDistribution::constant(3).unwrap().mean_is_finite());
        assert!(RadiusDistribution::geometric(0.5).unwrap().mean_is_finite());
        assert!(!RadiusDistribution::power_tail(2.0, 1000).unwrap().mean_is_finite());
        assert!(RadiusDistribution::power_tail(2.5, 1000).unwrap().mean_is_finite());
    }

    #[test]
    fn probabilities_sum_to_one() {
        for d in [
            RadiusDistribution::constant(4).unwrap(),
            RadiusDistribution::geometric(0.3).unwrap(),
            RadiusDistribution::power_tail(2.0, 5000).unwrap(),
        ] {
            let s: f64 = (1..=20_000).map(|k| d.pmf(k)).sum();
            assert!((s - 1.0).abs() < 1e-9, "{:?} {s}", d.law());
        }
    }

    #[test]
    fn sample_respects_tail_threshold() {
        for d in [
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::power_tail(2.0, 1000).unwrap(),
        ] {
            for i in 0..2000 {
                let u = (i as f64 + 0.5) / 2000.0;
                let x = d.sample(u);
                assert!(u < d.tail(x), "{:?} u={u} x={x}", d.law());
                assert!(u >= d.tail(x + 1), "{:?} u={u} x={x}", d.law());
            }
        }
    }

    #[test]
    fn geometric_partial_moment_closed_form() {
        let d = RadiusDistribution::geometric(0.25).unwrap();
        for a in 1..30u64 {
            let direct: f64 = (a..2000).map(|x| x as f64 * d.pmf(x)).sum();
            assert!((d.partial_moment(a) - direct).abs() < 1e-10 * direct.max(1.0));
        }
        assert!((d.mean() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn law_text_round_trip() {
        for law in [
            RadiusLaw::Constant { radius: 3 },
            RadiusLaw::Geometric { theta: 0.5 },
            RadiusLaw::PowerTail { exponent: 2.0, cap: 1000 },
        ] {
            assert_eq!(law.to_string().parse::<RadiusLaw>().unwrap(), law);
        }
        assert!("geometric".parse::<RadiusLaw>().is_err());
        assert!("geometric theta=0.5 extra=1".parse::<RadiusLaw>().is_err());
        assert!("weird x=1".parse::<RadiusLaw>().is_err());
    }
}
