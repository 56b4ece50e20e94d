use rayon::prelude::*;
use serde::Serialize;

use super::EstimateResult;
use crate::engine::{origin_cluster_extent, BfsScratch, BondParams, LazyBonds};
use crate::environment::Region;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};
use crate::numeric::{linear_fit, LinearFit};
use crate::rng::bond_seed;

/// Radii with fewer successes than this are left out of the fit.
pub const MIN_SUCCESSES: u64 = 10;

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    /// Fitted `c(p)`: slope of `-ln P(0 <-> boundary of B(r))` against `r`.
    /// Infinite when no replica left the origin, NaN with fewer than two
    /// usable radii.
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rate_se: f64,
    /// Estimate at every requested radius.
    pub estimates: Vec<(u64, EstimateResult)>,
    /// Radii that entered the fit.
    pub used: Vec<u64>,
    /// Some radius had no success; the grid was cut at the last positive one.
    pub truncated: bool,
    pub degenerate: bool,
    pub warning: Option<String>,
}

/// Homogeneous point-to-box-boundary decay fit on `G x Z`. A single search
/// per replica gives the event for every radius at once: the origin reaches
/// the boundary of `B(r)` iff its cluster has box norm at least `r`.
pub fn fit_decay_rate(
    spec: &GraphSpec,
    p: f64,
    window: Window,
    radii: &[u64],
    replicas: u64,
    seed: u64,
) -> Result<DecayFit> {
    if replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    let r_max = *radii
        .iter()
        .max()
        .ok_or_else(|| Error::Config("empty radius grid".into()))?;
    if r_max > window.base_radius || r_max > window.height {
        return Err(Error::OutsideWindow(format!(
            "radius {r_max} does not fit in window {window:?}"
        )));
    }
    let params = BondParams::homogeneous(p)?;
    let graph = WindowGraph::new(spec, window)?;
    let region = Region::empty(spec, window);
    let mut counts = vec![0u64; r_max as usize + 1];
    let extents: Vec<u64> = (0..replicas)
        .into_par_iter()
        .map_init(BfsScratch::new, |scratch, j| {
            let bonds = LazyBonds::new(&graph, &region, params, bond_seed(seed, 0, j));
            origin_cluster_extent(&graph, &bonds, r_max, scratch)
        })
        .collect();
    for e in extents {
        counts[e.min(r_max) as usize] += 1;
    }
    // tail sums: successes(r) = #{extent >= r}
    for r in (0..r_max as usize).rev() {
        counts[r] += counts[r + 1];
    }

    let mut grid: Vec<u64> = radii.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let estimates: Vec<(u64, EstimateResult)> = grid
        .iter()
        .map(|&r| (r, EstimateResult::proportion(counts[r as usize], replicas, 0)))
        .collect();
    let truncated = grid.iter().any(|&r| counts[r as usize] == 0);
    let used: Vec<u64> = grid
        .iter()
        .copied()
        .take_while(|&r| counts[r as usize] > 0)
        .filter(|&r| counts[r as usize] >= MIN_SUCCESSES)
        .collect();
    let points: Vec<(f64, f64)> = used
        .iter()
        .map(|&r| (r as f64, -(counts[r as usize] as f64 / replicas as f64).ln()))
        .collect();

    let fit: Option<LinearFit> = if points.len() >= 2 { linear_fit(&points) } else { None };
    let all_zero = grid.iter().all(|&r| r == 0 || counts[r as usize] == 0);
    let (rate, intercept, r_squared, rate_se) = match fit {
        Some(f) => (f.slope, f.intercept, f.r_squared, f.slope_se),
        None if all_zero => (f64::INFINITY, f64::NAN, f64::NAN, f64::NAN),
        None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    };
    let warning = match fit {
        Some(f) if f.slope <= 0.0 => {
            Some("no decay detected; p may be at or above the critical point".to_string())
        }
        _ => None,
    };
    Ok(DecayFit {
        rate,
        intercept,
        r_squared,
        rate_se,
        estimates,
        used,
        truncated,
        degenerate: fit.is_none(),
        warning,
    })
}
