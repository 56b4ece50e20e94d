use std::fmt;

use serde::Serialize;

use super::{EstimateResult, RegionModel};
use crate::engine::BondParams;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};

/// Bisection stops once the bracket is at most this wide.
pub const PC_RESOLUTION: f64 = 1.0 / 128.0;
/// Replica counts are doubled at most this many times per bisection step.
pub const MAX_DOUBLINGS: u32 = 3;

/// Reinforced opening probability for a curve point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QChoice {
    Fixed(f64),
    /// `q = p`, which is homogeneous percolation.
    EqualsP,
}

impl QChoice {
    fn at(self, p: f64) -> f64 {
        match self {
            QChoice::Fixed(q) => q,
            QChoice::EqualsP => p,
        }
    }
}

impl fmt::Display for QChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QChoice::Fixed(q) => write!(f, "{q}"),
            QChoice::EqualsP => f.write_str("p"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PcPoint {
    pub q: QChoice,
    /// Midpoint of the final bracket.
    pub p_c: f64,
    pub lower: f64,
    pub upper: f64,
    /// Every `(p, theta estimate)` evaluated, in bisection order.
    pub evaluations: Vec<(f64, EstimateResult)>,
    /// Some step still had `tau` inside the confidence interval after the
    /// last replica doubling.
    pub unresolved: bool,
    /// Two evaluations contradicted monotonicity in `p` beyond their
    /// confidence intervals.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PcScan {
    pub tau: f64,
    pub points: Vec<PcPoint>,
}

/// Locates, for each `q`, the `p` at which the annealed boundary-reaching
/// probability crosses `tau`, by bisection on `[0, 1]`.
pub fn scan_pc_curve(
    spec: &GraphSpec,
    window: Window,
    model: &RegionModel,
    q_grid: &[QChoice],
    replicas: u64,
    tau: f64,
    master_seed: u64,
) -> Result<PcScan> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Config(format!("tau must lie in (0, 1), got {tau}")));
    }
    if replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    let graph = WindowGraph::new(spec, window)?;
    let mut points = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        if let QChoice::Fixed(v) = q {
            BondParams::new(0.0, v)?;
        }
        points.push(bisect(&graph, model, q, replicas, tau, master_seed)?);
    }
    Ok(PcScan { tau, points })
}

fn bisect(
    graph: &WindowGraph,
    model: &RegionModel,
    q: QChoice,
    replicas: u64,
    tau: f64,
    master_seed: u64,
) -> Result<PcPoint> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut evaluations: Vec<(f64, EstimateResult)> = Vec::new();
    let mut unresolved = false;
    while hi - lo > PC_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let params = BondParams::new(mid, q.at(mid))?;
        let mut n = replicas;
        let mut est;
        let mut doublings = 0;
        loop {
            est = super::theta::theta_on_graph(graph, model, params, n, master_seed)?;
            if (est.point - tau).abs() > est.half_width || doublings == MAX_DOUBLINGS {
                break;
            }
            n *= 2;
            doublings += 1;
        }
        unresolved |= (est.point - tau).abs() <= est.half_width;
        evaluations.push((mid, est));
        if est.point >= tau {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let non_monotone = evaluations.iter().any(|(pa, a)| {
        evaluations
            .iter()
            .any(|(pb, b)| pa < pb && a.point - b.point > a.half_width + b.half_width)
    });
    Ok(PcPoint {
        q,
        p_c: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        evaluations,
        unresolved,
        non_monotone,
    })
}
