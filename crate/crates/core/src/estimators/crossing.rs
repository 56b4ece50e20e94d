use rayon::prelude::*;

use super::EstimateResult;
use crate::engine::{cluster_search, BfsScratch, BondOracle, BondParams, LazyBonds};
use crate::environment::Region;
use crate::error::{Error, Result};
use crate::graph::WindowGraph;
use crate::rng::bond_seed;

/// Outcome of one set-to-set search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingCounts {
    pub crossed: bool,
    /// Not crossed, but the cluster of `a` reached the window boundary
    /// outside `a`.
    pub censored: bool,
}

impl CrossingCounts {
    /// Searches the open cluster of `a` for a vertex flagged in `b_mask`.
    pub fn observe<B: BondOracle>(
        graph: &WindowGraph,
        bonds: &B,
        a: &[u32],
        b_mask: &[bool],
        a_mask: &[bool],
        scratch: &mut BfsScratch,
    ) -> Self {
        if a.is_empty() || !b_mask.iter().any(|&x| x) {
            return Self {
                crossed: false,
                censored: false,
            };
        }
        let crossed = cluster_search(graph, bonds, a, scratch, |v| b_mask[v as usize]);
        let censored = !crossed
            && scratch
                .visited()
                .iter()
                .any(|&v| !a_mask[v as usize] && graph.is_boundary(v));
        Self { crossed, censored }
    }
}

/// `P(A <-> B)` inside the window. An empty set never connects.
pub fn estimate_crossing(
    graph: &WindowGraph,
    region: &Region,
    params: BondParams,
    a: &[u32],
    b: &[u32],
    replicas: u64,
    seed: u64,
) -> Result<EstimateResult> {
    if replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    let params = BondParams::new(params.p, params.q)?;
    let n = graph.vertex_count();
    let mut a_mask = vec![false; n];
    let mut b_mask = vec![false; n];
    for &v in a {
        a_mask[v as usize] = true;
    }
    for &v in b {
        b_mask[v as usize] = true;
    }
    if a.iter().any(|&v| b_mask[v as usize]) {
        return Err(Error::OverlappingCones);
    }
    let (crossed, censored) = (0..replicas)
        .into_par_iter()
        .map_init(BfsScratch::new, |scratch, j| {
            let bonds = LazyBonds::new(graph, region, params, bond_seed(seed, 0, j));
            let c = CrossingCounts::observe(graph, &bonds, a, &b_mask, &a_mask, scratch);
            (c.crossed as u64, c.censored as u64)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(EstimateResult::proportion(crossed, replicas, censored))
}
