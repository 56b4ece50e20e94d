use rayon::prelude::*;

use super::{EstimateResult, RegionModel};
use crate::engine::{cluster_search, origin_hits_boundary, BfsScratch, BondParams, LazyBonds};
use crate::environment::Region;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};
use crate::rng::{bond_seed, env_seed};

fn check_replicas(replicas: u64) -> Result<()> {
    if replicas == 0 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    Ok(())
}

/// Quenched proxy `P(origin <-> window boundary)` in a fixed region.
pub fn estimate_theta(
    graph: &WindowGraph,
    region: &Region,
    params: BondParams,
    replicas: u64,
    seed_base: u64,
) -> Result<EstimateResult> {
    check_replicas(replicas)?;
    let params = BondParams::new(params.p, params.q)?;
    let hits: u64 = (0..replicas)
        .into_par_iter()
        .map_init(BfsScratch::new, |scratch, j| {
            let bonds = LazyBonds::new(graph, region, params, bond_seed(seed_base, 0, j));
            origin_hits_boundary(graph, &bonds, scratch) as u64
        })
        .sum();
    Ok(EstimateResult::proportion(hits, replicas, hits))
}

/// Annealed proxy: replica `j` draws environment `env_seed(master, j)` and
/// bonds `bond_seed(master, j, 0)`.
pub fn estimate_theta_annealed(
    spec: &GraphSpec,
    window: Window,
    model: &RegionModel,
    params: BondParams,
    replicas: u64,
    master_seed: u64,
) -> Result<EstimateResult> {
    let graph = WindowGraph::new(spec, window)?;
    theta_on_graph(&graph, model, params, replicas, master_seed)
}

pub(crate) fn theta_on_graph(
    graph: &WindowGraph,
    model: &RegionModel,
    params: BondParams,
    replicas: u64,
    master_seed: u64,
) -> Result<EstimateResult> {
    Ok(theta_counts(graph, &[graph.window()], model, params, replicas, master_seed)?[0])
}

/// Coupled estimates over nested windows: every replica uses the same
/// environment and the same edge uniforms in all windows, so the estimates
/// are nonincreasing in the window for each replica.
pub fn theta_nested(
    spec: &GraphSpec,
    windows: &[Window],
    model: &RegionModel,
    params: BondParams,
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<EstimateResult>> {
    let largest = *windows
        .iter()
        .max_by_key(|w| (w.base_radius, w.height))
        .ok_or_else(|| Error::Config("no windows given".into()))?;
    if windows
        .iter()
        .any(|w| w.base_radius > largest.base_radius || w.height > largest.height)
    {
        return Err(Error::Precondition("windows must be nested".into()));
    }
    let graph = WindowGraph::new(spec, largest)?;
    theta_counts(&graph, windows, model, params, replicas, master_seed)
}

fn theta_counts(
    graph: &WindowGraph,
    windows: &[Window],
    model: &RegionModel,
    params: BondParams,
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<EstimateResult>> {
    check_replicas(replicas)?;
    let params = BondParams::new(params.p, params.q)?;
    let spec = graph.spec();
    let big = graph.window();
    let shared = match model {
        RegionModel::Empty => Some(Region::empty(spec, big)),
        RegionModel::Random { .. } => None,
    };
    let per_replica: Vec<Vec<bool>> = (0..replicas)
        .into_par_iter()
        .map_init(BfsScratch::new, |scratch, j| -> Result<Vec<bool>> {
            let owned;
            let region = match &shared {
                Some(r) => r,
                None => {
                    owned = model.region(spec, big, env_seed(master_seed, j))?;
                    &owned
                }
            };
            let bonds = LazyBonds::new(graph, region, params, bond_seed(master_seed, j, 0));
            cluster_search(graph, &bonds, &[graph.origin()], scratch, |v| graph.is_boundary(v));
            let visited = scratch.visited();
            Ok(windows
                .iter()
                .map(|w| {
                    visited.iter().any(|&v| {
                        graph.dist(v) as u64 >= w.base_radius
                            || graph.height(v).unsigned_abs() >= w.height
                    })
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..windows.len())
        .map(|i| {
            let hits = per_replica.iter().filter(|r| r[i]).count() as u64;
            EstimateResult::proportion(hits, replicas, hits)
        })
        .collect())
}
