//! Bond configurations, open clusters and cone explorations on a window.

mod bfs;
mod bonds;
mod clusters;
mod dump;
mod exploration;

pub use bfs::{
    bfs_components, bfs_reachable, cluster_search, origin_cluster_extent, origin_hits_boundary,
    BfsScratch,
};
pub use bonds::{edge_uniform, BondConfiguration, BondMeta, BondOracle, BondParams, LazyBonds};
pub use clusters::ClusterIndex;
pub use dump::{decode_bond_dump, encode_bond_dump};
pub use exploration::{
    check_disjoint, cone_vertices, explore_cone_boundary, run_exploration_sequence,
    ExplorationRun, ExplorationState, SequenceOutcome, Status,
};
