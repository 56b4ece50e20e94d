//! Breadth-first search over open edges. Independent of the union-find code
//! and used both as a cross-check and for early-exit origin queries.

use std::collections::VecDeque;

use super::BondOracle;
use crate::graph::WindowGraph;

/// Component label of every vertex; labels are the smallest vertex id of the
/// component.
pub fn bfs_components<B: BondOracle>(graph: &WindowGraph, bonds: &B) -> Vec<u32> {
    let n = graph.vertex_count();
    let mut label = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if label[s as usize] != u32::MAX {
            continue;
        }
        label[s as usize] = s;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in graph.adjacent(v) {
                if label[w as usize] == u32::MAX && bonds.is_open(e) {
                    label[w as usize] = s;
                    queue.push_back(w);
                }
            }
        }
    }
    label
}

/// Vertices joined to some source by an open path.
pub fn bfs_reachable<B: BondOracle>(graph: &WindowGraph, bonds: &B, sources: &[u32]) -> Vec<bool> {
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &s in sources {
        if !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(w, e) in graph.adjacent(v) {
            if !seen[w as usize] && bonds.is_open(e) {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Reusable visited marks and queue for repeated searches on one window.
/// Marks are generation stamps, so clearing is O(1).
#[derive(Debug, Clone, Default)]
pub struct BfsScratch {
    stamp: Vec<u32>,
    generation: u32,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n || self.generation == u32::MAX {
            self.stamp = vec![0; n];
            self.generation = 0;
        }
        self.generation += 1;
        self.queue.clear();
    }

    #[inline]
    fn visit(&mut self, v: u32) -> bool {
        let s = &mut self.stamp[v as usize];
        if *s == self.generation {
            false
        } else {
            *s = self.generation;
            true
        }
    }

    /// Vertices reached by the last search, in visiting order.
    pub fn visited(&self) -> &[u32] {
        &self.queue
    }
}

/// Open cluster of `sources`, stopping right after the first vertex for which
/// `stop` holds. Returns whether the search stopped early; the visited
/// vertices are left in `scratch`.
pub fn cluster_search<B, F>(
    graph: &WindowGraph,
    bonds: &B,
    sources: &[u32],
    scratch: &mut BfsScratch,
    mut stop: F,
) -> bool
where
    B: BondOracle,
    F: FnMut(u32) -> bool,
{
    scratch.reset(graph.vertex_count());
    for &s in sources {
        if scratch.visit(s) {
            scratch.queue.push(s);
        }
    }
    let mut head = 0;
    while head < scratch.queue.len() {
        let v = scratch.queue[head];
        head += 1;
        if stop(v) {
            return true;
        }
        for &(w, e) in graph.adjacent(v) {
            if scratch.stamp[w as usize] != scratch.generation && bonds.is_open(e) {
                scratch.visit(w);
                scratch.queue.push(w);
            }
        }
    }
    false
}

/// Largest box norm `max(d_G(0, x), |h|)` over the open cluster of the
/// origin, stopping early once `limit` is reached.
pub fn origin_cluster_extent<B: BondOracle>(
    graph: &WindowGraph,
    bonds: &B,
    limit: u64,
    scratch: &mut BfsScratch,
) -> u64 {
    let mut best = 0;
    cluster_search(graph, bonds, &[graph.origin()], scratch, |v| {
        best = best.max((graph.dist(v) as u64).max(graph.height(v).unsigned_abs()));
        best >= limit
    });
    best
}

/// Whether the origin's open cluster contains a window boundary vertex.
pub fn origin_hits_boundary<B: BondOracle>(
    graph: &WindowGraph,
    bonds: &B,
    scratch: &mut BfsScratch,
) -> bool {
    cluster_search(graph, bonds, &[graph.origin()], scratch, |v| graph.is_boundary(v))
}
