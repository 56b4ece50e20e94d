use std::collections::HashMap;

use super::{BaseVertex, GraphSpec, ProductVertex, Window};
use crate::error::{Error, Result};
use crate::rng::{hash_words, TAG_EDGE};

/// An edge between two window vertex ids, `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub lo: u32,
    pub hi: u32,
}

/// Indexed finite window of `G x Z`.
///
/// Vertex ids run over `(height, base index)` in lexicographic order, so the
/// id order is the canonical vertex order. Edge ids follow the canonical
/// enumeration: sorted by lower endpoint, then direction (horizontal
/// neighbours by increasing base index, vertical last).
#[derive(Debug, Clone)]
pub struct WindowGraph {
    spec: GraphSpec,
    window: Window,
    bases: Vec<BaseVertex>,
    base_index: HashMap<BaseVertex, u32>,
    base_dist: Vec<u32>,
    origin_base: u32,
    by_dist: Vec<Vec<u32>>,
    edges: Vec<Edge>,
    edge_keys: Vec<u64>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
}

impl WindowGraph {
    pub fn new(spec: &GraphSpec, window: Window) -> Result<Self> {
        let bases = spec.base_ball(spec.origin(), window.base_radius);
        let n_base = bases.len();
        let layers = 2 * window.height as usize + 1;
        let total = n_base
            .checked_mul(layers)
            .filter(|&n| n < u32::MAX as usize / 2)
            .ok_or_else(|| Error::Precondition(format!("window {window:?} is too large")))?;

        let base_index: HashMap<BaseVertex, u32> = bases
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i as u32))
            .collect();
        let base_dist: Vec<u32> = bases
            .iter()
            .map(|b| spec.base_distance(spec.origin(), b) as u32)
            .collect();
        let mut by_dist = vec![Vec::new(); window.base_radius as usize + 1];
        for (i, &d) in base_dist.iter().enumerate() {
            by_dist[d as usize].push(i as u32);
        }
        let base_keys: Vec<u64> = bases.iter().map(BaseVertex::key).collect();
        let base_adj: Vec<Vec<u32>> = bases
            .iter()
            .map(|b| {
                let mut n: Vec<u32> = spec
                    .base_neighbors(b)
                    .iter()
                    .filter_map(|w| base_index.get(w).copied())
                    .collect();
                n.sort_unstable();
                n
            })
            .collect();

        let h_max = window.height as i64;
        let mut edges = Vec::new();
        let mut edge_keys = Vec::new();
        for layer in 0..layers {
            let h = layer as i64 - h_max;
            for b in 0..n_base {
                let u = (layer * n_base + b) as u32;
                for &w in base_adj[b].iter().filter(|&&w| w as usize > b) {
                    edges.push(Edge {
                        lo: u,
                        hi: (layer * n_base + w as usize) as u32,
                    });
                    let (k1, k2) = ordered(base_keys[b], base_keys[w as usize]);
                    edge_keys.push(hash_words(&[TAG_EDGE, 0, k1, k2, h as u64]));
                }
                if layer + 1 < layers {
                    edges.push(Edge {
                        lo: u,
                        hi: u + n_base as u32,
                    });
                    edge_keys.push(hash_words(&[TAG_EDGE, 1, base_keys[b], h as u64]));
                }
            }
        }

        let mut degree = vec![0u32; total];
        for e in &edges {
            degree[e.lo as usize] += 1;
            degree[e.hi as usize] += 1;
        }
        let mut adj_start = Vec::with_capacity(total + 1);
        let mut acc = 0u32;
        adj_start.push(0);
        for d in &degree {
            acc += d;
            adj_start.push(acc);
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![(0u32, 0u32); acc as usize];
        for (id, e) in edges.iter().enumerate() {
            adj[fill[e.lo as usize] as usize] = (e.hi, id as u32);
            fill[e.lo as usize] += 1;
            adj[fill[e.hi as usize] as usize] = (e.lo, id as u32);
            fill[e.hi as usize] += 1;
        }
        for v in 0..total {
            adj[adj_start[v] as usize..adj_start[v + 1] as usize].sort_unstable();
        }

        let origin_base = base_index[spec.origin()];
        Ok(Self {
            spec: spec.clone(),
            window,
            bases,
            base_index,
            base_dist,
            origin_base,
            by_dist,
            edges,
            edge_keys,
            adj_start,
            adj,
        })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn base_count(&self) -> usize {
        self.bases.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    /// Window-independent key of an edge (same edge, same key in every window).
    pub fn edge_key(&self, id: u32) -> u64 {
        self.edge_keys[id as usize]
    }

    pub fn vertex_id(&self, base: u32, height: i64) -> u32 {
        let layer = (height + self.window.height as i64) as usize;
        (layer * self.bases.len() + base as usize) as u32
    }

    pub fn height(&self, v: u32) -> i64 {
        (v as usize / self.bases.len()) as i64 - self.window.height as i64
    }

    pub fn base_of(&self, v: u32) -> u32 {
        (v as usize % self.bases.len()) as u32
    }

    /// `d_G(0, base(v))`.
    pub fn dist(&self, v: u32) -> u32 {
        self.base_dist[self.base_of(v) as usize]
    }

    pub fn base_dist(&self, base: u32) -> u32 {
        self.base_dist[base as usize]
    }

    /// Base indices at distance `d` from the origin.
    pub fn sphere(&self, d: u64) -> &[u32] {
        self.by_dist.get(d as usize).map_or(&[], Vec::as_slice)
    }

    pub fn origin(&self) -> u32 {
        self.vertex_id(self.origin_base, 0)
    }

    /// Window boundary: `d_G(0, v) = rho` or `|n| = H`.
    pub fn is_boundary(&self, v: u32) -> bool {
        self.dist(v) as u64 == self.window.base_radius
            || self.height(v).unsigned_abs() == self.window.height
    }

    /// `(neighbour, edge id)` pairs, sorted by neighbour.
    pub fn adjacent(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v as usize] as usize..self.adj_start[v as usize + 1] as usize]
    }

    pub fn product_vertex(&self, v: u32) -> ProductVertex {
        ProductVertex::new(self.bases[self.base_of(v) as usize].clone(), self.height(v))
    }

    pub fn index_of(&self, v: &ProductVertex) -> Option<u32> {
        if v.height.unsigned_abs() > self.window.height {
            return None;
        }
        let b = *self.base_index.get(&v.base)?;
        Some(self.vertex_id(b, v.height))
    }

    pub fn edge_between(&self, u: u32, v: u32) -> Option<u32> {
        let adj = self.adjacent(u);
        adj.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| adj[i].1)
    }
}

fn ordered(a: u64, b: u64) -> (u64, u64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
