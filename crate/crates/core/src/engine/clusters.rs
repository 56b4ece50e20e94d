use super::BondOracle;
use crate::graph::WindowGraph;

/// Open clusters of a window, as a union-find flattened to roots.
#[derive(Debug, Clone)]
pub struct ClusterIndex {
    root: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        let mut r = v;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        while self.parent[v as usize] != r {
            let next = self.parent[v as usize];
            self.parent[v as usize] = r;
            v = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        self.components -= 1;
        let (ka, kb) = (self.rank[ra as usize], self.rank[rb as usize]);
        if ka < kb {
            self.parent[ra as usize] = rb;
        } else {
            self.parent[rb as usize] = ra;
            if ka == kb {
                self.rank[ra as usize] += 1;
            }
        }
    }
}

impl ClusterIndex {
    pub fn build<B: BondOracle>(graph: &WindowGraph, bonds: &B) -> Self {
        let n = graph.vertex_count();
        let mut uf = UnionFind::new(n);
        for (id, e) in graph.edges().iter().enumerate() {
            if bonds.is_open(id as u32) {
                uf.union(e.lo, e.hi);
            }
        }
        let root: Vec<u32> = (0..n as u32).map(|v| uf.find(v)).collect();
        let mut size = vec![0u32; n];
        for &r in &root {
            size[r as usize] += 1;
        }
        Self {
            root,
            size,
            components: uf.components,
        }
    }

    pub fn root(&self, v: u32) -> u32 {
        self.root[v as usize]
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn cluster_size(&self, v: u32) -> u32 {
        self.size[self.root(v) as usize]
    }

    pub fn connected(&self, u: u32, v: u32) -> bool {
        self.root(u) == self.root(v)
    }

    /// Whether some vertex of `a` and some vertex of `b` share a cluster.
    /// Either set being empty gives `false`.
    pub fn sets_connected(&self, a: &[u32], b: &[u32]) -> bool {
        if a.is_empty() || b.is_empty() {
            return false;
        }
        let mut mark = vec![false; self.root.len()];
        for &v in a {
            mark[self.root(v) as usize] = true;
        }
        b.iter().any(|&v| mark[self.root(v) as usize])
    }

    pub fn origin_reaches_boundary(&self, graph: &WindowGraph) -> bool {
        let r = self.root(graph.origin());
        (0..graph.vertex_count() as u32).any(|v| self.root[v as usize] == r && graph.is_boundary(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{BondConfiguration, BondParams};
    use crate::environment::Region;
    use crate::graph::{GraphSpec, Window};

    fn window() -> (WindowGraph, Region) {
        let spec = GraphSpec::lattice(1).unwrap();
        let w = Window::new(2, 2);
        (WindowGraph::new(&spec, w).unwrap(), Region::empty(&spec, w))
    }

    #[test]
    fn all_open_and_all_closed() {
        let (g, r) = window();
        let open = BondConfiguration::sample(&g, &r, BondParams::homogeneous(1.0).unwrap(), 0).unwrap();
        let idx = ClusterIndex::build(&g, &open);
        assert_eq!(idx.component_count(), 1);
        assert!(idx.origin_reaches_boundary(&g));
        let closed = BondConfiguration::sample(&g, &r, BondParams::homogeneous(0.0).unwrap(), 0).unwrap();
        let idx = ClusterIndex::build(&g, &closed);
        assert_eq!(idx.component_count(), g.vertex_count());
        assert!(idx.connected(3, 3));
        assert!(!idx.connected(3, 4));
        assert!(!idx.origin_reaches_boundary(&g));
        assert_eq!(idx.cluster_size(0), 1);
    }

    #[test]
    fn empty_sets_are_disconnected() {
        let (g, r) = window();
        let open = BondConfiguration::sample(&g, &r, BondParams::homogeneous(1.0).unwrap(), 0).unwrap();
        let idx = ClusterIndex::build(&g, &open);
        assert!(!idx.sets_connected(&[], &[1, 2]));
        assert!(!idx.sets_connected(&[1], &[]));
        assert!(idx.sets_connected(&[0], &[24]));
    }
}
