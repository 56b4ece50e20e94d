//! Test-side reference implementations shared by the integration tests.

use reinforced_perc::engine::BondOracle;
use reinforced_perc::graph::WindowGraph;
use reinforced_perc::rng::CounterRng;

/// Plain flood fill over the open edges, labelling each vertex with the
/// smallest vertex id of its component.
pub fn flood_labels<B: BondOracle>(graph: &WindowGraph, bonds: &B) -> Vec<u32> {
    let n = graph.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (id, e) in graph.edges().iter().enumerate() {
        if bonds.is_open(id as u32) {
            adj[e.lo as usize].push(e.hi);
            adj[e.hi as usize].push(e.lo);
        }
    }
    let mut label = vec![u32::MAX; n];
    for s in 0..n as u32 {
        if label[s as usize] != u32::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s as usize] = s;
        while let Some(v) = stack.pop() {
            for &w in &adj[v as usize] {
                if label[w as usize] == u32::MAX {
                    label[w as usize] = s;
                    stack.push(w);
                }
            }
        }
    }
    label
}

/// An explicit open/closed table.
pub struct Fixed(pub Vec<bool>);

impl BondOracle for Fixed {
    fn is_open(&self, edge: u32) -> bool {
        self.0[edge as usize]
    }
}

pub fn random_bits(graph: &WindowGraph, rng: &mut CounterRng, p: f64) -> Fixed {
    Fixed((0..graph.edge_count()).map(|_| rng.uniform() < p).collect())
}
