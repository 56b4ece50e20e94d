use bitvec::prelude::*;

use crate::environment::Region;
use crate::error::{Error, Result};
use crate::graph::{GraphKind, Window, WindowGraph};
use crate::rng::{combine, unit_f64};

/// Read access to the open/closed state of window edges.
pub trait BondOracle {
    fn is_open(&self, edge: u32) -> bool;
}

impl<T: BondOracle + ?Sized> BondOracle for &T {
    fn is_open(&self, edge: u32) -> bool {
        (**self).is_open(edge)
    }
}

/// Opening probabilities: `p` outside the reinforced region, `q` inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondParams {
    pub p: f64,
    pub q: f64,
}

impl BondParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, value) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(Self { p, q })
    }

    pub fn homogeneous(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

/// The uniform attached to an edge: a function of the bond seed and the
/// window-independent edge key only, so the same edge gets the same uniform
/// in every window and for every `(p, q)`.
#[inline]
pub fn edge_uniform(bond_seed: u64, edge_key: u64) -> f64 {
    unit_f64(combine(bond_seed, edge_key))
}

/// Bonds evaluated on demand. Agrees edge for edge with
/// [`BondConfiguration::sample`] for the same arguments.
#[derive(Debug, Clone, Copy)]
pub struct LazyBonds<'a> {
    graph: &'a WindowGraph,
    region: &'a Region,
    params: BondParams,
    bond_seed: u64,
}

impl<'a> LazyBonds<'a> {
    pub fn new(graph: &'a WindowGraph, region: &'a Region, params: BondParams, bond_seed: u64) -> Self {
        Self {
            graph,
            region,
            params,
            bond_seed,
        }
    }

    pub fn probability(&self, edge: u32) -> f64 {
        if self.region.contains_edge(self.graph, edge) {
            self.params.q
        } else {
            self.params.p
        }
    }
}

impl BondOracle for LazyBonds<'_> {
    #[inline]
    fn is_open(&self, edge: u32) -> bool {
        edge_uniform(self.bond_seed, self.graph.edge_key(edge)) < self.probability(edge)
    }
}

/// Header data identifying a bond configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BondMeta {
    pub graph: GraphKind,
    pub window: Window,
    pub env_seed: Option<u64>,
    pub bond_seed: u64,
    pub params: BondParams,
}

/// Materialised open/closed bit per window edge, in canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct BondConfiguration {
    meta: BondMeta,
    bits: BitVec<u64, Lsb0>,
}

impl BondConfiguration {
    pub fn sample(
        graph: &WindowGraph,
        region: &Region,
        params: BondParams,
        bond_seed: u64,
    ) -> Result<Self> {
        let params = BondParams::new(params.p, params.q)?;
        if region.window() != graph.window() {
            return Err(Error::Precondition("region and graph use different windows".into()));
        }
        let lazy = LazyBonds::new(graph, region, params, bond_seed);
        let bits = (0..graph.edge_count() as u32).map(|e| lazy.is_open(e)).collect();
        Ok(Self {
            meta: BondMeta {
                graph: graph.spec().kind(),
                window: graph.window(),
                env_seed: None,
                bond_seed,
                params,
            },
            bits,
        })
    }

    pub fn from_bits(meta: BondMeta, bits: BitVec<u64, Lsb0>) -> Self {
        Self { meta, bits }
    }

    pub fn with_env_seed(mut self, env_seed: u64) -> Self {
        self.meta.env_seed = Some(env_seed);
        self
    }

    pub fn meta(&self) -> &BondMeta {
        &self.meta
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn open_count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn set(&mut self, edge: u32, open: bool) {
        self.bits.set(edge as usize, open);
    }
}

impl BondOracle for BondConfiguration {
    #[inline]
    fn is_open(&self, edge: u32) -> bool {
        self.bits[edge as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Environment, Model, RadiusDistribution};
    use crate::graph::GraphSpec;

    fn setup() -> (WindowGraph, Region) {
        let spec = GraphSpec::lattice(1).unwrap();
        let w = Window::new(4, 4);
        let g = WindowGraph::new(&spec, w).unwrap();
        let d = RadiusDistribution::constant(1).unwrap();
        let env = Environment::sample(Model::Overlap, &d, 6, 0);
        let r = Region::build(&env, &spec, w).unwrap();
        (g, r)
    }

    #[test]
    fn extremes() {
        let (g, r) = setup();
        let all = BondConfiguration::sample(&g, &r, BondParams::new(1.0, 1.0).unwrap(), 3).unwrap();
        assert_eq!(all.open_count(), g.edge_count());
        let none = BondConfiguration::sample(&g, &r, BondParams::new(0.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(none.open_count(), 0);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(BondParams::new(-0.1, 0.5).is_err());
        assert!(BondParams::new(0.5, 1.5).is_err());
        assert!(BondParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn region_edges_use_q() {
        let (g, r) = setup();
        let cfg = BondConfiguration::sample(&g, &r, BondParams::new(0.0, 1.0).unwrap(), 9).unwrap();
        for e in 0..g.edge_count() as u32 {
            assert_eq!(cfg.is_open(e), r.contains_edge(&g, e));
        }
    }

    #[test]
    fn lazy_matches_materialised() {
        let (g, r) = setup();
        let params = BondParams::new(0.4, 0.7).unwrap();
        let cfg = BondConfiguration::sample(&g, &r, params, 77).unwrap();
        let lazy = LazyBonds::new(&g, &r, params, 77);
        for e in 0..g.edge_count() as u32 {
            assert_eq!(cfg.is_open(e), lazy.is_open(e));
        }
    }
}
