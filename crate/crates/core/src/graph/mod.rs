//! Base graphs `G`, the product `G x Z`, balls, boxes and growth constants.
//!
//! Lattice vertices are coordinate tuples and the base metric is the graph
//! (l1) distance. Tree vertices are root paths: the root has `degree`
//! children, every other vertex `degree - 1`.

mod window;

pub use window::{Edge, WindowGraph};

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::hash_words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphKind {
    /// `Z^dim` base, so the product is `Z^(dim + 1)`.
    IntegerLattice { dim: u32 },
    RegularTree { degree: u32 },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::IntegerLattice { dim } => write!(f, "integer_lattice dim={dim}"),
            GraphKind::RegularTree { degree } => write!(f, "regular_tree degree={degree}"),
        }
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    /// Parses the `Display` form, e.g. `regular_tree degree=3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGraph(format!("cannot parse graph {s:?}"));
        let mut parts = s.split_whitespace();
        let (Some(kind), Some(field), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        let value: u32 = value.parse().map_err(|_| bad())?;
        match (kind, key) {
            ("integer_lattice", "dim") => Ok(GraphKind::IntegerLattice { dim: value }),
            ("regular_tree", "degree") => Ok(GraphKind::RegularTree { degree: value }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseVertex {
    Lattice(Vec<i64>),
    Tree(Vec<u32>),
}

impl BaseVertex {
    /// Canonical order: lexicographic coordinates for lattices, breadth-first
    /// order (depth, then path) for trees.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BaseVertex::Lattice(a), BaseVertex::Lattice(b)) => a.cmp(b),
            (BaseVertex::Tree(a), BaseVertex::Tree(b)) => {
                a.len().cmp(&b.len()).then_with(|| a.cmp(b))
            }
            (BaseVertex::Lattice(_), BaseVertex::Tree(_)) => Ordering::Less,
            (BaseVertex::Tree(_), BaseVertex::Lattice(_)) => Ordering::Greater,
        }
    }

    /// Window-independent 64-bit key used to address random streams.
    pub fn key(&self) -> u64 {
        match self {
            BaseVertex::Lattice(c) => {
                let mut words = Vec::with_capacity(c.len() + 2);
                words.push(0x4c41_5454);
                words.push(c.len() as u64);
                words.extend(c.iter().map(|&x| x as u64));
                hash_words(&words)
            }
            BaseVertex::Tree(p) => {
                let mut words = Vec::with_capacity(p.len() + 2);
                words.push(0x5452_4545);
                words.push(p.len() as u64);
                words.extend(p.iter().map(|&x| x as u64));
                hash_words(&words)
            }
        }
    }
}

impl PartialOrd for BaseVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BaseVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Display for BaseVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseVertex::Lattice(c) => write!(f, "{c:?}"),
            BaseVertex::Tree(p) => write!(f, "tree{p:?}"),
        }
    }
}

/// A vertex `(base, height)` of `G x Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductVertex {
    pub height: i64,
    pub base: BaseVertex,
}

impl ProductVertex {
    pub fn new(base: BaseVertex, height: i64) -> Self {
        Self { height, base }
    }
}

impl fmt::Display for ProductVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.base, self.height)
    }
}

/// Finite truncation `B_G(base_radius) x [-height, height]` with free boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub base_radius: u64,
    pub height: u64,
}

impl Window {
    pub fn new(base_radius: u64, height: u64) -> Self {
        Self {
            base_radius,
            height,
        }
    }

    /// Square window of the given side (`side / 2` in both directions).
    pub fn square(side: u64) -> Self {
        Self::new(side / 2, side / 2)
    }
}

/// `B^x(a, r) = B_G^x(r) x [a - r, a + r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    pub center_base: BaseVertex,
    pub center_height: i64,
    pub radius: u64,
}

impl BoxRegion {
    pub fn new(center_base: BaseVertex, center_height: i64, radius: u64) -> Self {
        Self {
            center_base,
            center_height,
            radius,
        }
    }

    pub fn contains(&self, spec: &GraphSpec, v: &ProductVertex) -> bool {
        v.height.abs_diff(self.center_height) <= self.radius
            && spec.base_distance(&self.center_base, &v.base) <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphSpec {
    kind: GraphKind,
    origin: BaseVertex,
}

impl GraphSpec {
    pub fn new(kind: GraphKind) -> Result<Self> {
        let origin = match kind {
            GraphKind::IntegerLattice { dim } => BaseVertex::Lattice(vec![0; dim as usize]),
            GraphKind::RegularTree { .. } => BaseVertex::Tree(Vec::new()),
        };
        Self::with_origin(kind, origin)
    }

    pub fn with_origin(kind: GraphKind, origin: BaseVertex) -> Result<Self> {
        match kind {
            GraphKind::IntegerLattice { dim: 0 } => {
                return Err(Error::InvalidGraph("lattice dimension must be >= 1".into()))
            }
            GraphKind::RegularTree { degree } if degree < 3 => {
                return Err(Error::InvalidGraph(format!(
                    "tree degree must be >= 3, got {degree}"
                )))
            }
            _ => {}
        }
        let spec = Self { kind, origin };
        if !spec.is_valid_vertex(&spec.origin) {
            return Err(Error::InvalidGraph(format!(
                "origin {} is not a vertex of {kind:?}",
                spec.origin
            )));
        }
        Ok(spec)
    }

    pub fn lattice(dim: u32) -> Result<Self> {
        Self::new(GraphKind::IntegerLattice { dim })
    }

    pub fn tree(degree: u32) -> Result<Self> {
        Self::new(GraphKind::RegularTree { degree })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn origin(&self) -> &BaseVertex {
        &self.origin
    }

    /// `Delta_G`, the maximum base degree.
    pub fn max_degree(&self) -> u32 {
        match self.kind {
            GraphKind::IntegerLattice { dim } => 2 * dim,
            GraphKind::RegularTree { degree } => degree,
        }
    }

    pub fn is_valid_vertex(&self, v: &BaseVertex) -> bool {
        match (self.kind, v) {
            (GraphKind::IntegerLattice { dim }, BaseVertex::Lattice(c)) => c.len() == dim as usize,
            (GraphKind::RegularTree { degree }, BaseVertex::Tree(p)) => p
                .iter()
                .enumerate()
                .all(|(i, &c)| if i == 0 { c < degree } else { c < degree - 1 }),
            _ => false,
        }
    }

    /// Graph distance `d_G(a, b)`.
    pub fn base_distance(&self, a: &BaseVertex, b: &BaseVertex) -> u64 {
        match (a, b) {
            (BaseVertex::Lattice(x), BaseVertex::Lattice(y)) => {
                x.iter().zip(y).map(|(p, q)| p.abs_diff(*q)).sum()
            }
            (BaseVertex::Tree(x), BaseVertex::Tree(y)) => {
                let lcp = x.iter().zip(y).take_while(|(p, q)| p == q).count();
                (x.len() + y.len() - 2 * lcp) as u64
            }
            _ => u64::MAX,
        }
    }

    pub fn base_neighbors(&self, v: &BaseVertex) -> Vec<BaseVertex> {
        match (self.kind, v) {
            (GraphKind::IntegerLattice { .. }, BaseVertex::Lattice(c)) => {
                let mut out = Vec::with_capacity(2 * c.len());
                for i in 0..c.len() {
                    for step in [-1i64, 1] {
                        let mut w = c.clone();
                        w[i] += step;
                        out.push(BaseVertex::Lattice(w));
                    }
                }
                out
            }
            (GraphKind::RegularTree { degree }, BaseVertex::Tree(p)) => {
                let mut out = Vec::with_capacity(degree as usize);
                if let Some((_, parent)) = p.split_last() {
                    out.push(BaseVertex::Tree(parent.to_vec()));
                }
                let children = if p.is_empty() { degree } else { degree - 1 };
                for i in 0..children {
                    let mut w = p.clone();
                    w.push(i);
                    out.push(BaseVertex::Tree(w));
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// `|B_G(r)|` in closed form, saturating at `u128::MAX`.
    pub fn ball_count(&self, r: u64) -> u128 {
        match self.kind {
            GraphKind::IntegerLattice { dim } => {
                // sum_i 2^i C(dim, i) C(r, i)
                let mut total: u128 = 0;
                let mut c_dim: u128 = 1; // C(dim, i)
                let mut c_r: u128 = 1; // C(r, i)
                let mut pow2: u128 = 1;
                for i in 0..=(dim as u64).min(r) {
                    if i > 0 {
                        c_dim = c_dim * (dim as u128 - i as u128 + 1) / i as u128;
                        c_r = match c_r.checked_mul(r as u128 - i as u128 + 1) {
                            Some(x) => x / i as u128,
                            None => return u128::MAX,
                        };
                        pow2 = pow2.saturating_mul(2);
                    }
                    let term = pow2.saturating_mul(c_dim).saturating_mul(c_r);
                    total = total.saturating_add(term);
                }
                total
            }
            GraphKind::RegularTree { degree } => {
                if r == 0 {
                    return 1;
                }
                let branch = degree as u128 - 1;
                let Ok(exp) = u32::try_from(r) else {
                    return u128::MAX;
                };
                match branch.checked_pow(exp) {
                    Some(pw) => {
                        let shell = (pw - 1) / (branch - 1);
                        1u128.saturating_add((degree as u128).saturating_mul(shell))
                    }
                    None => u128::MAX,
                }
            }
        }
    }

    /// Base ball around `center`, sorted canonically.
    pub fn base_ball(&self, center: &BaseVertex, r: u64) -> Vec<BaseVertex> {
        let mut seen: HashSet<BaseVertex> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(center.clone());
        queue.push_back((center.clone(), 0u64));
        while let Some((v, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for w in self.base_neighbors(&v) {
                if seen.insert(w.clone()) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// Numerically tight `c_G`: the smallest `c` with `|B_G(r)| <= e^{c r}`
    /// for `1 <= r <= 64`. By submultiplicativity of ball sizes the bound
    /// then holds for every `r >= 1`.
    pub fn growth_constant(&self) -> f64 {
        (1..=64u64)
            .map(|r| (self.ball_count(r) as f64).ln() / r as f64)
            .fold(0.0, f64::max)
    }

    /// Degree-only growth constant `ln(Delta_G + 1)`, valid for any graph of
    /// maximum degree `Delta_G`.
    pub fn degree_growth_constant(&self) -> f64 {
        (self.max_degree() as f64 + 1.0).ln()
    }

    /// Asymptotic exponential growth rate of balls (0 for lattices).
    pub fn asymptotic_growth_rate(&self) -> f64 {
        match self.kind {
            GraphKind::IntegerLattice { .. } => 0.0,
            GraphKind::RegularTree { degree } => (degree as f64 - 1.0).ln(),
        }
    }

    fn in_window(&self, w: &Window, v: &ProductVertex) -> bool {
        self.is_valid_vertex(&v.base)
            && v.height.unsigned_abs() <= w.height
            && self.base_distance(&self.origin, &v.base) <= w.base_radius
    }

    /// Product-graph neighbours of `v` inside the window.
    pub fn neighbors(&self, w: &Window, v: &ProductVertex) -> Result<Vec<ProductVertex>> {
        if !self.in_window(w, v) {
            return Err(Error::OutsideWindow(v.to_string()));
        }
        let mut out = Vec::new();
        for b in self.base_neighbors(&v.base) {
            if self.base_distance(&self.origin, &b) <= w.base_radius {
                out.push(ProductVertex::new(b, v.height));
            }
        }
        for h in [v.height - 1, v.height + 1] {
            if h.unsigned_abs() <= w.height {
                out.push(ProductVertex::new(v.base.clone(), h));
            }
        }
        Ok(out)
    }

    /// `box ∩ window`.
    pub fn box_vertices(&self, w: &Window, b: &BoxRegion) -> BTreeSet<ProductVertex> {
        let lo = (b.center_height - b.radius as i64).max(-(w.height as i64));
        let hi = (b.center_height + b.radius as i64).min(w.height as i64);
        let mut out = BTreeSet::new();
        if lo > hi || !self.is_valid_vertex(&b.center_base) {
            return out;
        }
        let bases: Vec<_> = self
            .base_ball(&b.center_base, b.radius)
            .into_iter()
            .filter(|x| self.base_distance(&self.origin, x) <= w.base_radius)
            .collect();
        for h in lo..=hi {
            for x in &bases {
                out.insert(ProductVertex::new(x.clone(), h));
            }
        }
        out
    }

    /// Number of base edges with both endpoints in `B_G(r)`.
    pub fn ball_edge_count(&self, r: u64) -> u128 {
        match self.kind {
            GraphKind::IntegerLattice { dim: 1 } => 2 * r as u128,
            GraphKind::RegularTree { .. } => self.ball_count(r).saturating_sub(1),
            GraphKind::IntegerLattice { .. } => {
                let ball = self.base_ball(&self.origin, r);
                let mut twice = 0u128;
                for v in &ball {
                    for w in self.base_neighbors(v) {
                        if self.base_distance(&self.origin, &w) <= r {
                            twice += 1;
                        }
                    }
                }
                twice / 2
            }
        }
    }

    /// Edges of `G x Z` with both endpoints in `B_G(base_radius) x [-h, h]`.
    pub fn count_box_edges(&self, base_radius: u64, half_height: u64) -> u128 {
        let layers = 2 * half_height as u128 + 1;
        let vertical = self.ball_count(base_radius).saturating_mul(2 * half_height as u128);
        vertical.saturating_add(layers.saturating_mul(self.ball_edge_count(base_radius)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> GraphSpec {
        GraphSpec::lattice(1).unwrap()
    }

    fn bfs_ball_size(spec: &GraphSpec, r: u64) -> usize {
        spec.base_ball(spec.origin(), r).len()
    }

    #[test]
    fn graph_kind_text_round_trip() {
        for kind in [GraphKind::IntegerLattice { dim: 3 }, GraphKind::RegularTree { degree: 4 }] {
            assert_eq!(kind.to_string().parse::<GraphKind>().unwrap(), kind);
        }
        assert!("integer_lattice degree=3".parse::<GraphKind>().is_err());
        assert!("regular_tree".parse::<GraphKind>().is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GraphSpec::lattice(0).is_err());
        assert!(GraphSpec::tree(2).is_err());
        assert!(GraphSpec::with_origin(
            GraphKind::RegularTree { degree: 3 },
            BaseVertex::Tree(vec![0, 2])
        )
        .is_err());
        assert!(GraphSpec::with_origin(
            GraphKind::IntegerLattice { dim: 2 },
            BaseVertex::Lattice(vec![1])
        )
        .is_err());
    }

    #[test]
    fn ball_count_examples() {
        assert_eq!(z().ball_count(2), 5);
        assert_eq!(GraphSpec::tree(3).unwrap().ball_count(2), 10);
        for spec in [z(), GraphSpec::lattice(3).unwrap(), GraphSpec::tree(4).unwrap()] {
            assert_eq!(spec.ball_count(0), 1);
        }
    }

    #[test]
    fn ball_count_matches_bfs() {
        let specs = [
            (z(), 12),
            (GraphSpec::lattice(2).unwrap(), 12),
            (GraphSpec::lattice(3).unwrap(), 8),
            (GraphSpec::tree(3).unwrap(), 12),
            (GraphSpec::tree(5).unwrap(), 6),
        ];
        for (spec, rmax) in specs {
            for r in 0..=rmax {
                assert_eq!(spec.ball_count(r), bfs_ball_size(&spec, r) as u128, "{spec:?} r={r}");
            }
        }
    }

    #[test]
    fn neighbours_in_window() {
        let w = Window::new(10, 10);
        let o = ProductVertex::new(BaseVertex::Lattice(vec![0]), 0);
        let n = z().neighbors(&w, &o).unwrap();
        assert_eq!(n.len(), 4);
        let t = GraphSpec::tree(3).unwrap();
        let v = ProductVertex::new(BaseVertex::Tree(vec![1]), 2);
        assert_eq!(t.neighbors(&w, &v).unwrap().len(), 5);
        let w = Window::new(3, 4);
        let corner = ProductVertex::new(BaseVertex::Lattice(vec![3]), 4);
        let n = z().neighbors(&w, &corner).unwrap();
        assert_eq!(n.len(), 2);
        let out = ProductVertex::new(BaseVertex::Lattice(vec![4]), 0);
        assert!(matches!(z().neighbors(&w, &out), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn box_vertex_examples() {
        let w = Window::new(5, 5);
        let zero = BaseVertex::Lattice(vec![0]);
        assert_eq!(z().box_vertices(&w, &BoxRegion::new(zero.clone(), 0, 1)).len(), 9);
        let single = z().box_vertices(&w, &BoxRegion::new(BaseVertex::Lattice(vec![2]), -3, 0));
        assert_eq!(single.len(), 1);
        assert!(single.contains(&ProductVertex::new(BaseVertex::Lattice(vec![2]), -3)));
        // clipped at the top: heights {4, 5} x bases {-1, 0, 1}
        assert_eq!(z().box_vertices(&w, &BoxRegion::new(zero, 5, 1)).len(), 6);
    }

    #[test]
    fn box_edge_examples() {
        assert_eq!(z().count_box_edges(0, 1), 2);
        assert_eq!(z().count_box_edges(1, 0), 2);
        assert_eq!(z().count_box_edges(1, 1), 12);
    }

    #[test]
    fn growth_constants_bound_balls() {
        let t = GraphSpec::tree(3).unwrap();
        // |B(1)| = 4 > 3, so ln 3 is not a valid constant at r = 1
        assert!((t.growth_constant() - 4f64.ln()).abs() < 1e-12);
        assert!((z().growth_constant() - 3f64.ln()).abs() < 1e-12);
        for spec in [z(), t, GraphSpec::lattice(2).unwrap(), GraphSpec::tree(5).unwrap()] {
            let c = spec.growth_constant();
            assert!(c <= spec.degree_growth_constant() + 1e-12);
            for r in 1..=20u64 {
                assert!(spec.ball_count(r) as f64 <= (c * r as f64).exp() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn tree_distance_uses_common_prefix() {
        let t = GraphSpec::tree(3).unwrap();
        let a = BaseVertex::Tree(vec![0, 1, 1]);
        let b = BaseVertex::Tree(vec![0, 0]);
        assert_eq!(t.base_distance(&a, &b), 3);
        assert_eq!(t.base_distance(&a, &a), 0);
    }
}
