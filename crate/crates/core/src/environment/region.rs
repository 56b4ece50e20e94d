use super::{Environment, Model, HORIZON_EPS};
use crate::error::{Error, Result};
use crate::graph::{BoxRegion, GraphSpec, ProductVertex, Window, WindowGraph};

/// A box centred on the origin axis: `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisBox {
    /// Index `n` of the radius `X_n` that produced the box.
    pub index: i64,
    pub center: i64,
    pub radius: u64,
}

impl AxisBox {
    pub fn to_box(&self, spec: &GraphSpec) -> BoxRegion {
        BoxRegion::new(spec.origin().clone(), self.center, self.radius)
    }

    fn heights(&self) -> (i64, i64) {
        (self.center - self.radius as i64, self.center + self.radius as i64)
    }
}

/// Reinforced region `R` restricted to a window.
///
/// Every box is centred on the axis, so `R` at height `h` is a base ball
/// whose radius is the largest radius among boxes covering `h`. Membership
/// is a single table lookup.
#[derive(Debug, Clone)]
pub struct Region {
    spec: GraphSpec,
    window: Window,
    boxes: Vec<AxisBox>,
    /// Per window height, the covering radius or -1.
    cover: Vec<i64>,
}

impl Region {
    /// Region with no boxes (homogeneous percolation).
    pub fn empty(spec: &GraphSpec, window: Window) -> Self {
        Self {
            spec: spec.clone(),
            window,
            boxes: Vec::new(),
            cover: vec![-1; 2 * window.height as usize + 1],
        }
    }

    pub fn build(env: &Environment, spec: &GraphSpec, window: Window) -> Result<Self> {
        let h = window.height as i64;
        let have = env.half_range();
        let candidates: Vec<AxisBox> = match env.model() {
            Model::Overlap => {
                let need = window.height + env.distribution().coverage_horizon(HORIZON_EPS);
                if have < need {
                    return Err(Error::InsufficientRange { have, need });
                }
                env.iter()
                    .map(|(n, x)| AxisBox {
                        index: n,
                        center: n,
                        radius: x,
                    })
                    .collect()
            }
            Model::Stack => {
                let z = env.stack_centers();
                let n = have as usize;
                let top = z[2 * n] + env.radius(have as i64).unwrap() as i64;
                let bottom = z[0] - env.radius(-(have as i64)).unwrap() as i64;
                let deficit = (h + 1 - top).max(h + 1 + bottom).max(0);
                if deficit > 0 {
                    // every further box adds at least 2 to the stack height
                    let need = have + (deficit as u64).div_ceil(2);
                    return Err(Error::InsufficientRange { have, need });
                }
                env.iter()
                    .zip(z)
                    .map(|((n, x), c)| AxisBox {
                        index: n,
                        center: c,
                        radius: x,
                    })
                    .collect()
            }
        };

        let mut region = Self::empty(spec, window);
        for b in candidates {
            let (lo, hi) = b.heights();
            if hi < -h || lo > h {
                continue;
            }
            for y in lo.max(-h)..=hi.min(h) {
                let slot = &mut region.cover[(y + h) as usize];
                *slot = (*slot).max(b.radius as i64);
            }
            region.boxes.push(b);
        }
        Ok(region)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Boxes that intersect the window.
    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    /// Largest box radius covering height `h`, if any.
    pub fn cover_radius(&self, h: i64) -> Option<u64> {
        let idx = h + self.window.height as i64;
        if idx < 0 || idx as usize >= self.cover.len() {
            return None;
        }
        let r = self.cover[idx as usize];
        (r >= 0).then_some(r as u64)
    }

    /// Membership of a vertex at base distance `dist` and height `h`.
    #[inline]
    pub fn contains_at(&self, dist: u64, h: i64) -> bool {
        self.cover_radius(h).is_some_and(|r| dist <= r)
    }

    pub fn contains(&self, v: &ProductVertex) -> bool {
        self.contains_at(self.spec.base_distance(self.spec.origin(), &v.base), v.height)
    }

    /// An edge is reinforced iff both endpoints lie in the box union.
    pub fn edge_in_region(&self, a: &ProductVertex, b: &ProductVertex) -> bool {
        self.contains(a) && self.contains(b)
    }

    pub fn contains_vertex(&self, g: &WindowGraph, v: u32) -> bool {
        self.contains_at(g.dist(v) as u64, g.height(v))
    }

    pub fn contains_edge(&self, g: &WindowGraph, e: u32) -> bool {
        let edge = g.edge(e);
        self.contains_vertex(g, edge.lo) && self.contains_vertex(g, edge.hi)
    }

    /// Number of window vertices inside `R`.
    pub fn covered_vertices(&self, g: &WindowGraph) -> u64 {
        let rho = self.window.base_radius;
        let mut shells = vec![0u64; rho as usize + 2];
        for d in 0..=rho {
            shells[d as usize + 1] = shells[d as usize] + g.sphere(d).len() as u64;
        }
        self.cover
            .iter()
            .map(|&r| if r < 0 { 0 } else { shells[(r as u64).min(rho) as usize + 1] })
            .sum()
    }

    /// Fraction of window vertices inside `R`.
    pub fn coverage(&self, g: &WindowGraph) -> f64 {
        self.covered_vertices(g) as f64 / g.vertex_count() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::RadiusDistribution;
    use crate::graph::BaseVertex;

    fn z() -> GraphSpec {
        GraphSpec::lattice(1).unwrap()
    }

    fn pv(x: i64, h: i64) -> ProductVertex {
        ProductVertex::new(BaseVertex::Lattice(vec![x]), h)
    }

    #[test]
    fn overlap_unit_radii_give_a_slab() {
        let d = RadiusDistribution::constant(1).unwrap();
        let w = Window::new(4, 6);
        let env = Environment::sample_for_window(Model::Overlap, &d, w, 1);
        let r = Region::build(&env, &z(), w).unwrap();
        for h in -6..=6 {
            assert!(r.contains(&pv(0, h)));
            assert!(r.contains(&pv(1, h)));
            assert!(r.contains(&pv(-1, h)));
            assert!(!r.contains(&pv(2, h)));
        }
        let g = WindowGraph::new(&z(), w).unwrap();
        assert_eq!(r.covered_vertices(&g), 3 * 13);
    }

    #[test]
    fn stack_second_box_position() {
        let d = RadiusDistribution::constant(1).unwrap();
        let env = Environment::from_radii(Model::Stack, &d, 0, vec![1, 1, 2, 1, 1]).unwrap();
        let w = Window::new(3, 3);
        let r = Region::build(&env, &z(), w).unwrap();
        let b1 = r.boxes().iter().find(|b| b.index == 1).unwrap();
        assert_eq!((b1.center, b1.radius), (3, 1));
        assert!(r.contains(&pv(0, 2)));
        assert!(r.contains(&pv(0, 3)));
        assert!(r.contains(&pv(2, 0)));
        assert!(!r.contains(&pv(2, 3)));
    }

    #[test]
    fn insufficient_range_is_reported() {
        let d = RadiusDistribution::constant(1).unwrap();
        let env = Environment::sample(Model::Overlap, &d, 3, 0);
        let err = Region::build(&env, &z(), Window::new(2, 5)).unwrap_err();
        assert_eq!(err, Error::InsufficientRange { have: 3, need: 6 });
        let env = Environment::sample(Model::Stack, &d, 1, 0);
        // top of box 1 is at height 3; need height > 8
        let err = Region::build(&env, &z(), Window::new(2, 8)).unwrap_err();
        assert_eq!(err, Error::InsufficientRange { have: 1, need: 4 });
    }

    #[test]
    fn edge_membership_needs_both_endpoints() {
        let d = RadiusDistribution::constant(1).unwrap();
        let env = Environment::from_radii(Model::Overlap, &d, 0, vec![1; 41]).unwrap();
        let mut radii = vec![1; 41];
        radii[20] = 2;
        radii[21] = 3;
        let env2 = Environment::from_radii(Model::Overlap, &d, 0, radii).unwrap();
        let w = Window::new(5, 5);
        let r = Region::build(&env, &z(), w).unwrap();
        assert!(r.edge_in_region(&pv(0, 0), &pv(1, 0)));
        assert!(!r.edge_in_region(&pv(1, 0), &pv(2, 0)));
        // (3, -1) lies only in B(1, 3), the box of X_1
        let r2 = Region::build(&env2, &z(), w).unwrap();
        assert!(r2.edge_in_region(&pv(2, -1), &pv(3, -1)));
    }
}
