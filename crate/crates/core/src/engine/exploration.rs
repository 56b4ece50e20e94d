use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io;

use super::BondOracle;
use crate::environment::{stack_event_ak, ConeSpec, Direction, Environment, Phi};
use crate::error::{Error, Result};
use crate::graph::WindowGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Running,
    /// The explored cluster reached the target cone.
    Failed,
    /// Every boundary edge was examined without reaching the target.
    Succeeded,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Failed => "failed",
            Status::Succeeded => "succeeded",
        }
    }
}

/// Result of one cone-boundary exploration.
#[derive(Debug, Clone)]
pub struct ExplorationState {
    member: Vec<bool>,
    start_size: usize,
    added: Vec<u32>,
    examined: Vec<(u32, bool)>,
    status: Status,
    censored: bool,
}

impl ExplorationState {
    pub fn status(&self) -> Status {
        self.status
    }

    /// Whether a vertex joined the cluster on the window boundary, so the
    /// infinite-volume exploration could have continued outside.
    pub fn censored(&self) -> bool {
        self.censored
    }

    pub fn in_cluster(&self, v: u32) -> bool {
        self.member[v as usize]
    }

    pub fn cluster_size(&self) -> usize {
        self.start_size + self.added.len()
    }

    pub fn start_size(&self) -> usize {
        self.start_size
    }

    /// Vertices outside the start cone that joined the cluster, in order.
    pub fn added(&self) -> &[u32] {
        &self.added
    }

    /// `(edge id, open)` for every examined edge, in examination order.
    pub fn examined(&self) -> &[(u32, bool)] {
        &self.examined
    }

    /// One `step edge open|closed status` line per examined edge; the status
    /// is the state after that step.
    pub fn write_trace<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        let last = self.examined.len().saturating_sub(1);
        for (step, &(edge, open)) in self.examined.iter().enumerate() {
            let status = if step == last { self.status } else { Status::Running };
            writeln!(
                out,
                "{step} {edge} {} {}",
                if open { "open" } else { "closed" },
                status.label()
            )?;
        }
        Ok(())
    }
}

/// Rejects cones that share a layer of the window. Both cones contain the
/// axis on each of their layers, so sharing a layer means intersecting.
pub fn check_disjoint(graph: &WindowGraph, a: &ConeSpec, b: &ConeSpec) -> Result<()> {
    let h = graph.window().height as i64;
    if (-h..=h).any(|z| a.radius_at(z).is_some() && b.radius_at(z).is_some()) {
        return Err(Error::OverlappingCones);
    }
    Ok(())
}

/// Window vertices of a cone.
pub fn cone_vertices(graph: &WindowGraph, cone: &ConeSpec) -> Vec<u32> {
    let w = graph.window();
    let mut out = Vec::new();
    for h in -(w.height as i64)..=w.height as i64 {
        if let Some(r) = cone.radius_at(h) {
            for d in 0..=r.min(w.base_radius) {
                out.extend(graph.sphere(d).iter().map(|&b| graph.vertex_id(b, h)));
            }
        }
    }
    out
}

/// Explores the open cluster of `start` one edge at a time, always revealing
/// the least-indexed unexamined edge leaving the cluster, and stops as soon
/// as the cluster meets `target`.
pub fn explore_cone_boundary<B: BondOracle>(
    graph: &WindowGraph,
    bonds: &B,
    start: &ConeSpec,
    target: &ConeSpec,
) -> Result<ExplorationState> {
    check_disjoint(graph, start, target)?;
    let mut member = vec![false; graph.vertex_count()];
    let seeds = cone_vertices(graph, start);
    if seeds.is_empty() {
        return Err(Error::Precondition("start cone does not meet the window".into()));
    }
    for &v in &seeds {
        member[v as usize] = true;
    }
    let mut heap = BinaryHeap::new();
    for &v in &seeds {
        for &(w, e) in graph.adjacent(v) {
            if !member[w as usize] {
                heap.push(Reverse(e));
            }
        }
    }

    let mut added = Vec::new();
    let mut examined = Vec::new();
    let mut censored = false;
    let mut status = Status::Running;
    while let Some(Reverse(e)) = heap.pop() {
        let edge = graph.edge(e);
        let (lo_in, hi_in) = (member[edge.lo as usize], member[edge.hi as usize]);
        if lo_in && hi_in {
            continue;
        }
        let open = bonds.is_open(e);
        examined.push((e, open));
        if !open {
            continue;
        }
        let w = if lo_in { edge.hi } else { edge.lo };
        member[w as usize] = true;
        added.push(w);
        censored |= graph.is_boundary(w);
        if target.contains_at(graph.dist(w) as u64, graph.height(w)) {
            status = Status::Failed;
            break;
        }
        for &(x, f) in graph.adjacent(w) {
            if !member[x as usize] {
                heap.push(Reverse(f));
            }
        }
    }
    if status == Status::Running {
        status = Status::Succeeded;
    }
    Ok(ExplorationState {
        member,
        start_size: seeds.len(),
        added,
        examined,
        status,
        censored,
    })
}

/// One exploration inside a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationRun {
    /// Environment index `k` whose cones were used.
    pub k: i64,
    pub status: Status,
    pub censored: bool,
    pub examined: usize,
    pub added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    /// Ordinal (starting at 1) of the first successful exploration, or
    /// `None` when no admissible index was left in the window.
    pub t_plus: Option<usize>,
    pub runs: Vec<ExplorationRun>,
    /// Indices `1 <= k <= max_k` with `A_k` whose cones fit in the window.
    pub index_set: Vec<i64>,
    /// Some exploration left the window, so the next index was chosen from
    /// the visible part of the cluster only.
    pub censored: bool,
}

/// Repeats cone explorations upward along the stack: each next index is the
/// least admissible `k` whose down-cone contains the previous down-cone and
/// everything explored so far. At most `max_runs` explorations are made;
/// `t_plus` is `None` when they all fail.
#[allow(clippy::too_many_arguments)]
pub fn run_exploration_sequence<B: BondOracle>(
    env: &Environment,
    graph: &WindowGraph,
    bonds: &B,
    phi: &Phi,
    l0: u64,
    level_floor: u64,
    max_k: u64,
    max_runs: usize,
) -> Result<SequenceOutcome> {
    let h = graph.window().height as i64;
    let top = (max_k.min(env.half_range())) as i64;
    let mut index_set = Vec::new();
    for k in 1..=top {
        let z = env.stack_center(k).expect("k within range");
        let fits = z + l0 as i64 <= h && z - (l0 as i64) >= -h;
        if fits && stack_event_ak(env, phi, k, l0, level_floor)? {
            index_set.push(k);
        }
    }
    if index_set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }

    let mut runs = Vec::new();
    let mut censored = false;
    let mut required_tip = i64::MIN;
    let mut last_k = 0i64;
    loop {
        let next = if runs.len() < max_runs {
            index_set.iter().copied().find(|&k| {
                k > last_k && env.stack_center(k).expect("in range") - l0 as i64 >= required_tip
            })
        } else {
            None
        };
        let Some(k) = next else {
            return Ok(SequenceOutcome {
                t_plus: None,
                runs,
                index_set,
                censored,
            });
        };
        let start = ConeSpec::stack(Direction::Down, env, k, l0, level_floor, phi)?;
        let target = ConeSpec::stack(Direction::Up, env, k, l0, level_floor, phi)?;
        let state = explore_cone_boundary(graph, bonds, &start, &target)?;
        censored |= state.censored();
        runs.push(ExplorationRun {
            k,
            status: state.status(),
            censored: state.censored(),
            examined: state.examined().len(),
            added: state.added().len(),
        });
        if state.status() == Status::Succeeded {
            return Ok(SequenceOutcome {
                t_plus: Some(runs.len()),
                runs,
                index_set,
                censored,
            });
        }
        // (x, h) lies in the down-cone with tip t iff t - h >= ceil(phi(d)) - L - 1
        for &v in state.added() {
            let need = phi.min_level_for_radius(graph.dist(v) as u64) as i64 - level_floor as i64 - 1;
            required_tip = required_tip.max(graph.height(v) + need.max(0));
        }
        last_k = k;
    }
}
