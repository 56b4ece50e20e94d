use std::fmt;
use std::str::FromStr;

use crate::bounds::{disconnection_lower_bound, entropy_series, stack_series, DEFAULT_CUTOFF};
use crate::engine::{
    bfs_components, cone_vertices, explore_cone_boundary, BondConfiguration, BondParams,
    ClusterIndex, LazyBonds, Status,
};
use crate::environment::{
    ConeSpec, Direction, Environment, MomentFunctions, Model, Phi, RadiusDistribution, Region,
};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, Window, WindowGraph};
use crate::rng::{bond_seed, env_seed, hash_words, CounterRng, TAG_AUX};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Identities,
    Statistics,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Suite::Oracle),
            "identities" => Ok(Suite::Identities),
            "statistics" => Ok(Suite::Statistics),
            other => Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Too few samples for the check to mean anything.
    LowPower,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::LowPower => "low-power",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Random instances per oracle comparison.
    pub instances: usize,
    /// Samples per statistical check.
    pub replicas: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            instances: 1000,
            replicas: 20_000,
            seed: 1,
        }
    }
}

/// Samples below which a 3-sigma band is too wide to detect a 1% bias.
pub const MIN_POWERED_REPLICAS: u64 = 10_000;

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match suite {
        Suite::Oracle => oracle_suite(opts),
        Suite::Identities => identities_suite(),
        Suite::Statistics => statistics_suite(opts),
    }
}

pub fn any_failed(checks: &[Check]) -> bool {
    checks.iter().any(|c| c.verdict == Verdict::Fail)
}

/// One aligned line per check.
pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| format!("{:<9} {:<width$}  {}\n", c.verdict.to_string(), c.name, c.detail))
        .collect()
}

/// Random small instance: base radius 2, heights [-5, 5], random overlap
/// region and random `(p, q)`.
struct Instance {
    graph: WindowGraph,
    region: Region,
    params: BondParams,
    seed: u64,
}

fn instance(spec: &GraphSpec, rng: &mut CounterRng, master: u64, i: u64) -> Result<Instance> {
    let window = Window::new(2, 5);
    let graph = WindowGraph::new(spec, window)?;
    let dist = RadiusDistribution::geometric(0.5)?;
    let env = Environment::sample_for_window(Model::Overlap, &dist, window, env_seed(master, i));
    let region = Region::build(&env, spec, window)?;
    let params = BondParams::new(rng.uniform(), rng.uniform())?;
    Ok(Instance {
        graph,
        region,
        params,
        seed: bond_seed(master, i, 0),
    })
}

fn backends() -> Result<Vec<GraphSpec>> {
    Ok(vec![GraphSpec::lattice(1)?, GraphSpec::lattice(2)?, GraphSpec::tree(3)?])
}

fn oracle_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = CounterRng::new(hash_words(&[opts.seed, TAG_AUX]));
    let mut checks = Vec::new();
    for spec in backends()? {
        let (mut partition_bad, mut explore_bad, mut monotone_bad) = (0, 0, 0);
        for i in 0..opts.instances as u64 {
            let inst = instance(&spec, &mut rng, opts.seed, i)?;
            let bonds = BondConfiguration::sample(&inst.graph, &inst.region, inst.params, inst.seed)?;
            let uf = ClusterIndex::build(&inst.graph, &bonds);
            let labels = bfs_components(&inst.graph, &bonds);
            let n = inst.graph.vertex_count() as u32;
            let same = (0..n).all(|u| {
                (0..n).all(|v| (labels[u as usize] == labels[v as usize]) == uf.connected(u, v))
            });
            partition_bad += (!same) as u32;

            let phi_here = Phi::new(&spec, 1.0)?;
            let start = ConeSpec::stack_at(Direction::Down, 0, 1, 1, &phi_here);
            let target = ConeSpec::stack_at(Direction::Up, 0, 1, 1, &phi_here);
            let state = explore_cone_boundary(&inst.graph, &bonds, &start, &target)?;
            let crossing = uf.sets_connected(
                &cone_vertices(&inst.graph, &start),
                &cone_vertices(&inst.graph, &target),
            );
            explore_bad += ((state.status() == Status::Failed) != crossing) as u32;

            let lower = LazyBonds::new(&inst.graph, &inst.region, inst.params, inst.seed);
            let raised = BondParams::new(
                (inst.params.p + 0.1).min(1.0),
                (inst.params.q + 0.1).min(1.0),
            )?;
            let upper = LazyBonds::new(&inst.graph, &inst.region, raised, inst.seed);
            let lo = ClusterIndex::build(&inst.graph, &lower);
            let hi = ClusterIndex::build(&inst.graph, &upper);
            let monotone = (0..n).all(|u| (0..n).all(|v| !lo.connected(u, v) || hi.connected(u, v)));
            monotone_bad += (!monotone) as u32;
        }
        let label = spec.kind().to_string();
        let n = opts.instances;
        checks.push(Check::new(
            &format!("union-find = bfs [{label}]"),
            partition_bad == 0,
            format!("{partition_bad} of {n} partitions differ"),
        ));
        checks.push(Check::new(
            &format!("exploration = crossing [{label}]"),
            explore_bad == 0,
            format!("{explore_bad} of {n} statuses differ"),
        ));
        checks.push(Check::new(
            &format!("monotone coupling [{label}]"),
            monotone_bad == 0,
            format!("{monotone_bad} of {n} pairs lost a connection"),
        ));
    }
    Ok(checks)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn identities_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // g identically zero: the series is a squared geometric sum
    let zero = MomentFunctions::from_values(vec![0, u32::MAX])?;
    let mut worst = 0.0f64;
    for n0 in [1u64, 2, 5, 10] {
        for c in [0.3, 1.0, 2.5] {
            let v = entropy_series(n0, c, 1.0, &zero, DEFAULT_CUTOFF)?;
            let m0 = n0.div_ceil(2) as f64;
            let closed = ((-c * m0).exp() / (1.0 - (-c).exp())).powi(2);
            worst = worst.max(relative_gap(v.value, closed));
        }
    }
    checks.push(Check::new(
        "entropy series, g = 0",
        worst < 1e-10,
        format!("max relative gap {worst:.2e}"),
    ));

    let mut worst_stack = f64::NEG_INFINITY;
    for spec in backends()? {
        for c in [0.5, 1.0, 2.0] {
            let phi = Phi::new(&spec, c)?;
            let level = 3;
            let s = stack_series(&phi, c, level, &spec, DEFAULT_CUTOFF)?;
            let alpha = c / 2.0;
            let closed = (alpha * level as f64).exp() * (-(c - alpha)).exp() / (1.0 - (-(c - alpha)).exp());
            // the integer inverse only rounds radii down, so the series sits below the closed form
            worst_stack = worst_stack.max(s.value / closed);
        }
    }
    checks.push(Check::new(
        "stack series <= closed form",
        worst_stack <= 1.0 + 1e-9,
        format!("max ratio {worst_stack:.6}"),
    ));

    let spot = [
        (disconnection_lower_bound(0.0, 5)?, 0.5),
        (disconnection_lower_bound(0.9, 12)?, 5e-13),
        (disconnection_lower_bound(0.5, 3)?, 0.0625),
    ];
    let spot_ok = spot.iter().all(|(a, b)| relative_gap(*a, *b) < 1e-12);
    checks.push(Check::new(
        "disconnection bound spot values",
        spot_ok,
        format!("{spot:?}"),
    ));

    let z = GraphSpec::lattice(1)?;
    checks.push(Check::new(
        "3x3 box edge count",
        z.count_box_edges(1, 1) == 12,
        format!("{}", z.count_box_edges(1, 1)),
    ));

    let mut ball_ok = true;
    for spec in backends()? {
        for r in 0..=6 {
            ball_ok &= spec.ball_count(r) == spec.base_ball(spec.origin(), r).len() as u128;
        }
    }
    checks.push(Check::new("ball counts = enumeration", ball_ok, "r <= 6".into()));
    Ok(checks)
}

fn statistics_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let guard = |check: Check| -> Check {
        if opts.replicas < MIN_POWERED_REPLICAS {
            Check {
                verdict: Verdict::LowPower,
                detail: format!(
                    "{} replicas < {MIN_POWERED_REPLICAS}; {}",
                    opts.replicas, check.detail
                ),
                ..check
            }
        } else {
            check
        }
    };
    let mut checks = Vec::new();

    let spec = GraphSpec::lattice(1)?;
    let window = Window::new(2, 2);
    let graph = WindowGraph::new(&spec, window)?;
    let dist = RadiusDistribution::constant(1)?;
    let env = Environment::sample(Model::Overlap, &dist, 4, 0);
    let region = Region::build(&env, &spec, window)?;
    let params = BondParams::new(0.3, 0.9)?;
    let mut open = vec![0u64; graph.edge_count()];
    for j in 0..opts.replicas {
        let bonds = BondConfiguration::sample(&graph, &region, params, bond_seed(opts.seed, 0, j))?;
        for (e, bit) in bonds.bits().iter().enumerate() {
            open[e] += *bit as u64;
        }
    }
    let n = opts.replicas.max(1) as f64;
    let mut worst = 0.0f64;
    for (e, &k) in open.iter().enumerate() {
        let pr = if region.contains_edge(&graph, e as u32) { 0.9 } else { 0.3 };
        let sigma = (pr * (1.0 - pr) / n).sqrt();
        worst = worst.max((k as f64 / n - pr).abs() / sigma);
    }
    // Bonferroni-style allowance for the number of edges
    let limit = 3.0 + (graph.edge_count() as f64).ln().sqrt();
    checks.push(guard(Check::new(
        "edge open frequencies",
        worst <= limit,
        format!("max |z| = {worst:.2} over {} edges (limit {limit:.2})", graph.edge_count()),
    )));

    let geo = RadiusDistribution::geometric(0.5)?;
    let mut rng = CounterRng::new(hash_words(&[opts.seed, 17]));
    let samples: Vec<f64> = (0..opts.replicas).map(|_| geo.sample(rng.uniform()) as f64).collect();
    let mean = samples.iter().sum::<f64>() / n;
    let se = (2.0f64 / n).sqrt(); // Var X = (1 - theta) / theta^2 = 2
    checks.push(guard(Check::new(
        "geometric(0.5) mean",
        (mean - 2.0).abs() <= 3.0 * se,
        format!("mean {mean:.4}, 3 sigma = {:.4}", 3.0 * se),
    )));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_pass() {
        let checks = run_suite(Suite::Identities, &VerifyOptions::default()).unwrap();
        assert!(!any_failed(&checks), "{}", render(&checks));
    }

    #[test]
    fn small_oracle_run_passes() {
        let opts = VerifyOptions {
            instances: 20,
            ..VerifyOptions::default()
        };
        let checks = run_suite(Suite::Oracle, &opts).unwrap();
        assert!(!any_failed(&checks), "{}", render(&checks));
    }

    #[test]
    fn tiny_statistics_run_reports_low_power() {
        let opts = VerifyOptions {
            replicas: 50,
            ..VerifyOptions::default()
        };
        let checks = run_suite(Suite::Statistics, &opts).unwrap();
        assert!(checks.iter().all(|c| c.verdict == Verdict::LowPower));
    }
}
