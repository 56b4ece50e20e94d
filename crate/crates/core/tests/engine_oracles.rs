mod common;

use common::{flood_labels, random_bits, Fixed};
use reinforced_perc::engine::{
    cone_vertices, explore_cone_boundary, run_exploration_sequence, BondConfiguration, BondOracle,
    BondParams, ClusterIndex, LazyBonds, Status,
};
use reinforced_perc::environment::{
    ConeSpec, Direction, Environment, Model, Phi, RadiusDistribution, Region,
};
use reinforced_perc::graph::{GraphSpec, Window, WindowGraph};
use reinforced_perc::rng::{bond_seed, env_seed, CounterRng};

fn specs() -> Vec<GraphSpec> {
    vec![
        GraphSpec::lattice(1).unwrap(),
        GraphSpec::lattice(2).unwrap(),
        GraphSpec::tree(3).unwrap(),
    ]
}

#[test]
fn union_find_partition_matches_flood_fill() {
    let mut rng = CounterRng::new(11);
    for spec in specs() {
        let graph = WindowGraph::new(&spec, Window::new(2, 5)).unwrap();
        for _ in 0..200 {
            let p = rng.uniform();
            let bonds = random_bits(&graph, &mut rng, p);
            let uf = ClusterIndex::build(&graph, &bonds);
            let labels = flood_labels(&graph, &bonds);
            let n = graph.vertex_count() as u32;
            for u in 0..n {
                assert_eq!(uf.root(u), uf.root(labels[u as usize]));
                for v in (u + 1)..n {
                    assert_eq!(uf.connected(u, v), labels[u as usize] == labels[v as usize]);
                }
            }
            let components = {
                let mut l = labels.clone();
                l.sort_unstable();
                l.dedup();
                l.len()
            };
            assert_eq!(uf.component_count(), components);
        }
    }
}

#[test]
fn exploration_status_matches_set_connectivity() {
    let mut rng = CounterRng::new(12);
    for spec in specs() {
        let graph = WindowGraph::new(&spec, Window::new(2, 5)).unwrap();
        let phi = Phi::new(&spec, 1.0).unwrap();
        for _ in 0..200 {
            let p = rng.uniform();
            let bonds = random_bits(&graph, &mut rng, p);
            let center = rng.below(3) as i64 - 1;
            let start = ConeSpec::stack_at(Direction::Down, center, 1, 1, &phi);
            let target = ConeSpec::stack_at(Direction::Up, center, 1, 1, &phi);
            let state = explore_cone_boundary(&graph, &bonds, &start, &target).unwrap();
            let labels = flood_labels(&graph, &bonds);
            let a = cone_vertices(&graph, &start);
            let b = cone_vertices(&graph, &target);
            let crossing = a
                .iter()
                .any(|&u| b.iter().any(|&v| labels[u as usize] == labels[v as usize]));
            assert_eq!(state.status() == Status::Failed, crossing);
        }
    }
}

#[test]
fn exploration_only_depends_on_examined_edges() {
    let mut rng = CounterRng::new(13);
    let spec = GraphSpec::lattice(1).unwrap();
    let graph = WindowGraph::new(&spec, Window::new(3, 6)).unwrap();
    let phi = Phi::new(&spec, 1.0).unwrap();
    let start = ConeSpec::stack_at(Direction::Down, 0, 1, 1, &phi);
    let target = ConeSpec::stack_at(Direction::Up, 0, 1, 1, &phi);
    for _ in 0..200 {
        let p = 0.2 + 0.6 * rng.uniform();
        let bonds = random_bits(&graph, &mut rng, p);
        let state = explore_cone_boundary(&graph, &bonds, &start, &target).unwrap();
        let mut examined = vec![false; graph.edge_count()];
        for &(e, open) in state.examined() {
            assert_eq!(open, bonds.is_open(e));
            examined[e as usize] = true;
        }
        let other = random_bits(&graph, &mut rng, p);
        let mixed = Fixed(
            (0..graph.edge_count())
                .map(|e| if examined[e] { bonds.0[e] } else { other.0[e] })
                .collect(),
        );
        let again = explore_cone_boundary(&graph, &mixed, &start, &target).unwrap();
        assert_eq!(again.status(), state.status());
        assert_eq!(again.examined(), state.examined());
    }
}

#[test]
fn exploration_extremes() {
    let spec = GraphSpec::lattice(1).unwrap();
    let graph = WindowGraph::new(&spec, Window::new(3, 6)).unwrap();
    let phi = Phi::new(&spec, 1.0).unwrap();
    let start = ConeSpec::stack_at(Direction::Down, 0, 1, 1, &phi);
    let target = ConeSpec::stack_at(Direction::Up, 0, 1, 1, &phi);

    let closed = Fixed(vec![false; graph.edge_count()]);
    let state = explore_cone_boundary(&graph, &closed, &start, &target).unwrap();
    assert_eq!(state.status(), Status::Succeeded);
    assert_eq!(state.cluster_size(), cone_vertices(&graph, &start).len());
    assert!(state.added().is_empty());

    let open = Fixed(vec![true; graph.edge_count()]);
    let state = explore_cone_boundary(&graph, &open, &start, &target).unwrap();
    assert_eq!(state.status(), Status::Failed);

    let overlapping = ConeSpec::stack_at(Direction::Up, -3, 1, 1, &phi);
    assert!(explore_cone_boundary(&graph, &open, &start, &overlapping).is_err());
}

#[test]
fn trace_has_one_line_per_examined_edge() {
    let spec = GraphSpec::lattice(1).unwrap();
    let graph = WindowGraph::new(&spec, Window::new(2, 4)).unwrap();
    let phi = Phi::new(&spec, 1.0).unwrap();
    let start = ConeSpec::stack_at(Direction::Down, 0, 1, 1, &phi);
    let target = ConeSpec::stack_at(Direction::Up, 0, 1, 1, &phi);
    let mut rng = CounterRng::new(5);
    let bonds = random_bits(&graph, &mut rng, 0.5);
    let state = explore_cone_boundary(&graph, &bonds, &start, &target).unwrap();
    let mut out = Vec::new();
    state.write_trace(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), state.examined().len());
    if let Some(last) = lines.last() {
        let status = match state.status() {
            Status::Failed => "failed",
            Status::Succeeded => "succeeded",
            Status::Running => unreachable!(),
        };
        assert!(last.ends_with(status), "{last}");
    }
}

#[test]
fn raising_parameters_never_disconnects() {
    let spec = GraphSpec::lattice(1).unwrap();
    let window = Window::new(4, 6);
    let graph = WindowGraph::new(&spec, window).unwrap();
    let dist = RadiusDistribution::geometric(0.5).unwrap();
    for i in 0..50 {
        let env = Environment::sample_for_window(Model::Overlap, &dist, window, env_seed(3, i));
        let region = Region::build(&env, &spec, window).unwrap();
        let seed = bond_seed(3, i, 0);
        let low = LazyBonds::new(&graph, &region, BondParams::new(0.3, 0.6).unwrap(), seed);
        let high = LazyBonds::new(&graph, &region, BondParams::new(0.45, 0.9).unwrap(), seed);
        for e in 0..graph.edge_count() as u32 {
            assert!(!low.is_open(e) || high.is_open(e));
        }
        let lo = ClusterIndex::build(&graph, &low);
        let hi = ClusterIndex::build(&graph, &high);
        let boundary: Vec<u32> = (0..graph.vertex_count() as u32)
            .filter(|&v| graph.is_boundary(v))
            .collect();
        let origin = [graph.origin()];
        assert!(!lo.sets_connected(&origin, &boundary) || hi.sets_connected(&origin, &boundary));
    }
}

#[test]
fn bond_configuration_is_reproducible_and_uses_regional_parameters() {
    let spec = GraphSpec::lattice(1).unwrap();
    let window = Window::new(3, 3);
    let graph = WindowGraph::new(&spec, window).unwrap();
    let dist = RadiusDistribution::constant(1).unwrap();
    let env = Environment::sample(Model::Overlap, &dist, 5, 0);
    let region = Region::build(&env, &spec, window).unwrap();
    let params = BondParams::new(0.0, 1.0).unwrap();
    let a = BondConfiguration::sample(&graph, &region, params, 9).unwrap();
    let b = BondConfiguration::sample(&graph, &region, params, 9).unwrap();
    assert_eq!(a, b);
    for e in 0..graph.edge_count() as u32 {
        assert_eq!(a.is_open(e), region.contains_edge(&graph, e));
    }
}

#[test]
fn sequence_with_closed_edges_stops_at_first_exploration() {
    let spec = GraphSpec::lattice(1).unwrap();
    let window = Window::new(2, 40);
    let graph = WindowGraph::new(&spec, window).unwrap();
    let dist = RadiusDistribution::constant(1).unwrap();
    let env = Environment::sample_for_window(Model::Stack, &dist, window, 1);
    let phi = Phi::new(&spec, 0.65).unwrap();
    let level = phi.level_floor(&dist);
    let closed = Fixed(vec![false; graph.edge_count()]);
    let out = run_exploration_sequence(&env, &graph, &closed, &phi, 1, level, 100, 10).unwrap();
    assert_eq!(out.t_plus, Some(1));

    let open = Fixed(vec![true; graph.edge_count()]);
    let out = run_exploration_sequence(&env, &graph, &open, &phi, 1, level, 100, 1000).unwrap();
    assert_eq!(out.t_plus, None);
    assert!(out.runs.iter().all(|r| r.status == Status::Failed));
    let ks: Vec<i64> = out.runs.iter().map(|r| r.k).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
}
