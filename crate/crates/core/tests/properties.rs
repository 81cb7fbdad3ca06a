//! Invariants of the graph, community and engine modules, checked against
//! brute-force oracles on random inputs.

use louvain::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random weighted graph with optional self-loops, as raw edges.
fn random_edges(rng: &mut ChaCha8Rng, n: usize) -> EdgeList {
    let p = rng.random_range(0.05..0.5);
    let mut e = EdgeList::new(n);
    for u in 0..n {
        for v in u..n {
            let roll: f64 = rng.random();
            if (u == v && roll < 0.1) || (u != v && roll < p) {
                let w = if rng.random::<bool>() { 1.0 } else { rng.random_range(0.1..4.0) };
                e.push(u, v, w);
            }
        }
    }
    // At least one edge so the total is positive.
    if e.entries.is_empty() {
        e.push(0, n - 1, 1.0);
    }
    e
}

fn random_graph(seed: u64, max_n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    build_graph(&random_edges(&mut rng, n), BuildOptions::default()).unwrap()
}

fn random_assignment(rng: &mut ChaCha8Rng, n: usize) -> Assignment {
    let k = rng.random_range(1..=n);
    Assignment::from_labels((0..n).map(|_| rng.random_range(0..k)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn build_is_symmetric_for_any_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..40);
        let mut edges = random_edges(&mut rng, n);
        let g1 = build_graph(&edges, BuildOptions::default()).unwrap();
        // Reverse some edges and permute the list.
        let mut srng = ChaCha8Rng::seed_from_u64(shuffle);
        for e in edges.entries.iter_mut() {
            if srng.random::<bool>() {
                *e = (e.1, e.0, e.2);
            }
        }
        for i in (1..edges.entries.len()).rev() {
            let j = srng.random_range(0..=i);
            edges.entries.swap(i, j);
        }
        let g2 = build_graph(&edges, BuildOptions::default()).unwrap();
        prop_assert!(g2.check_invariants().is_ok());
        prop_assert_eq!(g1.offsets(), g2.offsets());
        prop_assert_eq!(g1.targets(), g2.targets());
        for (a, b) in g1.weights().iter().zip(g2.weights()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        let sum: f64 = g2.degrees().iter().sum();
        prop_assert!((sum - g2.total()).abs() <= 1e-12 * g2.total());
    }

    #[test]
    fn matrix_market_round_trip(seed in any::<u64>()) {
        let g = random_graph(seed, 40);
        let mut buf = Vec::new();
        write_matrix_market(&g, &mut buf).unwrap();
        let back = build_graph(&parse_matrix_market(&buf[..]).unwrap(), BuildOptions::default()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn modularity_matches_oracle_and_range(seed in any::<u64>()) {
        let g = random_graph(seed, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let a = random_assignment(&mut rng, g.n());
        let q = modularity(&g, &a).unwrap();
        let oracle = modularity_bruteforce(&g, &a).unwrap();
        prop_assert!((q - oracle).abs() <= 1e-12);
        prop_assert!((-0.5 - 1e-12..=1.0).contains(&q));
        // Relabeling leaves Q untouched.
        prop_assert!((q - modularity(&g, &a.normalize().0).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn single_relabel_still_matches_oracle(seed in any::<u64>()) {
        let g = random_graph(seed, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let mut a = random_assignment(&mut rng, g.n());
        let u = rng.random_range(0..g.n());
        a.labels_mut()[u] = rng.random_range(0..g.n());
        prop_assert!((modularity(&g, &a).unwrap() - modularity_bruteforce(&g, &a).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn aggregation_preserves_modularity_and_weight(seed in any::<u64>()) {
        let g = random_graph(seed, 48);
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        let a = random_assignment(&mut rng, g.n());
        let (g2, mapping) = aggregate(&g, &a);
        prop_assert!(g2.check_invariants().is_ok());
        prop_assert_eq!(g2.n(), a.community_count());
        prop_assert!(mapping.same_partition(&a));
        let q2 = modularity(&g2, &singleton_assignment(g2.n())).unwrap();
        prop_assert!((q2 - modularity(&g, &a).unwrap()).abs() <= 1e-12);
        prop_assert!((g2.total() - g.total()).abs() <= 1e-9);
    }

    #[test]
    fn normalize_is_idempotent(labels in prop::collection::vec(0usize..1000, 1..50)) {
        let (a, c) = Assignment::from_labels(labels.clone()).normalize();
        prop_assert_eq!(a.normalize(), (a.clone(), c));
        prop_assert!(a.labels().iter().all(|&l| l < c));
        prop_assert!(a.same_partition(&Assignment::from_labels(labels)));
    }
}

#[test]
fn incremental_aggregates_match_recomputation() {
    for seed in 0..50 {
        let g = random_graph(seed, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1000);
        let mut a = random_assignment(&mut rng, g.n());
        let mut agg = community_aggregates(&g, &a);
        for _ in 0..200 {
            let u = rng.random_range(0..g.n());
            let to = rng.random_range(0..g.n());
            let from = a.get(u);
            let scan = scan_neighbor_communities(&g, &a, u);
            let k = |c: usize| scan.get(&c).copied().unwrap_or(0.0);
            agg.apply_move(from, to, g.degree(u), g.self_loop(u), k(from), k(to));
            a.labels_mut()[u] = to;
        }
        let fresh = community_aggregates(&g, &a);
        for c in 0..g.n() {
            assert!((agg.sigma_tot[c] - fresh.sigma_tot[c]).abs() <= 1e-9);
            assert!((agg.sigma_in[c] - fresh.sigma_in[c]).abs() <= 1e-9);
            assert_eq!(agg.sizes[c], fresh.sizes[c]);
        }
        let total: f64 = fresh.sigma_tot.iter().sum();
        assert!((total - g.total()).abs() <= 1e-9 * g.total());
        for c in 0..g.n() {
            assert!(fresh.sigma_in[c] >= 0.0 && fresh.sigma_in[c] <= fresh.sigma_tot[c] + 1e-12);
        }
    }
}

#[test]
fn flatten_agrees_with_per_vertex_walk() {
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut width = rng.random_range(5..40);
        let n = width;
        let mut levels = Vec::new();
        for _ in 0..3 {
            let k = rng.random_range(1..=width);
            // Surjective onto [0, k): the first k entries cover every label.
            let mut labels: Vec<usize> = (0..width).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
            for i in (1..width).rev() {
                let j = rng.random_range(0..=i);
                labels.swap(i, j);
            }
            levels.push(Assignment::from_labels(labels));
            width = k;
        }
        let d = Dendrogram {
            levels: levels.clone(),
            per_level_q: vec![0.0; 3],
        };
        let flat = d.flatten().unwrap();
        for u in 0..n {
            let mut x = u;
            for level in &levels {
                x = level.labels()[x];
            }
            assert_eq!(flat.get(u), x);
        }
        assert_eq!(flat.community_count(), levels[2].community_count());
    }
}

#[test]
fn async_moves_never_lower_modularity() {
    // Replays the asynchronous sweep by hand, recomputing Q after each move.
    for seed in 0..20 {
        let g = random_graph(seed, 24);
        let mut a = singleton_assignment(g.n());
        for _ in 0..5 {
            for u in 0..g.n() {
                let agg = community_aggregates(&g, &a);
                let mut scratch = NeighborScratch::new(g.n());
                scratch.scan(&g, u, a.get(u), |v| a.get(v));
                let (to, dq) = best_move(&scratch, &agg, g.degree(u), a.get(u), g.total());
                if to != a.get(u) {
                    assert!(dq > 0.0);
                    let before = modularity_bruteforce(&g, &a).unwrap();
                    a.labels_mut()[u] = to;
                    let after = modularity_bruteforce(&g, &a).unwrap();
                    assert!(after >= before - 1e-12);
                    assert!((after - before - dq).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn async_gain_matches_realized_modularity() {
    for seed in 0..30 {
        let g = random_graph(seed, 60);
        let mut a = singleton_assignment(g.n());
        let q0 = modularity(&g, &a).unwrap();
        let out = local_moving(&g, &mut a, 1e-6, Mode::Async, 500);
        let q1 = modularity(&g, &a).unwrap();
        assert!((q1 - q0 - out.gain).abs() <= 1e-6);
    }
}

#[test]
fn sequential_engine_is_deterministic() {
    for seed in 0..10 {
        let g = random_graph(seed, 64);
        for mode in [Mode::Async, Mode::Sync] {
            let cfg = Config { mode, ..Default::default() };
            let (d1, r1) = louvain(&g, &cfg).unwrap();
            let (d2, r2) = louvain(&g, &cfg).unwrap();
            assert_eq!(d1, d2);
            assert_eq!(r1.final_q.to_bits(), r2.final_q.to_bits());
        }
    }
}

#[test]
fn dendrogram_shape_and_final_q() {
    for seed in 0..30 {
        let g = random_graph(seed, 64);
        for mode in [Mode::Async, Mode::Sync] {
            let cfg = Config { mode, ..Default::default() };
            let (d, r) = louvain(&g, &cfg).unwrap();
            let mut width = g.n();
            for level in &d.levels {
                assert_eq!(level.len(), width);
                width = level.community_count();
            }
            for w in d.per_level_q.windows(2) {
                assert!(w[1] >= w[0] - 1e-9);
            }
            let flat = d.flatten().unwrap();
            assert!((r.final_q - modularity_bruteforce(&g, &flat).unwrap()).abs() <= 1e-9);
            assert!(r.total_passes <= cfg.max_passes);
            assert!(r.passes.iter().all(|p| p.iterations <= cfg.max_iterations_per_pass));
        }
    }
}

#[test]
fn caps_truncate_but_stay_valid() {
    let g = fixtures::graph(&fixtures::planted_partition(6, 30, 0.3, 0.02, 3));
    let cfg = Config {
        max_passes: 1,
        max_iterations_per_pass: 1,
        tolerance_initial: 1e-9,
        ..Default::default()
    };
    let (d, r) = louvain(&g, &cfg).unwrap();
    assert_eq!(r.total_passes, 1);
    assert!(r.pass_cap_hit);
    assert!(r.passes[0].iteration_cap_hit);
    let flat = d.flatten().unwrap();
    assert!((r.final_q - modularity(&g, &flat).unwrap()).abs() <= 1e-9);
}

#[test]
fn self_loop_insertion_keeps_results_consistent() {
    let edges = fixtures::ring_of_cliques(4, 6);
    let opts = BuildOptions {
        add_self_loops: true,
        ..Default::default()
    };
    let g = build_graph(&edges, opts).unwrap();
    assert_eq!(graph_stats(&g).undirected_edges, 2 * (6 * 6 + 6) + 24);
    let (d, r) = louvain(&g, &Config::default()).unwrap();
    assert!((r.final_q - modularity_bruteforce(&g, &d.flatten().unwrap()).unwrap()).abs() <= 1e-9);
}
