use proptest::prelude::*;

use mcbsim::broadcast::{broadcast_over_packing, downcast_single_tree, MessageSet};
use mcbsim::cobra::{coverage_report, run_multi_cobra, CobraConfig};
use mcbsim::graph::{bfs, bitset_diameter, distances, erdos_renyi, random_tree};
use mcbsim::hardness::{
    bandwidth_to_congest, brute_force_set_splitting, build_setsplit_reduction, check_certificate,
    decide_saturation_round4, flow_within, random_bandwidth_graph, random_instance,
    time_expanded_saturation, BandwidthGraph,
};
use mcbsim::io::{
    format_bandwidth_graph, format_edge_list, parse_bandwidth_graph, parse_edge_list,
};
use mcbsim::packing::{build_tree_packing, verify_packing};
use mcbsim::spectral::{weyl_shift_check, DiagonalPerturbation};
use mcbsim::{Graph, RngSeed};

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..40, 0.05f64..0.9, any::<u64>())
        .prop_map(|(n, p, seed)| erdos_renyi(n, p, RngSeed(seed)).unwrap())
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    small_graph().prop_filter("connected", |g| g.is_connected() && g.node_count() > 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake(g in small_graph()) {
        let degrees: usize = (0..g.node_count()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degrees, 2 * g.edge_count());
        prop_assert_eq!(g.directed_edge_count(), degrees);
    }

    #[test]
    fn regularize_equalizes_slots(g in connected_graph()) {
        let r = g.regularize().unwrap();
        let max = g.degree_stats().max;
        for v in 0..g.node_count() {
            prop_assert_eq!(r.slot_count(v), max);
            prop_assert_eq!(r.neighbors(v), g.neighbors(v));
            prop_assert_eq!(r.self_loops(v), max - g.degree(v));
        }
    }

    #[test]
    fn bfs_distances_are_a_metric_on_edges(g in connected_graph(), root in any::<prop::sample::Index>()) {
        let root = root.index(g.node_count());
        let d = distances(&g, root);
        let tree = bfs(&g, root).unwrap();
        prop_assert_eq!(d[root], 0);
        for (u, v, _) in g.edges() {
            prop_assert!(d[u].abs_diff(d[v]) <= 1);
        }
        for (p, c) in tree.edges() {
            prop_assert_eq!(d[c], d[p] + 1);
        }
        prop_assert_eq!(tree.max_depth(), *d.iter().max().unwrap() as usize);
        prop_assert!(tree.max_depth() <= bitset_diameter(&g).unwrap());
    }

    #[test]
    fn pipeline_law(n in 2usize..120, seed in any::<u64>(), root in any::<prop::sample::Index>(), k in 1usize..60) {
        let tree = bfs(&random_tree(n, RngSeed(seed)).unwrap(), root.index(n)).unwrap();
        prop_assert_eq!(downcast_single_tree(&tree, k).unwrap(), tree.max_depth() + k - 1);
    }

    #[test]
    fn weyl_shift_bound(g in small_graph(), eps in 0.0f64..1.0, seed in any::<u64>()) {
        prop_assume!(g.degree_stats().min > 0);
        use rand::Rng;
        let mut rng = RngSeed(seed).rng();
        let entries = (0..g.node_count()).map(|_| rng.random_range(0.0..=eps)).collect();
        let e = DiagonalPerturbation::new(entries, eps).unwrap();
        prop_assert!(weyl_shift_check(&g, &e).unwrap().bound_ok);
    }

    #[test]
    fn edge_list_round_trip(g in small_graph(), loops in prop::collection::vec(0u32..4, 40)) {
        let g = g.with_self_loops(loops[..g.node_count()].to_vec()).unwrap();
        prop_assert_eq!(parse_edge_list(&format_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn bandwidth_graph_round_trip(n in 2usize..10, p in 0.0f64..0.7, b in 1u64..6, seed in any::<u64>()) {
        let bg = random_bandwidth_graph(n, p, b, RngSeed(seed)).unwrap();
        prop_assert_eq!(parse_bandwidth_graph(&format_bandwidth_graph(&bg)).unwrap(), bg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn packing_and_broadcast(n in 12usize..50, seed in any::<u64>(), k_mult in 1usize..6) {
        let g = erdos_renyi(n, 0.5, RngSeed(seed)).unwrap();
        prop_assume!(g.is_connected());
        let reg = g.regularize().unwrap();
        let delta = g.degree_stats().min;
        let a = run_multi_cobra(&reg, 0, &CobraConfig::new(delta), RngSeed(seed)).unwrap();
        prop_assert!(a.max_edge_weight() <= 4 * a.phases_run());
        prop_assume!(coverage_report(&a).iter().all(|c| c.covered));
        let tp = build_tree_packing(&reg, &a, 0).unwrap();
        let report = verify_packing(&tp, &g);
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        prop_assert_eq!(tp.size, delta);

        let k = k_mult * delta + seed as usize % delta;
        let trace = broadcast_over_packing(&g, &tp, MessageSet::new(k).unwrap(), true).unwrap();
        prop_assert!(trace.is_saturated());
        prop_assert!(trace.max_edge_load <= 1);
        let floor = bitset_diameter(&g).unwrap().max(k.div_ceil(delta));
        prop_assert!(trace.total_rounds >= floor);
        let mut per_edge = std::collections::HashSet::new();
        for s in trace.sends.as_ref().unwrap() {
            prop_assert!(g.multiplicity(s.edge_u as usize, s.edge_v as usize) > 0);
            prop_assert!(per_edge.insert((s.round, s.edge_u, s.edge_v)));
        }
    }

    #[test]
    fn time_expanded_saturation_is_tight(n in 2usize..8, p in 0.0f64..0.6, b in 1u64..5, seed in any::<u64>(), k in 1usize..12) {
        let bg = random_bandwidth_graph(n, p, b, RngSeed(seed)).unwrap();
        for sink in 1..n {
            let res = time_expanded_saturation(&bg, sink, k).unwrap();
            prop_assert!(check_certificate(&bg, &res).is_ok());
            let t = res.min_rounds;
            prop_assert_eq!(flow_within(&bg, sink, k, t), k as i64);
            if t > 0 {
                prop_assert!(flow_within(&bg, sink, k, t - 1) < k as i64);
            }
            let mut last = 0;
            for r in 0..=t + 2 {
                let f = flow_within(&bg, sink, k, r);
                prop_assert!(f >= last);
                last = f;
            }
        }
    }

    #[test]
    fn congest_gadget_never_beats_bandwidth_graph(n in 2usize..6, p in 0.0f64..0.6, b in 1u64..4, seed in any::<u64>(), k in 1usize..6) {
        let bg = random_bandwidth_graph(n, p, b, RngSeed(seed)).unwrap();
        let gadget = bandwidth_to_congest(&bg).unwrap();
        let unit = BandwidthGraph::new(
            gadget.graph.node_count(),
            gadget.graph.edges().map(|(u, v, _)| (u, v, 1)).collect(),
            gadget.source(&bg),
        )
        .unwrap();
        for sink in 1..n {
            let original = time_expanded_saturation(&bg, sink, k).unwrap().min_rounds;
            let best_member = gadget.cliques[sink]
                .clone()
                .map(|x| time_expanded_saturation(&unit, x, k).unwrap().min_rounds)
                .min()
                .unwrap();
            prop_assert!(original <= best_member, "sink {}: {} > {}", sink, original, best_member);
        }
    }

    #[test]
    fn split_decision_matches_brute_force(n in 2usize..8, m in 0usize..5, seed in any::<u64>()) {
        let ri = random_instance(n, m, RngSeed(seed)).unwrap();
        let red = build_setsplit_reduction(&ri).unwrap();
        prop_assert_eq!(
            decide_saturation_round4(&red).unwrap().saturable,
            brute_force_set_splitting(&ri).unwrap()
        );
    }
}
