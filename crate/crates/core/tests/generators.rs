use esspec::generators::{
    make_comb, make_g_d, make_line, make_regular_tree, make_sparse_tree_cycles, make_star,
    make_z_nxn, make_zn_box, GeneratorSpec, SparseRule,
};
use esspec::numeric::omega_weight;
use esspec::operator::{PotentialMode, SchrodingerOp};
use esspec::rlimit::tower_at;
use esspec::RootedGraph;

fn layer_sizes(g: &RootedGraph) -> Vec<usize> {
    g.bfs_layers(g.root()).unwrap().layer_sizes()
}

#[test]
fn sparse_tree_sphere_sizes() {
    let rule = SparseRule {
        l: vec![1, 10, 100, 1000],
        k: vec![2],
        c: vec![6, 30, 550],
    };
    let g = make_sparse_tree_cycles(rule.clone(), 1200).unwrap();
    let sizes = layer_sizes(&g);
    assert_eq!(sizes, rule.sphere_sizes(1200));
    for (j, &s) in sizes.iter().enumerate() {
        let want = match j {
            0 => 1,
            1..=9 => 2,
            10..=99 => 4,
            100..=999 => 8,
            _ => 16,
        };
        assert_eq!(s, want, "depth {j}");
    }
    // The sphere doubles exactly at each L_n.
    for &l in &rule.l[1..] {
        assert_eq!(sizes[l], 2 * sizes[l - 1]);
    }
    let meta = g.meta();
    assert_eq!(meta["cycle_depths"], serde_json::json!([30, 550]));
    assert_eq!(meta["skipped_cycle_depths"], serde_json::json!([6]));
}

#[test]
fn sparse_tree_cycles_close_each_sphere() {
    let rule = SparseRule {
        l: vec![1, 10, 100],
        k: vec![3],
        c: vec![6, 40],
    };
    let g = make_sparse_tree_cycles(rule, 60).unwrap();
    let layers = g.bfs_layers(g.root()).unwrap();
    for (depth, m) in [(6usize, 3usize), (40, 9)] {
        let sphere = &layers.layers[depth];
        assert_eq!(sphere.len(), m);
        for &v in sphere {
            let same: Vec<_> = g
                .neighbors(v)
                .iter()
                .filter(|u| sphere.contains(u))
                .collect();
            assert_eq!(same.len(), 2, "cycle vertex at depth {depth}");
        }
    }
    // Outside the cycle depths no edge stays within a sphere.
    let dist = g.root_distances();
    for v in 0..g.vertex_count() {
        if dist[v] != 6 && dist[v] != 40 {
            assert!(g.neighbors(v).iter().all(|&u| dist[u] != dist[v]));
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let specs = [
        GeneratorSpec::Line { radius: 20 },
        GeneratorSpec::Star { k: 4, radius: 10 },
        GeneratorSpec::Comb { radius: 6 },
        GeneratorSpec::RegularTree { d: 3, radius: 5 },
        GeneratorSpec::ZnBox { n: 2, half_side: 4 },
        GeneratorSpec::ZNxN { n: 2, radius: 6 },
        GeneratorSpec::SparseTreeCycles {
            rule: SparseRule::default(),
            radius: 120,
        },
        GeneratorSpec::GD { d: 3, radius: 100 },
    ];
    for spec in specs {
        let a = spec.generate().unwrap();
        let b = spec.generate().unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let back = RootedGraph::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        let spec_json = serde_json::to_string(&spec).unwrap();
        let spec_back: GeneratorSpec = serde_json::from_str(&spec_json).unwrap();
        assert_eq!(spec_back.generate().unwrap(), a);
    }
}

#[test]
fn smaller_generations_are_balls_of_larger_ones() {
    type Make = fn(usize) -> esspec::Result<RootedGraph>;
    let families: [(&str, Make); 6] = [
        ("line", make_line),
        ("star3", |r| make_star(3, r)),
        ("comb", make_comb),
        ("tree3", |r| make_regular_tree(3, r)),
        ("z2", |r| make_z_nxn(2, r)),
        ("gd3", |r| make_g_d(3, r)),
    ];
    for (name, make) in families {
        let big = make(12).unwrap();
        let hb = SchrodingerOp::assemble(&big, PotentialMode::Adjacency);
        for r in 1..=5 {
            let small = make(r + 1).unwrap();
            let hs = SchrodingerOp::assemble(&small, PotentialMode::Adjacency);
            assert_eq!(
                tower_at(&hb, big.root(), r, 1e-9).unwrap(),
                tower_at(&hs, small.root(), r, 1e-9).unwrap(),
                "{name} at radius {r}"
            );
        }
    }
}

#[test]
fn vertex_and_edge_counts() {
    let t = make_regular_tree(3, 4).unwrap();
    assert_eq!(t.vertex_count(), 1 + 3 * (1 + 2 + 4 + 8));
    assert_eq!(t.edge_count(), t.vertex_count() - 1);
    let s = make_star(5, 7).unwrap();
    assert_eq!((s.vertex_count(), s.edge_count()), (36, 35));
    let b = make_zn_box(2, 3).unwrap();
    assert_eq!((b.vertex_count(), b.edge_count()), (49, 2 * 7 * 6));
    assert_eq!(layer_sizes(&make_comb(5).unwrap())[1], 4);
}

#[test]
fn chain_graph_growth_stays_linear() {
    let g = make_g_d(3, 300).unwrap();
    let p = g.growth_profile(300).unwrap();
    assert_eq!(p.ball_sizes[1], 2);
    let bad: Vec<usize> = p.violations_of_linear_bound().into_iter().filter(|&k| k >= 2).collect();
    assert!(bad.is_empty(), "#B_k >= 2k at {bad:?}");
    // Only k = 1 reaches the bound: the root sees the backbone on one side.
    assert_eq!(p.violations_of_linear_bound(), vec![1]);
    let labels = &g.meta()["labels"];
    for l in 1..=4 {
        assert!(labels.get(format!("block_{l}")).is_some(), "block {l} missing");
    }
}

#[test]
fn omega_norm_is_a_basel_partial_sum() {
    for g in [
        make_line(10_000).unwrap(),
        make_sparse_tree_cycles(SparseRule::default(), 10_000).unwrap(),
    ] {
        let w = omega_weight(&g);
        let norm2: f64 = w.iter().map(|x| x * x).sum();
        let partial: f64 = (0..=10_000).map(|k| 1.0 / ((k + 1) as f64).powi(2)).sum();
        assert!((norm2 - partial).abs() < 1e-9);
        assert!((norm2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-3);
    }
}
