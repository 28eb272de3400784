use esspec::analytic::{tree_spectrum, SpectralSet};
use esspec::generators::{make_g_d, make_line, make_regular_tree, make_star};
use esspec::numeric::{
    boundary_filter, dense_eigen, hausdorff_report, shnol_check, sigma_infty_witness,
    strict_inclusion_demo, DemoConfig, EigenMode, Eigenpairs, ShnolConfig, WitnessConfig,
    WitnessVerdict, DEFAULT_BOUNDARY_TAU,
};
use esspec::operator::{PotentialMode, SchrodingerOp};

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

#[test]
fn boundary_mass_of_simple_vectors() {
    // Path of 2r + 1 vertices around the middle; the outer layer has two.
    for (r, kept) in [(15, false), (25, true)] {
        let g = make_line(r + 5).unwrap();
        let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
        let m = h.truncate(g.root(), r).unwrap();
        let n = m.dim();
        let mut delta = vec![0.0; n];
        delta[m.outer_layer()[0]] = 1.0;
        let pairs = Eigenpairs {
            mode: EigenMode::Dense,
            dim: n,
            values: vec![0.0, 0.0],
            vectors: Some(vec![unit(vec![1.0; n]), delta]),
            residuals: vec![],
        };
        // Constant vector: mass 2 / (2r + 1) on the outer layer.
        assert_eq!(
            boundary_filter(&pairs, &m, DEFAULT_BOUNDARY_TAU),
            vec![kept, false],
            "r = {r}"
        );
    }
}

#[test]
fn filtered_tree_top_eigenvalue() {
    let g = make_regular_tree(3, 10).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let m = h.truncate(g.root(), 8).unwrap();
    let e = dense_eigen(&m, true).unwrap();
    let b = 2.0 * 2f64.sqrt();
    assert!(e.largest() <= b + 1e-12);
    let kept = boundary_filter(&e, &m, DEFAULT_BOUNDARY_TAU);
    let top = e
        .values
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(&v, _)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((top - b).abs() < 0.15, "filtered top {top}");
    let r = hausdorff_report(&e.values, &kept, &tree_spectrum(3), 0.05, EigenMode::Dense);
    assert!(r.directed_hausdorff <= 1e-12);
    assert!(r.coverage_gap.unwrap() >= 0.0);
}

#[test]
fn bipartite_spectra_are_symmetric() {
    for g in [make_star(4, 20).unwrap(), make_regular_tree(3, 5).unwrap()] {
        let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
        let v = dense_eigen(&h.truncate_all().unwrap(), false).unwrap().values;
        let n = v.len();
        for i in 0..n {
            assert!((v[i] + v[n - 1 - i]).abs() < 1e-8);
        }
    }
}

#[test]
fn shnol_on_the_line() {
    let g = make_line(40).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let theta = 0.9f64;
    let dist = g.root_distances();
    let psi: Vec<f64> = dist.iter().map(|&d| (d as f64 * theta).cos()).collect();
    let r = shnol_check(&h, &psi, 2.0 * theta.cos(), &ShnolConfig::default()).unwrap();
    assert!(r.consistent, "{:?}", r.notes);
    assert!(r.relative_residual < 1e-12);
}

#[test]
fn shnol_flags_the_constant_on_a_tree() {
    let g = make_regular_tree(3, 8).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let psi = vec![1.0; g.vertex_count()];
    let r = shnol_check(&h, &psi, 3.0, &ShnolConfig::default()).unwrap();
    assert!(r.relative_residual < 1e-15);
    assert!(r.envelope.sub_exponential);
    assert!(r.distance_to_truncated_spectrum >= 3.0 - 2.0 * 2f64.sqrt());
    assert!(!r.consistent);
    assert!(r.graph_growth.final_rate > 1.5);
}

#[test]
fn shnol_accepts_a_truncation_eigenvector() {
    let g = make_line(40).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let m = h.truncate_all().unwrap();
    let e = dense_eigen(&m, true).unwrap();
    let j = 50;
    let x = &e.vectors.as_ref().unwrap()[j];
    let mut psi = vec![0.0; g.vertex_count()];
    for (i, &v) in m.vertices.iter().enumerate() {
        psi[v] = x[i];
    }
    let r = shnol_check(&h, &psi, e.values[j], &ShnolConfig::default()).unwrap();
    assert!(r.consistent, "{:?}", r.notes);
    assert!(r.distance_to_truncated_spectrum < 1e-12);
}

#[test]
fn tree_witness_inside_the_gap() {
    let g = make_regular_tree(3, 6).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let w = sigma_infty_witness(&h, 2.9, 6, &WitnessConfig::default()).unwrap();
    assert_eq!(w.verdict, WitnessVerdict::Pass);
    assert!(w.sup_norm <= 1e3);
    assert_eq!(w.psi[0], 1.0);
    let full = w.extended(g.vertex_count());
    let again = h.residual(&full, 2.9, g.root(), 5).unwrap();
    assert!((again - w.residual).abs() <= 1e-12);
}

#[test]
fn unbounded_witnesses_are_reported() {
    // Outside [−2, 2] every solution on the line with ψ(root) = 1 grows
    // geometrically on at least one side.
    let g = make_line(60).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let cfg = WitnessConfig {
        sup_cap: 10.0,
        ..WitnessConfig::default()
    };
    let w = sigma_infty_witness(&h, 3.0, 10, &cfg).unwrap();
    assert_eq!(w.verdict, WitnessVerdict::FailUnbounded);
    let w = sigma_infty_witness(&h, 1.0, 40, &cfg).unwrap();
    assert_eq!(w.verdict, WitnessVerdict::Pass);
}

#[test]
fn strict_inclusion_for_d_three_and_four() {
    for (d, radius) in [(3, 200), (4, 300)] {
        let r = strict_inclusion_demo(&DemoConfig::new(d, radius)).unwrap();
        assert!(r.passed, "d = {d}: {r:?}");
        assert!(r.growth_violations.is_empty());
        assert!(r.spectral_radius <= r.tree_bound + 0.05);
        assert!(r.tree_class_witnesses >= 3);
        for w in &r.witnesses {
            assert_eq!(w.verdict, WitnessVerdict::Pass);
            assert!(w.residual <= 1e-10);
            assert!((w.sup_norm - 1.0).abs() <= 1e-10);
        }
        let b = 2.0 * ((d - 1) as f64).sqrt();
        let dd = d as f64;
        assert_eq!(r.gap, SpectralSet::new(vec![[-dd, -b], [b, dd]], vec![]));
    }
}

#[test]
fn chain_graph_spectrum_is_inside_the_tree_band() {
    let g = make_g_d(3, 120).unwrap();
    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let e = dense_eigen(&h.truncate_all().unwrap(), false).unwrap();
    assert!(e.spectral_radius() <= 2.0 * 2f64.sqrt());
}
