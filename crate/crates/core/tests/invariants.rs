use proptest::prelude::*;
use quenched::geomgraph::{brute_force_graph, build_graph};
use quenched::harness::ExperimentConfig;
use quenched::percolation::{bernoulli_thin, bfs_components, connected_components};
use quenched::pointprocess::{poisson_weighted_moment, BoundaryMode, BoxWindow, Point, PointConfiguration};
use quenched::spinsystem::{heat_bath_plus_probability, metropolis_acceptance, SingleSpinMeasure};
use statrs::distribution::{Discrete, Poisson};

fn mode(torus: bool) -> BoundaryMode {
    if torus {
        BoundaryMode::Torus
    } else {
        BoundaryMode::Free
    }
}

fn configuration(dim: usize, side: f64, torus: bool, unit: Vec<(f64, f64, f64)>) -> PointConfiguration {
    let h = side / 2.0;
    let pts: Vec<Point> = unit
        .into_iter()
        .map(|(x, y, z)| [side * x - h, side * y - h, if dim == 3 { side * z - h } else { 0.0 }])
        .collect();
    PointConfiguration::from_points(BoxWindow::new(dim, side, mode(torus)).unwrap(), pts, 1.0, 0).unwrap()
}

fn unit_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 0..max)
}

/// Canonical form of a labelling: each vertex mapped to the smallest vertex sharing its label.
fn partition(labels: &[u32]) -> Vec<usize> {
    labels.iter().map(|l| labels.iter().position(|m| m == l).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cell_list_matches_brute_force(
        dim in 2usize..=3, torus: bool, side in 2.5..9.0f64, r in 0.1..1.2f64, unit in unit_points(150)
    ) {
        let pts = configuration(dim, side, torus, unit);
        let (fast, slow) = (build_graph(&pts, r).unwrap(), brute_force_graph(&pts, r).unwrap());
        prop_assert_eq!(fast.adjacency(), slow.adjacency());
    }

    #[test]
    fn union_find_and_bfs_agree(torus: bool, unit in unit_points(120)) {
        let g = build_graph(&configuration(2, 8.0, torus, unit), 1.0).unwrap();
        prop_assert_eq!(partition(&connected_components(&g).labels), partition(&bfs_components(&g)));
    }

    #[test]
    fn thinning_is_nested(q1 in 0.0..=1.0f64, q2 in 0.0..=1.0f64, seed: u64, unit in unit_points(120)) {
        let g = build_graph(&configuration(2, 6.0, false, unit), 1.0).unwrap();
        let (lo, hi) = (q1.min(q2), q1.max(q2));
        let (small, big) = (bernoulli_thin(&g, lo, seed).unwrap(), bernoulli_thin(&g, hi, seed).unwrap());
        let big: Vec<_> = big.edges().collect();
        for e in small.edges() {
            prop_assert!(big.binary_search(&e).is_ok());
        }
    }

    #[test]
    fn heat_bath_is_a_flip_equivariant_probability(beta in 0.0..20.0f64, h in -50.0..50.0f64) {
        let p = heat_bath_plus_probability(beta, h);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert_eq!(heat_bath_plus_probability(beta, -h), 1.0 - p);
    }

    #[test]
    fn metropolis_acceptance_is_sign_symmetric(beta in 0.0..5.0f64, h in -5.0..5.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let m = SingleSpinMeasure::double_well();
        let a = metropolis_acceptance(&m, beta, h, x, y);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, metropolis_acceptance(&m, beta, -h, -x, -y));
    }

    #[test]
    fn config_round_trips_through_toml(seed: u64, side in 1.0..100.0f64, betas in prop::collection::vec(0.0..5.0f64, 0..6)) {
        let mut cfg = ExperimentConfig::new("phase-diagram");
        cfg.seed = seed;
        cfg.side = Some(side);
        cfg.beta = betas;
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn poisson_moments_match_statrs() {
    for &kappa in &[0.5, 3.0, 4.0 * std::f64::consts::PI, 40.0] {
        let p = Poisson::new(kappa).unwrap();
        for &t in &[1.0, 2.0, 3.0, 5.0] {
            let reference: f64 = (0..2000u64).map(|k| p.pmf(k) * (k as f64).powf(t)).sum();
            let ours = poisson_weighted_moment(t, kappa, 1e-16).unwrap();
            assert!(((ours - reference) / reference).abs() < 1e-10, "κ={kappa} ϑ={t}: {ours} vs {reference}");
        }
    }
}
