use avgjohn_core::certify::*;
use avgjohn_core::embed::{hilbert_realize_snowflake, snowflake_self_embed, EmbeddingMap};
use avgjohn_core::graph::{bfs_metric, complete, cycle, hypercube, Graph};
use avgjohn_core::markov::graph_kernel;
use avgjohn_core::metric::*;
use avgjohn_core::sample::*;
use proptest::prelude::*;
use rand::Rng;

/// Graphs with an explicit isometric ℓ1 realization of their path metric.
fn l1_graph(which: usize, size: usize) -> (Graph, PointConfig) {
    match which {
        0 => {
            let k = (size % 5 + 1) as u32;
            let pts = (0..1usize << k).map(|x| (0..k).map(|i| ((x >> i) & 1) as f64).collect()).collect();
            (hypercube(k).unwrap(), PointConfig::new(NormedHost::l1(k as usize), pts).unwrap())
        }
        1 => {
            let m = size % 8 + 2;
            let pts = (0..2 * m)
                .map(|v| (0..m).map(|i| if (v + 2 * m - i) % (2 * m) < m { 1.0 } else { 0.0 }).collect())
                .collect();
            (cycle(2 * m).unwrap(), PointConfig::new(NormedHost::l1(m), pts).unwrap())
        }
        _ => {
            let n = size % 10 + 2;
            let pts = (0..n).map(|v| (0..n).map(|i| if i == v { 0.5 } else { 0.0 }).collect()).collect();
            (complete(n).unwrap(), PointConfig::new(NormedHost::l1(n), pts).unwrap())
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimension_bound_is_monotone(seed in any::<u64>(), n in 2usize..20, p in 1.0f64..3.0, bump in 1.0f64..2.0) {
        let mut rng = seeded(seed);
        let k = random_kernel(&mut rng, n, 0.3).unwrap();
        let x = gaussian_config(&mut rng, NormedHost::l2(2), n).unwrap();
        let c = dim_certificate(&x, &k, p, 1.0).unwrap();
        prop_assert_eq!(c.recompute_bound().unwrap(), c.bound);
        for key in ["gap", "ratio"] {
            let mut d = c.clone();
            *d.provenance.get_mut(key).unwrap() *= bump;
            prop_assert!(d.recompute_bound().unwrap() >= c.bound);
        }
    }

    #[test]
    fn spectral_bound_is_sound(which in 0usize..3, size in 0usize..40, omega_half in 0.05f64..1.0) {
        let (g, x) = l1_graph(which, size);
        let m = bfs_metric(&g).unwrap().0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                prop_assert_eq!(x.dist(i, j), m.d(i, j));
            }
        }
        // d^{1/2} realized in ℓ2, then snowflaked again: an embedding of the ω-snowflake, ω = ω'/2.
        let h = hilbert_realize_snowflake(&x, 1.0).unwrap();
        let mu = ProbabilityWeights::uniform(x.len()).unwrap();
        let s = snowflake_self_embed(&h.config, &mu, 2.0, omega_half).unwrap();
        let omega = omega_half / 2.0;
        let f = EmbeddingMap::new(m, mu, s.map.image().clone()).unwrap();
        let measured = avg_distortion(&f, 2.0, omega).unwrap().certified_avg_distortion;
        let cert = expander_avg_lower(&g, omega, Hypothesis::Holder).unwrap();
        prop_assert!(cert.bound <= measured + 1e-9, "{} > {}", cert.bound, measured);
        prop_assert!((cert.recompute_bound().unwrap() - cert.bound).abs() <= 1e-15 * cert.bound);
    }

    #[test]
    fn spectral_bound_below_random_maps(seed in any::<u64>(), which in 0usize..3, size in 0usize..40, omega in 0.05f64..1.0, dim in 1usize..6) {
        let (g, _) = l1_graph(which, size);
        let m = bfs_metric(&g).unwrap().0;
        let n = m.n();
        let y = gaussian_config(&mut seeded(seed), NormedHost::l2(dim), n).unwrap();
        let f = EmbeddingMap::new(m, ProbabilityWeights::uniform(n).unwrap(), y).unwrap();
        let measured = avg_distortion(&f, 2.0, omega).unwrap().certified_avg_distortion;
        prop_assert!(expander_avg_lower(&g, omega, Hypothesis::Holder).unwrap().bound <= measured + 1e-9);
    }

    #[test]
    fn mixed_exponent_bound_recomputes(which in 0usize..3, size in 0usize..40, omega in 0.05f64..1.0, p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let (g, _) = l1_graph(which, size);
        let c = general_target_lower(&g, omega, p, q).unwrap();
        prop_assert!((c.recompute_bound().unwrap() - c.bound).abs() <= 1e-12 * c.bound);
        prop_assert_eq!(c.notes["status"].as_str(), "advisory");
    }
}

#[test]
fn enflo_holds_for_random_maps() {
    let mut rng = seeded(77);
    for _ in 0..1000 {
        let k = rng.random_range(1..=8u32);
        let m = bfs_metric(&hypercube(k).unwrap()).unwrap().0;
        let n = m.n();
        let dim = rng.random_range(1..=4);
        let y = gaussian_config(&mut rng, NormedHost::l2(dim), n).unwrap();
        let f = EmbeddingMap::new(m, ProbabilityWeights::uniform(n).unwrap(), y).unwrap();
        let e = enflo_cube_check(&f).unwrap();
        assert!(e.passed, "{e:?}");
    }
}

#[test]
fn enflo_rejects_non_euclidean_image() {
    let m = bfs_metric(&hypercube(2).unwrap()).unwrap().0;
    let y = PointConfig::new(NormedHost::l1(1), (0..4).map(|i| vec![i as f64]).collect()).unwrap();
    let f = EmbeddingMap::new(m, ProbabilityWeights::uniform(4).unwrap(), y).unwrap();
    assert!(enflo_cube_check(&f).is_err());
}

#[test]
fn real_line_eigenvector_exponent() {
    let k = graph_kernel(&cycle(9).unwrap()).unwrap();
    let basis = avgjohn_core::markov::eigen_basis(&k).unwrap();
    let x = PointConfig::new(NormedHost::l2(1), basis.vector(1).iter().map(|v| vec![*v]).collect()).unwrap();
    let c = dim_certificate(&x, &k, 2.0, 1.0).unwrap();
    assert!((c.exponent - basis.spectrum.gap.sqrt()).abs() < 1e-10);
}

#[test]
fn certificate_csv_and_json() {
    let c = enflo_lower(6, 0.1).unwrap();
    let row = c.csv_row();
    assert_eq!(row[0], "avg_distortion_lower");
    assert_eq!(row[1], "64");
    let text = serde_json::to_string(&c).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}

#[test]
fn identity_cube_saturates_enflo() {
    for k in 1..=8u32 {
        let e = enflo_cube_check(&hypercube_identity(k).unwrap()).unwrap();
        let expected = f64::from(k) * 2f64.powi(k as i32);
        assert_eq!(e.diagonal, expected);
        assert_eq!(e.edges, expected);
        assert!(e.passed);
    }
}
