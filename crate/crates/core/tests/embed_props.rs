use avgjohn_core::embed::*;
use avgjohn_core::metric::*;
use avgjohn_core::sample::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn self_embedding_bounds(seed in any::<u64>(), n in 2usize..40, dim in 1usize..10,
                             p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
                             omega in prop::sample::select(vec![0.2, 0.35, 0.5, 0.65, 0.8])) {
        let mut rng = seeded(seed);
        let host = random_host(&mut rng, dim);
        let x = gaussian_config(&mut rng, host, n).unwrap();
        let mu = random_weights(&mut rng, n).unwrap();
        let s = snowflake_self_embed(&x, &mu, p, omega).unwrap();
        let w = mu.as_slice();
        let (mut target, mut achieved) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                target += w[i] * w[j] * x.dist(i, j).powf(p * omega);
                achieved += w[i] * w[j] * s.map.image().dist(i, j).powf(p);
            }
        }
        prop_assert!((target - achieved).abs() <= 1e-12 * target);
        prop_assert!(s.summary.holder_constant <= s.holder_bound + 1e-9);
        prop_assert!(s.summary.certified_avg_distortion >= 1.0 - 1e-9);
    }

    #[test]
    fn line_raw_map_is_one_lipschitz(seed in any::<u64>(), n in 1usize..30, q in 1.0f64..4.0) {
        let mut rng = seeded(seed);
        let host = random_host(&mut rng, 3);
        let m = distance_matrix(&gaussian_config(&mut rng, host, n).unwrap());
        let mu = random_weights(&mut rng, n).unwrap();
        let l = line_embed(&m, &mu, q).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((l.raw[i] - l.raw[j]).abs() <= m.d(i, j) * (1.0 + 1e-12) + 1e-15);
            }
        }
        prop_assert!(l.raw_lipschitz <= 1.0 + 1e-12);
    }

    #[test]
    fn hilbert_realization_is_faithful(seed in any::<u64>(), n in 2usize..24, dim in 1usize..5,
                                       p in prop::sample::select(vec![1.0, 1.25, 1.5, 1.75, 2.0])) {
        let mut rng = seeded(seed);
        let x = gaussian_config(&mut rng, NormedHost::lp(p, dim).unwrap(), n).unwrap();
        let h = hilbert_realize_snowflake(&x, p).unwrap();
        prop_assert!(h.max_relative_error <= 1e-8);
        prop_assert!(h.min_eigenvalue >= -1e-8 * h.trace);
        for i in 0..n {
            for j in 0..n {
                let target = x.dist(i, j).powf(p / 2.0);
                prop_assert!((h.config.dist(i, j) - target).abs() <= 1e-8 * target.max(1e-300));
            }
        }
    }

    #[test]
    fn distortion_is_scale_invariant(seed in any::<u64>(), n in 2usize..20, c in 1e-3f64..1e3,
                                     p in 1.0f64..4.0, omega in 0.1f64..1.0) {
        let mut rng = seeded(seed);
        let x = gaussian_config(&mut rng, NormedHost::l2(3), n).unwrap();
        let y = gaussian_config(&mut rng, NormedHost::l1(2), n).unwrap();
        let f = EmbeddingMap::new(distance_matrix(&x), random_weights(&mut rng, n).unwrap(), y).unwrap();
        let a = distortion_summary(&f, p, omega).unwrap().certified_avg_distortion;
        let b = distortion_summary(&f.scaled(c), p, omega).unwrap().certified_avg_distortion;
        prop_assert!((a - b).abs() <= 1e-9 * a);
        prop_assert!(a >= 1.0 - 1e-9);
    }

    #[test]
    fn exponent_changes_keep_distortion_finite(seed in any::<u64>(), n in 3usize..20, p in 1.0f64..4.0, q in 1.0f64..4.0) {
        let mut rng = seeded(seed);
        let host = random_host(&mut rng, 2);
        let x = gaussian_config(&mut rng, host, n).unwrap();
        let m = distance_matrix(&x);
        let f = frechet_map(&m, &random_weights(&mut rng, n).unwrap()).unwrap();
        let change = if q >= p { raise_exponent(&f, p, q) } else { lower_exponent(&f, p, q) }.unwrap();
        prop_assert!(change.summary.certified_avg_distortion.is_finite());
        prop_assert!(change.summary.certified_avg_distortion >= 1.0 - 1e-9);
    }
}

#[test]
fn transfer_stays_inside_envelope() {
    let mut rng = seeded(5);
    for _ in 0..200 {
        let n = rng.random_range(3..=20);
        let dim = rng.random_range(1..=4);
        let host = random_host(&mut rng, dim);
        let x = gaussian_config(&mut rng, host, n).unwrap();
        let mu = random_weights(&mut rng, n).unwrap();
        let img = gaussian_config(&mut rng, NormedHost::l2(2), n).unwrap();
        let f = EmbeddingMap::new(distance_matrix(&x), mu, img).unwrap();
        let (p, q, w) = (rng.random_range(1.0..4.0), rng.random_range(1.0..4.0), rng.random_range(0.1..=1.0));
        let t = transfer_snowflake(&f, p, q, w).unwrap();
        assert!(t.summary.certified_avg_distortion <= TRANSFER_ENVELOPE * t.advisory);
    }
}

#[test]
fn sl2_f3_character_map_is_injective() {
    let e = sl_character_embed(2, 3, 1.0).unwrap();
    assert!(e.injective);
    let pts = e.map.image().points();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            assert_ne!(pts[i], pts[j]);
        }
    }
}
