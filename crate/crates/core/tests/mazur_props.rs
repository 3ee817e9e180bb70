use avgjohn_core::mazur::*;
use avgjohn_core::metric::NormedHost;
use avgjohn_core::sample::*;
use proptest::prelude::*;
use rand::Rng;

/// Brute-force `min_σ` of the defining objective on the nodes
/// `σ_i = (i/N)^{1/ω}`, which are uniform in `σ^ω`, plus the `σ → 1` limit.
/// Evaluated through `u = σ^ω` so that tiny σ do not underflow.
fn eta_grid(p: f64, omega: f64, nodes: usize) -> f64 {
    let tail = (1.0 - omega) / (p * omega);
    (0..nodes)
        .map(|i| {
            let u = i as f64 / nodes as f64;
            (1.0 - u) / (1.0 - u.powf(1.0 / omega)) * (1.0 + u.powf(p)).powf(tail)
        })
        .fold(omega * 2f64.powf(tail), f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eta_in_unit_interval(p in 0.2f64..6.0, omega in 0.01f64..1.0) {
        let e = eta(p, omega).unwrap();
        prop_assert!(e > 0.0 && e <= 1.0 + 1e-15);
    }

    #[test]
    fn eta_below_both_endpoints(p in 0.2f64..6.0, omega in 0.05f64..1.0) {
        let e = eta(p, omega).unwrap();
        prop_assert!(e <= 1.0);
        prop_assert!(e <= omega * 2f64.powf((1.0 - omega) / (p * omega)) + 1e-15);
    }

    #[test]
    fn closed_forms_match_minimizer(p in 0.2f64..6.0, omega in 0.05f64..1.0) {
        prop_assume!(p * omega >= 1.0);
        let closed = eta(p, omega).unwrap();
        let numeric = eta_numeric(p, omega).unwrap();
        prop_assert!((closed - numeric).abs() < 1e-8, "{closed} vs {numeric}");
    }

    #[test]
    fn f_omega_norm_identity(seed in any::<u64>(), dim in 1usize..8, omega in 0.01f64..1.0) {
        let mut rng = seeded(seed);
        let host = random_host(&mut rng, dim);
        let x: Vec<f64> = gaussian_vec(&mut rng, dim).iter().map(|v| v * 10f64.powi(rng.random_range(-3..4))).collect();
        let nx = host.norm(&x).unwrap();
        let fx = host.norm(&f_omega(&host, &x, omega).unwrap()).unwrap();
        prop_assert!((fx - nx.powf(omega)).abs() <= 1e-12 * nx.powf(omega));
        let back = f_omega_inverse(&host, &f_omega(&host, &x, omega).unwrap(), omega).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-10 * nx);
        }
    }

    #[test]
    fn sandwich_holds(seed in any::<u64>(), dim in 1usize..6, p in 1.0f64..4.0, omega in 0.05f64..1.0) {
        let mut rng = seeded(seed);
        let host = random_host(&mut rng, dim);
        let x = gaussian_vec(&mut rng, dim);
        let y = gaussian_vec(&mut rng, dim);
        prop_assert!(holder_sandwich_check(&host, &x, &y, p, omega).unwrap().passed);
    }
}

#[test]
fn middle_regime_matches_fine_grid() {
    for (p, omega) in [(2.0, 0.3), (3.0, 0.2), (1.5, 0.5), (4.0, 0.1), (5.0, 0.025), (2.25, 0.075)] {
        let fine = eta_grid(p, omega, 200_000);
        let e = eta(p, omega).unwrap();
        assert!((e - fine).abs() < 1e-8, "{p} {omega}: {e} vs {fine}");
    }
}

/// At small ω the minimizing σ is around 1e-12; a uniform σ-grid sees only 1.
#[test]
fn tiny_sigma_minimizer() {
    let e = eta(5.0, 0.025).unwrap();
    assert!(e < 0.64, "{e}");
    let u: f64 = 0.5;
    let sigma = u.powf(1.0 / 0.025);
    assert!(sigma < 1e-11);
    assert!(e <= eta_objective(5.0, 0.025, sigma));
}

#[test]
fn psi_is_unimodal() {
    for omega in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let grid: Vec<f64> = (0..=10_000).map(|i| i as f64 / 10_000.0 * 4.0).collect();
        let vals: Vec<f64> = grid.iter().map(|r| psi_omega(*r, omega).unwrap()).collect();
        for w in grid.windows(2).zip(vals.windows(2)) {
            let ((r0, _), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            if r0 < 0.5 - 1e-12 && w.0[1] <= 0.5 {
                assert!(v1 >= v0 - 1e-12, "ω={omega} rising at {r0}");
            } else if r0 >= 0.5 {
                assert!(v1 <= v0 + 1e-12, "ω={omega} falling at {r0}");
            }
        }
        assert!((psi_omega(0.5, omega).unwrap() - 2f64.powf(1.0 - omega)).abs() < 1e-12);
        for at in [0.5, 1.0] {
            let (l, r) = (psi_omega(at - 1e-9, omega).unwrap(), psi_omega(at + 1e-9, omega).unwrap());
            assert!((l - r).abs() < 1e-6, "ω={omega} jump at {at}");
        }
    }
}

#[test]
fn antipodal_upper_equality() {
    let host = NormedHost::l2(3);
    let x = [0.3, -1.1, 2.0];
    let y: Vec<f64> = x.iter().map(|v| -v).collect();
    for omega in [0.2, 0.5, 0.8] {
        let c = holder_sandwich_check(&host, &x, &y, 2.0, omega).unwrap();
        assert!((c.middle - c.upper).abs() <= 1e-9 * c.upper);
    }
}
