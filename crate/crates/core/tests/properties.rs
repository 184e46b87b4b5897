use proptest::prelude::*;

use lqpd::bochner::{
    dot2, gram_matrix, jacobi_eigen, lq_norm, min_eigenvalue, psd_check, random_configuration,
    search_best, KernelSpec, PsdVerdict, SymmetricMatrix, WitnessConfig,
};
use lqpd::gammaq::{GammaQ, GammaQEvaluator, QuadratureSpec};
use lqpd::measures::{ks_statistic, project_unit, sample_gaussian, stable_sample, ReferenceCdf};
use lqpd::radialft::{contradiction_report, delta_window, jn_product, radial_ft, CaseTag, Verdict};
use lqpd::rng::ShiftRegisterRng;
use lqpd::specfun::{sq_closed_form, MomentOrder, QExponent, RadialPower};

fn qx(v: f64) -> QExponent {
    QExponent::new(v).unwrap()
}

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn costly() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn norm_is_homogeneous(
        x in prop::collection::vec(-10.0f64..10.0, 1..6),
        q in 0.5f64..6.0,
        c in 0.01f64..100.0,
    ) {
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let a = lq_norm(&scaled, qx(q));
        let b = c * lq_norm(&x, qx(q));
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn norm_ignores_order_and_signs(
        x in prop::collection::vec(-10.0f64..10.0, 2..6),
        q in 0.5f64..6.0,
        flips in prop::collection::vec(any::<bool>(), 6),
    ) {
        let mut y: Vec<f64> = x.iter().zip(&flips).map(|(v, f)| if *f { -v } else { *v }).collect();
        y.reverse();
        let (a, b) = (lq_norm(&x, qx(q)), lq_norm(&y, qx(q)));
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1e-300));
    }

    #[test]
    fn norm_triangle_inequality(
        x in prop::collection::vec(-10.0f64..10.0, 3),
        y in prop::collection::vec(-10.0f64..10.0, 3),
        q in 1.0f64..6.0,
    ) {
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(lq_norm(&s, qx(q)) <= (lq_norm(&x, qx(q)) + lq_norm(&y, qx(q))) * (1.0 + 1e-14));
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal(
        seed in any::<u64>(),
        q in 0.5f64..6.0,
        beta in 0.2f64..4.0,
        n in 1usize..4,
    ) {
        let k = KernelSpec::new(qx(q), beta, n).unwrap();
        let mut rng = ShiftRegisterRng::new(seed);
        let pts = random_configuration(12, n, 2.0, k.q, &mut rng);
        let g = gram_matrix(&pts, &k).unwrap();
        for i in 0..12 {
            prop_assert_eq!(g.get(i, i), 1.0);
            for j in 0..12 {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
                prop_assert!((0.0..=1.0).contains(&g.get(i, j)));
            }
        }
    }

    #[test]
    fn gram_is_invariant_under_lq_isometries(
        seed in any::<u64>(),
        q in 0.5f64..6.0,
        beta in 0.2f64..4.0,
        shift in prop::collection::vec(-5.0f64..5.0, 3),
        flips in prop::collection::vec(any::<bool>(), 3),
    ) {
        // coordinate permutation, sign changes and translation preserve ℓ_q distances
        let k = KernelSpec::new(qx(q), beta, 3).unwrap();
        let mut rng = ShiftRegisterRng::new(seed);
        let pts = random_configuration(15, 3, 2.0, k.q, &mut rng);
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let r = [p[2], p[0], p[1]];
                (0..3).map(|i| if flips[i] { -r[i] } else { r[i] } + shift[i]).collect()
            })
            .collect();
        let a = min_eigenvalue(&gram_matrix(&pts, &k).unwrap()).unwrap();
        let b = min_eigenvalue(&gram_matrix(&moved, &k).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn gram_scaling_covariance(
        seed in any::<u64>(),
        q in 0.5f64..6.0,
        beta in 0.2f64..4.0,
        c in 0.2f64..5.0,
    ) {
        // exp(−‖c(x−y)‖^β) = exp(−c^β‖x−y‖^β)
        let k = KernelSpec::new(qx(q), beta, 2).unwrap();
        let mut rng = ShiftRegisterRng::new(seed);
        let pts = random_configuration(10, 2, 1.0, k.q, &mut rng);
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| c * v).collect()).collect();
        let g = gram_matrix(&scaled, &k).unwrap();
        let cb = c.powf(beta);
        for i in 0..10 {
            for j in 0..10 {
                let d = k.distance(&pts[i], &pts[j]);
                let want = (-cb * d.powf(beta)).exp();
                prop_assert!((g.get(i, j) - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn classical_kernels_stay_psd(
        seed in any::<u64>(),
        q in 1.0f64..=2.0,
        frac in 0.1f64..=1.0,
        n in 1usize..4,
    ) {
        // β ≤ q ≤ 2 is the positive definite regime
        let k = KernelSpec::new(qx(q), frac * q, n).unwrap();
        let mut rng = ShiftRegisterRng::new(seed);
        let pts = random_configuration(16, n, 2.0, k.q, &mut rng);
        let r = psd_check(&pts, &k, 1e-9).unwrap();
        prop_assert_eq!(r.verdict, PsdVerdict::Psd, "{:?}", r);
    }

    #[test]
    fn jacobi_matches_trace_and_bounds_diagonal(
        entries in prop::collection::vec(-5.0f64..5.0, 36),
    ) {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| entries[i.min(j) * 6 + i.max(j)]).collect())
            .collect();
        let a = SymmetricMatrix::from_rows(rows).unwrap();
        let eig = jacobi_eigen(&a).unwrap();
        let trace: f64 = (0..6).map(|i| a.get(i, i)).sum();
        prop_assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-10);
        let lam = min_eigenvalue(&a).unwrap();
        for i in 0..6 {
            prop_assert!(lam <= a.get(i, i) + 1e-10);
        }
        // A v = λ v for every pair
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            for i in 0..6 {
                prop_assert!((dot2(a.row(i), v) - lam * v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_projection_is_scale_free(seed in any::<u64>(), x in prop::collection::vec(-3.0f64..3.0, 3), k in -8i32..8) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-6));
        let s = sample_gaussian(3, 50, seed).unwrap();
        let c = 2f64.powi(k);
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        prop_assert_eq!(project_unit(&s, &x).unwrap(), project_unit(&s, &cx).unwrap());
    }

    #[test]
    fn samples_are_reproducible(seed in any::<u64>(), beta in 0.3f64..=2.0) {
        prop_assert_eq!(sample_gaussian(2, 30, seed).unwrap(), sample_gaussian(2, 30, seed).unwrap());
        prop_assert_eq!(stable_sample(beta, 30, seed).unwrap(), stable_sample(beta, 30, seed).unwrap());
    }

    #[test]
    fn ks_statistic_is_a_distance(xs in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let d = ks_statistic(&xs, ReferenceCdf::StdNormal).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(d >= 0.5 / xs.len() as f64 - 1e-15);
    }

    #[test]
    fn moment_signs_follow_the_order(q in 2.05f64..8.0, alpha in -0.99f64..4.0) {
        let Ok(order) = MomentOrder::new(alpha, qx(q)) else { return Ok(()) };
        let s = sq_closed_form(order).unwrap();
        if alpha < 2.0 {
            prop_assert!(s > 0.0);
        } else if alpha < q.min(4.0) {
            prop_assert!(s < 0.0);
        }
    }

    #[test]
    fn every_delta_in_the_window_contradicts(
        case in prop::sample::select(vec![CaseTag::A, CaseTag::B, CaseTag::C]),
        q in 2.1f64..8.0,
        b in 0.05f64..0.95,
        t in 0.01f64..0.99,
    ) {
        let (lo, hi) = case.beta_range();
        let beta = lo + b * (hi - lo);
        let Ok((dlo, dhi)) = delta_window(case, qx(q), beta) else { return Ok(()) };
        let delta = dlo + t * (dhi - dlo);
        prop_assume!(delta > dlo && delta < dhi);
        let Ok(cert) = contradiction_report(case, qx(q), beta, Some(delta)) else { return Ok(()) };
        prop_assert_eq!(cert.verdict, Verdict::Contradiction);
        prop_assert!(cert.product_consistent());
    }

    #[test]
    fn jn_product_is_permutation_symmetric(q in 2.1f64..6.0, beta in 0.1f64..1.9, a in -0.95f64..-0.05, b in -0.95f64..-0.05) {
        let (Ok(x), Ok(y)) = (jn_product(qx(q), beta, &[a, b]), jn_product(qx(q), beta, &[b, a])) else {
            return Ok(());
        };
        prop_assert!((x.product - y.product).abs() <= 1e-12 * x.product.abs());
    }
}

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn gamma_q_is_even_and_bounded(q in 0.8f64..6.0, t in 0.0f64..30.0) {
        let g = GammaQEvaluator::with_defaults(q).unwrap();
        let v = g.gamma_q(t).unwrap();
        prop_assert_eq!(v, g.gamma_q(-t).unwrap());
        prop_assert!(v.abs() <= g.gamma_q(0.0).unwrap() + 1e-9);
    }

    #[test]
    fn radial_ft_is_homogeneous(
        q in prop::sample::select(vec![2.5, 3.0, 4.0]),
        beta in prop::sample::select(vec![-0.5, 0.5, 1.5]),
        xi in prop::collection::vec(0.3f64..2.0, 2),
        c in 0.5f64..2.0,
    ) {
        let rp = RadialPower::new(beta, 2).unwrap();
        let spec = QuadratureSpec::default();
        let a = radial_ft(qx(q), rp, &xi, spec).unwrap();
        let scaled: Vec<f64> = xi.iter().map(|v| c * v).collect();
        let b = radial_ft(qx(q), rp, &scaled, spec).unwrap();
        let want = c.powf(-2.0 - beta) * a;
        prop_assert!((b - want).abs() <= 1e-6 * want.abs().max(1e-3), "{} vs {}", b, want);
    }

    #[test]
    fn radial_ft_ignores_order_and_signs(
        q in prop::sample::select(vec![2.5, 3.0]),
        beta in prop::sample::select(vec![-0.5, 1.0]),
        xi in prop::collection::vec(0.3f64..2.0, 3),
    ) {
        let rp = RadialPower::new(beta, 3).unwrap();
        let spec = QuadratureSpec::default();
        let a = radial_ft(qx(q), rp, &xi, spec).unwrap();
        let b = radial_ft(qx(q), rp, &[-xi[2], xi[0], -xi[1]], spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn witness_search_is_deterministic(seed in any::<u64>()) {
        let k = KernelSpec::new(qx(3.0), 1.0, 2).unwrap();
        let mut cfg = WitnessConfig::new(6, 30, seed);
        cfg.restarts = 2;
        prop_assert_eq!(search_best(&k, &cfg).unwrap(), search_best(&k, &cfg).unwrap());
    }
}
