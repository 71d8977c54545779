use contraction_core::concentration::{phi_a_waterfill, ConcentrationProfile};
use contraction_core::gaussian::SeriesPrior;
use contraction_core::sequences::FourierFunction;
use contraction_core::whitenoise::kl_divergence_wn;
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (f64, Vec<f64>)> {
    (prop::sample::select(vec![0.5, 1.0, 2.0]), prop::collection::vec(-1.0f64..1.0, 1..12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn waterfill_kkt((alpha, c) in instance(), eps in 0.02f64..0.8) {
        let w = SeriesPrior::new(alpha, c.len()).unwrap().rkhs_weights();
        let f0 = FourierFunction::new(c.clone()).unwrap();
        let s = phi_a_waterfill(&w, &f0, eps).unwrap();
        prop_assert!(s.kkt_residual(&w, &c, eps) < 1e-8);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert_eq!(s.value == 0.0, norm <= eps);
    }

    #[test]
    fn waterfill_decreasing_and_convex((alpha, c) in instance(), e in 0.02f64..0.4, gap in 0.01f64..0.3) {
        let w = SeriesPrior::new(alpha, c.len()).unwrap().rkhs_weights();
        let f0 = FourierFunction::new(c).unwrap();
        let phi = |x: f64| phi_a_waterfill(&w, &f0, x).unwrap().value;
        let (a, m, b) = (phi(e), phi(e + gap), phi(e + 2.0 * gap));
        prop_assert!(m <= a * (1.0 + 1e-12) + 1e-14);
        prop_assert!(m <= 0.5 * (a + b) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn white_noise_kl_scales_with_n(c in prop::collection::vec(-1.0f64..1.0, 1..10), n in 1.0f64..1e5, t in 0.1f64..10.0) {
        let f0 = FourierFunction::zeros(c.len());
        let f = FourierFunction::new(c).unwrap();
        let (k1, v1) = kl_divergence_wn(&f0, &f, n);
        let (k2, v2) = kl_divergence_wn(&f0, &f, t * n);
        prop_assert!((k2 - t * k1).abs() <= 1e-10 * k2.abs().max(1e-300));
        prop_assert!((v2 - 2.0 * k2).abs() <= 1e-10 * v2.abs().max(1e-300));
        prop_assert_eq!(kl_divergence_wn(&f, &f0, n), (k1, v1));
    }
}

#[test]
fn analytic_power_profile_passes_invariants() {
    let eps: Vec<f64> = (0..40).map(|i| 0.9 * 0.9f64.powi(i)).collect();
    let p = ConcentrationProfile::analytic(eps, |e| e.powf(-2.0)).unwrap();
    assert!(p.check_invariants().passed());
}
