use proptest::prelude::*;
use robinwall::infomeasures::{entropic_bound, info_record};
use robinwall::observables::hellmann_feynman_mean_x;
use robinwall::quadrature::{integrate, integrate_vec};
use robinwall::special::{airy, airy_scaled};
use robinwall::spectrum::energy;
use robinwall::states::build_state;
use robinwall::sweep::format_number;
use robinwall::{BoundarySpec, ToleranceConfig};

fn boundary() -> impl Strategy<Value = BoundarySpec> {
    prop::sample::select(BoundarySpec::ALL.to_vec())
}

fn log_field() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn states_are_normalized_and_consistent(bc in boundary(), n in 0usize..4, f in log_field()) {
        let cfg = ToleranceConfig::default();
        let st = energy(bc, n, f).unwrap();
        prop_assert!(st.residual <= 1e-11);
        let sf = build_state(st, &cfg).unwrap();
        let pos = sf.position_integrals().unwrap();
        let mom = sf.momentum_integrals().unwrap();
        prop_assert!((pos.norm - 1.0).abs() <= 10.0 * cfg.abs_tol);
        prop_assert!((mom.norm - 1.0).abs() <= 10.0 * cfg.abs_tol);
        prop_assert_eq!(sf.nodes().len(), n);
        prop_assert!(sf.boundary_residual() <= 1e-9 * sf.psi(0.0).abs().max(sf.psi_prime(0.0).abs()));
        let identity = pos.fisher / 4.0 - sf.psi(0.0) * sf.psi_prime(0.0) - f * pos.mean_x;
        prop_assert!((identity - st.energy).abs() <= 1e-6 * st.energy.abs().max(1.0));
        let hf = hellmann_feynman_mean_x(bc, n, f).unwrap();
        prop_assert!((hf - pos.mean_x).abs() <= 1e-6 * pos.mean_x.abs().max(1.0));
        let rec = info_record(&sf).unwrap();
        prop_assert!(rec.s_t >= entropic_bound());
    }

    #[test]
    fn levels_increase_with_field(bc in boundary(), n in 0usize..5, f in log_field(), ratio in 1.01f64..3.0) {
        let lo = energy(bc, n, f).unwrap().energy;
        let hi = energy(bc, n, f * ratio).unwrap().energy;
        prop_assert!(hi > lo);
        prop_assert!(energy(bc, n + 1, f).unwrap().energy > lo);
    }

    #[test]
    fn airy_obeys_its_equation(x in -20.0f64..5.0) {
        let h = 1e-4;
        let second = (airy(x + h).ai_prime - airy(x - h).ai_prime) / (2.0 * h);
        prop_assert!((second - x * airy(x).ai).abs() <= 1e-7 * (1.0 + x.abs()));
    }

    #[test]
    fn scaled_airy_matches_unscaled(x in -10.0f64..30.0) {
        let (ai, aip) = airy_scaled(x).unscaled();
        let v = airy(x);
        prop_assert!((ai - v.ai).abs() <= 1e-13 * v.ai.abs().max(1e-300) + 1e-300);
        prop_assert!((aip - v.ai_prime).abs() <= 1e-13 * v.ai_prime.abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn quadrature_meets_requested_tolerance(a in 0.2f64..5.0, c in -2.0f64..2.0, tol_exp in 6i32..12) {
        let tol = 10f64.powi(-tol_exp);
        let cfg = ToleranceConfig { abs_tol: tol, rel_tol: tol, ..ToleranceConfig::default() };
        // int_{-3}^{3} exp(-a (x - c)^2) dx = sqrt(pi/a)/2 [erf(sqrt(a)(3 - c)) + erf(sqrt(a)(3 + c))]
        let exact = (std::f64::consts::PI / a).sqrt() / 2.0
            * (libm::erf(a.sqrt() * (3.0 - c)) + libm::erf(a.sqrt() * (3.0 + c)));
        let got = integrate(|x| (-a * (x - c).powi(2)).exp(), -3.0, 3.0, &cfg).unwrap();
        prop_assert!((got - exact).abs() <= 10.0 * tol.max(tol * exact.abs()));
    }

    #[test]
    fn tighter_tolerance_never_loses_accuracy(w in 1.0f64..40.0) {
        let exact = (1.0 - (3.0 * w).cos()) / w;
        let err = |tol: f64| {
            let cfg = ToleranceConfig { abs_tol: tol, rel_tol: tol, ..ToleranceConfig::default() };
            let est = integrate_vec(|x| [(w * x).sin()], 0.0, 3.0, &[], &cfg).unwrap();
            ((est.value[0] - exact).abs(), est.error[0])
        };
        let (e1, r1) = err(1e-7);
        let (e2, r2) = err(1e-10);
        prop_assert!(e2 <= e1.max(1e-13));
        prop_assert!(r2 <= r1.max(1e-13));
        prop_assert!(e2 <= 1e-9);
    }

    #[test]
    fn csv_numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }
}
