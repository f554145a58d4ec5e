use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use qthermo::dephasing::{self, ProbePreparation, Saturation};
use qthermo::metrology::{self, MeasurementSetting};
use qthermo::quadrature::{integrate, Segment};
use qthermo::rng::SplitMix64;
use qthermo::specialfn::gamma_fn;
use qthermo::{OhmicSpectrum, QuadratureConfig};

fn spec(s: f64) -> OhmicSpectrum {
    OhmicSpectrum::new(s).unwrap()
}

fn tight() -> QuadratureConfig {
    QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-12, ..Default::default() }
}

#[test]
fn spectral_density_integrates_to_gamma() {
    for s in [0.3, 0.5, 1.0, 2.0, 3.0, 4.5] {
        let sp = spec(s);
        let j = |w: f64| sp.spectral_density(w).unwrap();
        let est = integrate(
            &[Segment { lo: 0.0, hi: 1.0, f: &j }, Segment { lo: 1.0, hi: 100.0, f: &j }],
            1e-14,
            1e-12,
            100_000,
        )
        .unwrap();
        assert_relative_eq!(est.value, gamma_fn(s + 1.0).unwrap(), max_relative = 1e-8);
    }
}

#[test]
fn gamma_grows_with_time_for_ohmic_and_sub_ohmic() {
    let cfg = QuadratureConfig::default();
    for s in [0.5, 1.0] {
        for temp in [0.05, 0.5, 5.0] {
            let mut prev = 0.0;
            for i in 1..=100 {
                let t = 0.5 * i as f64;
                let g = dephasing::decoherence_factor(&spec(s), temp, t, &cfg).unwrap();
                assert!(g >= prev, "s = {s}, T = {temp}, t = {t}: {g} < {prev}");
                prev = g;
            }
        }
    }
}

#[test]
fn super_ohmic_gamma_saturates() {
    let cfg = QuadratureConfig::default();
    for temp in [0.1, 1.0, 5.0] {
        let late = dephasing::decoherence_factor(&spec(3.0), temp, 1000.0, &cfg).unwrap();
        let mid = dephasing::decoherence_factor(&spec(3.0), temp, 500.0, &cfg).unwrap();
        assert_relative_eq!(mid, late, max_relative = 1e-4);
        match dephasing::saturation_value(&spec(3.0), temp, &cfg).unwrap() {
            Saturation::Finite(v) => assert_relative_eq!(v, late, max_relative = 1e-4),
            other => panic!("expected a closed form, got {other:?}"),
        }
    }
}

#[test]
fn saturation_classes() {
    let cfg = QuadratureConfig::default();
    for s in [0.5, 1.0, 2.0] {
        assert_eq!(dephasing::saturation_value(&spec(s), 1.0, &cfg).unwrap(), Saturation::Unbounded);
    }
    assert!(matches!(dephasing::saturation_value(&spec(4.0), 1.0, &cfg).unwrap(), Saturation::Estimated(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma_increases_with_temperature(s in 0.3f64..4.0, temp in 0.01f64..5.0, t in 0.1f64..20.0) {
        let cfg = QuadratureConfig::default();
        let lo = dephasing::decoherence_factor(&spec(s), temp, t, &cfg).unwrap();
        let hi = dephasing::decoherence_factor(&spec(s), temp * 1.1, t, &cfg).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn derivative_and_qfi_are_non_negative(s in 0.3f64..6.0, temp in 0.001f64..50.0, t in 0.01f64..50.0) {
        let r = metrology::qfi(&spec(s), temp, t, &QuadratureConfig::default()).unwrap();
        prop_assert!(r.qfi >= 0.0 && r.qfi.is_finite());
        prop_assert!(r.qsnr >= 0.0);
        let d = dephasing::decoherence_factor_dt(&spec(s), temp, t, &QuadratureConfig::default()).unwrap();
        prop_assert!(d > 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences(s in 0.3f64..4.0, temp in 0.05f64..10.0, t in 0.1f64..20.0) {
        let cfg = tight();
        let h = 1e-3 * temp;
        let g = |x: f64| dephasing::decoherence_factor(&spec(s), x, t, &cfg).unwrap();
        let fd = (g(temp - 2.0 * h) - 8.0 * g(temp - h) + 8.0 * g(temp + h) - g(temp + 2.0 * h)) / (12.0 * h);
        let direct = dephasing::decoherence_factor_dt(&spec(s), temp, t, &cfg).unwrap();
        prop_assert!((fd - direct).abs() <= 1e-5 * direct.abs(), "fd {} vs {}", fd, direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evolved_state_stays_positive(theta in 0.0f64..PI, gamma in 0.0f64..50.0) {
        let st = dephasing::evolved_state(&ProbePreparation::new(theta).unwrap(), gamma).unwrap();
        prop_assert!(st.coherence * st.coherence <= st.p0 * st.p1 * (1.0 + 1e-12));
        if gamma > 1e-6 {
            prop_assert!(st.coherence * st.coherence < st.p0 * st.p1 || st.p0 * st.p1 == 0.0);
        }
    }
}

#[test]
fn pure_equatorial_state_saturates_positivity() {
    let st = dephasing::evolved_state(&ProbePreparation::equatorial(), 0.0).unwrap();
    assert_relative_eq!(st.coherence * st.coherence, st.p0 * st.p1, max_relative = 1e-15);
}

#[test]
fn classical_fisher_never_exceeds_qfi() {
    let cfg = QuadratureConfig::default();
    let ev = dephasing::evaluate(&spec(1.0), 0.4, 2.5, &cfg).unwrap();
    let h = metrology::qfi_dephasing(ev.gamma, ev.dgamma_dt).unwrap();
    let mut rng = SplitMix64::new(11);
    for _ in 0..100 {
        let z = 2.0 * rng.next_f64() - 1.0;
        let phi = 2.0 * PI * rng.next_f64();
        let r = (1.0 - z * z).sqrt();
        let setting = MeasurementSetting::new([r * phi.cos(), r * phi.sin(), z]).unwrap();
        let prep = ProbePreparation::new(PI * rng.next_f64()).unwrap();
        let f = metrology::classical_fisher(&setting, &prep, ev.gamma, ev.dgamma_dt).unwrap();
        assert!(f <= h * (1.0 + 1e-12), "F = {f} > H = {h}");
    }
    let f = metrology::classical_fisher(&MeasurementSetting::sigma_x(), &ProbePreparation::equatorial(), ev.gamma, ev.dgamma_dt)
        .unwrap();
    assert_relative_eq!(f, h, max_relative = 1e-12);
}

#[test]
fn qfi_scales_as_sin_squared_of_preparation() {
    let cfg = tight();
    let (s, temp, t) = (1.0, 0.5, 2.0);
    let sp = spec(s);
    let at = |theta: f64| {
        let family = |x: f64| {
            let g = dephasing::decoherence_factor(&sp, x, t, &cfg)?;
            dephasing::evolved_state(&ProbePreparation::new(theta)?, g)
        };
        metrology::qfi_general_2x2(&family, temp, metrology::default_step(temp)).unwrap()
    };
    let best = at(FRAC_PI_2);
    for theta in [0.3, 0.8, 1.2, 2.0, 2.9] {
        assert_relative_eq!(at(theta), theta.sin().powi(2) * best, max_relative = 1e-6);
    }
}

#[test]
fn residual_coherence_decays_as_exp_gamma() {
    let prep = ProbePreparation::new(1.0).unwrap();
    let st = dephasing::evolved_state(&prep, 0.7).unwrap();
    assert_relative_eq!(dephasing::residual_coherence(&st), (-0.7f64).exp() * 1.0f64.sin(), max_relative = 1e-14);
    assert_relative_eq!(st.p0 + st.p1, 1.0, max_relative = 1e-15);
}
