use qthermo::metrology;
use qthermo::optimize::{optimal_temperature, optimal_time, OptimizerConfig, OptimumKind};
use qthermo::{OhmicSpectrum, QuadratureConfig};

fn spec(s: f64) -> OhmicSpectrum {
    OhmicSpectrum::new(s).unwrap()
}

#[test]
fn interior_optimum_is_a_local_maximum() {
    let qcfg = QuadratureConfig::default();
    let r = optimal_time(&spec(1.0), 0.5, &OptimizerConfig::for_time(), &qcfg).unwrap();
    assert_eq!(r.kind, OptimumKind::InteriorMaximum);
    for factor in [0.99, 1.01, 0.9, 1.1] {
        let h = metrology::qfi(&spec(1.0), 0.5, r.x_opt * factor, &qcfg).unwrap().qfi;
        assert!(h <= r.f_opt, "H({}) = {h} exceeds {}", r.x_opt * factor, r.f_opt);
    }
}

#[test]
fn local_maximum_certificate_at_ten_tolerances() {
    let qcfg = QuadratureConfig::default();
    let ocfg = OptimizerConfig::for_time();
    for (s, temp) in [(0.5, 0.1), (1.0, 1.0), (3.0, 5.0)] {
        let r = optimal_time(&spec(s), temp, &ocfg, &qcfg).unwrap();
        assert_eq!(r.kind, OptimumKind::InteriorMaximum);
        // x_tol is a step in ln t for the log-scale time search
        for sign in [-1.0, 1.0] {
            let t = r.x_opt * (sign * 10.0 * ocfg.x_tol).exp();
            assert!(metrology::qfi(&spec(s), temp, t, &qcfg).unwrap().qfi <= r.f_opt);
        }
    }
}

#[test]
fn optimum_is_stable_under_halved_quadrature_tolerance() {
    let qcfg = QuadratureConfig::default();
    let ocfg = OptimizerConfig::for_time();
    for (s, temp) in [(0.5, 0.3), (1.0, 0.5), (3.0, 2.0), (3.0, 0.05)] {
        let a = optimal_time(&spec(s), temp, &ocfg, &qcfg).unwrap();
        let b = optimal_time(&spec(s), temp, &ocfg, &qcfg.scaled(0.5)).unwrap();
        assert_eq!(a.kind, b.kind);
        assert!((a.x_opt / b.x_opt).ln().abs() <= 2.0 * ocfg.x_tol, "s = {s}: {} vs {}", a.x_opt, b.x_opt);
    }
}

#[test]
fn optimum_is_stable_under_refinement() {
    let qcfg = QuadratureConfig::default();
    let base = OptimizerConfig::for_time();
    let fine = OptimizerConfig { grid_points: 2 * base.grid_points, x_tol: 0.5 * base.x_tol, ..base };
    for (s, temp) in [(0.5, 0.3), (1.0, 0.5), (3.0, 2.0)] {
        let a = optimal_time(&spec(s), temp, &base, &qcfg).unwrap();
        let b = optimal_time(&spec(s), temp, &fine, &qcfg).unwrap();
        assert_eq!(a.kind, b.kind);
        assert!((a.x_opt / b.x_opt - 1.0).abs() < 5e-3, "s = {s}: {} vs {}", a.x_opt, b.x_opt);
        assert!((a.f_opt / b.f_opt - 1.0).abs() < 1e-6);
    }
}

#[test]
fn super_ohmic_regimes_cross_over_once() {
    let qcfg = QuadratureConfig::default();
    let temps: Vec<f64> = (0..10).map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / 9.0)).collect();
    let kinds: Vec<OptimumKind> = temps
        .iter()
        .map(|&t| optimal_time(&spec(3.0), t, &OptimizerConfig::for_time(), &qcfg).unwrap().kind)
        .collect();
    assert_eq!(kinds[0], OptimumKind::Plateau);
    assert_eq!(kinds[9], OptimumKind::InteriorMaximum);
    let switches = kinds.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(switches, 1, "{kinds:?}");
}

#[test]
fn optimal_temperature_is_interior_for_ohmic_bath() {
    let qcfg = QuadratureConfig::default();
    let r = optimal_temperature(&spec(1.0), 2.0, &OptimizerConfig::for_temperature(), &qcfg).unwrap();
    assert_eq!(r.kind, OptimumKind::InteriorMaximum);
    let h = |temp: f64| metrology::qfi(&spec(1.0), temp, 2.0, &qcfg).unwrap().qfi;
    assert!(h(r.x_opt * 0.95) <= r.f_opt && h(r.x_opt * 1.05) <= r.f_opt);
}
