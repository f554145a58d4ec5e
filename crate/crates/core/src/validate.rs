//! Self-check suite: derivative consistency, oracle equivalences and
//! closed-form cross-checks, each reduced to a pass/fail row.
//!
//! Closed-form approximations are checked only inside the regime where
//! their neglected terms are below the stated tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::bath::OhmicSpectrum;
use crate::dephasing::{self, ProbePreparation, ProbeState, Saturation};
use crate::error::Result;
use crate::estimate::{TemperatureEstimate, TemperatureInverter};
use crate::metrology::{self, MeasurementSetting};
use crate::optimize::{self, OptimizerConfig};
use crate::quadrature::{integrate, QuadratureConfig, Segment};
use crate::rng::SplitMix64;
use crate::specialfn::{gamma_fn, polygamma};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed discrepancy against the tolerance, or the error text.
    pub detail: String,
}

type CheckFn = fn(&QuadratureConfig) -> Result<(f64, f64)>;

/// Every check as `(name, fn)`; each returns `(worst, tolerance)`.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("special_functions", check_special_functions),
    ("spectral_normalization", check_spectral_normalization),
    ("dgamma_dt_finite_difference", check_derivative),
    ("qfi_eigen_oracle", check_eigen_oracle),
    ("equatorial_preparation_optimal", check_equatorial),
    ("sigma_x_saturates_qfi", check_sigma_x),
    ("classical_below_quantum", check_fisher_bound),
    ("super_ohmic_saturation", check_saturation),
    ("low_t_ohmic_closed_form", check_low_t),
    ("high_t_chain", check_high_t),
    ("qsnr_universal_constant", check_qsnr),
    ("inversion_round_trip", check_inversion),
];

/// Runs every check with quadrature settings `qcfg`.
pub fn run_suite(qcfg: &QuadratureConfig) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| match check(qcfg) {
            Ok((worst, tol)) => CheckOutcome {
                name,
                passed: worst <= tol,
                detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
            },
            Err(e) => CheckOutcome { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

/// Relative difference; non-finite results become +inf so that
/// `f64::max` cannot drop them.
fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let d = (a - b).abs() / b.abs();
    if d.is_finite() {
        d
    } else {
        f64::INFINITY
    }
}

fn tight(qcfg: &QuadratureConfig) -> QuadratureConfig {
    qcfg.scaled(1e-3)
}

fn check_special_functions(_: &QuadratureConfig) -> Result<(f64, f64)> {
    let mut worst = rel(gamma_fn(5.0)?, 24.0);
    worst = worst.max(rel(gamma_fn(0.5)?, PI.sqrt()));
    worst = worst.max(rel(polygamma(1, 1.0)?, PI * PI / 6.0));
    worst = worst.max(rel(polygamma(0, 1.0)?, -0.577_215_664_901_532_9));
    for x in [0.3, 1.7, 4.2, 11.5] {
        worst = worst.max(rel(gamma_fn(x + 1.0)?, x * gamma_fn(x)?));
        worst = worst.max(rel(polygamma(1, x + 1.0)?, polygamma(1, x)? - 1.0 / (x * x)));
    }
    Ok((worst, 1e-12))
}

fn check_spectral_normalization(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    // ∫ J(ω) dω = Γ(s + 1)
    let mut worst: f64 = 0.0;
    for s in [0.5, 1.0, 3.0] {
        let spec = OhmicSpectrum::new(s)?;
        let j = |w: f64| spec.spectral_density(w).unwrap_or(f64::NAN);
        let est = integrate(
            &[Segment { lo: 0.0, hi: 1.0, f: &j }, Segment { lo: 1.0, hi: qcfg.omega_max + 20.0, f: &j }],
            1e-14,
            1e-12,
            qcfg.max_panels,
        )?;
        worst = worst.max(rel(est.value, gamma_fn(s + 1.0)?));
    }
    Ok((worst, 1e-8))
}

fn check_derivative(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let cfg = tight(qcfg);
    let mut rng = SplitMix64::new(20_240_101);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let s = 0.3 + 3.7 * rng.next_f64();
        let temp = 0.05 + 5.0 * rng.next_f64();
        let t = 0.1 + 10.0 * rng.next_f64();
        let spec = OhmicSpectrum::new(s)?;
        let h = 1e-3 * temp;
        let g = |x: f64| dephasing::decoherence_factor(&spec, x, t, &cfg);
        let fd = (g(temp - 2.0 * h)? - 8.0 * g(temp - h)? + 8.0 * g(temp + h)? - g(temp + 2.0 * h)?) / (12.0 * h);
        worst = worst.max(rel(fd, dephasing::decoherence_factor_dt(&spec, temp, t, &cfg)?));
    }
    Ok((worst, 1e-5))
}

fn family<'a>(
    spec: &'a OhmicSpectrum,
    t: f64,
    theta: f64,
    cfg: &'a QuadratureConfig,
) -> impl Fn(f64) -> Result<ProbeState> + 'a {
    move |temp| {
        let g = dephasing::decoherence_factor(spec, temp, t, cfg)?;
        dephasing::evolved_state(&ProbePreparation::new(theta)?, g)
    }
}

fn check_eigen_oracle(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let cfg = tight(qcfg);
    let mut worst: f64 = 0.0;
    for &(s, temp, t) in &[(0.5, 0.2, 1.0), (1.0, 0.5, 2.0), (3.0, 1.0, 4.0), (2.0, 3.0, 0.5)] {
        let spec = OhmicSpectrum::new(s)?;
        let closed = metrology::qfi(&spec, temp, t, &cfg)?.qfi;
        let general =
            metrology::qfi_general_2x2(&family(&spec, t, FRAC_PI_2, &cfg), temp, metrology::default_step(temp))?;
        worst = worst.max(rel(general, closed));
    }
    Ok((worst, 1e-6))
}

fn check_equatorial(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    // H(θ) / H(π/2) - 1 over a θ grid; positive values are violations
    let cfg = tight(qcfg);
    let mut worst = f64::NEG_INFINITY;
    for &(s, temp, t) in &[(1.0, 0.5, 2.0), (3.0, 0.1, 5.0)] {
        let spec = OhmicSpectrum::new(s)?;
        let step = metrology::default_step(temp);
        let at = |theta: f64| metrology::qfi_general_2x2(&family(&spec, t, theta, &cfg), temp, step);
        let best = at(FRAC_PI_2)?;
        for k in 1..10 {
            let theta = PI * k as f64 / 10.0;
            if (theta - FRAC_PI_2).abs() > 1e-9 {
                let h = at(theta)?;
                worst = worst.max(rel(h, best).copysign(h - best));
            }
        }
    }
    Ok((worst, 0.0))
}

fn check_sigma_x(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let prep = ProbePreparation::equatorial();
    let mut worst: f64 = 0.0;
    for &(s, temp, t) in &[(0.5, 0.3, 2.0), (1.0, 1.0, 1.0), (3.0, 5.0, 7.0)] {
        let ev = dephasing::evaluate(&OhmicSpectrum::new(s)?, temp, t, qcfg)?;
        let f = metrology::classical_fisher(&MeasurementSetting::sigma_x(), &prep, ev.gamma, ev.dgamma_dt)?;
        worst = worst.max(rel(f, metrology::qfi_dephasing(ev.gamma, ev.dgamma_dt)?));
    }
    Ok((worst, 1e-12))
}

fn check_fisher_bound(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    // max of F / H - 1; positive beyond round-off is a violation
    let ev = dephasing::evaluate(&OhmicSpectrum::new(1.0)?, 0.5, 2.0, qcfg)?;
    let h = metrology::qfi_dephasing(ev.gamma, ev.dgamma_dt)?;
    let mut rng = SplitMix64::new(5);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let z = 2.0 * rng.next_f64() - 1.0;
        let phi = 2.0 * PI * rng.next_f64();
        let r = (1.0 - z * z).sqrt();
        let setting = MeasurementSetting::new([r * phi.cos(), r * phi.sin(), z])?;
        let prep = ProbePreparation::new(PI * rng.next_f64())?;
        let f = metrology::classical_fisher(&setting, &prep, ev.gamma, ev.dgamma_dt)?;
        worst = worst.max(rel(f, h).copysign(f - h));
    }
    Ok((worst, 1e-12))
}

fn check_saturation(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let spec = OhmicSpectrum::new(3.0)?;
    let mut worst: f64 = 0.0;
    for temp in [0.1, 1.0, 5.0] {
        let late = dephasing::decoherence_factor(&spec, temp, 1000.0, qcfg)?;
        let mid = dephasing::decoherence_factor(&spec, temp, 500.0, qcfg)?;
        worst = worst.max(rel(mid, late));
        if let Saturation::Finite(v) = dephasing::saturation_value(&spec, temp, qcfg)? {
            worst = worst.max(rel(v, late));
        } else {
            return Ok((f64::INFINITY, 1e-4));
        }
    }
    Ok((worst, 1e-4))
}

fn check_low_t(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    // the formula drops an O(T) correction, so only the deep low-T regime is checked
    let spec = OhmicSpectrum::new(1.0)?;
    let mut worst: f64 = 0.0;
    for temp in [5e-4, 1e-3, 2e-3] {
        for t in [1.0, 5.0, 10.0, 20.0] {
            let quad = metrology::qfi(&spec, temp, t, qcfg)?.qfi;
            worst = worst.max(rel(metrology::qfi_low_t_ohmic(temp, t)?, quad));
        }
    }
    Ok((worst, 1e-2))
}

fn check_high_t(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    // the chain drops an O(1/T) correction, so it is checked at T = 100
    let temp = 100.0;
    let mut worst: f64 = 0.0;
    for s in [0.5, 1.0, 3.0] {
        let spec = OhmicSpectrum::new(s)?;
        for t in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let quad = metrology::qfi(&spec, temp, t, qcfg)?.qfi;
            worst = worst.max(rel(metrology::qfi_high_t(&spec, temp, t, qcfg)?, quad));
        }
    }
    Ok((worst, 2e-2))
}

/// `max_x x² / (4(e^x - 1))` by bisection on the stationarity condition
/// `x = 2(1 - e^{-x})`.
pub fn universal_qsnr() -> f64 {
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid - 2.0 * (1.0 - (-mid).exp()) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    x * x / (4.0 * x.exp_m1())
}

fn check_qsnr(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let target = universal_qsnr();
    let temp = 100.0;
    let mut worst: f64 = 0.0;
    for s in [0.5, 1.0, 3.0] {
        let opt = optimize::optimal_time(&OhmicSpectrum::new(s)?, temp, &OptimizerConfig::for_time(), qcfg)?;
        worst = worst.max((metrology::qsnr(temp, opt.f_opt)? - target).abs());
    }
    Ok((worst, 1e-3))
}

fn check_inversion(qcfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let spec = OhmicSpectrum::new(1.0)?;
    let t = 1.5;
    let inverter = TemperatureInverter::new(&spec, t, qcfg)?;
    let mut worst: f64 = 0.0;
    for temp in [0.05, 0.5, 5.0] {
        let g = dephasing::decoherence_factor(&spec, temp, t, qcfg)?;
        match inverter.invert_frequency(0.5 * (1.0 + (-g).exp()))? {
            TemperatureEstimate::Value(est) => worst = worst.max(rel(est, temp)),
            TemperatureEstimate::Degenerate => return Ok((f64::INFINITY, 1e-8)),
        }
    }
    Ok((worst, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_constant_value() {
        assert!((universal_qsnr() - 0.161_902_559_472_978_7).abs() < 1e-14);
    }

    #[test]
    fn suite_passes_with_defaults() {
        let rows = run_suite(&QuadratureConfig::default());
        assert_eq!(rows.len(), CHECKS.len());
        for row in &rows {
            assert!(row.passed, "{}: {}", row.name, row.detail);
        }
    }
}
