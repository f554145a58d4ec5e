//! Decoherence factor of a qubit dephasing in an Ohmic-family thermal bath,
//! its temperature derivative, and the resulting probe state.
//!
//! In cutoff units the decoherence factor is
//!
//! ```text
//! Γ(T, t) = ∫_0^∞ ω^{s-2} e^{-ω} (1 - cos ωt) coth(ω / 2T) dω
//! ```
//!
//! Both integrands are rewritten as `ω^{s-1} · h(ω)` with `h` smooth and
//! finite at the origin:
//!
//! ```text
//! Γ:     h(ω) = e^{-ω} · T t² · sinc²(ωt/2) · x coth x,    x = ω / 2T
//! ∂_T Γ: h(ω) = e^{-ω} · t²   · sinc²(ωt/2) · (x / sinh x)²
//! ```
//!
//! so the small-ω limits are `T t² ω^{s-1}` and `t² ω^{s-1}` respectively,
//! and `1 - cos ωt` is never formed by subtraction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bath::OhmicSpectrum;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig, Segment};
use crate::specialfn::{polygamma, sinc, x_coth_x, x_csch_x_sq};

/// Polygamma order in the s = 3 saturation value `-1 + 2T² ψ^{(m)}(T)`.
///
/// Fixed to trigamma: expanding coth in its geometric series gives
/// `∫ω e^{-ω} coth(ω/2T) dω = 1 + 2T² ψ'(T + 1)`, and the long-time
/// quadrature at t = 1000 agrees with m = 1 to ~1e-6 while m = 0 is off by
/// orders of magnitude (see the `saturation_order_oracle` test).
pub const SATURATION_POLYGAMMA_ORDER: u32 = 1;

/// Time at which the long-time quadrature is taken as the saturation value.
pub const SATURATION_PROBE_TIME: f64 = 1000.0;

/// Γ and ∂_T Γ at one (T, t) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingEvaluation {
    pub temperature: f64,
    pub time: f64,
    pub gamma: f64,
    pub dgamma_dt: f64,
}

/// Initial pure state `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePreparation {
    theta: f64,
}

impl ProbePreparation {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta must lie in [0, π], got {theta}")));
        }
        Ok(Self { theta })
    }

    /// The equatorial preparation θ = π/2.
    pub fn equatorial() -> Self {
        Self { theta: 0.5 * PI }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Dephased qubit: diagonal populations and the real off-diagonal element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeState {
    pub p0: f64,
    pub p1: f64,
    pub coherence: f64,
}

impl ProbeState {
    /// Density matrix `[[p0, c], [c, p1]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.p0, self.coherence], [self.coherence, self.p1]]
    }
}

/// Long-time limit of Γ(T, t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Saturation {
    /// Closed form (s = 3).
    Finite(f64),
    /// Γ grows without bound; the probe fully decoheres.
    Unbounded,
    /// No closed form available; quadrature at [`SATURATION_PROBE_TIME`].
    Estimated(f64),
}

fn check_point(temperature: f64, time: f64) -> Result<()> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    if !(time >= 0.0) || !time.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {time}")));
    }
    Ok(())
}

/// Integrates `ω^{s-1} h(ω)` over `(0, ω_max]`.
///
/// The first panel `(0, min(0.1, π/t)]` absorbs the power law through
/// `ω = a v^{1/s}` when s < 1; the remaining panels follow the zeros of
/// `sin(ωt/2)` for t > 1 and have unit width otherwise.
pub(crate) fn integrate_power_weighted(
    s: f64,
    time: f64,
    cfg: &QuadratureConfig,
    h: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    cfg.validate()?;
    let omega_max = cfg.omega_max;
    let period = PI / time;
    let first = period.min(0.1);

    let substituted = |v: f64| {
        let scale = first.powf(s) / s;
        scale * h(first * v.powf(1.0 / s))
    };
    let direct = |w: f64| w.powf(s - 1.0) * h(w);

    let mut segments = Vec::new();
    if s < 1.0 {
        segments.push(Segment { lo: 0.0, hi: 1.0, f: &substituted });
    } else {
        segments.push(Segment { lo: 0.0, hi: first, f: &direct });
    }

    let mut lo = first;
    if time > 1.0 {
        let mut k = (first / period).floor() + 1.0;
        loop {
            let hi = (k * period).min(omega_max);
            if hi > lo {
                segments.push(Segment { lo, hi, f: &direct });
                lo = hi;
            }
            if hi >= omega_max {
                break;
            }
            k += 1.0;
        }
    } else {
        while lo < omega_max {
            let hi = (lo + 1.0).min(omega_max);
            segments.push(Segment { lo, hi, f: &direct });
            lo = hi;
        }
    }

    let est = integrate(&segments, cfg.abs_tol, cfg.rel_tol, cfg.max_panels)?;
    Ok(est.value)
}

/// Γ(T, t) by adaptive quadrature.
pub fn decoherence_factor(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_point(temperature, time)?;
    if time == 0.0 {
        return Ok(0.0);
    }
    let scale = temperature * time * time;
    let h = |w: f64| {
        let sc = sinc(0.5 * w * time);
        (-w).exp() * scale * sc * sc * x_coth_x(w / (2.0 * temperature))
    };
    integrate_power_weighted(spec.s(), time, cfg, &h)
}

/// ∂Γ/∂T by quadrature of the differentiated integrand
/// `J(ω)(1 - cos ωt) csch²(ω/2T) / (2T² ω)`.
pub fn decoherence_factor_dt(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_point(temperature, time)?;
    if time == 0.0 {
        return Ok(0.0);
    }
    let scale = time * time;
    let h = |w: f64| {
        let sc = sinc(0.5 * w * time);
        (-w).exp() * scale * sc * sc * x_csch_x_sq(w / (2.0 * temperature))
    };
    integrate_power_weighted(spec.s(), time, cfg, &h)
}

/// Γ and ∂_T Γ together.
pub fn evaluate(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<DephasingEvaluation> {
    Ok(DephasingEvaluation {
        temperature,
        time,
        gamma: decoherence_factor(spec, temperature, time, cfg)?,
        dgamma_dt: decoherence_factor_dt(spec, temperature, time, cfg)?,
    })
}

/// Probe state after dephasing with factor `gamma`.
pub fn evolved_state(prep: &ProbePreparation, gamma: f64) -> Result<ProbeState> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("decoherence factor must be >= 0, got {gamma}")));
    }
    let half = 0.5 * prep.theta;
    Ok(ProbeState {
        p0: half.cos().powi(2),
        p1: half.sin().powi(2),
        coherence: 0.5 * (-gamma).exp() * prep.theta.sin(),
    })
}

/// Sum of the absolute off-diagonal elements, `e^{-Γ} sin θ`.
pub fn residual_coherence(state: &ProbeState) -> f64 {
    2.0 * state.coherence.abs()
}

/// Long-time value of Γ at temperature `T`.
pub fn saturation_value(
    spec: &OhmicSpectrum,
    temperature: f64,
    cfg: &QuadratureConfig,
) -> Result<Saturation> {
    check_point(temperature, 0.0)?;
    let s = spec.s();
    if s <= 2.0 {
        // ∫ ω^{s-2} coth(ω/2T) e^{-ω} dω ~ 2T ∫ ω^{s-3} dω diverges at ω → 0
        return Ok(Saturation::Unbounded);
    }
    if s == 3.0 {
        let psi = polygamma(SATURATION_POLYGAMMA_ORDER, temperature)?;
        return Ok(Saturation::Finite(-1.0 + 2.0 * temperature * temperature * psi));
    }
    let value = decoherence_factor(spec, temperature, SATURATION_PROBE_TIME, cfg)?;
    Ok(Saturation::Estimated(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(s: f64) -> OhmicSpectrum {
        OhmicSpectrum::new(s).unwrap()
    }

    fn tight() -> QuadratureConfig {
        QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-12, ..Default::default() }
    }

    #[test]
    fn zero_time_is_exactly_zero() {
        let cfg = QuadratureConfig::default();
        for s in [0.5, 1.0, 3.0] {
            for temp in [0.01, 1.0, 50.0] {
                assert_eq!(decoherence_factor(&spec(s), temp, 0.0, &cfg).unwrap(), 0.0);
                assert_eq!(decoherence_factor_dt(&spec(s), temp, 0.0, &cfg).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_points() {
        let cfg = QuadratureConfig::default();
        assert!(decoherence_factor(&spec(1.0), 0.0, 1.0, &cfg).is_err());
        assert!(decoherence_factor(&spec(1.0), 1.0, -1.0, &cfg).is_err());
        assert!(decoherence_factor_dt(&spec(1.0), -2.0, 1.0, &cfg).is_err());
        let bad = QuadratureConfig { omega_max: 10.0, ..Default::default() };
        assert!(decoherence_factor(&spec(1.0), 1.0, 1.0, &bad).is_err());
    }

    #[test]
    fn zero_temperature_superohmic_closed_form() {
        // T → 0: ∫ ω e^{-ω} (1 - cos ωt) dω = 1 - (1 - t²)/(1 + t²)²
        for t in [0.5f64, 1.0, 2.0, 7.0] {
            let expect = 1.0 - (1.0 - t * t) / (1.0 + t * t).powi(2);
            let got = decoherence_factor(&spec(3.0), 1e-4, t, &tight()).unwrap();
            assert_relative_eq!(got, expect, max_relative = 1e-7);
        }
    }

    #[test]
    fn high_temperature_ohmic_closed_form() {
        // coth(ω/2T) → 2T/ω, ∫ ω^{-2} e^{-ω}(1 - cos ωt) dω = t atan t - ln(1+t²)/2
        let (temp, t) = (50.0, 2.0f64);
        let expect = 2.0 * temp * (t * t.atan() - 0.5 * (1.0 + t * t).ln());
        let got = decoherence_factor(&spec(1.0), temp, t, &tight()).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-2);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (temp, t) = (0.5, 3.0);
        let h = 1e-4 * temp;
        let g = |x: f64| decoherence_factor(&spec(1.0), x, t, &tight()).unwrap();
        let fd = (g(temp + h) - g(temp - h)) / (2.0 * h);
        let got = decoherence_factor_dt(&spec(1.0), temp, t, &tight()).unwrap();
        assert_relative_eq!(got, fd, max_relative = 1e-5);
    }

    #[test]
    fn high_temperature_superohmic_derivative() {
        // ∂_T Γ → 2 Γ(s-2) (1 - K(3,1)) = 1
        let got = decoherence_factor_dt(&spec(3.0), 20.0, 1.0, &tight()).unwrap();
        assert_relative_eq!(got, 1.0, max_relative = 2e-2);
    }

    #[test]
    fn evolved_state_examples() {
        let eq = ProbePreparation::equatorial();
        let st = evolved_state(&eq, 0.0).unwrap();
        assert_relative_eq!(st.p0, 0.5, max_relative = 1e-15);
        assert_relative_eq!(st.p1, 0.5, max_relative = 1e-15);
        assert_relative_eq!(st.coherence, 0.5, max_relative = 1e-15);

        let pole = ProbePreparation::new(0.0).unwrap();
        let st = evolved_state(&pole, 3.0).unwrap();
        assert_eq!((st.p0, st.p1, st.coherence), (1.0, 0.0, 0.0));

        let st = evolved_state(&eq, 2f64.ln()).unwrap();
        assert_relative_eq!(st.coherence, 0.25, max_relative = 1e-15);
        assert!(evolved_state(&eq, -0.1).is_err());
        assert!(ProbePreparation::new(4.0).is_err());
    }

    #[test]
    fn residual_coherence_examples() {
        let eq = ProbePreparation::equatorial();
        assert_relative_eq!(residual_coherence(&evolved_state(&eq, 0.0).unwrap()), 1.0);
        assert_eq!(residual_coherence(&evolved_state(&eq, 800.0).unwrap()), 0.0);
        assert_relative_eq!(
            residual_coherence(&evolved_state(&eq, 1.0).unwrap()),
            (-1f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn saturation_classification() {
        let cfg = QuadratureConfig::default();
        assert_eq!(saturation_value(&spec(1.0), 0.5, &cfg).unwrap(), Saturation::Unbounded);
        assert_eq!(saturation_value(&spec(0.5), 0.1, &cfg).unwrap(), Saturation::Unbounded);
        assert!(matches!(saturation_value(&spec(3.0), 1.0, &cfg).unwrap(), Saturation::Finite(_)));
        assert!(matches!(saturation_value(&spec(4.0), 1.0, &cfg).unwrap(), Saturation::Estimated(_)));
    }

    #[test]
    fn saturation_order_oracle() {
        let temp = 1.0;
        let long = decoherence_factor(&spec(3.0), temp, SATURATION_PROBE_TIME, &tight()).unwrap();
        let with = |m: u32| -1.0 + 2.0 * temp * temp * polygamma(m, temp).unwrap();
        assert_relative_eq!(with(1), long, max_relative = 1e-4);
        assert!(((with(0) - long) / long).abs() > 1.0);
        match saturation_value(&spec(3.0), temp, &tight()).unwrap() {
            Saturation::Finite(v) => assert_relative_eq!(v, long, max_relative = 1e-4),
            other => panic!("expected finite, got {other:?}"),
        }
    }
}
