//! Fisher information of the dephased probe with respect to temperature.
//!
//! The workhorse is the closed form for the equatorial probe,
//! `H = (∂_T Γ)² / (e^{2Γ} - 1)`. [`qfi_general_2x2`] evaluates the
//! eigendecomposition formula for any family of qubit states and serves as
//! an independent oracle for it.

use serde::{Deserialize, Serialize};

use crate::bath::OhmicSpectrum;
use crate::dephasing::{self, integrate_power_weighted, ProbePreparation, ProbeState};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::specialfn::{gamma_fn, sinc};

/// Two-outcome projective measurement `M± = (1 ± a·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    a: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        let norm2: f64 = a.iter().map(|x| x * x).sum();
        if !((norm2 - 1.0).abs() <= 1e-12) {
            return Err(Error::Domain(format!(
                "Bloch direction must have unit length, |a|² = {norm2}"
            )));
        }
        Ok(Self { a })
    }

    /// Normalizes `a` first; fails only for the zero vector.
    pub fn from_direction(a: [f64; 3]) -> Result<Self> {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("measurement direction must be non-zero".into()));
        }
        Ok(Self { a: [a[0] / norm, a[1] / norm, a[2] / norm] })
    }

    /// Measurement of σ_x.
    pub fn sigma_x() -> Self {
        Self { a: [1.0, 0.0, 0.0] }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.a
    }
}

/// QFI and QSNR at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub temperature: f64,
    pub time: f64,
    pub qfi: f64,
    pub qsnr: f64,
}

/// `H = (∂_T Γ)² / (e^{2Γ} - 1)` for the equatorial probe.
pub fn qfi_dephasing(gamma: f64, dgamma_dt: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(dgamma_dt >= 0.0) {
        return Err(Error::Domain(format!(
            "qfi_dephasing needs non-negative inputs, got Γ = {gamma}, ∂Γ = {dgamma_dt}"
        )));
    }
    if gamma <= 1e-12 {
        if dgamma_dt == 0.0 {
            return Ok(0.0);
        }
        if gamma == 0.0 {
            return Err(Error::Domain("Γ = 0 with non-zero derivative has no finite QFI".into()));
        }
        // e^{2Γ} - 1 ≈ 2Γ
        return Ok(dgamma_dt * dgamma_dt / (2.0 * gamma));
    }
    let decay = (-2.0 * gamma).exp();
    Ok(dgamma_dt * dgamma_dt * decay / -(-2.0 * gamma).exp_m1())
}

/// Full pipeline: quadrature Γ and ∂_T Γ, then the closed-form QFI.
pub fn qfi(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<QfiResult> {
    let ev = dephasing::evaluate(spec, temperature, time, cfg)?;
    let h = qfi_dephasing(ev.gamma, ev.dgamma_dt)?;
    Ok(QfiResult { temperature, time, qfi: h, qsnr: qsnr(temperature, h)? })
}

/// Real symmetric 2×2 eigensystem with eigenvalues `mean ± radius`.
///
/// The radius `hypot(d, c)` of the traceless part is also kept as
/// `base + excess`, with `base` the larger of `|d|`, `|c|` and
/// `excess = small² / (radius + base)`. Differencing the parts separately
/// keeps the digits that `mean ± radius`, or even `radius` alone, loses when
/// one component is far below the other, as for a strongly dephased probe.
struct Eigen2 {
    mean: f64,
    radius: f64,
    half_diff: f64,
    off: f64,
    /// Rows are the eigenvectors for `mean + radius` and `mean - radius`.
    vectors: [[f64; 2]; 2],
}

impl Eigen2 {
    fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let mean = 0.5 * (m[0][0] + m[1][1]);
        let half_diff = 0.5 * (m[0][0] - m[1][1]);
        let off = m[0][1];
        let radius = half_diff.hypot(off);
        if !(radius > 0.0) {
            return Err(Error::DegenerateSpectrum { gap: 2.0 * radius });
        }
        // rotation angle measured from the dominant diagonal direction, so a
        // tiny off-diagonal element is never added to π
        let phi = 0.5 * off.atan2(half_diff.abs());
        let (sn, cs) = phi.sin_cos();
        let vectors = if half_diff >= 0.0 { [[cs, sn], [-sn, cs]] } else { [[sn, cs], [cs, -sn]] };
        Ok(Self { mean, radius, half_diff, off, vectors })
    }

    /// `(base, excess)` with the diagonal or off-diagonal part as base.
    fn radius_parts(&self, diagonal_base: bool) -> (f64, f64) {
        let (big, small) = if diagonal_base {
            (self.half_diff.abs(), self.off.abs())
        } else {
            (self.off.abs(), self.half_diff.abs())
        };
        (big, small * small / (self.radius + big))
    }

    fn values(&self) -> [f64; 2] {
        let hi = self.mean + self.radius;
        // det / λ₊ keeps the small eigenvalue accurate near a pure state
        let det = (self.mean - self.radius) * hi;
        [hi, if hi > 0.0 { det / hi } else { self.mean - self.radius }]
    }
}

/// Eigendecomposition QFI of the family `state_at(T)` at `temperature`,
/// with central differences of step `step`.
///
/// Eigenvectors at `T ± h` are sign-aligned to the central eigenvectors
/// before differencing.
pub fn qfi_general_2x2(
    state_at: &dyn Fn(f64) -> Result<ProbeState>,
    temperature: f64,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) || !(temperature > step) {
        return Err(Error::Domain(format!(
            "need 0 < h < T, got h = {step}, T = {temperature}"
        )));
    }
    let center = Eigen2::new(state_at(temperature)?.matrix())?;
    let v0 = center.vectors;
    let aligned = |t: f64| -> Result<Eigen2> {
        let mut e = Eigen2::new(state_at(t)?.matrix())?;
        for k in 0..2 {
            if e.vectors[k][0] * v0[k][0] + e.vectors[k][1] * v0[k][1] < 0.0 {
                e.vectors[k] = [-e.vectors[k][0], -e.vectors[k][1]];
            }
        }
        Ok(e)
    };
    let plus = aligned(temperature + step)?;
    let minus = aligned(temperature - step)?;

    let inv = 0.5 / step;
    let d_mean = (plus.mean - minus.mean) * inv;
    let diagonal_base = center.half_diff.abs() >= center.off.abs();
    let (base_p, excess_p) = plus.radius_parts(diagonal_base);
    let (base_m, excess_m) = minus.radius_parts(diagonal_base);
    let d_radius = (base_p - base_m) * inv + (excess_p - excess_m) * inv;
    let lam = center.values();
    let mut classical = 0.0;
    for (k, sign) in [(0, 1.0), (1, -1.0)] {
        let dl = d_mean + sign * d_radius;
        if lam[k] > 1e-14 {
            classical += dl * dl / lam[k];
        }
    }
    let mut quantum = 0.0;
    for n in 0..2 {
        for m in 0..2 {
            if n == m {
                continue;
            }
            let dv = [
                (plus.vectors[m][0] - minus.vectors[m][0]) * inv,
                (plus.vectors[m][1] - minus.vectors[m][1]) * inv,
            ];
            let overlap = v0[n][0] * dv[0] + v0[n][1] * dv[1];
            let gap = 2.0 * center.radius;
            quantum += 2.0 * gap * gap / (lam[n] + lam[m]) * overlap * overlap;
        }
    }
    Ok(classical + quantum)
}

/// Default derivative step for [`qfi_general_2x2`].
pub fn default_step(temperature: f64) -> f64 {
    1e-5 * temperature.max(0.01)
}

/// Quantum signal-to-noise ratio `T² H`.
pub fn qsnr(temperature: f64, qfi: f64) -> Result<f64> {
    if !(temperature > 0.0) || !(qfi >= 0.0) {
        return Err(Error::Domain(format!("qsnr needs T > 0 and H >= 0, got T = {temperature}, H = {qfi}")));
    }
    Ok(temperature * temperature * qfi)
}

/// Low-temperature closed form of the QFI for the Ohmic bath (s = 1),
/// intended for T ≲ 1e-2.
///
/// With `x = π t T`:
/// `H = π² t² (x coth x - 1)² / ((1 + t²) sinh² x - x²)`.
pub fn qfi_low_t_ohmic(temperature: f64, time: f64) -> Result<f64> {
    if !(temperature > 0.0) || !(time >= 0.0) || !time.is_finite() {
        return Err(Error::Domain(format!(
            "qfi_low_t_ohmic needs T > 0, t >= 0, got T = {temperature}, t = {time}"
        )));
    }
    if time == 0.0 {
        return Ok(0.0);
    }
    let x = std::f64::consts::PI * time * temperature;
    let t2 = time * time;
    let x2 = x * x;
    if x < 0.05 {
        // divide numerator and denominator by x²
        let xc = x2 * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)));
        let sinh2_minus_x2_over_x2 = x2 * (1.0 / 3.0 + x2 * (2.0 / 45.0 + x2 / 315.0));
        let den = t2 * (1.0 + sinh2_minus_x2_over_x2) + sinh2_minus_x2_over_x2;
        return Ok(std::f64::consts::PI.powi(2) * t2 * xc * xc / (x2 * den));
    }
    let xc = x / x.tanh() - 1.0;
    let num = std::f64::consts::PI.powi(2) * t2 * xc * xc;
    if x > 20.0 {
        // sinh² x = e^{2x} (1 - e^{-2x})² / 4; scale everything by 4e^{-2x}
        let e = (-2.0 * x).exp();
        let den = (1.0 + t2) * (1.0 - e).powi(2) - 4.0 * x2 * e;
        return Ok(num * 4.0 * e / den);
    }
    let sh2 = x.sinh().powi(2);
    Ok(num / (t2 * sh2 + (sh2 - x2)))
}

/// `K(t, s) = (1 + t²)^{1 - s/2} cos((s - 2) arctan t)`.
pub fn kernel_k(s: f64, time: f64) -> f64 {
    (1.0 + time * time).powf(1.0 - 0.5 * s) * ((s - 2.0) * time.atan()).cos()
}

/// `I(t, s) = ∫ ω^{s-3} e^{-ω} (1 - cos ωt) dω`, the high-temperature
/// decoherence factor per unit `2T`.
///
/// Closed form `Γ̄(s-2)(1 - K)` for s > 2, quadrature otherwise.
pub fn high_t_integral(spec: &OhmicSpectrum, time: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(time >= 0.0) || !time.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {time}")));
    }
    if time == 0.0 {
        return Ok(0.0);
    }
    let s = spec.s();
    if s > 2.0 {
        return Ok(gamma_fn(s - 2.0)? * (1.0 - kernel_k(s, time)));
    }
    let half_t2 = 0.5 * time * time;
    let h = |w: f64| {
        let sc = sinc(0.5 * w * time);
        (-w).exp() * half_t2 * sc * sc
    };
    integrate_power_weighted(s, time, cfg, &h)
}

/// High-temperature decoherence factor `2T · I(t, s)`.
pub fn gamma_high_t(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    Ok(2.0 * temperature * high_t_integral(spec, time, cfg)?)
}

/// High-temperature QFI `4 I² / (e^{4 T I} - 1)`, obtained by feeding
/// Γ = 2T·I and ∂_T Γ = 2I into the closed-form QFI.
///
/// The commonly quoted display
/// `4(K - 1)² Γ̄(s-2)² / (e^{(1 - K) Γ̄(s-2)} - 1)` drops the temperature
/// from the exponent; it is not used here.
pub fn qfi_high_t(
    spec: &OhmicSpectrum,
    temperature: f64,
    time: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let gamma = gamma_high_t(spec, temperature, time, cfg)?;
    let dgamma = 2.0 * high_t_integral(spec, time, cfg)?;
    qfi_dephasing(gamma, dgamma)
}

/// Outcome probabilities `p± = (1 ± a₁ e^{-Γ} sin θ)/2`.
pub fn outcome_probabilities(
    setting: &MeasurementSetting,
    prep: &ProbePreparation,
    gamma: f64,
) -> (f64, f64) {
    let v = setting.a[0] * (-gamma).exp() * prep.theta().sin();
    (0.5 * (1.0 + v), 0.5 * (1.0 - v))
}

/// Classical Fisher information of the binary measurement,
/// `F = q² (∂_T Γ)² e^{-2Γ} / (1 - q² e^{-2Γ})` with `q = a₁ sin θ`.
pub fn classical_fisher(
    setting: &MeasurementSetting,
    prep: &ProbePreparation,
    gamma: f64,
    dgamma_dt: f64,
) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("decoherence factor must be >= 0, got {gamma}")));
    }
    let q = setting.a[0] * prep.theta().sin();
    let q2 = q * q;
    let num = q2 * dgamma_dt * dgamma_dt * (-2.0 * gamma).exp();
    // 1 - q² e^{-2Γ} = (1 - q)(1 + q) + q² (1 - e^{-2Γ})
    let den = (1.0 - q.abs()) * (1.0 + q.abs()) + q2 * -(-2.0 * gamma).exp_m1();
    if num == 0.0 {
        return Ok(0.0);
    }
    if den <= 0.0 {
        return Err(Error::Domain("outcome distribution is deterministic; Fisher information diverges".into()));
    }
    Ok(num / den)
}
