//! Globally adaptive Gauss–Kronrod (G7/K15) integration over a list of
//! user-supplied panels.
//!
//! Every panel carries its own integrand, so a caller can mix a variable
//! substitution on one panel with the plain integrand on the others while
//! still sharing a single error budget. The panel with the largest error
//! estimate is bisected until the summed error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Accuracy and resource limits for the decoherence-factor integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on the total number of panels, initial layout included.
    pub max_panels: usize,
    /// Upper truncation of the frequency integral.
    pub omega_max: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_panels: 400_000,
            omega_max: 60.0,
        }
    }
}

impl QuadratureConfig {
    /// Same limits, tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("quadrature tolerances must be positive".into()));
        }
        if !(self.omega_max >= 40.0) || !self.omega_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "omega_max must be finite and >= 40, got {}",
                self.omega_max
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidConfig("max_panels must be positive".into()));
        }
        Ok(())
    }
}

/// Integral estimate with its accumulated error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// One interval of the integration domain with the integrand used on it.
pub struct Segment<'a> {
    pub lo: f64,
    pub hi: f64,
    pub f: &'a dyn Fn(f64) -> f64,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    segment: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger error first; ties broken by position for determinism
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Single G7/K15 evaluation on `[a, b]`, returning `(kronrod, error)`.
///
/// The error uses the QUADPACK rescaling of `|K - G|` with a round-off floor.
pub fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptively integrate the sum of all segments to
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(
    segments: &[Segment<'_>],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    let mut heap = BinaryHeap::with_capacity(segments.len() * 2);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (idx, seg) in segments.iter().enumerate() {
        if seg.hi <= seg.lo {
            continue;
        }
        let (value, error) = gauss_kronrod_15(seg.f, seg.lo, seg.hi);
        total += value;
        total_err += error;
        heap.push(Panel { lo: seg.lo, hi: seg.hi, value, error, segment: idx });
    }
    // panels too narrow to split; their error is final
    let mut frozen = Vec::new();
    let mut frozen_err = 0.0;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() + frozen.len() >= max_panels {
            let (value, error) = resum(&heap, &frozen);
            return Err(Error::QuadratureNonConvergence { value, error, panels: heap.len() + frozen.len() });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) || (worst.hi - worst.lo) < 1e-14 * mid.abs().max(1e-300) {
            frozen_err += worst.error;
            frozen.push(worst);
            if frozen_err > abs_tol.max(rel_tol * total.abs()) && heap.is_empty() {
                break;
            }
            continue;
        }
        let f = segments[worst.segment].f;
        let (v1, e1) = gauss_kronrod_15(f, worst.lo, mid);
        let (v2, e2) = gauss_kronrod_15(f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1, segment: worst.segment });
        heap.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2, segment: worst.segment });
    }

    let (value, error) = resum(&heap, &frozen);
    let panels = heap.len() + frozen.len();
    if error > abs_tol.max(rel_tol * value.abs()) {
        return Err(Error::QuadratureNonConvergence { value, error, panels });
    }
    Ok(Estimate { value, error, panels })
}

fn resum(heap: &BinaryHeap<Panel>, frozen: &[Panel]) -> (f64, f64) {
    // sum in domain order so the result does not depend on heap layout
    let mut all: Vec<(usize, f64, f64, f64)> = heap
        .iter()
        .chain(frozen.iter())
        .map(|p| (p.segment, p.lo, p.value, p.error))
        .collect();
    all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    all.iter().fold((0.0, 0.0), |(v, e), p| (v + p.2, e + p.3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn run(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Estimate {
        integrate(&[Segment { lo: a, hi: b, f }], 1e-13, 1e-12, 10_000).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let est = run(&|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0);
        assert_relative_eq!(est.value, 64.0 / 6.0 - 4.0, max_relative = 1e-14);
        assert_eq!(est.panels, 1);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} dx = 2
        let est = run(&|x: f64| x.powf(-0.5), 0.0, 1.0);
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-10);
        assert!(est.panels > 1);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^{20π} sin²(x) e^{-x/10} dx, closed form via 1/2 (1 - cos 2x)
        let f = |x: f64| x.sin().powi(2) * (-x / 10.0).exp();
        let b = 20.0 * std::f64::consts::PI;
        let exact = {
            let k = 0.1_f64;
            let tail = (-k * b).exp();
            0.5 * (1.0 - tail) / k - 0.5 * k * (1.0 - tail) / (k * k + 4.0)
        };
        let est = run(&f, 0.0, b);
        assert_relative_eq!(est.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn mixed_segments_share_budget() {
        let g = |x: f64| x.exp();
        let h = |x: f64| 2.0 * x;
        let est = integrate(
            &[Segment { lo: 0.0, hi: 1.0, f: &g }, Segment { lo: 1.0, hi: 2.0, f: &h }],
            1e-13,
            1e-12,
            1000,
        )
        .unwrap();
        assert_relative_eq!(est.value, 1f64.exp() - 1.0 + 3.0, max_relative = 1e-13);
    }

    #[test]
    fn panel_cap_reports_partial_value() {
        let f = |x: f64| x.powf(-0.9);
        let err = integrate(&[Segment { lo: 0.0, hi: 1.0, f: &f }], 1e-14, 1e-14, 4).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { value, error, panels } => {
                assert!(value > 0.0 && error > 0.0);
                assert_eq!(panels, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig { omega_max: 30.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
