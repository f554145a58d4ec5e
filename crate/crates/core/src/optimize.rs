//! Bracketed one-dimensional maximization of the QFI over interaction time
//! or temperature.
//!
//! The search scans a coarse grid, then refines the best cell by golden
//! section. A saturating objective (best value reached at the upper end
//! with vanishing slope) is reported as a plateau together with the point
//! where it first comes within the threshold of its final value.

use serde::{Deserialize, Serialize};

use crate::bath::OhmicSpectrum;
use crate::error::{Error, Result};
use crate::metrology;
use crate::quadrature::QuadratureConfig;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimumKind {
    InteriorMaximum,
    Plateau,
    /// Best value sits on a bracket edge without saturating.
    Boundary,
}

impl OptimumKind {
    pub fn label(&self) -> &'static str {
        match self {
            OptimumKind::InteriorMaximum => "InteriorMaximum",
            OptimumKind::Plateau => "Plateau",
            OptimumKind::Boundary => "Boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumResult {
    pub x_opt: f64,
    pub f_opt: f64,
    pub kind: OptimumKind,
    /// First grid point within the plateau threshold of the final value.
    pub plateau_onset: Option<f64>,
}

/// Search bracket and tolerances.
///
/// `x_tol` is measured in the scan coordinate: absolute for a linear grid,
/// relative (a step in `ln x`) for a log grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub x_tol: f64,
    pub plateau_rel_slope: f64,
    pub grid_points: usize,
    pub scale: GridScale,
}

impl OptimizerConfig {
    /// Default interaction-time search, `t ∈ [1e-2, 1e3]`.
    pub fn for_time() -> Self {
        Self {
            bracket_lo: 1e-2,
            bracket_hi: 1e3,
            x_tol: 1e-3,
            plateau_rel_slope: 1e-4,
            grid_points: 200,
            scale: GridScale::Log,
        }
    }

    /// Default temperature search, `T ∈ [1e-3, 1e2]`.
    pub fn for_temperature() -> Self {
        Self { bracket_lo: 1e-3, bracket_hi: 1e2, ..Self::for_time() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bracket_lo < self.bracket_hi) || !self.bracket_hi.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "bracket must satisfy lo < hi, got [{}, {}]",
                self.bracket_lo, self.bracket_hi
            )));
        }
        if self.scale == GridScale::Log && !(self.bracket_lo > 0.0) {
            return Err(Error::InvalidConfig("log grid requires a positive lower bracket".into()));
        }
        if !(self.x_tol > 0.0 && self.plateau_rel_slope > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::InvalidConfig("grid_points must be at least 3".into()));
        }
        Ok(())
    }

    fn to_scan(&self, x: f64) -> f64 {
        match self.scale {
            GridScale::Linear => x,
            GridScale::Log => x.ln(),
        }
    }

    fn from_scan(&self, u: f64) -> f64 {
        match self.scale {
            GridScale::Linear => u,
            GridScale::Log => u.exp(),
        }
    }

    /// Coarse grid including both bracket ends exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        let (a, b) = (self.to_scan(self.bracket_lo), self.to_scan(self.bracket_hi));
        (0..n)
            .map(|i| match i {
                0 => self.bracket_lo,
                _ if i == n - 1 => self.bracket_hi,
                _ => self.from_scan(a + (b - a) * i as f64 / (n - 1) as f64),
            })
            .collect()
    }
}

fn eval_checked(f: &mut dyn FnMut(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let v = f(x)?;
    if !v.is_finite() {
        return Err(Error::NonFinite { x });
    }
    Ok(v)
}

/// Maximizes `f` over the configured bracket.
pub fn maximize_scalar(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    cfg: &OptimizerConfig,
) -> Result<OptimumResult> {
    cfg.validate()?;
    let xs = cfg.grid();
    let mut fs = Vec::with_capacity(xs.len());
    for &x in &xs {
        fs.push(eval_checked(f, x)?);
    }

    let mut best = 0;
    for i in 1..fs.len() {
        if fs[i] > fs[best] + TIE_REL * fs[best].abs() {
            best = i;
        }
    }
    let n = xs.len();
    let f_best = fs[best];
    let f_hi = fs[n - 1];
    let hi = cfg.bracket_hi;

    let rel = cfg.plateau_rel_slope;
    let in_tail = best as f64 >= 0.95 * (n - 1) as f64;
    let end_matches_best = f_hi >= (1.0 - rel) * f_best;
    if in_tail || end_matches_best {
        let f_back = eval_checked(f, 0.9 * hi)?;
        let slope = if f_hi == 0.0 {
            if f_back == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            (f_hi - f_back) / (f_hi * 0.1 * hi)
        };
        if slope < rel {
            let threshold = (1.0 - rel) * f_hi;
            let onset = xs
                .iter()
                .zip(&fs)
                .find(|(_, &v)| v >= threshold)
                .map(|(&x, _)| x)
                .unwrap_or(hi);
            return Ok(OptimumResult {
                x_opt: onset,
                f_opt: f_best,
                kind: OptimumKind::Plateau,
                plateau_onset: Some(onset),
            });
        }
    }

    if best == 0 || best == n - 1 {
        return Ok(OptimumResult {
            x_opt: xs[best],
            f_opt: f_best,
            kind: OptimumKind::Boundary,
            plateau_onset: None,
        });
    }

    let (x_ref, f_ref) = golden_section(f, cfg, cfg.to_scan(xs[best - 1]), cfg.to_scan(xs[best + 1]))?;
    let (x_opt, f_opt) = if f_ref >= f_best { (x_ref, f_ref) } else { (xs[best], f_best) };
    Ok(OptimumResult { x_opt, f_opt, kind: OptimumKind::InteriorMaximum, plateau_onset: None })
}

fn golden_section(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    cfg: &OptimizerConfig,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval_checked(f, cfg.from_scan(c))?;
    let mut fd = eval_checked(f, cfg.from_scan(d))?;
    while (b - a) > cfg.x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval_checked(f, cfg.from_scan(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval_checked(f, cfg.from_scan(d))?;
        }
    }
    Ok(if fc >= fd { (cfg.from_scan(c), fc) } else { (cfg.from_scan(d), fd) })
}

/// Interaction time maximizing the QFI at fixed temperature.
pub fn optimal_time(
    spec: &OhmicSpectrum,
    temperature: f64,
    ocfg: &OptimizerConfig,
    qcfg: &QuadratureConfig,
) -> Result<OptimumResult> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    maximize_scalar(&mut |t| Ok(metrology::qfi(spec, temperature, t, qcfg)?.qfi), ocfg)
}

/// Temperature maximizing the QFI at fixed interaction time.
pub fn optimal_temperature(
    spec: &OhmicSpectrum,
    time: f64,
    ocfg: &OptimizerConfig,
    qcfg: &QuadratureConfig,
) -> Result<OptimumResult> {
    if !(time > 0.0) {
        return Err(Error::Domain(format!(
            "interaction time must be positive (the QFI vanishes at t = 0), got {time}"
        )));
    }
    maximize_scalar(&mut |temp| Ok(metrology::qfi(spec, temp, time, qcfg)?.qfi), ocfg)
}
