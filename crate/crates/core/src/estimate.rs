//! Monte Carlo check of the Cramér-Rao bound for the σ_x thermometry protocol.
//!
//! Each experiment prepares M equatorial probes, lets them dephase for the
//! interaction time, measures σ_x, and inverts the observed frequency of
//! the `+` outcome into a temperature:
//!
//! ```text
//! p̂ = n₊ / M,   Γ̂ = -ln(2p̂ - 1),   solve Γ(T̂, t) = Γ̂
//! ```
//!
//! Γ is strictly increasing in T, so the inversion is a bisection.

use serde::{Deserialize, Serialize};

use crate::bath::OhmicSpectrum;
use crate::dephasing::decoherence_factor;
use crate::error::{Error, Result};
use crate::metrology;
use crate::quadrature::QuadratureConfig;
use crate::rng::SplitMix64;

/// Temperature range searched by the inversion.
pub const INVERSION_BRACKET: (f64, f64) = (1e-6, 1e4);
/// Absolute tolerance on T̂.
pub const ROOT_TOL: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    pub true_temperature: f64,
    pub time: f64,
    /// Outcomes per experiment.
    pub shots: u64,
    /// Number of independent experiments.
    pub repetitions: u64,
    pub seed: u64,
}

impl EstimationRun {
    pub fn validate(&self) -> Result<()> {
        if !(self.true_temperature > 0.0) || !(self.time > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "need T > 0 and t > 0, got T = {}, t = {}",
                self.true_temperature, self.time
            )));
        }
        if self.shots == 0 || self.repetitions == 0 {
            return Err(Error::InvalidConfig("shots and repetitions must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub mean_estimate: f64,
    pub variance: f64,
    pub qfi: f64,
    /// Quantum Cramér-Rao bound `1 / (M H)`.
    pub crb: f64,
    pub ratio: f64,
    pub n_valid: u64,
    pub n_degenerate: u64,
}

/// Result of inverting one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureEstimate {
    Value(f64),
    /// Frequency outside the invertible range (p̂ ≤ ½ or Γ̂ outside the bracket).
    Degenerate,
}

/// Number of `+` outcomes among `shots` Bernoulli trials with probability `p_plus`.
pub fn simulate_outcomes(p_plus: f64, shots: u64, rng: &mut SplitMix64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p_plus) {
        return Err(Error::Domain(format!("probability must lie in [0, 1], got {p_plus}")));
    }
    Ok((0..shots).filter(|_| rng.next_f64() < p_plus).count() as u64)
}

/// Inverts Γ(·, t) for one spectrum and time, caching the bracket ends.
pub struct TemperatureInverter<'a> {
    spec: &'a OhmicSpectrum,
    time: f64,
    qcfg: &'a QuadratureConfig,
    gamma_lo: f64,
    gamma_hi: f64,
}

impl<'a> TemperatureInverter<'a> {
    pub fn new(spec: &'a OhmicSpectrum, time: f64, qcfg: &'a QuadratureConfig) -> Result<Self> {
        if !(time > 0.0) {
            return Err(Error::Domain(format!("interaction time must be positive, got {time}")));
        }
        let (lo, hi) = INVERSION_BRACKET;
        Ok(Self {
            spec,
            time,
            qcfg,
            gamma_lo: decoherence_factor(spec, lo, time, qcfg)?,
            gamma_hi: decoherence_factor(spec, hi, time, qcfg)?,
        })
    }

    /// T̂ with Γ(T̂, t) = `gamma_hat`.
    pub fn invert_gamma(&self, gamma_hat: f64) -> Result<TemperatureEstimate> {
        if !(gamma_hat > self.gamma_lo && gamma_hat < self.gamma_hi) {
            return Ok(TemperatureEstimate::Degenerate);
        }
        let (mut lo, mut hi) = INVERSION_BRACKET;
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= ROOT_TOL {
                break;
            }
            // geometric midpoint while the bracket spans decades
            let mid = if hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if decoherence_factor(self.spec, mid, self.time, self.qcfg)? < gamma_hat {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(TemperatureEstimate::Value(0.5 * (lo + hi)))
    }

    /// T̂ from the observed frequency of the `+` outcome.
    pub fn invert_frequency(&self, p_hat: f64) -> Result<TemperatureEstimate> {
        if !(p_hat > 0.5) || p_hat > 1.0 {
            return Ok(TemperatureEstimate::Degenerate);
        }
        self.invert_gamma(-(2.0 * p_hat - 1.0).ln())
    }
}

/// Maximum-likelihood temperature from `n_plus` successes out of `shots`.
pub fn mle_temperature(
    n_plus: u64,
    shots: u64,
    spec: &OhmicSpectrum,
    time: f64,
    qcfg: &QuadratureConfig,
) -> Result<TemperatureEstimate> {
    if shots == 0 || n_plus > shots {
        return Err(Error::Domain(format!("need 0 <= n+ <= M, M >= 1; got n+ = {n_plus}, M = {shots}")));
    }
    TemperatureInverter::new(spec, time, qcfg)?.invert_frequency(n_plus as f64 / shots as f64)
}

/// Runs `repetitions` independent experiments and compares the spread of
/// the estimates with the quantum Cramér-Rao bound.
///
/// Experiment `k` draws from `SplitMix64::substream(seed, k)`, so the
/// report does not depend on evaluation order.
pub fn cramer_rao_check(
    run: &EstimationRun,
    spec: &OhmicSpectrum,
    qcfg: &QuadratureConfig,
) -> Result<EstimationReport> {
    run.validate()?;
    let temp = run.true_temperature;
    let point = metrology::qfi(spec, temp, run.time, qcfg)?;
    let gamma = decoherence_factor(spec, temp, run.time, qcfg)?;
    let p_plus = 0.5 * (1.0 + (-gamma).exp());
    let inverter = TemperatureInverter::new(spec, run.time, qcfg)?;

    let mut estimates = Vec::with_capacity(run.repetitions as usize);
    let mut n_degenerate = 0;
    for rep in 0..run.repetitions {
        let mut rng = SplitMix64::substream(run.seed, rep);
        let n_plus = simulate_outcomes(p_plus, run.shots, &mut rng)?;
        match inverter.invert_frequency(n_plus as f64 / run.shots as f64)? {
            TemperatureEstimate::Value(t) => estimates.push(t),
            TemperatureEstimate::Degenerate => n_degenerate += 1,
        }
    }
    if estimates.is_empty() {
        return Err(Error::AllDegenerate(run.repetitions as usize));
    }

    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = if estimates.len() > 1 {
        estimates.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let crb = 1.0 / (run.shots as f64 * point.qfi);
    Ok(EstimationReport {
        mean_estimate: mean,
        variance,
        qfi: point.qfi,
        crb,
        ratio: variance / crb,
        n_valid: estimates.len() as u64,
        n_degenerate,
    })
}
