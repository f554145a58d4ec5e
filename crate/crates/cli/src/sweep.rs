use anyhow::{bail, Result};
use clap::ValueEnum;
use qthermo::optimize::GridScale;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

impl From<Scale> for GridScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Linear => GridScale::Linear,
            Scale::Log => GridScale::Log,
        }
    }
}

/// Grid over one variable, `t` or `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(variable: &'static str, lo: f64, hi: f64, points: usize, scale: Scale) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
            bail!("{variable} sweep needs finite lo < hi, got [{lo}, {hi}]");
        }
        if points < 2 {
            bail!("{variable} sweep needs at least 2 points, got {points}");
        }
        if scale == Scale::Log && !(lo > 0.0) {
            bail!("log-scale {variable} sweep needs lo > 0, got {lo}");
        }
        Ok(Self { variable, lo, hi, points, scale })
    }

    /// Grid values; both ends are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == n - 1 {
                    return self.hi;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.lo + (self.hi - self.lo) * f,
                    Scale::Log => (self.lo.ln() + (self.hi / self.lo).ln() * f).exp(),
                }
            })
            .collect()
    }

    pub fn describe(&self) -> Value {
        json!({
            "lo": self.lo,
            "hi": self.hi,
            "points": self.points,
            "scale": match self.scale { Scale::Linear => "linear", Scale::Log => "log" },
        })
    }
}
