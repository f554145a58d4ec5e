//! Ohmic-family spectral densities `J(ω) = ω^s e^{-ω}` in units of the cutoff frequency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ohmicity accepted by [`OhmicSpectrum::new`].
pub const MAX_OHMICITY: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OhmicityClass {
    SubOhmic,
    Ohmic,
    SuperOhmic,
}

/// Spectral density of an Ohmic-family bath with exponential cutoff at ω_c = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhmicSpectrum {
    s: f64,
}

impl OhmicSpectrum {
    /// Validated constructor, `s ∈ (0, 6]`.
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= MAX_OHMICITY) {
            return Err(Error::InvalidConfig(format!(
                "ohmicity s must lie in (0, {MAX_OHMICITY}], got {s}"
            )));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn classify(&self) -> OhmicityClass {
        if self.s < 1.0 {
            OhmicityClass::SubOhmic
        } else if self.s == 1.0 {
            OhmicityClass::Ohmic
        } else {
            OhmicityClass::SuperOhmic
        }
    }

    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!(
                "spectral density needs omega >= 0, got {omega}"
            )));
        }
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(omega.powf(self.s) * (-omega).exp())
    }
}
