//! Single-qubit dephasing thermometry for Ohmic-family environments.

pub mod bath;
pub mod dephasing;
pub mod error;
pub mod estimate;
pub mod metrology;
pub mod optimize;
pub mod quadrature;
pub mod rng;
pub mod specialfn;
pub mod validate;

pub use bath::{OhmicSpectrum, OhmicityClass};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
