use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    #[error("quadrature did not converge after {panels} panels: value {value:e}, estimated error {error:e}")]
    QuadratureNonConvergence { value: f64, error: f64, panels: usize },

    #[error("degenerate density-matrix spectrum (gap {gap:e}); perturb the derivative step")]
    DegenerateSpectrum { gap: f64 },

    #[error("objective is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("all {0} experiments were degenerate")]
    AllDegenerate(usize),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::DegenerateSpectrum { .. }
                | Error::NonFinite { .. }
                | Error::AllDegenerate(_)
        )
    }
}
