use thiserror::Error;

/// Failures raised by the numerical routines and the physics layer built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curvature radius R is required for curved-space quantities")]
    MissingCurvature,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("pole of the gamma function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("quadrature did not converge after {evaluations} evaluations (best = {best}, err = {err_estimate})")]
    QuadratureNoConvergence {
        best: f64,
        err_estimate: f64,
        evaluations: usize,
    },

    #[error("half-line integrand decays too slowly: |f(t)| t^2 = {tail} at t = {at}")]
    SlowDecay { at: f64, tail: f64 },

    #[error("series not converged after {terms} terms (partial = {partial_re} + {partial_im}i)")]
    SeriesNoConvergence {
        partial_re: f64,
        partial_im: f64,
        terms: usize,
    },

    #[error("hypergeometric series overflow in {func}: largest term magnitude {scale:e}")]
    Overflow { func: &'static str, scale: f64 },

    #[error("precision budget exceeded in {func}: degree {degree}, estimated relative error {estimate:e}")]
    PrecisionBudget {
        func: &'static str,
        degree: usize,
        estimate: f64,
    },

    #[error("states belong to different sectors or spaces")]
    SectorMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
