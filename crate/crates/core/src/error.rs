use thiserror::Error;

/// Errors raised by the geometry and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("degenerate wedge: {0}")]
    DegenerateWedge(String),

    #[error("cone is not good: {0}")]
    NotGood(String),

    #[error("cone is not 1-Gorenstein")]
    NotGorenstein,

    #[error("singular group action: transformed last coordinate vanishes")]
    SingularAction,

    #[error("product does not converge: |q| = {modulus} lies on the unit circle")]
    NonConvergent { modulus: f64 },

    #[error("ill-conditioned: |ln|q|| = {log_modulus:e} is below the resonance guard")]
    IllConditioned { log_modulus: f64 },

    #[error("term budget exceeded: {terms} terms needed (cap {cap}), tail estimate at cap {tail_estimate:e}")]
    Budget {
        terms: u64,
        cap: u64,
        tail_estimate: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
