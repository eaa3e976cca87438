use thiserror::Error;

/// Errors raised by samplers, channel models and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// A zero-length link or interferer distance with no near-field cutoff.
    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    /// The caller combined valid values in an unsupported way.
    #[error("usage error: {0}")]
    Usage(String),

    /// The quantity being evaluated is undefined (e.g. a 0/0 SIR).
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// Mean local delay diverges (e.g. an ALOHA probability of zero).
    #[error("infinite delay: {0}")]
    InfiniteDelay(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::ParameterDomain(msg.into())
}

pub(crate) fn ensure_nonneg(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and >= 0, got {value}")))
    }
}
