use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain accepted by an operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// An input sequence was empty.
    #[error("`{0}` must not be empty")]
    Empty(&'static str),
    /// Two sequences that must have equal length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// The Markov chain has p = q = 0 and no stationary distribution.
    #[error("degenerate Markov chain: p = q = 0")]
    DegenerateChain,
    /// The frame leaves no time for sensing after the control messages.
    #[error("no sensing budget: frame {t_frame} s does not exceed control time {t_c} s")]
    NoSensingBudget { t_frame: f64, t_c: f64 },
    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },
    /// A serialized model could not be decoded.
    #[error("malformed model data: {0}")]
    MalformedModel(&'static str),
}

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
