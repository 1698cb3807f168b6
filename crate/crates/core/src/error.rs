use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The time or frequency grid cannot resolve the dynamics.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// Cavity and atomic amplitudes had not rung down by the end of the tail window.
    #[error("incomplete decay: residual norm {residual:.3e} left in cavity and atoms")]
    IncompleteDecay { residual: f64 },

    #[error("outside model validity: {0}")]
    OutOfModel(String),

    /// The requested detector branch has zero probability.
    #[error("no photon detected in the requested branch")]
    NoDetection,

    #[error("component |{component}⟩: {source}")]
    Component {
        component: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Strips [`Error::Component`] annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Component { source, .. } => source.root(),
            other => other,
        }
    }
}
