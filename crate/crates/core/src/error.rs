use thiserror::Error;

/// Errors produced by the lineshape engines and the scenario layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested configuration is valid physics but not handled by this route.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A root could not be bracketed or a solver failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Monte Carlo envelope too loose to produce samples at a useful rate.
    #[error("sampling envelope error: acceptance rate {rate:.3e} below {min:.1e}")]
    Envelope { rate: f64, min: f64 },

    /// Scenario configuration problem, tagged with the offending field.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) => 2,
            Error::Domain(_) => 2,
            Error::Unsupported(_) => 3,
            Error::Numerical(_) | Error::Envelope { .. } => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(Error::config("N", "missing").exit_code(), 2);
        assert_eq!(Error::domain("bad").exit_code(), 2);
        assert_eq!(Error::Unsupported("x".into()).exit_code(), 3);
        assert_eq!(Error::Numerical("x".into()).exit_code(), 4);
        assert_eq!(Error::Envelope { rate: 0.0, min: 1e-4 }.exit_code(), 4);
    }

    #[test]
    fn config_errors_name_the_field() {
        let msg = Error::config("excited[0].offset", "unknown unit").to_string();
        assert!(msg.contains("`excited[0].offset`"), "{msg}");
    }
}
