use thiserror::Error;

/// Exit code when a test rejects its null hypothesis.
pub const EXIT_REJECT: u8 = 1;
/// Malformed input: unreadable or invalid files, bad flags or config keys,
/// dimension mismatches.
pub const EXIT_INPUT: u8 = 2;
/// Parameters outside the domain of the requested computation.
pub const EXIT_DOMAIN: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl From<qforma::Error> for CliError {
    fn from(e: qforma::Error) -> Self {
        use qforma::Error as E;
        let msg = e.to_string();
        match e {
            E::Parse { .. } | E::Io(_) | E::NotSymmetric { .. } | E::NonFinite { .. } | E::Dimension(_) => {
                Self::Input(msg)
            }
            E::SizeLimit { .. }
            | E::DecompositionFailed { .. }
            | E::NotPositiveDefinite { .. }
            | E::InfeasibleClass(_)
            | E::Domain(_)
            | E::InsufficientMoments(_)
            | E::TooFewSamples { .. } => Self::Domain(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.to_string())
    }
}
