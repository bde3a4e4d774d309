use jc_susy::JcError;

/// Everything a subcommand can fail with, by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Input(String),
    /// Exit 3.
    Verification(String),
    /// Exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<JcError> for CliError {
    fn from(e: JcError) -> Self {
        match e {
            JcError::NotShapeInvariant { .. } | JcError::NotHermitian(_) => CliError::Verification(e.to_string()),
            JcError::RealityCondition { delta_sq, required } => CliError::Input(format!(
                "the partner is possible if the parameters satisfy delta^2 >= n lambda^2 \
                 (delta^2 = {delta_sq}, n lambda^2 = {required})"
            )),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
