use std::fmt;

use zenoclone_core::Error as CoreError;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or invalid configuration, unknown id (exit 1).
    Config(String),
    /// Numerical failure or failed invariant (exit 2).
    Numerical(String),
    /// File system failure (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Config key that feeds a core parameter name.
pub fn config_key(param: &str) -> &str {
    match param {
        "theta" => "theta_rad",
        "delta" => "delta_rad",
        "v" => "v_factor",
        "omega" => "omega_factor",
        "omega1" => "omega1_factor",
        "g" => "g_dimensionless|g_mhz",
        "kappa" => "kappa_dimensionless|kappa_mhz",
        "gamma" => "gamma_dimensionless|gamma_mhz",
        "beta" => "beta_dimensionless|beta_mhz",
        "g[node]" => "g_node_factors",
        "v[node]" => "v_node_factors",
        "omega[node]" => "omega_node_factors",
        "kappa[node]" => "kappa_node_factors",
        "gamma[node]" => "gamma_node_factors",
        other => other,
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => {
                CliError::Config(format!("`{}`: {reason}", config_key(name)))
            }
            CoreError::Config(m) => CliError::Config(m),
            CoreError::NoSchedule | CoreError::DarkStateUndefined(_) => {
                CliError::Config(e.to_string())
            }
            CoreError::DimensionMismatch { .. }
            | CoreError::NotHermitian { .. }
            | CoreError::AmbiguousDegeneracy { .. }
            | CoreError::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
