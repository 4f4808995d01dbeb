use std::fmt;

use locon_core::cyclo::CycloError;
use locon_core::epsilon::EpsilonError;
use locon_core::finite_field::FieldError;
use locon_core::group_core::GroupError;
use locon_core::heisenberg::HeisenbergError;
use locon_core::lambda::LambdaError;
use locon_core::local_field::LocalError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// A computation failed; `name` is the originating error type.
    Compute { name: &'static str, message: String, unsupported: bool },
    Io(std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute { unsupported: true, .. } => EXIT_UNSUPPORTED,
            CliError::Io(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute { name, message, .. } => write!(f, "{name}: {message}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

fn local_unsupported(e: &LocalError) -> bool {
    matches!(e, LocalError::UnsupportedModel(_))
}

fn epsilon_unsupported(e: &EpsilonError) -> bool {
    match e {
        EpsilonError::UnsupportedModel(_) | EpsilonError::UnsupportedExponent(_) => true,
        EpsilonError::Local(l) => local_unsupported(l),
        _ => false,
    }
}

fn heisenberg_unsupported(e: &HeisenbergError) -> bool {
    match e {
        HeisenbergError::UnsupportedModel(_) | HeisenbergError::DimensionNotTame { .. } => true,
        HeisenbergError::Epsilon(x) => epsilon_unsupported(x),
        HeisenbergError::Local(x) => local_unsupported(x),
        _ => false,
    }
}

fn lambda_unsupported(e: &LambdaError) -> bool {
    match e {
        LambdaError::WildPrime | LambdaError::OpenProblem(_) => true,
        LambdaError::Epsilon(x) => epsilon_unsupported(x),
        _ => false,
    }
}

macro_rules! compute_error {
    ($ty:ty, $name:literal, $unsupported:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let unsupported: fn(&$ty) -> bool = $unsupported;
                CliError::Compute { name: $name, unsupported: unsupported(&e), message: e.to_string() }
            }
        }
    };
}

compute_error!(CycloError, "CycloError", |_| false);
compute_error!(FieldError, "FieldError", |_| false);
compute_error!(GroupError, "GroupError", |_| false);
compute_error!(LocalError, "LocalError", local_unsupported);
compute_error!(EpsilonError, "EpsilonError", epsilon_unsupported);
compute_error!(LambdaError, "LambdaError", lambda_unsupported);
compute_error!(HeisenbergError, "HeisenbergError", heisenberg_unsupported);
