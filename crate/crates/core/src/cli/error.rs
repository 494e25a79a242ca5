use crate::asymptotics::AsymptoticsError;
use crate::correlation::CorrelationError;
use crate::graphflow::GraphError;
use crate::kernels::KernelError;
use crate::montecarlo::MonteCarloError;
use crate::numerics::NumericsError;
use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid configuration, arguments or input files.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERIC: i32 = 3;

/// A command failure, classified for the exit-code contract.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
        }
    }

    /// One-line JSON diagnostic.
    pub fn diagnostic(&self) -> String {
        serde_json::json!({
            "status": "error",
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

fn is_numeric(e: &NumericsError) -> bool {
    !matches!(e, NumericsError::Domain(_) | NumericsError::Shape(_))
}

fn classify(numeric: bool, message: String) -> CliError {
    if numeric {
        CliError::Numeric(message)
    } else {
        CliError::Config(message)
    }
}

fn kernel_numeric(e: &KernelError) -> bool {
    matches!(e, KernelError::Numerics(n) if is_numeric(n))
}

fn mc_numeric(e: &MonteCarloError) -> bool {
    match e {
        MonteCarloError::Parameter(_) => false,
        MonteCarloError::Numerics(n) => is_numeric(n),
        MonteCarloError::Kernel(k) => kernel_numeric(k),
    }
}

fn correlation_numeric(e: &CorrelationError) -> bool {
    match e {
        CorrelationError::Domain(_) | CorrelationError::Unsupported(_) => false,
        CorrelationError::Numerics(n) => is_numeric(n),
        CorrelationError::Kernel(k) => kernel_numeric(k),
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        classify(is_numeric(&e), e.to_string())
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        classify(kernel_numeric(&e), e.to_string())
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        classify(mc_numeric(&e), e.to_string())
    }
}

impl From<CorrelationError> for CliError {
    fn from(e: CorrelationError) -> Self {
        classify(correlation_numeric(&e), e.to_string())
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        let numeric = match &e {
            GraphError::Numerics(n) => is_numeric(n),
            GraphError::Kernel(k) => kernel_numeric(k),
            GraphError::MonteCarlo(m) => mc_numeric(m),
            GraphError::Correlation(c) => correlation_numeric(c),
            _ => false,
        };
        classify(numeric, e.to_string())
    }
}
