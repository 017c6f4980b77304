use advlab::binpack::BinPackError;
use advlab::cluster::ClusterError;
use advlab::gasoline::GasolineError;
use advlab::knapsack::KnapsackError;
use advlab::search::{DslError, EvolveError, ProviderError, SearchError};

/// Process exit codes. Usage errors exit with 2, reported by clap itself.
pub mod code {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 3;
    pub const CONFIG: i32 = 4;
    pub const BUDGET: i32 = 5;
    pub const PROVIDER: i32 = 6;
    /// A reproduction finished but some row disagreed with its reference.
    pub const MISMATCH: i32 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("provider error: {0}")]
    Provider(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => code::IO,
            CliError::Parse(_) => code::PARSE,
            CliError::Config(_) => code::CONFIG,
            CliError::Budget(_) => code::BUDGET,
            CliError::Provider(_) => code::PROVIDER,
            CliError::Mismatch(_) => code::MISMATCH,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Config(_) => "config",
            CliError::Budget(_) => "budget",
            CliError::Provider(_) => "provider",
            CliError::Mismatch(_) => "mismatch",
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<KnapsackError> for CliError {
    fn from(e: KnapsackError) -> CliError {
        let msg = e.to_string();
        match e {
            KnapsackError::Parse { .. } => CliError::Parse(msg),
            KnapsackError::TooManyItems { .. } => CliError::Budget(msg),
            KnapsackError::InvalidItem(_) | KnapsackError::InvalidParameter(_) => CliError::Config(msg),
        }
    }
}

impl From<BinPackError> for CliError {
    fn from(e: BinPackError) -> CliError {
        let msg = e.to_string();
        match e {
            BinPackError::Parse { .. } => CliError::Parse(msg),
            BinPackError::BudgetExceeded { .. } => CliError::Budget(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> CliError {
        let msg = e.to_string();
        match e {
            ClusterError::Parse { .. } => CliError::Parse(msg),
            ClusterError::BudgetExceeded { .. } => CliError::Budget(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<GasolineError> for CliError {
    fn from(e: GasolineError) -> CliError {
        let msg = e.to_string();
        match e {
            GasolineError::Parse { .. } => CliError::Parse(msg),
            GasolineError::BudgetExceeded { .. } => CliError::Budget(msg),
            GasolineError::Lp(_) => CliError::Io(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<DslError> for CliError {
    fn from(e: DslError) -> CliError {
        match e {
            DslError::Parse { .. } => CliError::Parse(e.to_string()),
            DslError::StepBudget(_) | DslError::SizeLimit(_) => CliError::Budget(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> CliError {
        match e {
            SearchError::Dsl(d) => d.into(),
            SearchError::Config(_) | SearchError::Instance(_) => CliError::Config(e.to_string()),
            SearchError::Score(_) => CliError::Budget(e.to_string()),
        }
    }
}

impl From<ProviderError> for CliError {
    fn from(e: ProviderError) -> CliError {
        match e {
            ProviderError::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Provider(e.to_string()),
        }
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> CliError {
        match e {
            EvolveError::Provider { error, .. } => error.into(),
            _ => CliError::Config(e.to_string()),
        }
    }
}
