//! Adversarial instance search: a perturbation-based local search over
//! vector encodings and an evolutionary loop over generator programs.

pub mod adapters;
pub mod database;
pub mod dsl;
pub mod evolve;
pub mod local;
pub mod provider;

pub use adapters::{BinPackProblem, ClusterProblem, GasolineProblem, KnapsackProblem, ProblemKind};
pub use database::{DbEntry, ProgramDatabase};
pub use dsl::{dsl_eval, parse_reply, DslError, Program, Value};
pub use evolve::{evolve, EvolveConfig, EvolveError, EvolveEvent, EvolveOutcome, ReplyStatus};
pub use local::{local_search, LocalSearchConfig, LocalSearchResult, SearchBudget, TraceStep};
pub use provider::{HttpConfig, MockProvider, Provider, ProviderConfig, ProviderError, Request};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("instance rejected: {0}")]
    Instance(String),
    #[error("scoring failed: {0}")]
    Score(String),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

/// One target problem, seen both as a box of real coordinates and as the
/// output shape of generator programs.
pub trait SearchProblem: Sync {
    type Instance: Send;

    fn name(&self) -> &'static str;

    /// Per-coordinate `(lower, upper)` bounds of the vector encoding.
    fn bounds(&self) -> Vec<(f64, f64)>;

    /// Default noise scale `s` for local search.
    fn noise_scale(&self) -> f64;

    /// Total on in-bounds vectors.
    fn decode(&self, v: &[f64]) -> Self::Instance;

    /// Interprets a program's output; lists have already been clipped.
    fn interpret(&self, value: &Value) -> Result<Self::Instance, SearchError>;

    /// Larger is better for the adversary.
    fn score(&self, instance: &Self::Instance) -> Result<f64, SearchError>;

    fn clip_length(&self) -> usize;

    /// The trivial program the evolutionary search starts from.
    fn seed_program(&self) -> &'static str;

    /// What a generator program must return, phrased for a prompt.
    fn describe_output(&self) -> &'static str;

    /// The instance in its module's file format.
    fn render(&self, instance: &Self::Instance) -> String;

    /// Evaluates, interprets and scores a program.
    fn score_program(&self, program: &Program) -> Result<(Self::Instance, f64), SearchError> {
        let value = dsl_eval(program, self.clip_length())?;
        let inst = self.interpret(&value)?;
        let s = self.score(&inst)?;
        if !s.is_finite() {
            return Err(SearchError::Score(format!("non-finite score {s}")));
        }
        Ok((inst, s))
    }
}
