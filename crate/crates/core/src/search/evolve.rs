//! Evolutionary search over generator programs with a text-completion model
//! as the mutation operator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::database::{DbEntry, ProgramDatabase};
use super::dsl::{parse_reply, DSL_VERSION};
use super::provider::{Provider, ProviderError, Request};
use super::SearchProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    /// Number of provider calls.
    pub budget: u64,
    pub seed: u64,
    /// Requests issued together. Parents for a batch are drawn before any of
    /// its replies are scored, so results do not depend on reply timing.
    pub in_flight: usize,
    /// Sampling temperature passed to the provider.
    pub temperature: f64,
}

impl Default for EvolveConfig {
    fn default() -> EvolveConfig {
        EvolveConfig { budget: 100, seed: 0, in_flight: 1, temperature: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplyStatus {
    Accepted,
    /// The reply did not parse as a program.
    Malformed,
    /// The program parsed but failed to evaluate, decode or score.
    Rejected,
    ProviderError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveEvent {
    /// One-based; call `i` is iteration `i + 1`.
    pub iteration: u64,
    pub parent: usize,
    pub status: ReplyStatus,
    pub score: Option<f64>,
    pub entry: Option<usize>,
    pub message: Option<String>,
    pub prompt: String,
    pub reply: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveOutcome {
    pub best: DbEntry,
    pub database: ProgramDatabase,
    pub events: Vec<EvolveEvent>,
    /// Best database score after each completed iteration.
    pub best_trace: Vec<f64>,
    pub malformed: u64,
    pub rejected: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum EvolveError {
    #[error("the database must hold at least one program")]
    EmptyDatabase,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("provider failed at iteration {iteration}: {error}")]
    Provider { iteration: u64, error: ProviderError, partial: Box<EvolveOutcome> },
}

/// The request sent for one mutation. It shows the parent's source and the
/// expected output shape, never the scoring rule.
pub fn build_prompt<P: SearchProblem>(problem: &P, parent: &DbEntry) -> String {
    format!(
        "You are editing a program written in a small expression language (version {DSL_VERSION}).\n\
         Programs are `let name = expr;` bindings followed by one expression. Numbers are exact\n\
         rationals; `inf` is infinity. Available: + - * / ^ (integer powers), tuples `(a, b)`,\n\
         lists `[a, b]`, list concatenation `+`, list repetition `list * n`, repeat(n, x),\n\
         concat(l1, l2, ...), flatten(list), map(i, lo, hi, expr), unit(d, i), zeros(d), ones(d),\n\
         len(x), tuple(list), floor(x), ceil(x), min(...), max(...).\n\
         The program must return {}.\n\n\
         Current program:\n```\n{}\n```\n\n\
         Write a similar program that is an improved version of it.\n\
         Reply with the complete program inside a single code block.",
        problem.describe_output(),
        parent.program.source()
    )
}

struct Slot {
    iteration: u64,
    parent: usize,
    prompt: String,
}

pub fn evolve<P: SearchProblem>(
    problem: &P,
    provider: &dyn Provider,
    database: ProgramDatabase,
    config: &EvolveConfig,
) -> Result<EvolveOutcome, EvolveError> {
    if database.is_empty() {
        return Err(EvolveError::EmptyDatabase);
    }
    if config.in_flight == 0 {
        return Err(EvolveError::Config("at least one request must be in flight".into()));
    }
    if !(config.temperature.is_finite() && config.temperature >= 0.0) {
        return Err(EvolveError::Config(format!("invalid temperature {}", config.temperature)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = EvolveOutcome {
        best: database.best().expect("non-empty").clone(),
        database,
        events: Vec::new(),
        best_trace: Vec::new(),
        malformed: 0,
        rejected: 0,
    };
    let mut next = 0u64;
    while next < config.budget {
        let batch = (config.budget - next).min(config.in_flight as u64);
        let slots: Vec<Slot> = (0..batch)
            .map(|i| {
                let parent = out.database.sample(&mut rng).expect("non-empty");
                Slot { iteration: next + i + 1, parent: parent.id, prompt: build_prompt(problem, parent) }
            })
            .collect();
        let request = |s: &Slot| Request { call: s.iteration - 1, prompt: s.prompt.clone(), temperature: config.temperature };
        let replies: Vec<Result<String, ProviderError>> = if slots.len() == 1 {
            vec![provider.complete(&request(&slots[0]))]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = slots.iter().map(|s| scope.spawn(move || provider.complete(&request(s)))).collect();
                handles.into_iter().map(|h| h.join().expect("provider thread panicked")).collect()
            })
        };
        for (slot, reply) in slots.into_iter().zip(replies) {
            let reply = match reply {
                Ok(r) => r,
                Err(error) => {
                    out.events.push(EvolveEvent {
                        iteration: slot.iteration,
                        parent: slot.parent,
                        status: ReplyStatus::ProviderError,
                        score: None,
                        entry: None,
                        message: Some(error.to_string()),
                        prompt: slot.prompt,
                        reply: None,
                    });
                    return Err(EvolveError::Provider { iteration: slot.iteration, error, partial: Box::new(out) });
                }
            };
            let mut event = EvolveEvent {
                iteration: slot.iteration,
                parent: slot.parent,
                status: ReplyStatus::Accepted,
                score: None,
                entry: None,
                message: None,
                prompt: slot.prompt,
                reply: Some(reply.clone()),
            };
            match parse_reply(&reply) {
                Err(e) => {
                    out.malformed += 1;
                    event.status = ReplyStatus::Malformed;
                    event.message = Some(e.to_string());
                }
                Ok(program) => match problem.score_program(&program) {
                    Err(e) => {
                        out.rejected += 1;
                        event.status = ReplyStatus::Rejected;
                        event.message = Some(e.to_string());
                    }
                    Ok((_, score)) => {
                        let id = out.database.insert(program, score, slot.iteration).expect("finite score");
                        event.score = Some(score);
                        event.entry = Some(id);
                        if score > out.best.score {
                            out.best = out.database.entries()[id].clone();
                        }
                    }
                },
            }
            out.events.push(event);
            out.best_trace.push(out.best.score);
        }
        next += batch;
    }
    Ok(out)
}
