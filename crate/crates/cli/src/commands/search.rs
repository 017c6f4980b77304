use std::path::{Path, PathBuf};
use std::time::Duration;

use advlab::search::{
    dsl_eval, evolve, local_search, BinPackProblem, ClusterProblem, EvolveConfig, EvolveError, EvolveOutcome,
    GasolineProblem, HttpConfig, KnapsackProblem, LocalSearchConfig, MockProvider, ProblemKind, ProgramDatabase,
    ProviderConfig, SearchBudget, SearchProblem,
};
use serde::Serialize;
use serde_json::{json, Value};

use super::{num, read, write, Ctx, Report};
use crate::args::{ProviderKind, SearchCmd, SearchMethod};
use crate::error::CliError;
use crate::record::fingerprint;

pub fn run(ctx: &mut Ctx, cmd: &SearchCmd) -> Result<Report, CliError> {
    let k = &cmd.knobs;
    let exec = ctx.global.exec;
    match cmd.problem {
        ProblemKind::Knapsack => {
            let d = KnapsackProblem::default();
            run_with(ctx, &KnapsackProblem { items: k.size.unwrap_or(d.items), ..d }, &cmd.method)
        }
        ProblemKind::Binpack => {
            let d = BinPackProblem::default();
            let p = BinPackProblem { items: k.size.unwrap_or(d.items), trials: k.trials, seed: ctx.global.seed, exec, ..d };
            run_with(ctx, &p, &cmd.method)
        }
        ProblemKind::Cluster => {
            let d = ClusterProblem::default();
            run_with(ctx, &ClusterProblem { points: k.size.unwrap_or(d.points), exec, ..d }, &cmd.method)
        }
        ProblemKind::Gasoline => {
            let d = GasolineProblem::default();
            run_with(ctx, &GasolineProblem { n: k.size.unwrap_or(d.n), ..d }, &cmd.method)
        }
    }
}

fn trace_path(explicit: &Option<PathBuf>, out: &Option<PathBuf>) -> Option<PathBuf> {
    explicit.clone().or_else(|| out.as_ref().map(|o| PathBuf::from(format!("{}.trace.jsonl", o.display()))))
}

fn write_jsonl<T: Serialize>(path: &Path, lines: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut buf = String::new();
    for l in lines {
        buf.push_str(&serde_json::to_string(&l).map_err(|e| CliError::Io(e.to_string()))?);
        buf.push('\n');
    }
    write(path, &buf)
}

fn run_with<P: SearchProblem>(ctx: &mut Ctx, problem: &P, method: &SearchMethod) -> Result<Report, CliError> {
    ctx.record.problem = Some(problem.name().into());
    match method {
        SearchMethod::Local { budget, time_secs, noise, accept, trace } => {
            let budget = match time_secs {
                Some(s) if s.is_finite() && *s > 0.0 => SearchBudget::WallClock(Duration::from_secs_f64(*s)),
                Some(s) => return Err(CliError::Config(format!("--time-secs must be positive, got {s}"))),
                None => SearchBudget::Iterations(*budget),
            };
            let mut config = LocalSearchConfig::for_problem(problem, budget, ctx.global.seed);
            config.accept_probability = *accept;
            if let Some(s) = noise {
                config.noise_scale = *s;
            }
            let result = local_search(problem, &config)?;
            let best = problem.decode(&result.best_vector);
            let text = problem.render(&best);
            let rec = &mut ctx.record;
            rec.fingerprint = Some(fingerprint(&text));
            rec.set("method", "local");
            rec.set("steps", result.trace.len());
            rec.set("accepted", result.trace.iter().filter(|t| t.accepted).count());
            rec.set("failures", result.failures);
            rec.set("initial_score", num(result.initial_score));
            rec.set("best_score", num(result.best_score));
            rec.set("best_vector", Value::Array(result.best_vector.iter().map(|&x| num(x)).collect()));
            if let Some(path) = trace_path(trace, &ctx.global.out) {
                write_jsonl(&path, &result.trace)?;
            }
            Ok(Report { artifact: Some(text), ..Report::default() })
        }
        SearchMethod::Evolve { provider, script, budget, in_flight, db_temperature, temperature, trace } => {
            let (provider, default_budget) = match provider {
                ProviderKind::Mock => {
                    let path = script.as_ref().ok_or_else(|| CliError::Config("--script is required for the mock provider".into()))?;
                    let mock = MockProvider::from_script(&read(path)?);
                    let n = mock.len() as u64;
                    (ProviderConfig::Mock(mock), n)
                }
                ProviderKind::Http => (ProviderConfig::Http(HttpConfig::from_env()?), 100),
            };
            let provider = provider.build();
            let database = ProgramDatabase::seeded(problem, *db_temperature)?;
            let config = EvolveConfig {
                budget: budget.unwrap_or(default_budget),
                seed: ctx.global.seed,
                in_flight: *in_flight,
                temperature: *temperature,
            };
            let trace = trace_path(trace, &ctx.global.out);
            match evolve(problem, provider.as_ref(), database, &config) {
                Ok(out) => {
                    summarize(ctx, problem, &out, trace.as_deref())?;
                    Ok(Report { artifact: Some(out.best.program.source().to_string() + "\n"), ..Report::default() })
                }
                Err(EvolveError::Provider { iteration, error, partial }) => {
                    summarize(ctx, problem, &partial, trace.as_deref())?;
                    ctx.record.set("failed_iteration", iteration);
                    Err(error.into())
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Fills the record from an evolution outcome and queues its events for the log.
fn summarize<P: SearchProblem>(
    ctx: &mut Ctx,
    problem: &P,
    out: &EvolveOutcome,
    trace: Option<&Path>,
) -> Result<(), CliError> {
    let value = dsl_eval(&out.best.program, problem.clip_length())?;
    let inst = problem.interpret(&value)?;
    let rec = &mut ctx.record;
    rec.fingerprint = Some(fingerprint(&problem.render(&inst)));
    rec.set("method", "evolve");
    rec.set("iterations", out.events.len());
    rec.set("malformed", out.malformed);
    rec.set("rejected", out.rejected);
    rec.set("database_size", out.database.len());
    rec.set("best_score", num(out.best.score));
    rec.set("best_entry", out.best.id);
    rec.set("best_found_at", out.best.created);
    rec.set("best_trace", Value::Array(out.best_trace.iter().map(|&x| num(x)).collect()));
    let run_id = rec.run_id.clone();
    let events: Vec<Value> = out
        .events
        .iter()
        .map(|e| {
            let mut v = json!({ "kind": "evolve-event", "run_id": run_id });
            if let (Value::Object(m), Ok(Value::Object(ev))) = (&mut v, serde_json::to_value(e)) {
                m.extend(ev);
            }
            v
        })
        .collect();
    if let Some(path) = trace {
        write_jsonl(path, &events)?;
    }
    ctx.events.extend(events);
    Ok(())
}
