mod args;
mod commands;
mod error;
mod fixtures;
mod output;
mod record;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, ScoreCmd};
use commands::{Ctx, Report};
use error::{code, CliError};
use output::Format;
use record::{append_lines, RunRecord};

fn problem_of_score(cmd: &ScoreCmd) -> &'static str {
    match cmd {
        ScoreCmd::Knapsack { .. } => "knapsack",
        ScoreCmd::Binpack { .. } => "binpack",
        ScoreCmd::Cluster { .. } => "cluster",
        ScoreCmd::Gasoline { .. } => "gasoline",
    }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Score(s) => format!("score {}", problem_of_score(s)),
        Command::Generate(_) => "generate".into(),
        Command::Search(s) => format!("search {}", s.problem),
        Command::Reproduce(_) => "reproduce".into(),
    }
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Score(c) => commands::score::run(ctx, c),
        Command::Generate(c) => commands::generate::run(ctx, c),
        Command::Search(c) => commands::search::run(ctx, c),
        Command::Reproduce(c) => commands::reproduce::run(ctx, c),
    }
}

/// Writes the artifact and prints the outcome.
fn emit(ctx: &Ctx, report: &Report) -> Result<(), CliError> {
    let g = &ctx.global;
    let mut stdout = std::io::stdout().lock();
    let mut print = |s: &str| stdout.write_all(s.as_bytes()).map_err(|e| CliError::Io(e.to_string()));
    match (&g.out, &report.artifact) {
        (Some(path), Some(text)) => commands::write(path, text)?,
        (None, Some(text)) if report.artifact_only && g.format == Format::Text => return print(text),
        _ => {}
    }
    let rendered = output::render(g.format, &ctx.record, report.table.as_ref())?;
    if let (Some(path), Some(_), None) = (&g.out, &report.table, &report.artifact) {
        commands::write(path, &rendered)?;
    }
    print(&rendered)?;
    if let (None, Some(text), Format::Text) = (&g.out, &report.artifact, g.format) {
        print("\n")?;
        print(text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let record = RunRecord::new(&command_name(&cli.command), args, cli.global.seed);
    let mut ctx = Ctx { global: cli.global.clone(), record, events: Vec::new() };
    let result = dispatch(&mut ctx, &cli.command);
    ctx.record.duration_secs = start.elapsed().as_secs_f64();
    let failure = match result {
        Ok(mut report) => {
            let failure = report.failure.take();
            if let Some(f) = &failure {
                ctx.record.status = f.kind().into();
                ctx.record.error = Some(f.to_string());
            }
            emit(&ctx, &report).err().or(failure)
        }
        Err(e) => {
            ctx.record.status = e.kind().into();
            ctx.record.error = Some(e.to_string());
            Some(e)
        }
    };
    if let Some(path) = &ctx.global.log {
        let mut lines = vec![serde_json::to_value(&ctx.record).expect("record serializes")];
        lines.extend(ctx.events.iter().cloned());
        if let Err(e) = append_lines(path, &lines) {
            eprintln!("advlab: {e}");
            return ExitCode::from(code::IO as u8);
        }
    }
    match failure {
        None => ExitCode::from(code::OK as u8),
        Some(e) => {
            eprintln!("advlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
