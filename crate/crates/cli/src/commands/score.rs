use advlab::binpack::{random_order_score_with, BinPackingInstance, MonteCarloOptions};
use advlab::cluster::{price_of_hierarchy, ClusterInstance, PohOptions};
use advlab::gasoline::{iterative_rounding_with, optimal_value_with, Budget, GasolineInstance, IrOptions};
use advlab::knapsack::{knapsack_score, nu_pareto_sweep, CountingMode, KnapsackInstance};
use advlab::Rational;

use super::generate::{binpack_instance, cluster_instance, gasoline_instance, knapsack_instance};
use super::{num, read, Ctx, Report};
use crate::args::{Mode, ScoreCmd};
use crate::error::CliError;
use crate::record::fingerprint;

impl From<Mode> for CountingMode {
    fn from(m: Mode) -> CountingMode {
        match m {
            Mode::Values => CountingMode::DistinctValuePairs,
            Mode::Subsets => CountingMode::DistinctSubsets,
        }
    }
}

pub fn run(ctx: &mut Ctx, cmd: &ScoreCmd) -> Result<Report, CliError> {
    let exec = ctx.global.exec;
    let seed = ctx.global.seed;
    let rec = &mut ctx.record;
    match cmd {
        ScoreCmd::Knapsack { file, gen, mode } => {
            rec.problem = Some("knapsack".into());
            let inst = match file {
                Some(p) => KnapsackInstance::from_text(&read(p)?)?,
                None => knapsack_instance(gen)?,
            };
            rec.fingerprint = Some(fingerprint(&inst.to_text()));
            let mode = CountingMode::from(*mode);
            let sweep = nu_pareto_sweep(&inst, mode);
            let score = knapsack_score(&inst, mode);
            rec.set("items", inst.len());
            rec.set("max_pareto", sweep.max_size().to_string());
            rec.set("final_pareto", sweep.pareto.size().to_string());
            rec.set("score", num(score.to_f64()));
            rec.set("score_exact", score.to_string());
        }
        ScoreCmd::Binpack { file, gen, trials, opt_budget } => {
            rec.problem = Some("binpack".into());
            let inst = match file {
                Some(p) => BinPackingInstance::from_text(&read(p)?)?,
                None => binpack_instance(gen)?,
            };
            rec.fingerprint = Some(fingerprint(&inst.to_text()));
            rec.set("items", inst.len());
            let opts = MonteCarloOptions { exec, opt_budget: *opt_budget };
            let r = random_order_score_with(&inst, *trials, seed, opts)?;
            rec.set("trials", r.trials);
            rec.set("opt_bins", r.opt_bins);
            rec.set("mean_bins", num(r.mean_bins.to_f64()));
            rec.set("mean_bins_exact", r.mean_bins.to_string());
            rec.set("standard_error", num(r.standard_error));
            rec.set("score", num(r.score));
        }
        ScoreCmd::Cluster { file, gen, method, max_points } => {
            rec.problem = Some("cluster".into());
            let inst = match file {
                Some(p) => ClusterInstance::from_text(&read(p)?)?,
                None => cluster_instance(gen)?,
            };
            rec.fingerprint = Some(fingerprint(&inst.to_text()));
            rec.set("points", inst.len());
            let r = price_of_hierarchy(&inst, PohOptions { method: (*method).into(), exec, max_points: *max_points })?;
            rec.set("explored", r.explored);
            rec.set("score", num(r.value));
        }
        ScoreCmd::Gasoline { file, gen, opt_secs, opt_nodes } => {
            rec.problem = Some("gasoline".into());
            let inst = match file {
                Some(p) => GasolineInstance::from_text(&read(p)?)?,
                None => gasoline_instance(gen)?,
            };
            rec.fingerprint = Some(fingerprint(&inst.to_text()));
            rec.set("len_x", inst.len());
            let ir = iterative_rounding_with(&inst, IrOptions { exec, ..IrOptions::default() })?;
            rec.set("ir", ir.objective);
            rec.set("relaxation", ir.relaxation.to_string());
            if !(opt_secs.is_finite() && *opt_secs > 0.0) {
                return Err(CliError::Config(format!("--opt-secs must be positive, got {opt_secs}")));
            }
            let budget = Budget { max_nodes: *opt_nodes, ..Budget::seconds(*opt_secs) };
            let opt = optimal_value_with(&inst, budget, exec)?;
            rec.set("opt", opt.value);
            rec.set("opt_nodes", opt.nodes);
            let ratio = match (ir.objective, opt.value) {
                (0, 0) => Rational::one(),
                (_, 0) => return Err(CliError::Config("the optimum is zero while rounding is not".into())),
                (a, b) => Rational::new(a, b),
            };
            rec.set("score", num(ratio.to_f64()));
            rec.set("score_exact", ratio.to_string());
        }
    }
    Ok(Report::default())
}
