use advlab::binpack::{gen_coprime_construction, random_order_score_with, MonteCarloOptions, DEFAULT_OPT_BUDGET};
use advlab::cluster::{c_value, gen_theorem_instance, merge_sequence_count, optimal_costs, price_of_hierarchy, PohOptions};
use advlab::gasoline::{table3_row, Budget};
use advlab::knapsack::{
    family_ratio, gen_instance_i1, gen_instance_i2, nu_pareto_sweep, pareto_size_formula, ratio_bounds, CountingMode,
};
use advlab::Rational;

use super::{Ctx, Report};
use crate::args::{Method, ReproduceCmd};
use crate::error::CliError;
use crate::fixtures;
use crate::output::Table;

const MATCH: &str = "match";
const MISMATCH: &str = "mismatch";
const SKIPPED: &str = "skipped (budget)";

/// Rounds to as many decimals as the reference shows.
fn as_printed(v: f64, reference: &str) -> String {
    let decimals = reference.split_once('.').map_or(0, |(_, f)| f.len());
    format!("{v:.decimals$}")
}

fn finish(ctx: &mut Ctx, table: Table, status_col: usize) -> Report {
    let count = |s: &str| table.rows.iter().filter(|r| r[status_col] == s).count();
    let (ok, bad, skipped) = (count(MATCH), count(MISMATCH), count(SKIPPED));
    let rec = &mut ctx.record;
    rec.set("rows", table.rows.len());
    rec.set("matched", ok);
    rec.set("mismatched", bad);
    rec.set("skipped", skipped);
    let failure = (bad > 0).then(|| CliError::Mismatch(format!("{bad} row(s) disagree with the reference")));
    Report { table: Some(table), failure, ..Report::default() }
}

pub fn run(ctx: &mut Ctx, cmd: &ReproduceCmd) -> Result<Report, CliError> {
    match cmd {
        ReproduceCmd::Table3 { max_d, max_k, opt_secs, opt_nodes } => table3(ctx, *max_d, *max_k, *opt_secs, *opt_nodes),
        ReproduceCmd::KnapsackRatios { max_n } => knapsack(ctx, *max_n),
        ReproduceCmd::ClusteringPoh { d, method } => clustering(ctx, d, *method),
        ReproduceCmd::BinpackRatio { m, trials } => binpack(ctx, m, *trials),
    }
}

fn table3(ctx: &mut Ctx, max_d: usize, max_k: u32, opt_secs: f64, opt_nodes: Option<u64>) -> Result<Report, CliError> {
    if !(opt_secs.is_finite() && opt_secs > 0.0) {
        return Err(CliError::Config(format!("--opt-secs must be positive, got {opt_secs}")));
    }
    let budget = Budget { max_nodes: opt_nodes, ..Budget::seconds(opt_secs) };
    ctx.record.problem = Some("gasoline".into());
    let mut t = Table::new(
        "Iterative rounding versus the optimum",
        &["d", "k", "|X|", "IR", "IR ref", "OPT", "OPT ref", "ratio", "ratio ref", "status", "source"],
    );
    for r in fixtures::table3().into_iter().filter(|r| r.d <= max_d && r.k <= max_k) {
        let row = table3_row(r.d, r.k, Some(budget))?;
        let mut ok = row.len_x == r.len_x && row.ir_value == r.ir;
        let (opt, ratio) = match (&row.opt_value, &row.ratio) {
            (Some(o), Some(q)) => {
                let printed = as_printed(q.to_f64(), &r.ratio);
                ok &= *o == r.opt && printed == r.ratio;
                (o.to_string(), printed)
            }
            _ => ("-".to_string(), "-".to_string()),
        };
        let status = match (ok, row.opt_value.is_some()) {
            (false, _) => MISMATCH,
            (true, true) => MATCH,
            (true, false) => SKIPPED,
        };
        t.push(vec![
            r.d.to_string(),
            r.k.to_string(),
            row.len_x.to_string(),
            row.ir_value.to_string(),
            r.ir.to_string(),
            opt,
            r.opt.to_string(),
            ratio,
            r.ratio.clone(),
            status.into(),
            r.source.clone(),
        ]);
    }
    Ok(finish(ctx, t, 9))
}

fn knapsack(ctx: &mut Ctx, max_n: u32) -> Result<Report, CliError> {
    ctx.record.problem = Some("knapsack".into());
    let mut t = Table::new(
        "Pareto-set sizes of the two-segment families",
        &["n", "k", "|P(I1)|", "formula", "max |P_i(I2)|", "|P(I2)|", "formula", "ratio", "formula", "lower bound", "status"],
    );
    for k in 1u32.. {
        let first = 2u32 << k;
        if first > max_n {
            break;
        }
        for n in first..=max_n {
            let mode = CountingMode::DistinctValuePairs;
            let big = nu_pareto_sweep(&gen_instance_i1(n, k)?, mode).pareto.size();
            let sweep = nu_pareto_sweep(&gen_instance_i2(n, k)?, mode);
            let (max, small) = (sweep.max_size(), sweep.pareto.size());
            let big_ref = pareto_size_formula(2 * k, 2 * k + n, k, n)?;
            let small_ref = pareto_size_formula(k + 1, 2 * k + n, k, n)?;
            let ratio = Rational::from_bigints(max.into(), small.into());
            let ratio_ref = family_ratio(n, k)?;
            let bound = ratio_bounds(n, k)?;
            let ok = big_ref == big.into() && big_ref == max.into() && small_ref == small.into() && ratio == ratio_ref;
            let status = if ok && ratio >= bound { MATCH } else { MISMATCH };
            t.push(vec![
                n.to_string(),
                k.to_string(),
                big.to_string(),
                big_ref.to_string(),
                max.to_string(),
                small.to_string(),
                small_ref.to_string(),
                format!("{:.4}", ratio.to_f64()),
                format!("{:.4}", ratio_ref.to_f64()),
                format!("{:.4}", bound.to_f64()),
                status.into(),
            ]);
        }
    }
    Ok(finish(ctx, t, 10))
}

fn clustering(ctx: &mut Ctx, ds: &[usize], method: Method) -> Result<Report, CliError> {
    ctx.record.problem = Some("cluster".into());
    let refs = fixtures::clustering();
    let mut t = Table::new(
        "Price of hierarchy of the lower-bound instances",
        &["d", "points", "sequences", "explored", "PoH", "c", "bound c/d", "OPT_{d+1}", "ref", "status", "source"],
    );
    for &d in ds {
        let inst = gen_theorem_instance(d)?;
        let (c, bound, level_ref, source) = match refs.iter().find(|r| r.d == d) {
            Some(r) => (r.c.clone(), r.bound, r.opt_level_cost, r.source.clone()),
            None => (format!("{:.6}", c_value(d)), c_value(d) / d as f64, d as f64, "closed form".to_string()),
        };
        let opts = PohOptions { method: method.into(), exec: ctx.global.exec, max_points: inst.len() };
        let poh = price_of_hierarchy(&inst, opts)?;
        let level = optimal_costs(&inst)?[d + 1];
        let ok = poh.value >= bound - 1e-9 && level.infinite == 0.0 && (level.finite - level_ref).abs() < 1e-9;
        t.push(vec![
            d.to_string(),
            inst.len().to_string(),
            merge_sequence_count(inst.len()).to_string(),
            poh.explored.to_string(),
            format!("{:.6}", poh.value),
            c,
            format!(">= {bound:.6}"),
            format!("{}", level.finite),
            format!("{level_ref}"),
            if ok { MATCH } else { MISMATCH }.into(),
            source,
        ]);
    }
    Ok(finish(ctx, t, 9))
}

fn binpack(ctx: &mut Ctx, ms: &[u32], trials: u64) -> Result<Report, CliError> {
    ctx.record.problem = Some("binpack".into());
    let refs = fixtures::binpack();
    let mut t = Table::new(
        "Random-order Best-Fit on the coprime construction",
        &["m", "items", "OPT", "mean bins", "std err", "ratio", "reference", "status", "source"],
    );
    for &m in ms {
        let inst = gen_coprime_construction(m)?;
        let opts = MonteCarloOptions { exec: ctx.global.exec, opt_budget: inst.len().max(DEFAULT_OPT_BUDGET) };
        let r = random_order_score_with(&inst, trials, ctx.global.seed, opts)?;
        let (reference, status, source) = match refs.iter().find(|x| x.m == m) {
            Some(x) => {
                let ok = (x.lower..=x.upper).contains(&r.score);
                (format!("[{}, {}]", x.lower, x.upper), if ok { MATCH } else { MISMATCH }, x.source.clone())
            }
            None => ("-".into(), "no reference", "-".into()),
        };
        t.push(vec![
            m.to_string(),
            inst.len().to_string(),
            r.opt_bins.to_string(),
            format!("{:.4}", r.mean_bins.to_f64()),
            format!("{:.4}", r.standard_error),
            format!("{:.4}", r.score),
            reference,
            status.into(),
            source,
        ]);
    }
    Ok(finish(ctx, t, 7))
}
