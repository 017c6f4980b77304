//! The generalised gasoline problem.
//!
//! Canisters `X` are ordered against a fixed route of segments `Y`; a
//! permutation is scored by the coordinate sum of the spans between the
//! highest fuel level reached before a segment and the lowest level after
//! one. This module holds the objective, the ILP model, an iterative LP
//! rounding heuristic, an exact branch-and-bound and the instance families
//! used to stress the heuristic.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::lp::{Constraint, IncrementalSolver, LinearProgram, LpError, Relation, Sense, VarBounds};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GasolineError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("search budget exhausted after {nodes} nodes (best found: {incumbent:?})")]
    BudgetExceeded { nodes: u64, incumbent: Option<i64> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasolineInstance {
    x: Vec<Vec<i64>>,
    y: Vec<Vec<i64>>,
    d: usize,
}

impl GasolineInstance {
    pub fn new(x: Vec<Vec<i64>>, y: Vec<Vec<i64>>) -> Result<GasolineInstance, GasolineError> {
        let bad = |m: String| Err(GasolineError::InvalidInstance(m));
        if x.len() != y.len() {
            return bad(format!("|X| = {} but |Y| = {}", x.len(), y.len()));
        }
        if x.is_empty() {
            return bad("empty instance".into());
        }
        let d = x[0].len();
        if d == 0 {
            return bad("zero-dimensional vectors".into());
        }
        for (name, list) in [("X", &x), ("Y", &y)] {
            for (i, v) in list.iter().enumerate() {
                if v.len() != d {
                    return bad(format!("{name}[{i}] has dimension {} instead of {d}", v.len()));
                }
                if v.iter().any(|&c| c < 0) {
                    return bad(format!("{name}[{i}] has a negative entry"));
                }
            }
        }
        let (sx, sy) = (column_sums(&x, d), column_sums(&y, d));
        if sx != sy {
            return bad(format!("coordinate sums differ: {sx:?} vs {sy:?}"));
        }
        Ok(GasolineInstance { x, y, d })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn x(&self) -> &[Vec<i64>] {
        &self.x
    }

    pub fn y(&self) -> &[Vec<i64>] {
        &self.y
    }

    /// `Y` prefix sums; entry `m` is the sum of the first `m` segments.
    fn y_prefix(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.d]];
        for v in &self.y {
            let last = out.last().expect("non-empty");
            out.push(last.iter().zip(v).map(|(a, b)| a + b).collect());
        }
        out
    }

    /// Objective of the ordering that places `X[perm[k]]` at position `k`.
    pub fn evaluate(&self, perm: &[usize]) -> Result<i64, GasolineError> {
        check_permutation(perm, self.len())?;
        let d = self.d;
        let mut level = vec![0i64; d];
        let mut before = vec![0i64; d];
        let mut hi = vec![i64::MIN; d];
        let mut lo = vec![i64::MAX; d];
        for (k, &item) in perm.iter().enumerate() {
            for j in 0..d {
                level[j] += self.x[item][j];
                hi[j] = hi[j].max(level[j] - before[j]);
                before[j] += self.y[k][j];
                lo[j] = lo[j].min(level[j] - before[j]);
            }
        }
        Ok((0..d).map(|j| hi[j] - lo[j]).sum())
    }

    /// Distinct `X` vectors in order of first appearance, with their items.
    fn types(&self) -> (Vec<Vec<i64>>, Vec<Vec<usize>>) {
        let mut index: HashMap<&[i64], usize> = HashMap::new();
        let mut vecs = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, v) in self.x.iter().enumerate() {
            let t = *index.entry(v.as_slice()).or_insert_with(|| {
                vecs.push(v.clone());
                members.push(Vec::new());
                vecs.len() - 1
            });
            members[t].push(i);
        }
        (vecs, members)
    }

    /// Text format: header `n d`, then `n` lines of `X`, then `n` lines of `Y`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.len(), self.d);
        for v in self.x.iter().chain(&self.y) {
            let row: Vec<String> = v.iter().map(i64::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<GasolineInstance, GasolineError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_row = |line: usize, l: &str| -> Result<Vec<i64>, GasolineError> {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| GasolineError::Parse { line, message: format!("`{t}` is not an integer") })
                })
                .collect()
        };
        let (hline, header) =
            lines.next().ok_or(GasolineError::Parse { line: 1, message: "missing `n d` header".into() })?;
        let head = parse_row(hline, header)?;
        if head.len() != 2 || head[0] < 1 || head[1] < 1 {
            return Err(GasolineError::Parse { line: hline, message: "header must be `n d` with n, d >= 1".into() });
        }
        let (n, d) = (head[0] as usize, head[1] as usize);
        let mut rows = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            let (line, l) = lines.next().ok_or(GasolineError::Parse {
                line: hline,
                message: format!("expected {} vector lines, found {}", 2 * n, rows.len()),
            })?;
            let row = parse_row(line, l)?;
            if row.len() != d {
                return Err(GasolineError::Parse { line, message: format!("expected {d} entries, found {}", row.len()) });
            }
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(GasolineError::Parse { line, message: "trailing content".into() });
        }
        let y = rows.split_off(n);
        GasolineInstance::new(rows, y)
    }
}

fn column_sums(v: &[Vec<i64>], d: usize) -> Vec<i64> {
    let mut s = vec![0i64; d];
    for row in v {
        for (a, b) in s.iter_mut().zip(row) {
            *a += b;
        }
    }
    s
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), GasolineError> {
    if perm.len() != n {
        return Err(GasolineError::InvalidPermutation(format!("length {} for {n} items", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(GasolineError::InvalidPermutation(format!("entry {p} out of range or repeated")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Instance families

fn u(k: u32, i: u32) -> i64 {
    (1i64 << k) - (1i64 << (k - i))
}

/// The one-dimensional family on which iterative rounding is known to be
/// at least 2-approximate.
pub fn gen_lorieau_1d(k: u32) -> Result<GasolineInstance, GasolineError> {
    if !(2..=20).contains(&k) {
        return Err(GasolineError::InvalidParameter(format!("k must lie in 2..=20, got {k}")));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 1..k {
        x.extend(std::iter::repeat_n(vec![u(k, i)], 1 << i));
    }
    x.extend(std::iter::repeat_n(vec![1i64 << k], (1 << k) - 1));
    x.push(vec![0]);
    for i in 1..=k {
        y.extend(std::iter::repeat_n(vec![u(k, i)], 1 << i));
    }
    GasolineInstance::new(x, y)
}

/// The `d`-dimensional extension of [`gen_lorieau_1d`].
pub fn gen_extension(d: usize, k: u32) -> Result<GasolineInstance, GasolineError> {
    if d < 2 || !(2..=16).contains(&k) {
        return Err(GasolineError::InvalidParameter(format!("need d >= 2 and 2 <= k <= 16, got d={d}, k={k}")));
    }
    let unit = |first: i64, j: usize, v: i64| {
        let mut e = vec![0i64; d];
        e[0] = first;
        e[j] += v;
        e
    };
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 1..k {
        for _ in 0..1u64 << i {
            for j in 1..d {
                x.push(unit(u(k, i), j, 4));
            }
        }
    }
    for j in 1..d {
        x.extend(std::iter::repeat_n(unit(1 << k, 0, 0), (1 << k) - 1));
        x.push(unit(0, j, 4));
    }
    for i in 1..=k {
        for _ in 0..1u64 << i {
            for j in 1..d {
                y.push(unit(u(k, i), j, 2));
            }
        }
    }
    GasolineInstance::new(x, y)
}

// ---------------------------------------------------------------------------
// ILP model

/// How the assignment rows and columns of `Z` are bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentRelation {
    /// `Z 1 <= 1` and `1ᵀ Z <= 1ᵀ`: sub-permutation matrices.
    AtMost,
    /// Doubly stochastic rows and columns.
    #[default]
    Exact,
}

impl AssignmentRelation {
    fn relation(self) -> Relation {
        match self {
            AssignmentRelation::AtMost => Relation::Le,
            AssignmentRelation::Exact => Relation::Eq,
        }
    }
}

/// The ILP with `Z[i][l] = 1` meaning item `l` sits at position `i`.
#[derive(Debug, Clone)]
pub struct GasolineIlp {
    /// LP relaxation; `Z` variables carry bounds `[0, 1]`.
    pub lp: LinearProgram,
    /// `z[i][l]` is the variable index of `Z[i][l]`.
    pub z: Vec<Vec<usize>>,
    pub beta: Vec<usize>,
    pub alpha: Vec<usize>,
    pub assignment: AssignmentRelation,
}

impl GasolineIlp {
    /// Indices of the variables that must be integral.
    pub fn binaries(&self) -> Vec<usize> {
        self.z.iter().flatten().copied().collect()
    }

    pub fn num_prefix_constraints(&self) -> usize {
        let n = self.z.len();
        2 * n * self.beta.len()
    }
}

/// The model exactly as written: prefix rows against `β` and `α`, with
/// sub-permutation assignment rows.
pub fn build_ilp(inst: &GasolineInstance) -> GasolineIlp {
    build_ilp_with(inst, AssignmentRelation::AtMost)
}

pub fn build_ilp_with(inst: &GasolineInstance, assignment: AssignmentRelation) -> GasolineIlp {
    let (n, d) = (inst.len(), inst.dim());
    let mut lp = LinearProgram::new(Sense::Minimize);
    let z: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|l| {
                    lp.add_var(format!("z_{i}_{l}"), Rational::zero(), VarBounds::between(Rational::zero(), Rational::one()))
                })
                .collect()
        })
        .collect();
    let beta: Vec<usize> = (0..d).map(|j| lp.add_var(format!("beta_{j}"), Rational::one(), VarBounds::free())).collect();
    let alpha: Vec<usize> =
        (0..d).map(|j| lp.add_var(format!("alpha_{j}"), -Rational::one(), VarBounds::free())).collect();
    let yp = inst.y_prefix();
    for m in 0..n {
        for j in 0..d {
            let mut coeffs: Vec<(usize, Rational)> = Vec::new();
            for row in z.iter().take(m + 1) {
                for (l, &var) in row.iter().enumerate() {
                    if inst.x[l][j] != 0 {
                        coeffs.push((var, Rational::from_int(inst.x[l][j])));
                    }
                }
            }
            let mut upper = coeffs.clone();
            upper.push((beta[j], -Rational::one()));
            lp.add_constraint(upper, Relation::Le, Rational::from_int(yp[m][j]));
            coeffs.push((alpha[j], -Rational::one()));
            lp.add_constraint(coeffs, Relation::Ge, Rational::from_int(yp[m + 1][j]));
        }
    }
    let rel = assignment.relation();
    for row in &z {
        lp.add_constraint(row.iter().map(|&v| (v, Rational::one())).collect(), rel, Rational::one());
    }
    for l in 0..n {
        lp.add_constraint(z.iter().map(|row| (row[l], Rational::one())).collect(), rel, Rational::one());
    }
    GasolineIlp { lp, z, beta, alpha, assignment }
}

// ---------------------------------------------------------------------------
// Iterative rounding

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub item: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterRoundStep {
    pub position: usize,
    /// One candidate per distinct remaining vector, represented by its
    /// earliest unused item, in item order; equal vectors give equal LP
    /// values. Unless the run was exhaustive the list may stop early.
    pub candidates: Vec<Candidate>,
    pub chosen: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterRoundTrace {
    pub relaxation: Rational,
    pub steps: Vec<IterRoundStep>,
    pub permutation: Vec<usize>,
    pub objective: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrMethod {
    /// Positions × distinct vectors, re-optimised with the dual simplex.
    #[default]
    Aggregated,
    /// Full `n × n` matrix, every candidate solved from scratch.
    FullMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IrOptions {
    pub assignment: AssignmentRelation,
    pub method: IrMethod,
    pub exec: Execution,
    /// Solve every candidate. Otherwise the aggregated method stops at the
    /// first candidate (in item order) that keeps the current relaxation
    /// value, which cannot be beaten; the chosen item is the same either way.
    pub exhaustive: bool,
}

pub fn iterative_rounding(inst: &GasolineInstance) -> Result<IterRoundTrace, GasolineError> {
    iterative_rounding_with(inst, IrOptions::default())
}

/// Fills positions front to back. At each position every remaining item is
/// tried, the relaxation with that item pinned is solved, and the item with
/// the smallest value wins, ties going to the smaller item index.
pub fn iterative_rounding_with(inst: &GasolineInstance, opts: IrOptions) -> Result<IterRoundTrace, GasolineError> {
    let trace = match opts.method {
        IrMethod::Aggregated => ir_aggregated(inst, opts)?,
        IrMethod::FullMatrix => ir_full(inst, opts)?,
    };
    Ok(trace)
}

fn pick(candidates: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        let b = &candidates[best];
        if c.value < b.value || (c.value == b.value && c.item < b.item) {
            best = i;
        }
    }
    best
}

fn ir_aggregated(inst: &GasolineInstance, opts: IrOptions) -> Result<IterRoundTrace, GasolineError> {
    let (n, d) = (inst.len(), inst.dim());
    let (tvec, members) = inst.types();
    let nt = tvec.len();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let w: Vec<Vec<usize>> = (0..n)
        .map(|p| (0..nt).map(|t| lp.add_var(format!("w_{p}_{t}"), Rational::zero(), VarBounds::non_negative())).collect())
        .collect();
    let beta: Vec<usize> = (0..d).map(|j| lp.add_var(format!("beta_{j}"), Rational::one(), VarBounds::free())).collect();
    let alpha: Vec<usize> =
        (0..d).map(|j| lp.add_var(format!("alpha_{j}"), -Rational::one(), VarBounds::free())).collect();
    let yp = inst.y_prefix();
    for m in 0..n {
        for j in 0..d {
            let mut coeffs: Vec<(usize, Rational)> = Vec::new();
            for row in w.iter().take(m + 1) {
                for (t, &var) in row.iter().enumerate() {
                    if tvec[t][j] != 0 {
                        coeffs.push((var, Rational::from_int(tvec[t][j])));
                    }
                }
            }
            let mut upper = coeffs.clone();
            upper.push((beta[j], -Rational::one()));
            lp.add_constraint(upper, Relation::Le, Rational::from_int(yp[m][j]));
            coeffs.push((alpha[j], -Rational::one()));
            lp.add_constraint(coeffs, Relation::Ge, Rational::from_int(yp[m + 1][j]));
        }
    }
    let rel = opts.assignment.relation();
    for row in &w {
        lp.add_constraint(row.iter().map(|&v| (v, Rational::one())).collect(), rel, Rational::one());
    }
    for (t, m) in members.iter().enumerate() {
        let col = w.iter().map(|row| (row[t], Rational::one())).collect();
        lp.add_constraint(col, rel, Rational::from_int(m.len() as i64));
    }

    let (mut base, root) = IncrementalSolver::new(&lp)?;
    if !root.is_optimal() {
        return Err(LpError::Internal(format!("relaxation status {:?}", root.status)).into());
    }
    let width = if opts.exhaustive { usize::MAX } else { exec::width(opts.exec) };
    let mut next: Vec<usize> = vec![0; nt];
    let mut steps = Vec::with_capacity(n);
    let mut permutation = Vec::with_capacity(n);
    for (p, wp) in w.iter().enumerate() {
        let mut open: Vec<usize> = (0..nt).filter(|&t| next[t] < members[t].len()).collect();
        open.sort_by_key(|&t| members[t][next[t]]);
        let current = base.objective().expect("base is optimal");
        let mut candidates = Vec::with_capacity(open.len());
        let mut solvers = Vec::with_capacity(open.len());
        for chunk in open.chunks(width) {
            let solved = exec::map_slice(opts.exec, chunk, |&t| -> Result<(Candidate, IncrementalSolver), GasolineError> {
                let mut s = base.clone();
                let sol = s.add_constraint(Constraint::new(vec![(wp[t], Rational::one())], Relation::Ge, Rational::one()))?;
                if !sol.is_optimal() {
                    return Err(LpError::Internal(format!("candidate status {:?}", sol.status)).into());
                }
                Ok((Candidate { item: members[t][next[t]], value: sol.objective }, s))
            });
            for r in solved {
                let (c, s) = r?;
                candidates.push(c);
                solvers.push(s);
            }
            if !opts.exhaustive && candidates.iter().any(|c| c.value == current) {
                break;
            }
        }
        let best = pick(&candidates);
        let t = open[best];
        next[t] += 1;
        base = solvers.swap_remove(best);
        permutation.push(candidates[best].item);
        steps.push(IterRoundStep {
            position: p,
            chosen: candidates[best].item,
            value: candidates[best].value.clone(),
            candidates,
        });
    }
    finish(inst, root.objective, steps, permutation)
}

fn ir_full(inst: &GasolineInstance, opts: IrOptions) -> Result<IterRoundTrace, GasolineError> {
    let n = inst.len();
    let ilp = build_ilp_with(inst, opts.assignment);
    let root = crate::lp::solve(&ilp.lp)?;
    if !root.is_optimal() {
        return Err(LpError::Internal(format!("relaxation status {:?}", root.status)).into());
    }
    let mut model = ilp.lp.clone();
    let mut used = vec![false; n];
    let mut steps = Vec::with_capacity(n);
    let mut permutation = Vec::with_capacity(n);
    for p in 0..n {
        let open: Vec<usize> = (0..n).filter(|&l| !used[l]).collect();
        let solved = exec::map_slice(opts.exec, &open, |&l| -> Result<Candidate, GasolineError> {
            let pinned = pin(&model, &ilp, p, l)?;
            let sol = crate::lp::solve(&pinned)?;
            if !sol.is_optimal() {
                return Err(LpError::Internal(format!("candidate status {:?}", sol.status)).into());
            }
            Ok(Candidate { item: l, value: sol.objective })
        });
        let candidates: Vec<Candidate> = solved.into_iter().collect::<Result<_, _>>()?;
        let best = pick(&candidates);
        let l = candidates[best].item;
        used[l] = true;
        model = pin(&model, &ilp, p, l)?;
        permutation.push(l);
        steps.push(IterRoundStep { position: p, chosen: l, value: candidates[best].value.clone(), candidates });
    }
    finish(inst, root.objective, steps, permutation)
}

/// Position `p` holds item `l`: row `p` and column `l` become unit vectors.
fn pin(model: &LinearProgram, ilp: &GasolineIlp, p: usize, l: usize) -> Result<LinearProgram, LpError> {
    let mut out = crate::lp::fix_variable(model, ilp.z[p][l], Rational::one())?;
    let n = ilp.z.len();
    for other in 0..n {
        if other != l {
            out = crate::lp::fix_variable(&out, ilp.z[p][other], Rational::zero())?;
        }
        if other != p {
            out = crate::lp::fix_variable(&out, ilp.z[other][l], Rational::zero())?;
        }
    }
    Ok(out)
}

fn finish(
    inst: &GasolineInstance,
    relaxation: Rational,
    steps: Vec<IterRoundStep>,
    permutation: Vec<usize>,
) -> Result<IterRoundTrace, GasolineError> {
    let objective = inst.evaluate(&permutation)?;
    // With every position pinned the relaxation is the objective itself.
    if let Some(last) = steps.last() {
        if last.value != Rational::from_int(objective) {
            return Err(LpError::Internal(format!("final LP value {} differs from objective {objective}", last.value)).into());
        }
    }
    Ok(IterRoundTrace { relaxation, steps, permutation, objective })
}

// ---------------------------------------------------------------------------
// Exact optimum

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn seconds(s: f64) -> Budget {
        Budget { max_nodes: None, time_limit: Some(Duration::from_secs_f64(s)) }
    }

    pub fn nodes(n: u64) -> Budget {
        Budget { max_nodes: Some(n), time_limit: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: i64,
    pub permutation: Vec<usize>,
    pub nodes: u64,
}

pub fn optimal_value(inst: &GasolineInstance, budget: Budget) -> Result<Optimum, GasolineError> {
    optimal_value_with(inst, budget, Execution::default())
}

struct Shared {
    best: AtomicI64,
    best_seq: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    start: Instant,
    budget: Budget,
}

/// Prefix maxima and minima `(β, α)` reached by some ordering.
type Frontier = (Vec<i64>, Vec<i64>);

struct Tree<'a> {
    types: &'a [Vec<i64>],
    /// Per coordinate, type indices sorted by that coordinate.
    by_coord: &'a [Vec<usize>],
    yp: &'a [Vec<i64>],
    n: usize,
    d: usize,
    shared: &'a Shared,
    counts: Vec<usize>,
    seq: Vec<usize>,
    /// Undominated (β, α) pairs seen for each remaining multiset.
    memo: HashMap<Vec<usize>, Vec<Frontier>>,
    memo_limit: usize,
    memo_size: usize,
    local_nodes: u64,
}

impl Tree<'_> {
    fn bound(&self, k: usize, level: &[i64], hi: &[i64], lo: &[i64]) -> i64 {
        let rest = self.n - k;
        let mut total = 0;
        for j in 0..self.d {
            let (mut b, mut a) = (hi[j], lo[j]);
            let order = &self.by_coord[j];
            let expand = |t: &usize| std::iter::repeat_n(self.types[*t][j], self.counts[*t]);
            let mut asc = order.iter().flat_map(expand);
            let mut desc = order.iter().rev().flat_map(expand);
            let (mut small, mut large) = (0i64, 0i64);
            for r in 1..=rest {
                small += asc.next().expect("counts cover the rest");
                large += desc.next().expect("counts cover the rest");
                b = b.max(level[j] + small - self.yp[k + r - 1][j]);
                a = a.min(level[j] + large - self.yp[k + r][j]);
            }
            total += b - a;
        }
        total
    }

    fn dominated(&mut self, hi: &[i64], lo: &[i64]) -> bool {
        let entry = self.memo.entry(self.counts.clone()).or_default();
        if entry.iter().any(|(b, a)| b.iter().zip(hi).all(|(x, y)| x <= y) && a.iter().zip(lo).all(|(x, y)| x >= y)) {
            return true;
        }
        if self.memo_size < self.memo_limit {
            let before = entry.len();
            entry.retain(|(b, a)| !(hi.iter().zip(b).all(|(x, y)| x <= y) && lo.iter().zip(a).all(|(x, y)| x >= y)));
            entry.push((hi.to_vec(), lo.to_vec()));
            self.memo_size = self.memo_size + entry.len() - before;
        }
        false
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(1024) {
            let total = self.shared.nodes.fetch_add(1024, Ordering::Relaxed) + 1024;
            let b = &self.shared.budget;
            if b.max_nodes.is_some_and(|m| total > m) || b.time_limit.is_some_and(|t| self.shared.start.elapsed() > t) {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn dfs(&mut self, k: usize, level: &mut [i64], hi: &[i64], lo: &[i64]) {
        if self.tick() {
            return;
        }
        if k == self.n {
            let value: i64 = hi.iter().zip(lo).map(|(b, a)| b - a).sum();
            if value < self.shared.best.load(Ordering::Relaxed) {
                let mut seq = self.shared.best_seq.lock().expect("poisoned");
                if value < self.shared.best.load(Ordering::Relaxed) {
                    self.shared.best.store(value, Ordering::Relaxed);
                    *seq = self.seq.clone();
                }
            }
            return;
        }
        if self.dominated(hi, lo) {
            return;
        }
        let mut children = Vec::new();
        for t in 0..self.types.len() {
            if self.counts[t] == 0 {
                continue;
            }
            let (nl, nh, nlo) = self.step(k, level, hi, lo, t);
            self.counts[t] -= 1;
            let b = self.bound(k + 1, &nl, &nh, &nlo);
            self.counts[t] += 1;
            children.push((b, t, nl, nh, nlo));
        }
        children.sort_by_key(|c| (c.0, c.1));
        for (b, t, mut nl, nh, nlo) in children {
            if b >= self.shared.best.load(Ordering::Relaxed) {
                break;
            }
            self.counts[t] -= 1;
            self.seq.push(t);
            self.dfs(k + 1, &mut nl, &nh, &nlo);
            self.seq.pop();
            self.counts[t] += 1;
        }
    }

    fn step(&self, k: usize, level: &[i64], hi: &[i64], lo: &[i64], t: usize) -> (Vec<i64>, Vec<i64>, Vec<i64>) {
        let mut nl = level.to_vec();
        let mut nh = hi.to_vec();
        let mut nlo = lo.to_vec();
        for j in 0..self.d {
            nl[j] += self.types[t][j];
            nh[j] = nh[j].max(nl[j] - self.yp[k][j]);
            nlo[j] = nlo[j].min(nl[j] - self.yp[k + 1][j]);
        }
        (nl, nh, nlo)
    }
}

/// Exact minimum by depth-first branch-and-bound over prefixes.
///
/// Equal `X` vectors are interchangeable, so the tree branches on distinct
/// vectors only. A prefix is pruned by a bound that places the cheapest and
/// dearest remaining coordinates greedily, and by dominance against earlier
/// prefixes that used the same multiset with a tighter (β, α) pair.
pub fn optimal_value_with(inst: &GasolineInstance, budget: Budget, exec: Execution) -> Result<Optimum, GasolineError> {
    let (n, d) = (inst.len(), inst.dim());
    let (types, members) = inst.types();
    let counts: Vec<usize> = members.iter().map(Vec::len).collect();
    let by_coord: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut o: Vec<usize> = (0..types.len()).collect();
            o.sort_by_key(|&t| (types[t][j], t));
            o
        })
        .collect();
    let yp = inst.y_prefix();
    let shared = Shared {
        best: AtomicI64::new(i64::MAX),
        best_seq: Mutex::new(Vec::new()),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        start: Instant::now(),
        budget,
    };
    // The final position always contributes y_n above and 0 below.
    let hi0: Vec<i64> = inst.y[n - 1].clone();
    let lo0 = vec![0i64; d];
    let new_tree = |counts: Vec<usize>| Tree {
        types: &types,
        by_coord: &by_coord,
        yp: &yp,
        n,
        d,
        shared: &shared,
        counts,
        seq: Vec::new(),
        memo: HashMap::new(),
        memo_limit: 4_000_000,
        memo_size: 0,
        local_nodes: 0,
    };
    // Seed the incumbent with one greedy dive so parallel subtrees prune early.
    {
        let mut t = new_tree(counts.clone());
        t.memo_limit = 0;
        let mut level = vec![0i64; d];
        let (mut hi, mut lo) = (hi0.clone(), lo0.clone());
        for k in 0..n {
            let open: Vec<usize> = (0..types.len()).filter(|&c| t.counts[c] > 0).collect();
            let cand = open.into_iter().min_by_key(|&c| {
                let (nl, nh, nlo) = t.step(k, &level, &hi, &lo, c);
                t.counts[c] -= 1;
                let b = t.bound(k + 1, &nl, &nh, &nlo);
                t.counts[c] += 1;
                (b, c)
            });
            let c = cand.expect("items remain");
            let (nl, nh, nlo) = t.step(k, &level, &hi, &lo, c);
            (level, hi, lo) = (nl, nh, nlo);
            t.counts[c] -= 1;
            t.seq.push(c);
        }
        shared.best.store(hi.iter().zip(&lo).map(|(b, a)| b - a).sum(), Ordering::Relaxed);
        *shared.best_seq.lock().expect("poisoned") = t.seq.clone();
    }
    let roots: Vec<usize> = (0..types.len()).collect();
    let leftover = exec::map_slice(exec, &roots, |&t| {
        let mut tree = new_tree(counts.clone());
        let (nl, nh, nlo) = tree.step(0, &vec![0; d], &hi0, &lo0, t);
        tree.counts[t] -= 1;
        let b = tree.bound(1, &nl, &nh, &nlo);
        if b < shared.best.load(Ordering::Relaxed) {
            tree.seq.push(t);
            let mut nl = nl;
            tree.dfs(1, &mut nl, &nh, &nlo);
        }
        tree.local_nodes % 1024
    });
    let nodes = shared.nodes.load(Ordering::Relaxed) + leftover.iter().sum::<u64>();
    let best = shared.best.load(Ordering::Relaxed);
    if shared.stop.load(Ordering::Relaxed) {
        return Err(GasolineError::BudgetExceeded { nodes, incumbent: Some(best) });
    }
    let seq = shared.best_seq.into_inner().expect("poisoned");
    let mut next = vec![0usize; types.len()];
    let permutation: Vec<usize> = seq
        .iter()
        .map(|&t| {
            next[t] += 1;
            members[t][next[t] - 1]
        })
        .collect();
    debug_assert_eq!(inst.evaluate(&permutation).ok(), Some(best));
    Ok(Optimum { value: best, permutation, nodes })
}

/// Exhaustive minimum over all `n!` orderings; for cross-checking only.
pub fn exhaustive_optimum(inst: &GasolineInstance) -> Result<Optimum, GasolineError> {
    let n = inst.len();
    if n > 10 {
        return Err(GasolineError::InvalidParameter(format!("exhaustive search limited to n <= 10, got {n}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (inst.evaluate(&perm)?, perm.clone());
    let mut count = 1u64;
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            count += 1;
            let v = inst.evaluate(&perm)?;
            if v < best.0 {
                best = (v, perm.clone());
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(Optimum { value: best.0, permutation: best.1, nodes: count })
}

// ---------------------------------------------------------------------------
// Table rows

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table3Row {
    pub d: usize,
    pub k: u32,
    pub len_x: usize,
    pub ir_value: i64,
    /// `None` when the exact search was skipped or ran out of budget.
    pub opt_value: Option<i64>,
    pub ratio: Option<Rational>,
    pub opt_budget_exceeded: bool,
}

/// Generates the `(d, k)` instance, rounds it, and optionally solves it exactly.
pub fn table3_row(d: usize, k: u32, opt_budget: Option<Budget>) -> Result<Table3Row, GasolineError> {
    let inst = gen_extension(d, k)?;
    let ir = iterative_rounding(&inst)?;
    let (opt_value, exceeded) = match opt_budget {
        None => (None, false),
        Some(b) => match optimal_value(&inst, b) {
            Ok(o) => (Some(o.value), false),
            Err(GasolineError::BudgetExceeded { .. }) => (None, true),
            Err(e) => return Err(e),
        },
    };
    let ratio = opt_value.filter(|&o| o > 0).map(|o| Rational::new(ir.objective, o));
    Ok(Table3Row { d, k, len_x: inst.len(), ir_value: ir.objective, opt_value, ratio, opt_budget_exceeded: exceeded })
}
