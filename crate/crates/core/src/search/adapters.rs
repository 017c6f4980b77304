//! Vector and program encodings of the four target problems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dsl::Value;
use super::{SearchError, SearchProblem};
use crate::binpack::{random_order_score_with, BinPackingInstance, MonteCarloOptions, DEFAULT_OPT_BUDGET};
use crate::cluster::{price_of_hierarchy, ClusterInstance, PohOptions, Weight, WeightedPoint};
use crate::exec::Execution;
use crate::gasoline::{iterative_rounding, optimal_value, Budget, GasolineInstance};
use crate::knapsack::{knapsack_score, CountingMode, KnapsackInstance, KnapsackItem};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Knapsack,
    Binpack,
    Cluster,
    Gasoline,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [ProblemKind::Knapsack, ProblemKind::Binpack, ProblemKind::Cluster, ProblemKind::Gasoline];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Knapsack => "knapsack",
            ProblemKind::Binpack => "binpack",
            ProblemKind::Cluster => "cluster",
            ProblemKind::Gasoline => "gasoline",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<ProblemKind, String> {
        ProblemKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

fn num(v: &Value, what: &str) -> Result<Rational, SearchError> {
    v.as_num().cloned().ok_or_else(|| SearchError::Instance(format!("{what} must be a number")))
}

fn list<'a>(v: &'a Value, what: &str) -> Result<&'a [Value], SearchError> {
    match v {
        Value::List(items) => Ok(items),
        _ => Err(SearchError::Instance(format!("{what} must be a list"))),
    }
}

fn tuple<'a>(v: &'a Value, len: Option<usize>, what: &str) -> Result<&'a [Value], SearchError> {
    match v {
        Value::Tuple(items) if len.is_none_or(|n| n == items.len()) => Ok(items),
        _ => Err(SearchError::Instance(match len {
            Some(n) => format!("{what} must be a {n}-tuple"),
            None => format!("{what} must be a tuple"),
        })),
    }
}

fn integer(v: &Value, what: &str) -> Result<i64, SearchError> {
    let r = num(v, what)?;
    match r.as_small() {
        Some((n, 1)) => Ok(n),
        _ => Err(SearchError::Instance(format!("{what} must be an integer, got {r}"))),
    }
}

// ---------------------------------------------------------------------------

/// Items `(weight, profit)`; the score is the largest intermediate Pareto
/// set over the final one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackProblem {
    pub items: usize,
    /// Weights and profits are rounded into `1..=max_value`.
    pub max_value: i64,
    pub mode: CountingMode,
}

impl Default for KnapsackProblem {
    fn default() -> KnapsackProblem {
        KnapsackProblem { items: 20, max_value: 10_000, mode: CountingMode::default() }
    }
}

impl SearchProblem for KnapsackProblem {
    type Instance = KnapsackInstance;

    fn name(&self) -> &'static str {
        "knapsack"
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(1.0, self.max_value as f64); 2 * self.items]
    }

    fn noise_scale(&self) -> f64 {
        1000.0
    }

    fn decode(&self, v: &[f64]) -> KnapsackInstance {
        let r = |x: f64| (x.round() as i64).clamp(1, self.max_value);
        let pairs: Vec<(i64, i64)> = v.chunks(2).map(|c| (r(c[0]), r(c[1]))).collect();
        KnapsackInstance::from_pairs(&pairs).expect("positive integers")
    }

    fn interpret(&self, value: &Value) -> Result<KnapsackInstance, SearchError> {
        let items = list(value, "the instance")?
            .iter()
            .map(|v| {
                let t = tuple(v, Some(2), "an item")?;
                KnapsackItem::new(num(&t[0], "a weight")?, num(&t[1], "a profit")?)
                    .map_err(|e| SearchError::Instance(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        KnapsackInstance::new(items).map_err(|e| SearchError::Instance(e.to_string()))
    }

    fn score(&self, inst: &KnapsackInstance) -> Result<f64, SearchError> {
        Ok(knapsack_score(inst, self.mode).to_f64())
    }

    fn clip_length(&self) -> usize {
        self.items
    }

    fn seed_program(&self) -> &'static str {
        "[(1, 2)] * 2 + [(4, 4), (2, 2), (1, 3)]"
    }

    fn describe_output(&self) -> &'static str {
        "a list of (weight, profit) tuples of positive integers describing knapsack items"
    }

    fn render(&self, inst: &KnapsackInstance) -> String {
        inst.to_text()
    }
}

// ---------------------------------------------------------------------------

/// Item sizes in `(0, 1]` for unit bins; the score is the mean Best-Fit bin
/// count over random orders divided by the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinPackProblem {
    pub items: usize,
    /// Sizes are rounded to multiples of `1 / resolution`.
    pub resolution: i64,
    pub trials: u64,
    pub seed: u64,
    pub opt_budget: usize,
    pub exec: Execution,
}

impl Default for BinPackProblem {
    fn default() -> BinPackProblem {
        BinPackProblem {
            items: 13,
            resolution: 10_000,
            trials: 10_000,
            seed: 0,
            opt_budget: DEFAULT_OPT_BUDGET,
            exec: Execution::default(),
        }
    }
}

impl SearchProblem for BinPackProblem {
    type Instance = BinPackingInstance;

    fn name(&self) -> &'static str {
        "binpack"
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(1.0 / self.resolution as f64, 1.0); self.items]
    }

    fn noise_scale(&self) -> f64 {
        0.2
    }

    fn decode(&self, v: &[f64]) -> BinPackingInstance {
        let res = self.resolution;
        let sizes: Vec<i64> = v.iter().map(|&x| ((x * res as f64).round() as i64).clamp(1, res)).collect();
        BinPackingInstance::from_integers(res, &sizes).expect("sizes within capacity")
    }

    fn interpret(&self, value: &Value) -> Result<BinPackingInstance, SearchError> {
        let items = list(value, "the instance")?.iter().map(|v| num(v, "an item")).collect::<Result<Vec<_>, _>>()?;
        BinPackingInstance::new(Rational::one(), items).map_err(|e| SearchError::Instance(e.to_string()))
    }

    fn score(&self, inst: &BinPackingInstance) -> Result<f64, SearchError> {
        let opts = MonteCarloOptions { exec: self.exec, opt_budget: self.opt_budget };
        random_order_score_with(inst, self.trials, self.seed, opts)
            .map(|r| r.score)
            .map_err(|e| SearchError::Score(e.to_string()))
    }

    fn clip_length(&self) -> usize {
        self.items
    }

    fn seed_program(&self) -> &'static str {
        "[0.4, 0.5, 0.6]"
    }

    fn describe_output(&self) -> &'static str {
        "a list of bin-packing item sizes, each a number in (0, 1], for bins of capacity 1"
    }

    fn render(&self, inst: &BinPackingInstance) -> String {
        inst.to_text()
    }
}

// ---------------------------------------------------------------------------

/// Weighted points; the score is the price of hierarchy. A vector holds, per
/// point, an exponent `w` (weight `2^w`) followed by the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterProblem {
    pub points: usize,
    pub dim: usize,
    pub max_exponent: u32,
    pub exec: Execution,
}

impl Default for ClusterProblem {
    fn default() -> ClusterProblem {
        ClusterProblem { points: 8, dim: 2, max_exponent: 10, exec: Execution::default() }
    }
}

impl SearchProblem for ClusterProblem {
    type Instance = ClusterInstance;

    fn name(&self) -> &'static str {
        "cluster"
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = Vec::with_capacity(self.points * (self.dim + 1));
        for _ in 0..self.points {
            b.push((0.0, self.max_exponent as f64));
            b.extend(std::iter::repeat_n((0.0, 1.0), self.dim));
        }
        b
    }

    fn noise_scale(&self) -> f64 {
        0.2
    }

    fn decode(&self, v: &[f64]) -> ClusterInstance {
        let points = v
            .chunks(self.dim + 1)
            .map(|c| WeightedPoint::new(Weight::Finite(c[0].exp2()), c[1..].to_vec()))
            .collect();
        ClusterInstance::new(points).expect("finite coordinates and positive weights")
    }

    fn interpret(&self, value: &Value) -> Result<ClusterInstance, SearchError> {
        let points = list(value, "the instance")?
            .iter()
            .map(|v| {
                let t = tuple(v, Some(2), "a weighted point")?;
                let weight = match &t[0] {
                    Value::Inf => Weight::Infinite,
                    w => Weight::Finite(num(w, "a weight")?.to_f64()),
                };
                let coords = match &t[1] {
                    Value::Num(r) => vec![r.to_f64()],
                    c => tuple(c, None, "a point")?.iter().map(|x| num(x, "a coordinate").map(|r| r.to_f64())).collect::<Result<_, _>>()?,
                };
                Ok(WeightedPoint::new(weight, coords))
            })
            .collect::<Result<Vec<_>, SearchError>>()?;
        ClusterInstance::new(points).map_err(|e| SearchError::Instance(e.to_string()))
    }

    fn score(&self, inst: &ClusterInstance) -> Result<f64, SearchError> {
        let opts = PohOptions { exec: self.exec, ..PohOptions::default() };
        price_of_hierarchy(inst, opts).map(|r| r.value).map_err(|e| SearchError::Score(e.to_string()))
    }

    fn clip_length(&self) -> usize {
        self.points
    }

    fn seed_program(&self) -> &'static str {
        "[(1, (0, 0, 0, 0)), (1e8, (1, 0, 0, 0))]"
    }

    fn describe_output(&self) -> &'static str {
        "a list of (weight, point) tuples, where the weight is a positive number or inf and \
         every point is a tuple of coordinates of the same dimension"
    }

    fn render(&self, inst: &ClusterInstance) -> String {
        inst.to_text()
    }
}

// ---------------------------------------------------------------------------

/// Two equal-length lists of non-negative integer vectors with equal sums;
/// the score is the iterative-rounding value over the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GasolineProblem {
    pub n: usize,
    pub dim: usize,
    /// Vector coordinates in `[0, 1]` become integers in `0..=resolution`.
    pub resolution: i64,
    pub opt_nodes: u64,
}

impl Default for GasolineProblem {
    fn default() -> GasolineProblem {
        GasolineProblem { n: 14, dim: 2, resolution: 8, opt_nodes: 2_000_000 }
    }
}

impl SearchProblem for GasolineProblem {
    type Instance = GasolineInstance;

    fn name(&self) -> &'static str {
        "gasoline"
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); 2 * self.n * self.dim]
    }

    fn noise_scale(&self) -> f64 {
        0.2
    }

    /// First `n` vectors are `X`, the rest `Y`. Any coordinate-sum surplus is
    /// added to the last vector of the lighter side so the sums agree.
    fn decode(&self, v: &[f64]) -> GasolineInstance {
        let res = self.resolution as f64;
        let mut vecs: Vec<Vec<i64>> =
            v.chunks(self.dim).map(|c| c.iter().map(|&x| (x * res).round().max(0.0) as i64).collect()).collect();
        let mut ys = vecs.split_off(self.n);
        let mut xs = vecs;
        for j in 0..self.dim {
            let sx: i64 = xs.iter().map(|x| x[j]).sum();
            let sy: i64 = ys.iter().map(|y| y[j]).sum();
            if sx > sy {
                ys[self.n - 1][j] += sx - sy;
            } else {
                xs[self.n - 1][j] += sy - sx;
            }
        }
        GasolineInstance::new(xs, ys).expect("balanced non-negative vectors")
    }

    fn interpret(&self, value: &Value) -> Result<GasolineInstance, SearchError> {
        let parts = tuple(value, Some(2), "the instance")?;
        let side = |v: &Value, name: &str| -> Result<Vec<Vec<i64>>, SearchError> {
            list(v, name)?
                .iter()
                .map(|p| tuple(p, None, "a vector")?.iter().map(|c| integer(c, "a coordinate")).collect())
                .collect()
        };
        let xs = side(&parts[0], "xs")?;
        let ys = side(&parts[1], "ys")?;
        GasolineInstance::new(xs, ys).map_err(|e| SearchError::Instance(e.to_string()))
    }

    fn score(&self, inst: &GasolineInstance) -> Result<f64, SearchError> {
        let ir = iterative_rounding(inst).map_err(|e| SearchError::Score(e.to_string()))?.objective;
        let opt = optimal_value(inst, Budget::nodes(self.opt_nodes)).map_err(|e| SearchError::Score(e.to_string()))?.value;
        match (ir, opt) {
            (0, 0) => Ok(1.0),
            (_, 0) => Err(SearchError::Score("zero optimum".into())),
            _ => Ok(ir as f64 / opt as f64),
        }
    }

    fn clip_length(&self) -> usize {
        self.n
    }

    fn seed_program(&self) -> &'static str {
        "let k = 3;\n\
         let steps = flatten(map(i, 1, k, repeat(2^i, (2^k - 2^(k - i), 0))));\n\
         let xs = steps + repeat(2^k - 1, (2^k, 0)) + [(0, 0)];\n\
         let ys = steps + repeat(2^k, (2^k - 1, 0));\n\
         (xs, ys)"
    }

    fn describe_output(&self) -> &'static str {
        "a tuple (xs, ys) of two equally long lists of 2-dimensional vectors, written as tuples of \
         non-negative integers, where xs and ys have the same coordinate-wise sum"
    }

    fn render(&self, inst: &GasolineInstance) -> String {
        inst.to_text()
    }
}
