//! Weighted k-median under L1 and the price of hierarchy.
//!
//! Points may carry an infinite weight. Such weights are kept symbolic: a
//! cost has an infinite part (distances of infinite-weight points to their
//! center) and a finite part, compared lexicographically.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed merge sequence: {0}")]
    MalformedSequence(String),
    #[error("{what} limited to {limit} points, got {got}")]
    BudgetExceeded { what: &'static str, limit: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub weight: Weight,
    pub coords: Vec<f64>,
}

impl WeightedPoint {
    pub fn new(weight: Weight, coords: Vec<f64>) -> WeightedPoint {
        WeightedPoint { weight, coords }
    }

    pub fn unit(coords: Vec<f64>) -> WeightedPoint {
        WeightedPoint::new(Weight::Finite(1.0), coords)
    }

    fn dist(&self, other: &WeightedPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Cost of serving this point from `center`.
    fn cost_from(&self, center: &WeightedPoint) -> TwoPartCost {
        let d = self.dist(center);
        match self.weight {
            Weight::Infinite => TwoPartCost { infinite: d, finite: 0.0 },
            Weight::Finite(w) => TwoPartCost { infinite: 0.0, finite: w * d },
        }
    }
}

/// `infinite · ∞ + finite`, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoPartCost {
    pub infinite: f64,
    pub finite: f64,
}

impl TwoPartCost {
    pub const ZERO: TwoPartCost = TwoPartCost { infinite: 0.0, finite: 0.0 };

    pub fn finite(v: f64) -> TwoPartCost {
        TwoPartCost { infinite: 0.0, finite: v }
    }

    pub fn is_zero(&self) -> bool {
        self.infinite == 0.0 && self.finite == 0.0
    }
}

impl Eq for TwoPartCost {}

impl PartialOrd for TwoPartCost {
    fn partial_cmp(&self, other: &TwoPartCost) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TwoPartCost {
    fn cmp(&self, other: &TwoPartCost) -> Ordering {
        self.infinite.total_cmp(&other.infinite).then(self.finite.total_cmp(&other.finite))
    }
}

impl Add for TwoPartCost {
    type Output = TwoPartCost;
    fn add(self, o: TwoPartCost) -> TwoPartCost {
        TwoPartCost { infinite: self.infinite + o.infinite, finite: self.finite + o.finite }
    }
}

impl Sub for TwoPartCost {
    type Output = TwoPartCost;
    fn sub(self, o: TwoPartCost) -> TwoPartCost {
        TwoPartCost { infinite: self.infinite - o.infinite, finite: self.finite - o.finite }
    }
}

impl std::iter::Sum for TwoPartCost {
    fn sum<I: Iterator<Item = TwoPartCost>>(iter: I) -> TwoPartCost {
        iter.fold(TwoPartCost::ZERO, Add::add)
    }
}

impl fmt::Display for TwoPartCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.infinite > 0.0 {
            write!(f, "{}·∞ + {}", self.infinite, self.finite)
        } else {
            write!(f, "{}", self.finite)
        }
    }
}

/// `cost(h) / cost(o)` in the limit of infinite weights.
///
/// Both infinite parts positive: their quotient. Only `h` has one: `∞`.
/// Otherwise the finite quotient, with `0/0 = 1` and `x/0 = ∞`.
pub fn cost_ratio(h: TwoPartCost, o: TwoPartCost) -> f64 {
    if h.infinite > 0.0 {
        return if o.infinite > 0.0 { h.infinite / o.infinite } else { f64::INFINITY };
    }
    if o.infinite > 0.0 {
        return 0.0;
    }
    match (h.finite == 0.0, o.finite == 0.0) {
        (true, true) => 1.0,
        (false, true) => f64::INFINITY,
        _ => h.finite / o.finite,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterInstance {
    points: Vec<WeightedPoint>,
    d: usize,
}

impl ClusterInstance {
    pub fn new(points: Vec<WeightedPoint>) -> Result<ClusterInstance, ClusterError> {
        let first = points.first().ok_or_else(|| ClusterError::InvalidInstance("no points".into()))?;
        let d = first.coords.len();
        for (i, p) in points.iter().enumerate() {
            if p.coords.len() != d {
                return Err(ClusterError::InvalidInstance(format!("point {i} has dimension {}", p.coords.len())));
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(ClusterError::InvalidInstance(format!("point {i} has a non-finite coordinate")));
            }
            if let Weight::Finite(w) = p.weight {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(ClusterError::InvalidInstance(format!("point {i} has weight {w}")));
                }
            }
        }
        Ok(ClusterInstance { points, d })
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// One point per line: `weight coord1 … coordd`, weight may be `inf`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let coords: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{} {}", p.weight, coords.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<ClusterInstance, ClusterError> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ClusterError::Parse { line: i + 1, message };
            let mut fields = line.split_whitespace();
            let w = fields.next().expect("non-empty line");
            let weight = if w.eq_ignore_ascii_case("inf") {
                Weight::Infinite
            } else {
                Weight::Finite(w.parse().map_err(|_| err(format!("bad weight `{w}`")))?)
            };
            let coords = fields
                .map(|c| c.parse::<f64>().map_err(|_| err(format!("bad coordinate `{c}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            points.push(WeightedPoint { weight, coords });
        }
        ClusterInstance::new(points)
    }
}

/// Best within-cluster center cost of the given points.
pub fn cluster_cost(points: &[&WeightedPoint]) -> TwoPartCost {
    points
        .iter()
        .map(|c| points.iter().map(|q| q.cost_from(c)).sum::<TwoPartCost>())
        .min()
        .unwrap_or(TwoPartCost::ZERO)
}

fn members(inst: &ClusterInstance, mask: u32) -> Vec<&WeightedPoint> {
    (0..inst.len()).filter(|i| mask & (1 << i) != 0).map(|i| &inst.points[i]).collect()
}

pub const EXACT_LIMIT: usize = 12;

/// Exact optimal `k`-clustering by enumerating center sets.
pub fn optimal_k_clustering(inst: &ClusterInstance, k: usize) -> Result<(TwoPartCost, Vec<Vec<usize>>), ClusterError> {
    let n = inst.len();
    if n > EXACT_LIMIT {
        return Err(ClusterError::BudgetExceeded { what: "exact clustering", limit: EXACT_LIMIT, got: n });
    }
    if k == 0 || k > n {
        return Err(ClusterError::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    let pts = &inst.points;
    let mut best: Option<(TwoPartCost, Vec<usize>)> = None;
    let mut centers: Vec<usize> = (0..k).collect();
    loop {
        let mut total = TwoPartCost::ZERO;
        let mut assign = vec![0usize; n];
        for (i, p) in pts.iter().enumerate() {
            let (c, cost) = centers
                .iter()
                .map(|&c| (c, p.cost_from(&pts[c])))
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
                .expect("k >= 1");
            // A center always serves itself.
            assign[i] = if centers.contains(&i) { i } else { c };
            total = total + if centers.contains(&i) { TwoPartCost::ZERO } else { cost };
        }
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, assign));
        }
        // Next k-combination in lexicographic order.
        let mut i = k;
        while i > 0 && centers[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        centers[i - 1] += 1;
        for j in i..k {
            centers[j] = centers[j - 1] + 1;
        }
    }
    let (cost, assign) = best.expect("at least one center set");
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for (i, &c) in assign.iter().enumerate() {
        let g = *index.entry(c).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    Ok((cost, groups))
}

/// `opt[k]` for `k = 1..=n` (index 0 unused).
pub fn optimal_costs(inst: &ClusterInstance) -> Result<Vec<TwoPartCost>, ClusterError> {
    let mut out = vec![TwoPartCost::ZERO];
    for k in 1..=inst.len() {
        out.push(optimal_k_clustering(inst, k)?.0);
    }
    Ok(out)
}

/// Pair merges; merge `i` creates cluster id `n + i`, singletons are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeSequence {
    pub n: usize,
    pub merges: Vec<(usize, usize)>,
}

/// Clusterings from `H_n` (singletons) down to `H_1`.
pub fn hierarchy_levels(seq: &MergeSequence) -> Result<Vec<Vec<Vec<usize>>>, ClusterError> {
    let n = seq.n;
    if n == 0 {
        return Err(ClusterError::MalformedSequence("no points".into()));
    }
    if seq.merges.len() != n - 1 {
        return Err(ClusterError::MalformedSequence(format!("{} merges for {n} points", seq.merges.len())));
    }
    let mut clusters: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let snapshot = |cl: &[Option<Vec<usize>>]| -> Vec<Vec<usize>> { cl.iter().flatten().cloned().collect() };
    let mut levels = vec![snapshot(&clusters)];
    for (step, &(a, b)) in seq.merges.iter().enumerate() {
        if a == b {
            return Err(ClusterError::MalformedSequence(format!("merge {step} joins cluster {a} with itself")));
        }
        let mut take = |id: usize| {
            clusters
                .get_mut(id)
                .and_then(Option::take)
                .ok_or_else(|| ClusterError::MalformedSequence(format!("merge {step} references dead cluster {id}")))
        };
        let mut joined = take(a)?;
        joined.extend(take(b)?);
        joined.sort_unstable();
        clusters.push(Some(joined));
        levels.push(snapshot(&clusters));
    }
    Ok(levels)
}

fn level_cost(inst: &ClusterInstance, level: &[Vec<usize>]) -> TwoPartCost {
    level.iter().map(|c| cluster_cost(&c.iter().map(|&i| &inst.points[i]).collect::<Vec<_>>())).sum()
}

/// Worst level ratio `max_k cost(H_k) / cost(OPT_k)`.
pub fn hierarchy_ratio(inst: &ClusterInstance, seq: &MergeSequence) -> Result<f64, ClusterError> {
    if seq.n != inst.len() {
        return Err(ClusterError::MalformedSequence(format!("sequence over {} points, instance has {}", seq.n, inst.len())));
    }
    let opt = optimal_costs(inst)?;
    let levels = hierarchy_levels(seq)?;
    Ok(levels.iter().map(|l| cost_ratio(level_cost(inst, l), opt[l.len()])).fold(1.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PohMethod {
    /// Every merge sequence, one by one.
    Exhaustive,
    /// Memoised recursion over partitions; merge order above a partition
    /// does not affect what can happen below it.
    #[default]
    Memoized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PohOptions {
    pub method: PohMethod,
    pub exec: Execution,
    /// Largest instance accepted.
    pub max_points: usize,
}

impl Default for PohOptions {
    fn default() -> PohOptions {
        PohOptions { method: PohMethod::Memoized, exec: Execution::default(), max_points: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohResult {
    pub value: f64,
    pub sequence: MergeSequence,
    /// Complete merge sequences (exhaustive) or distinct partitions (memoised) visited.
    pub explored: u64,
}

struct Costs {
    /// Cluster cost per point mask.
    by_mask: Vec<TwoPartCost>,
    opt: Vec<TwoPartCost>,
}

impl Costs {
    fn new(inst: &ClusterInstance) -> Result<Costs, ClusterError> {
        let n = inst.len();
        let by_mask = (0..1u32 << n).map(|m| cluster_cost(&members(inst, m))).collect();
        Ok(Costs { by_mask, opt: optimal_costs(inst)? })
    }

    fn ratio(&self, parts: &[u32]) -> f64 {
        let cost: TwoPartCost = parts.iter().map(|&m| self.by_mask[m as usize]).sum();
        cost_ratio(cost, self.opt[parts.len()])
    }
}

fn merged(parts: &[u32], i: usize, j: usize) -> Vec<u32> {
    let mut out: Vec<u32> = parts.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &m)| m).collect();
    out.push(parts[i] | parts[j]);
    out.sort_unstable();
    out
}

fn pairs(c: usize) -> Vec<(usize, usize)> {
    (0..c).flat_map(|i| (i + 1..c).map(move |j| (i, j))).collect()
}

/// Minimum over hierarchies of the worst level ratio.
pub fn price_of_hierarchy(inst: &ClusterInstance, opts: PohOptions) -> Result<PohResult, ClusterError> {
    let n = inst.len();
    if n > opts.max_points || n > EXACT_LIMIT {
        return Err(ClusterError::BudgetExceeded {
            what: "price of hierarchy",
            limit: opts.max_points.min(EXACT_LIMIT),
            got: n,
        });
    }
    let costs = Costs::new(inst)?;
    let start: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
    let root_ratio = costs.ratio(&start);
    if n == 1 {
        return Ok(PohResult { value: root_ratio, sequence: MergeSequence { n, merges: Vec::new() }, explored: 1 });
    }
    let firsts = pairs(n);
    let results: Vec<(f64, Vec<Vec<u32>>, u64)> = exec::map_slice(opts.exec, &firsts, |&(i, j)| {
        let next = merged(&start, i, j);
        match opts.method {
            PohMethod::Exhaustive => {
                let mut ex = Exhaustive { costs: &costs, best: f64::INFINITY, best_path: Vec::new(), path: vec![next.clone()], leaves: 0 };
                ex.run(&next, costs.ratio(&next));
                (ex.best, ex.best_path, ex.leaves)
            }
            PohMethod::Memoized => {
                let mut memo = Memo { costs: &costs, table: HashMap::new() };
                let v = memo.value(&next);
                let mut path = vec![next.clone()];
                let mut cur = next;
                while cur.len() > 1 {
                    let (_, (a, b)) = memo.table[&cur];
                    cur = merged(&cur, a, b);
                    path.push(cur.clone());
                }
                (v, path, memo.table.len() as u64)
            }
        }
    });
    let explored = results.iter().map(|r| r.2).sum();
    let best = results.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one pair");
    let mut states = vec![start];
    states.extend(best.1.iter().cloned());
    let sequence = path_to_sequence(n, &states);
    Ok(PohResult { value: best.0.max(root_ratio), sequence, explored })
}

struct Exhaustive<'a> {
    costs: &'a Costs,
    best: f64,
    best_path: Vec<Vec<u32>>,
    path: Vec<Vec<u32>>,
    leaves: u64,
}

impl Exhaustive<'_> {
    fn run(&mut self, parts: &[u32], running: f64) {
        if parts.len() == 1 {
            self.leaves += 1;
            if running < self.best {
                self.best = running;
                self.best_path = self.path.clone();
            }
            return;
        }
        for (i, j) in pairs(parts.len()) {
            let next = merged(parts, i, j);
            let r = running.max(self.costs.ratio(&next));
            self.path.push(next.clone());
            self.run(&next, r);
            self.path.pop();
        }
    }
}

struct Memo<'a> {
    costs: &'a Costs,
    /// Best achievable worst ratio from a partition, and the merge achieving it.
    table: HashMap<Vec<u32>, (f64, (usize, usize))>,
}

impl Memo<'_> {
    fn value(&mut self, parts: &[u32]) -> f64 {
        let here = self.costs.ratio(parts);
        if parts.len() == 1 {
            return here;
        }
        if let Some(&(v, _)) = self.table.get(parts) {
            return v;
        }
        let mut best = (f64::INFINITY, (0, 1));
        for (i, j) in pairs(parts.len()) {
            let v = self.value(&merged(parts, i, j));
            if v < best.0 {
                best = (v, (i, j));
            }
            if best.0 <= here {
                break;
            }
        }
        let v = best.0.max(here);
        self.table.insert(parts.to_vec(), (v, best.1));
        v
    }
}

/// Converts a chain of partitions into merges with fresh-id numbering.
fn path_to_sequence(n: usize, states: &[Vec<u32>]) -> MergeSequence {
    let mut ids: HashMap<u32, usize> = (0..n).map(|i| (1u32 << i, i)).collect();
    let mut merges = Vec::new();
    for w in states.windows(2) {
        let (before, after) = (&w[0], &w[1]);
        let gone: Vec<u32> = before.iter().filter(|m| !after.contains(m)).copied().collect();
        let (a, b) = (ids[&gone[0]], ids[&gone[1]]);
        merges.push((a.min(b), a.max(b)));
        ids.insert(gone[0] | gone[1], n + merges.len() - 1);
    }
    MergeSequence { n, merges }
}

/// Number of merge sequences on `n` points: `Π_{c=2..n} C(c, 2)`.
pub fn merge_sequence_count(n: usize) -> u128 {
    (2..=n as u128).map(|c| c * (c - 1) / 2).product()
}

/// The positive root of `c² - c(d-3) - d² = 0`.
pub fn c_value(d: usize) -> f64 {
    let d = d as f64;
    ((4.0 * d * d + (3.0 - d) * (3.0 - d)).sqrt() + d - 3.0) / 2.0
}

/// `d + 2` points: `(1,…,1)` with infinite weight, the origin, and `-c·e_i`.
pub fn gen_theorem_instance(d: usize) -> Result<ClusterInstance, ClusterError> {
    if !(4..=EXACT_LIMIT - 2).contains(&d) {
        return Err(ClusterError::InvalidParameter(format!("d must lie in 4..={}, got {d}", EXACT_LIMIT - 2)));
    }
    let c = c_value(d);
    assert!(c > d as f64);
    let mut points = vec![
        WeightedPoint::new(Weight::Infinite, vec![1.0; d]),
        WeightedPoint::unit(vec![0.0; d]),
    ];
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = -c;
        points.push(WeightedPoint::unit(v));
    }
    ClusterInstance::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn costs_of_small_clusters() {
        let inst = gen_theorem_instance(4).unwrap();
        let p = inst.points();
        assert_eq!(cluster_cost(&[&p[1]]), TwoPartCost::ZERO);
        assert_eq!(cluster_cost(&[&p[1], &p[0]]), TwoPartCost::finite(4.0));
        let c = c_value(4);
        assert_relative_eq!(cluster_cost(&[&p[2], &p[3]]).finite, 2.0 * c, epsilon = 1e-12);
        assert_relative_eq!(2.0 * c, 9.0623, epsilon = 1e-4);
    }

    #[test]
    fn theorem_constants() {
        let c = c_value(4);
        assert_relative_eq!(c, (65f64.sqrt() + 1.0) / 2.0, epsilon = 1e-12);
        assert!((c * c - c - 16.0).abs() < 1e-9);
        assert_eq!(gen_theorem_instance(4).unwrap().len(), 6);
        assert!(gen_theorem_instance(3).is_err());
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for d in 4..64 {
            assert!(c_value(d + 1) / (d + 1) as f64 > c_value(d) / d as f64);
            assert!(c_value(d) / (d as f64) < golden);
        }
    }

    #[test]
    fn optimal_clusterings() {
        let inst = gen_theorem_instance(4).unwrap();
        assert_eq!(optimal_k_clustering(&inst, 6).unwrap().0, TwoPartCost::ZERO);
        let (cost, groups) = optimal_k_clustering(&inst, 5).unwrap();
        assert_eq!(cost, TwoPartCost::finite(4.0));
        assert!(groups.iter().any(|g| g == &vec![0, 1]));
        let (two, _) = optimal_k_clustering(&inst, 2).unwrap();
        assert_relative_eq!(two.finite, 4.0 * c_value(4), epsilon = 1e-9);
        assert_eq!(two.infinite, 0.0);
        assert!(optimal_k_clustering(&inst, 0).is_err());
    }

    #[test]
    fn levels() {
        let two = MergeSequence { n: 2, merges: vec![(0, 1)] };
        assert_eq!(hierarchy_levels(&two).unwrap(), vec![vec![vec![0], vec![1]], vec![vec![0, 1]]]);
        let three = MergeSequence { n: 3, merges: vec![(0, 1), (3, 2)] };
        let sizes: Vec<usize> = hierarchy_levels(&three).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 2, 1]);
        let dead = MergeSequence { n: 3, merges: vec![(0, 1), (0, 2)] };
        assert!(hierarchy_levels(&dead).is_err());
        assert!(hierarchy_levels(&MergeSequence { n: 3, merges: vec![(0, 1)] }).is_err());
    }

    #[test]
    fn trivial_ratios() {
        let one = ClusterInstance::new(vec![WeightedPoint::unit(vec![0.0])]).unwrap();
        assert_eq!(hierarchy_ratio(&one, &MergeSequence { n: 1, merges: vec![] }).unwrap(), 1.0);
        assert_eq!(price_of_hierarchy(&one, PohOptions::default()).unwrap().value, 1.0);
        let two = ClusterInstance::new(vec![WeightedPoint::unit(vec![0.0]), WeightedPoint::unit(vec![3.0])]).unwrap();
        assert_eq!(hierarchy_ratio(&two, &MergeSequence { n: 2, merges: vec![(0, 1)] }).unwrap(), 1.0);
        assert_eq!(price_of_hierarchy(&two, PohOptions::default()).unwrap().value, 1.0);
    }

    #[test]
    fn ratio_conventions() {
        let z = TwoPartCost::ZERO;
        assert_eq!(cost_ratio(z, z), 1.0);
        assert_eq!(cost_ratio(TwoPartCost::finite(2.0), z), f64::INFINITY);
        assert_eq!(cost_ratio(TwoPartCost { infinite: 1.0, finite: 0.0 }, TwoPartCost::finite(5.0)), f64::INFINITY);
        assert_eq!(cost_ratio(TwoPartCost { infinite: 3.0, finite: 0.0 }, TwoPartCost { infinite: 2.0, finite: 9.0 }), 1.5);
        assert_eq!(cost_ratio(TwoPartCost::finite(3.0), TwoPartCost::finite(2.0)), 1.5);
    }

    #[test]
    fn proof_hierarchy_is_bad() {
        // Merge the heavy point with the origin, then the axis points pairwise.
        let d = 4;
        let inst = gen_theorem_instance(d).unwrap();
        let seq = MergeSequence { n: 6, merges: vec![(0, 1), (2, 3), (4, 5), (7, 8), (6, 9)] };
        let r = hierarchy_ratio(&inst, &seq).unwrap();
        assert!(r >= c_value(d) / d as f64 - 1e-9, "ratio {r}");
    }

    #[test]
    fn sequence_counts() {
        assert_eq!(merge_sequence_count(6), 2700);
        assert_eq!(merge_sequence_count(7), 56_700);
    }

    #[test]
    fn returned_sequence_attains_value() {
        let inst = gen_theorem_instance(4).unwrap();
        for method in [PohMethod::Exhaustive, PohMethod::Memoized] {
            let r = price_of_hierarchy(&inst, PohOptions { method, ..PohOptions::default() }).unwrap();
            assert_relative_eq!(hierarchy_ratio(&inst, &r.sequence).unwrap(), r.value, epsilon = 1e-12);
            if method == PohMethod::Exhaustive {
                assert_eq!(r.explored, 2700);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let inst = gen_theorem_instance(4).unwrap();
        assert_eq!(ClusterInstance::from_text(&inst.to_text()).unwrap(), inst);
        assert!(matches!(ClusterInstance::from_text("1 0\nx 1\n"), Err(ClusterError::Parse { line: 2, .. })));
        assert!(ClusterInstance::from_text("1 0\n1 0 0\n").is_err());
    }

    fn arb_instance() -> impl Strategy<Value = ClusterInstance> {
        (1usize..=6, 1usize..=2).prop_flat_map(|(n, d)| {
            prop::collection::vec((prop::option::weighted(0.85, 1u32..5), prop::collection::vec(-4i32..5, d)), n)
                .prop_map(|pts| {
                    let points = pts
                        .into_iter()
                        .map(|(w, c)| {
                            let weight = w.map_or(Weight::Infinite, |w| Weight::Finite(w as f64));
                            WeightedPoint::new(weight, c.into_iter().map(f64::from).collect())
                        })
                        .collect();
                    ClusterInstance::new(points).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn memoized_matches_exhaustive(inst in arb_instance()) {
            let ex = price_of_hierarchy(&inst, PohOptions { method: PohMethod::Exhaustive, exec: Execution::Sequential, max_points: 10 }).unwrap();
            let me = price_of_hierarchy(&inst, PohOptions { method: PohMethod::Memoized, exec: Execution::Parallel, max_points: 10 }).unwrap();
            prop_assert_eq!(ex.value, me.value);
            prop_assert!(ex.value >= 1.0);
        }

        #[test]
        fn levels_never_beat_optimum(inst in arb_instance(), picks in prop::collection::vec(0usize..100, 6)) {
            let n = inst.len();
            let opt = optimal_costs(&inst).unwrap();
            let mut parts: Vec<u32> = (0..n).map(|i| 1 << i).collect();
            let mut states = vec![parts.clone()];
            let mut step = 0;
            while parts.len() > 1 {
                let ps = pairs(parts.len());
                let (i, j) = ps[picks[step] % ps.len()];
                parts = merged(&parts, i, j);
                states.push(parts.clone());
                step += 1;
            }
            let seq = path_to_sequence(n, &states);
            for level in hierarchy_levels(&seq).unwrap() {
                prop_assert!(level_cost(&inst, &level) >= opt[level.len()]);
            }
            prop_assert!(hierarchy_ratio(&inst, &seq).unwrap() >= 1.0);
        }

        #[test]
        fn center_is_best_member(inst in arb_instance()) {
            let pts: Vec<&WeightedPoint> = inst.points().iter().collect();
            let best = cluster_cost(&pts);
            for c in &pts {
                let cost: TwoPartCost = pts.iter().map(|q| q.cost_from(c)).sum();
                prop_assert!(best <= cost);
            }
        }
    }
}
