//! One-dimensional bin packing under online Best-Fit and First-Fit.
//!
//! Sizes are exact rationals. Whenever they share a denominator small enough
//! to scale into `u64`, simulation and search run on the scaled integers.

use std::fmt::Write as _;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BinPackError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("{what} limited to {limit} items, got {got}")]
    BudgetExceeded { what: &'static str, limit: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinPackingInstance {
    capacity: Rational,
    items: Vec<Rational>,
    #[serde(skip)]
    scaled: Option<Scaled>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Scaled {
    capacity: u64,
    items: Vec<u64>,
}

impl BinPackingInstance {
    pub fn new(capacity: Rational, items: Vec<Rational>) -> Result<BinPackingInstance, BinPackError> {
        if !capacity.is_positive() {
            return Err(BinPackError::InvalidInstance(format!("capacity {capacity} must be positive")));
        }
        if items.is_empty() {
            return Err(BinPackError::InvalidInstance("no items".into()));
        }
        if let Some((i, s)) = items.iter().enumerate().find(|(_, s)| !s.is_positive() || **s > capacity) {
            return Err(BinPackError::InvalidInstance(format!("item {i} has size {s} outside (0, {capacity}]")));
        }
        let scaled = scale(&capacity, &items);
        Ok(BinPackingInstance { capacity, items, scaled })
    }

    pub fn from_integers(capacity: i64, items: &[i64]) -> Result<BinPackingInstance, BinPackError> {
        BinPackingInstance::new(Rational::from_int(capacity), items.iter().map(|&s| Rational::from_int(s)).collect())
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    pub fn items(&self) -> &[Rational] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sizes divided by the capacity.
    pub fn normalized(&self) -> Vec<Rational> {
        self.items.iter().map(|s| s / &self.capacity).collect()
    }

    /// `⌈Σ sizes / capacity⌉`.
    pub fn volume_bound(&self) -> usize {
        let total: Rational = self.items.iter().sum();
        (total / &self.capacity).ceil().to_usize().expect("bin bound fits usize")
    }

    /// First line the capacity, then one size per line; `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.capacity);
        for it in &self.items {
            let _ = writeln!(s, "{it}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BinPackingInstance, BinPackError> {
        let mut values = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: Rational =
                    tok.parse().map_err(|e| BinPackError::Parse { line: i + 1, message: format!("{e}") })?;
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(BinPackError::Parse { line: 1, message: "missing capacity".into() });
        }
        let items = values.split_off(1);
        BinPackingInstance::new(values.pop().expect("capacity"), items)
    }
}

fn scale(capacity: &Rational, items: &[Rational]) -> Option<Scaled> {
    let mut l = capacity.denom();
    for s in items {
        l = l.lcm(&s.denom());
        if l.bits() > 63 {
            return None;
        }
    }
    let to_u64 = |r: &Rational| -> Option<u64> { (r.numer() * (&l / r.denom())).to_u64() };
    let cap = to_u64(capacity)?;
    // Keep headroom so that summing a bin never overflows.
    if cap > u64::MAX / 4 {
        return None;
    }
    let items = items.iter().map(to_u64).collect::<Option<Vec<_>>>()?;
    Some(Scaled { capacity: cap, items })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    pub bin_count: usize,
    /// `assignment[i]` is the bin of item `i`.
    pub assignment: Vec<usize>,
    pub loads: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitRule {
    /// Fullest bin that fits, lowest index on ties.
    BestFit,
    /// Lowest-index bin that fits.
    FirstFit,
}

trait Size: Clone + Ord + for<'a> Add<&'a Self, Output = Self> + for<'a> Sub<&'a Self, Output = Self> {
    fn zero() -> Self;
}

impl Size for u64 {
    fn zero() -> u64 {
        0
    }
}

impl Size for Rational {
    fn zero() -> Rational {
        Rational::zero()
    }
}

/// Online packing; returns the bin of every item and the bin loads.
fn simulate<T: Size>(cap: &T, sizes: &[T], order: &[usize], rule: FitRule) -> (Vec<usize>, Vec<T>) {
    let mut loads: Vec<T> = Vec::new();
    let mut assignment = vec![usize::MAX; sizes.len()];
    for &i in order {
        let s = &sizes[i];
        let room = cap.clone() - s;
        let mut chosen: Option<usize> = None;
        for (b, load) in loads.iter().enumerate() {
            if *load > room {
                continue;
            }
            match rule {
                FitRule::FirstFit => {
                    chosen = Some(b);
                    break;
                }
                FitRule::BestFit => {
                    if chosen.is_none_or(|c| *load > loads[c]) {
                        chosen = Some(b);
                    }
                }
            }
        }
        let b = chosen.unwrap_or_else(|| {
            loads.push(T::zero());
            loads.len() - 1
        });
        loads[b] = loads[b].clone() + s;
        assignment[i] = b;
    }
    (assignment, loads)
}

fn bins_u64(cap: u64, sizes: &[u64], order: &[usize], loads: &mut Vec<u64>) -> usize {
    loads.clear();
    for &i in order {
        let s = sizes[i];
        let room = cap - s;
        let mut chosen = usize::MAX;
        let mut best = 0u64;
        for (b, &load) in loads.iter().enumerate() {
            if load <= room && (chosen == usize::MAX || load > best) {
                chosen = b;
                best = load;
            }
        }
        if chosen == usize::MAX {
            loads.push(s);
        } else {
            loads[chosen] += s;
        }
    }
    loads.len()
}

fn check_order(order: &[usize], n: usize) -> Result<(), BinPackError> {
    if order.len() != n {
        return Err(BinPackError::InvalidOrder(format!("length {} for {n} items", order.len())));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(BinPackError::InvalidOrder(format!("entry {i} out of range or repeated")));
        }
    }
    Ok(())
}

pub fn pack(inst: &BinPackingInstance, order: &[usize], rule: FitRule) -> Result<PackingResult, BinPackError> {
    check_order(order, inst.len())?;
    let (assignment, loads) = match &inst.scaled {
        Some(sc) => {
            let (a, l) = simulate(&sc.capacity, &sc.items, order, rule);
            let unit = Rational::from_bigints(BigInt::one(), BigInt::from(sc.capacity)) * &inst.capacity;
            (a, l.into_iter().map(|v| Rational::from_int(v as i64) * &unit).collect())
        }
        None => simulate(&inst.capacity, &inst.items, order, rule),
    };
    Ok(PackingResult { bin_count: loads.len(), assignment, loads })
}

pub fn best_fit(inst: &BinPackingInstance, order: &[usize]) -> Result<PackingResult, BinPackError> {
    pack(inst, order, FitRule::BestFit)
}

pub fn first_fit(inst: &BinPackingInstance, order: &[usize]) -> Result<PackingResult, BinPackError> {
    pack(inst, order, FitRule::FirstFit)
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

// ---------------------------------------------------------------------------
// Exact optimum

pub const DEFAULT_OPT_BUDGET: usize = 24;

struct Bnb<'a, T: Size> {
    cap: &'a T,
    sizes: Vec<T>,
    loads: Vec<T>,
    best: usize,
    lower: usize,
}

impl<T: Size> Bnb<'_, T> {
    fn search(&mut self, i: usize) {
        if self.best == self.lower || self.loads.len() >= self.best {
            return;
        }
        if i == self.sizes.len() {
            self.best = self.best.min(self.loads.len());
            return;
        }
        let s = self.sizes[i].clone();
        let room = self.cap.clone() - &s;
        for b in 0..self.loads.len() {
            if self.loads[b] > room || self.loads[..b].contains(&self.loads[b]) {
                continue;
            }
            let before = self.loads[b].clone();
            self.loads[b] = before.clone() + &s;
            self.search(i + 1);
            self.loads[b] = before;
        }
        // A new bin only ever goes at the end, which breaks bin symmetry.
        if self.loads.len() + 1 < self.best {
            self.loads.push(s);
            self.search(i + 1);
            self.loads.pop();
        }
    }
}

fn optimum<T: Size>(cap: &T, sizes: &[T], lower: usize) -> usize {
    let mut sorted = sizes.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let (_, ffd) = simulate(cap, &sorted, &identity(sorted.len()), FitRule::FirstFit);
    let mut big = 0;
    let half_cap_exceeded = |s: &T| s.clone() + s > *cap;
    for s in &sorted {
        if half_cap_exceeded(s) {
            big += 1;
        }
    }
    let lower = lower.max(big);
    let mut bnb = Bnb { cap, sizes: sorted, loads: Vec::new(), best: ffd.len(), lower };
    bnb.search(0);
    bnb.best
}

/// Minimum number of bins, by branch-and-bound over items in decreasing order.
pub fn optimal_bins(inst: &BinPackingInstance, budget: usize) -> Result<usize, BinPackError> {
    if inst.len() > budget {
        return Err(BinPackError::BudgetExceeded { what: "exact packing", limit: budget, got: inst.len() });
    }
    let lower = inst.volume_bound();
    Ok(match &inst.scaled {
        Some(sc) => optimum(&sc.capacity, &sc.items, lower),
        None => optimum(&inst.capacity, &inst.items, lower),
    })
}

// ---------------------------------------------------------------------------
// Random order

/// Uniform draw from `0..n` by multiply-and-reject over 64-bit words.
fn bounded(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    debug_assert!(n > 0);
    let mut m = rng.next_u64() as u128 * n as u128;
    if (m as u64) < n {
        let threshold = n.wrapping_neg() % n;
        while (m as u64) < threshold {
            m = rng.next_u64() as u128 * n as u128;
        }
    }
    (m >> 64) as u64
}

/// Fisher-Yates from the back with [`bounded`] draws.
pub fn shuffle(rng: &mut ChaCha8Rng, v: &mut [usize]) {
    for i in (1..v.len()).rev() {
        let j = bounded(rng, i as u64 + 1) as usize;
        v.swap(i, j);
    }
}

/// Generator for one trial: ChaCha8 keyed by the seed, stream = trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub mean_bins: Rational,
    pub standard_error: f64,
    pub seed: u64,
    pub opt_bins: usize,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub exec: Execution,
    pub opt_budget: usize,
}

impl Default for MonteCarloOptions {
    fn default() -> MonteCarloOptions {
        MonteCarloOptions { exec: Execution::default(), opt_budget: DEFAULT_OPT_BUDGET }
    }
}

pub fn random_order_score(inst: &BinPackingInstance, trials: u64, seed: u64) -> Result<MonteCarloReport, BinPackError> {
    random_order_score_with(inst, trials, seed, MonteCarloOptions::default())
}

/// Mean Best-Fit bin count over seeded uniform shuffles, against the optimum.
pub fn random_order_score_with(
    inst: &BinPackingInstance,
    trials: u64,
    seed: u64,
    opts: MonteCarloOptions,
) -> Result<MonteCarloReport, BinPackError> {
    if trials == 0 {
        return Err(BinPackError::InvalidParameter("need at least one trial".into()));
    }
    let opt_bins = optimal_bins(inst, opts.opt_budget)?;
    let n = inst.len();
    const CHUNK: u64 = 256;
    let chunks = trials.div_ceil(CHUNK) as usize;
    let partial: Vec<(u64, u64)> = exec::map_range(opts.exec, chunks, |c| {
        let mut order = Vec::with_capacity(n);
        let mut loads = Vec::new();
        let (mut sum, mut sq) = (0u64, 0u64);
        let start = c as u64 * CHUNK;
        for t in start..(start + CHUNK).min(trials) {
            let mut rng = trial_rng(seed, t);
            order.clear();
            order.extend(0..n);
            shuffle(&mut rng, &mut order);
            let bins = match &inst.scaled {
                Some(sc) => bins_u64(sc.capacity, &sc.items, &order, &mut loads),
                None => simulate(&inst.capacity, &inst.items, &order, FitRule::BestFit).1.len(),
            } as u64;
            sum += bins;
            sq += bins * bins;
        }
        (sum, sq)
    });
    let (sum, sq) = partial.iter().fold((0u64, 0u64), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean_bins = Rational::from_bigints(BigInt::from(sum), BigInt::from(trials));
    let mean = sum as f64 / trials as f64;
    let standard_error = if trials > 1 {
        let var = (sq as f64 - trials as f64 * mean * mean) / (trials as f64 - 1.0);
        (var.max(0.0) / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloReport { trials, mean_bins, standard_error, seed, opt_bins, score: mean / opt_bins as f64 })
}

pub const EXPECTATION_LIMIT: usize = 9;

/// Rearranges `v` into the next lexicographic permutation; `false` at the end.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exact expected Best-Fit bin count under a uniformly random order.
///
/// Equal sizes are interchangeable, so each distinct arrangement of the size
/// multiset stands for the same number of orders and a plain average over
/// arrangements is exact.
pub fn exact_best_fit_expectation(inst: &BinPackingInstance) -> Result<Rational, BinPackError> {
    let n = inst.len();
    if n > EXPECTATION_LIMIT {
        return Err(BinPackError::BudgetExceeded { what: "exact expectation", limit: EXPECTATION_LIMIT, got: n });
    }
    let mut classes: Vec<&Rational> = inst.items.iter().collect();
    classes.sort();
    classes.dedup();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (i, s) in inst.items.iter().enumerate() {
        members[classes.binary_search(&s).expect("present")].push(i);
    }
    let mut seq: Vec<usize> = members.iter().enumerate().flat_map(|(c, m)| std::iter::repeat_n(c, m.len())).collect();
    let (mut total, mut count) = (0u64, 0u64);
    let mut order = Vec::with_capacity(n);
    loop {
        let mut next = vec![0usize; classes.len()];
        order.clear();
        for &c in &seq {
            order.push(members[c][next[c]]);
            next[c] += 1;
        }
        total += best_fit(inst, &order)?.bin_count as u64;
        count += 1;
        if !next_permutation(&mut seq) {
            break;
        }
    }
    Ok(Rational::from_bigints(BigInt::from(total), BigInt::from(count)))
}

/// Capacity `m(m+1)`, then `m` items of size `m+1` and `m+1` items of size `m`.
pub fn gen_coprime_construction(m: u32) -> Result<BinPackingInstance, BinPackError> {
    if !(2..=1_000_000).contains(&m) {
        return Err(BinPackError::InvalidParameter(format!("m must be at least 2, got {m}")));
    }
    let m = m as i64;
    let mut items = vec![m + 1; m as usize];
    items.extend(std::iter::repeat_n(m, m as usize + 1));
    BinPackingInstance::from_integers(m * (m + 1), &items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dec(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn fractions(cap: &str, items: &[&str]) -> BinPackingInstance {
        BinPackingInstance::new(dec(cap), items.iter().map(|s| dec(s)).collect()).unwrap()
    }

    #[test]
    fn best_fit_examples() {
        let inst = fractions("1", &["0.4", "0.5", "0.6"]);
        let r = best_fit(&inst, &[0, 1, 2]).unwrap();
        assert_eq!(r.bin_count, 2);
        assert_eq!(r.assignment, vec![0, 0, 1]);
        let m2 = BinPackingInstance::from_integers(6, &[3, 2, 3, 2, 2]).unwrap();
        let r = best_fit(&m2, &identity(5)).unwrap();
        assert_eq!(r.bin_count, 3);
        assert_eq!(r.loads, vec![Rational::from_int(5), Rational::from_int(5), Rational::from_int(2)]);
        let one = fractions("1", &["0.3"]);
        assert_eq!(best_fit(&one, &[0]).unwrap().bin_count, 1);
    }

    #[test]
    fn first_fit_examples() {
        let inst = fractions("1", &["0.4", "0.5", "0.6"]);
        assert_eq!(first_fit(&inst, &[0, 1, 2]).unwrap().bin_count, 2);
        let inst = fractions("1", &["0.6", "0.5", "0.4"]);
        let r = first_fit(&inst, &[0, 1, 2]).unwrap();
        assert_eq!(r.bin_count, 2);
        assert_eq!(r.assignment, vec![0, 1, 0]);
    }

    #[test]
    fn best_fit_prefers_fullest() {
        let inst = fractions("1", &["0.5", "0.7", "0.3"]);
        // 0.3 fits both bins; the fuller one (0.7) wins.
        assert_eq!(best_fit(&inst, &[0, 1, 2]).unwrap().assignment, vec![0, 1, 1]);
        assert_eq!(first_fit(&inst, &[0, 1, 2]).unwrap().assignment, vec![0, 1, 0]);
    }

    #[test]
    fn optimum_examples() {
        let m6 = gen_coprime_construction(6).unwrap();
        assert_eq!(m6.capacity(), &Rational::from_int(42));
        assert_eq!(optimal_bins(&m6, DEFAULT_OPT_BUDGET).unwrap(), 2);
        let mut items = vec!["0.114"; 7];
        items.extend(["0.2", "0.6"]);
        items.extend(["0.08"; 5]);
        assert_eq!(optimal_bins(&fractions("1", &items), DEFAULT_OPT_BUDGET).unwrap(), 2);
        assert_eq!(optimal_bins(&fractions("1", &["0.9"]), DEFAULT_OPT_BUDGET).unwrap(), 1);
        assert!(optimal_bins(&m6, 5).is_err());
        // 3 bins are forced even though the volume bound is 2.
        assert_eq!(optimal_bins(&fractions("1", &["0.6", "0.6", "0.6"]), 24).unwrap(), 3);
        assert_eq!(optimal_bins(&fractions("10", &["4", "4", "3", "3", "3", "3"]), 24).unwrap(), 2);
    }

    #[test]
    fn construction() {
        let m2 = gen_coprime_construction(2).unwrap();
        assert_eq!(m2.items(), &[3, 3, 2, 2, 2].map(Rational::from_int));
        let m6 = gen_coprime_construction(6).unwrap();
        let norm = m6.normalized();
        assert_eq!(norm.len(), 13);
        assert!(norm[..6].iter().all(|s| *s == Rational::new(1, 6)));
        assert!(norm[6..].iter().all(|s| *s == Rational::new(1, 7)));
        assert!(gen_coprime_construction(1).is_err());
    }

    /// Every 2-bin packing keeps the two sizes apart.
    #[test]
    fn two_bin_packings_are_pure() {
        for m in 2..=6u32 {
            let inst = gen_coprime_construction(m).unwrap();
            let n = inst.len();
            let cap = Rational::from_int((m * (m + 1)) as i64);
            let mut feasible = 0;
            for mask in 0u32..(1 << n) {
                let mut loads = [Rational::zero(), Rational::zero()];
                for i in 0..n {
                    loads[((mask >> i) & 1) as usize] += &inst.items()[i];
                }
                if loads.iter().all(|l| *l <= cap) {
                    feasible += 1;
                    for b in 0..2 {
                        let sizes: Vec<&Rational> =
                            (0..n).filter(|&i| ((mask >> i) & 1) as usize == b).map(|i| &inst.items()[i]).collect();
                        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "mixed bin for m={m}");
                    }
                }
            }
            assert_eq!(feasible, 2);
        }
    }

    #[test]
    fn uniform_items_score_one() {
        let inst = BinPackingInstance::from_integers(10, &[5; 8]).unwrap();
        let r = random_order_score(&inst, 500, 3).unwrap();
        assert_eq!(r.score, 1.0);
        assert_eq!(r.mean_bins, Rational::from_int(4));
        assert_eq!(exact_best_fit_expectation(&inst).unwrap(), Rational::from_int(4));
        let pair = fractions("1", &["0.5", "0.25"]);
        assert_eq!(exact_best_fit_expectation(&pair).unwrap(), Rational::one());
    }

    #[test]
    fn report_is_deterministic_across_execution() {
        let inst = gen_coprime_construction(4).unwrap();
        let seq = random_order_score_with(
            &inst,
            2000,
            11,
            MonteCarloOptions { exec: Execution::Sequential, opt_budget: 24 },
        )
        .unwrap();
        let par =
            random_order_score_with(&inst, 2000, 11, MonteCarloOptions { exec: Execution::Parallel, opt_budget: 24 })
                .unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, random_order_score(&inst, 2000, 11).unwrap());
        assert_ne!(seq.mean_bins, random_order_score(&inst, 2000, 12).unwrap().mean_bins);
    }

    #[test]
    fn m2_expectation_matches_enumeration() {
        let inst = gen_coprime_construction(2).unwrap();
        let exact = exact_best_fit_expectation(&inst).unwrap();
        // Brute force over all 120 orders.
        let mut perm = identity(5);
        let (mut total, mut count) = (0i64, 0i64);
        loop {
            total += best_fit(&inst, &perm).unwrap().bin_count as i64;
            count += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        assert_eq!(count, 120);
        assert_eq!(exact, Rational::new(total, count));
        let mc = random_order_score(&inst, 100_000, 5).unwrap();
        let diff = (mc.mean_bins.to_f64() - exact.to_f64()).abs();
        assert!(diff <= 3.0 * mc.standard_error, "diff {diff} se {}", mc.standard_error);
    }

    #[test]
    fn bounded_draws_are_in_range_and_cover() {
        let mut rng = trial_rng(1, 0);
        let mut hits = [0u32; 7];
        for _ in 0..7000 {
            hits[bounded(&mut rng, 7) as usize] += 1;
        }
        assert!(hits.iter().all(|&h| h > 800 && h < 1200), "{hits:?}");
    }

    #[test]
    fn text_round_trip() {
        let inst = fractions("1", &["0.4", "1/3"]);
        let back = BinPackingInstance::from_text(&inst.to_text()).unwrap();
        assert_eq!(back, inst);
        assert!(BinPackingInstance::from_text("1\n2\n").is_err());
        assert!(matches!(BinPackingInstance::from_text("1\nx\n"), Err(BinPackError::Parse { line: 2, .. })));
    }

    fn arb_instance() -> impl Strategy<Value = BinPackingInstance> {
        prop::collection::vec(1i64..=20, 1..=8)
            .prop_map(|v| BinPackingInstance::new(Rational::from_int(20), v.into_iter().map(|s| Rational::new(s, 1)).collect()).unwrap())
    }

    /// Exhaustive optimum over all bin labellings.
    fn brute_optimum(inst: &BinPackingInstance) -> usize {
        let n = inst.len();
        let mut best = n;
        let mut labels = vec![0usize; n];
        fn rec(i: usize, used: usize, labels: &mut Vec<usize>, inst: &BinPackingInstance, best: &mut usize) {
            if used >= *best {
                return;
            }
            if i == labels.len() {
                let mut loads = vec![Rational::zero(); used];
                for (j, &b) in labels.iter().enumerate() {
                    loads[b] += &inst.items()[j];
                }
                if loads.iter().all(|l| l <= inst.capacity()) {
                    *best = used;
                }
                return;
            }
            for b in 0..=used {
                labels[i] = b;
                rec(i + 1, used.max(b + 1), labels, inst, best);
            }
        }
        rec(0, 0, &mut labels, inst, &mut best);
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn packings_are_feasible_and_bounded(inst in arb_instance(), seed in 0u64..1000) {
            let opt = optimal_bins(&inst, 24).unwrap();
            prop_assert_eq!(opt, brute_optimum(&inst));
            let mut order = identity(inst.len());
            shuffle(&mut trial_rng(seed, 0), &mut order);
            for rule in [FitRule::BestFit, FitRule::FirstFit] {
                let r = pack(&inst, &order, rule).unwrap();
                prop_assert!(r.loads.iter().all(|l| l <= inst.capacity() && l.is_positive()));
                prop_assert!(r.bin_count >= opt && r.bin_count <= inst.len());
                let mut loads = vec![Rational::zero(); r.bin_count];
                for (i, &b) in r.assignment.iter().enumerate() {
                    loads[b] += &inst.items()[i];
                }
                prop_assert_eq!(loads, r.loads);
            }
        }

        #[test]
        fn scaled_and_rational_paths_agree(inst in arb_instance(), seed in 0u64..1000) {
            let mut order = identity(inst.len());
            shuffle(&mut trial_rng(seed, 1), &mut order);
            let unscaled = BinPackingInstance { scaled: None, ..inst.clone() };
            prop_assert_eq!(best_fit(&inst, &order).unwrap(), best_fit(&unscaled, &order).unwrap());
            prop_assert_eq!(optimal_bins(&inst, 24).unwrap(), optimal_bins(&unscaled, 24).unwrap());
        }
    }
}
