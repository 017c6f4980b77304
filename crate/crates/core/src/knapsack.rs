//! Bicriteria knapsack: Pareto sets of (weight, profit) packings.
//!
//! [`nu_pareto_sweep`] is the Nemhauser-Ullmann dynamic program, with
//! [`brute_force_pareto`] as its enumeration oracle. The generators build the
//! two-segment instances whose intermediate Pareto sets are far larger than
//! the final one, and [`pareto_size_formula`] gives their exact sizes.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::rational::{binomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnapsackError {
    #[error("invalid item: {0}")]
    InvalidItem(String),
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("brute force limited to {limit} items, got {got}")]
    TooManyItems { limit: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub weight: Rational,
    pub profit: Rational,
}

impl KnapsackItem {
    pub fn new(weight: Rational, profit: Rational) -> Result<KnapsackItem, KnapsackError> {
        if !weight.is_positive() || !profit.is_positive() {
            return Err(KnapsackError::InvalidItem(format!("weight {weight} and profit {profit} must be positive")));
        }
        Ok(KnapsackItem { weight, profit })
    }

    fn same(v: Rational) -> KnapsackItem {
        KnapsackItem { weight: v.clone(), profit: v }
    }
}

/// An ordered item list; prefix `i` is the sub-instance of the first `i` items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    items: Vec<KnapsackItem>,
}

impl KnapsackInstance {
    pub fn new(items: Vec<KnapsackItem>) -> Result<KnapsackInstance, KnapsackError> {
        if items.is_empty() {
            return Err(KnapsackError::InvalidItem("instance has no items".into()));
        }
        for it in &items {
            KnapsackItem::new(it.weight.clone(), it.profit.clone())?;
        }
        Ok(KnapsackInstance { items })
    }

    /// Convenience constructor from integer pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<KnapsackInstance, KnapsackError> {
        let items = pairs
            .iter()
            .map(|&(w, p)| KnapsackItem::new(Rational::from_int(w), Rational::from_int(p)))
            .collect::<Result<_, _>>()?;
        KnapsackInstance::new(items)
    }

    pub fn items(&self) -> &[KnapsackItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn prefix(&self, len: usize) -> Result<KnapsackInstance, KnapsackError> {
        KnapsackInstance::new(self.items[..len.min(self.items.len())].to_vec())
    }

    /// One `weight profit` record per line; `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for it in &self.items {
            let _ = writeln!(s, "{} {}", it.weight, it.profit);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<KnapsackInstance, KnapsackError> {
        let mut items = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| KnapsackError::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(err(format!("expected `weight profit`, found {} fields", fields.len())));
            }
            let w: Rational = fields[0].parse().map_err(|e| err(format!("{e}")))?;
            let p: Rational = fields[1].parse().map_err(|e| err(format!("{e}")))?;
            items.push(KnapsackItem::new(w, p).map_err(|e| err(e.to_string()))?);
        }
        KnapsackInstance::new(items)
    }
}

/// How packings with identical totals are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingMode {
    /// Every Pareto-optimal subset counts separately.
    DistinctSubsets,
    /// Subsets with equal (weight, profit) count once.
    #[default]
    DistinctValuePairs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoEntry {
    pub weight: Rational,
    pub profit: Rational,
    /// Number of subsets attaining exactly these totals.
    pub multiplicity: u128,
    /// Item indices of one such subset, when requested.
    pub witness: Option<Vec<usize>>,
}

/// Non-dominated (weight, profit) classes, sorted by increasing weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoSet {
    entries: Vec<ParetoEntry>,
    mode: CountingMode,
}

impl ParetoSet {
    pub fn entries(&self) -> &[ParetoEntry] {
        &self.entries
    }

    pub fn mode(&self) -> CountingMode {
        self.mode
    }

    /// Size under the set's counting mode.
    pub fn size(&self) -> u128 {
        match self.mode {
            CountingMode::DistinctValuePairs => self.entries.len() as u128,
            CountingMode::DistinctSubsets => self.entries.iter().map(|e| e.multiplicity).sum(),
        }
    }

    /// Value classes without witnesses, for comparing sets.
    pub fn values(&self) -> Vec<(Rational, Rational, u128)> {
        self.entries.iter().map(|e| (e.weight.clone(), e.profit.clone(), e.multiplicity)).collect()
    }

    /// Direct quadratic check that no entry dominates another.
    pub fn is_antichain(&self) -> bool {
        let es = &self.entries;
        for (i, a) in es.iter().enumerate() {
            for b in &es[i + 1..] {
                if dominates(a, b) || dominates(b, a) || (a.weight == b.weight && a.profit == b.profit) {
                    return false;
                }
            }
        }
        true
    }
}

fn dominates(a: &ParetoEntry, b: &ParetoEntry) -> bool {
    a.weight <= b.weight && a.profit >= b.profit && (a.weight < b.weight || a.profit > b.profit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    pub mode: CountingMode,
    pub witnesses: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    /// `sizes[i]` is the size of the Pareto set of the first `i + 1` items.
    pub sizes: Vec<u128>,
    pub pareto: ParetoSet,
}

impl SweepResult {
    pub fn max_size(&self) -> u128 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Keeps the strictly profit-increasing chain of a weight-sorted list,
/// folding equal totals together.
fn filter_sorted(sorted: impl Iterator<Item = ParetoEntry>) -> Vec<ParetoEntry> {
    let mut out: Vec<ParetoEntry> = Vec::new();
    for e in sorted {
        if let Some(last) = out.last_mut() {
            if last.weight == e.weight && last.profit == e.profit {
                last.multiplicity += e.multiplicity;
                continue;
            }
            if e.profit <= last.profit {
                continue;
            }
        }
        out.push(e);
    }
    out
}

/// Incremental Nemhauser-Ullmann: each step merges the current set with its
/// copy shifted by the next item.
#[derive(Debug, Clone)]
pub struct ParetoSweep<'a> {
    items: &'a [KnapsackItem],
    next: usize,
    current: Vec<ParetoEntry>,
    witnesses: bool,
}

impl<'a> ParetoSweep<'a> {
    pub fn new(instance: &'a KnapsackInstance, witnesses: bool) -> ParetoSweep<'a> {
        let empty = ParetoEntry {
            weight: Rational::zero(),
            profit: Rational::zero(),
            multiplicity: 1,
            witness: witnesses.then(Vec::new),
        };
        ParetoSweep { items: instance.items(), next: 0, current: vec![empty], witnesses }
    }

    pub fn current(&self) -> &[ParetoEntry] {
        &self.current
    }

    /// Folds in the next item; returns `false` once all items are used.
    pub fn step(&mut self) -> bool {
        let Some(item) = self.items.get(self.next) else {
            return false;
        };
        let idx = self.next;
        self.next += 1;
        let shifted: Vec<ParetoEntry> = self
            .current
            .iter()
            .map(|e| ParetoEntry {
                weight: &e.weight + &item.weight,
                profit: &e.profit + &item.profit,
                multiplicity: e.multiplicity,
                witness: e.witness.as_ref().map(|w| {
                    let mut w = w.clone();
                    w.push(idx);
                    w
                }),
            })
            .collect();
        let old = std::mem::take(&mut self.current);
        let merged = MergeByWeight { a: old.into_iter().peekable(), b: shifted.into_iter().peekable() };
        self.current = filter_sorted(merged);
        debug_assert!(self.witnesses || self.current.iter().all(|e| e.witness.is_none()));
        true
    }

    fn size(&self, mode: CountingMode) -> u128 {
        match mode {
            CountingMode::DistinctValuePairs => self.current.len() as u128,
            CountingMode::DistinctSubsets => self.current.iter().map(|e| e.multiplicity).sum(),
        }
    }
}

/// Merges two weight-sorted lists; at equal weight the higher profit comes
/// first so the running-maximum filter keeps it.
struct MergeByWeight<I: Iterator<Item = ParetoEntry>> {
    a: std::iter::Peekable<I>,
    b: std::iter::Peekable<I>,
}

impl<I: Iterator<Item = ParetoEntry>> Iterator for MergeByWeight<I> {
    type Item = ParetoEntry;

    fn next(&mut self) -> Option<ParetoEntry> {
        let take_a = match (self.a.peek(), self.b.peek()) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x.weight.cmp(&y.weight).then(y.profit.cmp(&x.profit)).is_le(),
        };
        if take_a {
            self.a.next()
        } else {
            self.b.next()
        }
    }
}

pub fn nu_pareto_sweep(instance: &KnapsackInstance, mode: CountingMode) -> SweepResult {
    nu_pareto_sweep_with(instance, SweepOptions { mode, witnesses: false })
}

pub fn nu_pareto_sweep_with(instance: &KnapsackInstance, opts: SweepOptions) -> SweepResult {
    let mut sweep = ParetoSweep::new(instance, opts.witnesses);
    let mut sizes = Vec::with_capacity(instance.len());
    while sweep.step() {
        sizes.push(sweep.size(opts.mode));
    }
    SweepResult { sizes, pareto: ParetoSet { entries: sweep.current, mode: opts.mode } }
}

pub const BRUTE_FORCE_LIMIT: usize = 22;

/// Enumerates all subsets in Gray-code order and filters dominated totals.
pub fn brute_force_pareto(
    instance: &KnapsackInstance,
    mode: CountingMode,
    witnesses: bool,
) -> Result<ParetoSet, KnapsackError> {
    let n = instance.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(KnapsackError::TooManyItems { limit: BRUTE_FORCE_LIMIT, got: n });
    }
    let items = instance.items();
    let mut all: Vec<(Rational, Rational, u32)> = Vec::with_capacity(1 << n);
    let (mut w, mut p) = (Rational::zero(), Rational::zero());
    let mut mask = 0u32;
    all.push((w.clone(), p.clone(), 0));
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            w += &items[bit].weight;
            p += &items[bit].profit;
        } else {
            w -= &items[bit].weight;
            p -= &items[bit].profit;
        }
        all.push((w.clone(), p.clone(), mask));
    }
    all.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)).then(x.2.cmp(&y.2)));
    let entries = filter_sorted(all.into_iter().map(|(weight, profit, mask)| ParetoEntry {
        weight,
        profit,
        multiplicity: 1,
        witness: witnesses.then(|| (0..n).filter(|&i| mask & (1 << i) != 0).collect()),
    }));
    Ok(ParetoSet { entries, mode })
}

/// `max_i |P_i| / |P_n|` under the given counting mode.
pub fn knapsack_score(instance: &KnapsackInstance, mode: CountingMode) -> Rational {
    let r = nu_pareto_sweep(instance, mode);
    let num = BigInt::from(r.max_size());
    let den = BigInt::from(r.pareto.size());
    Rational::from_bigints(num, den)
}

// ---------------------------------------------------------------------------
// Instance families

fn pow2(e: u32) -> Rational {
    Rational::pow2(e as i32)
}

/// `[(2^a, 2^a), (2^{a+1}, 2^{a+1}), …, (2^b, 2^b)]`.
pub fn gen_segment_i(a: u32, b: u32) -> Result<Vec<KnapsackItem>, KnapsackError> {
    if a < 1 || a > b || b > 1000 {
        return Err(KnapsackError::InvalidParameter(format!("need 1 <= a <= b <= 1000, got a={a}, b={b}")));
    }
    Ok((a..=b).map(|e| KnapsackItem::same(pow2(e))).collect())
}

/// `n` items of profit-to-weight ratio `(2^d - 1)/2^d`, each scaled by
/// `x_i = 1 + 2^{-i}/(2^d - 1)` so that subset profits never collide.
pub fn gen_segment_j(d: u32, n: u32) -> Result<Vec<KnapsackItem>, KnapsackError> {
    if d < 1 || n < 1 || d > 60 || n > 1000 {
        return Err(KnapsackError::InvalidParameter(format!("need d >= 1 and n >= 1, got d={d}, n={n}")));
    }
    let scale = pow2(d);
    let base = &scale - Rational::one();
    Ok((1..=n)
        .map(|i| {
            let x = Rational::one() + Rational::pow2(-(i as i32)) / &base;
            KnapsackItem { weight: &x * &scale, profit: &x * &base }
        })
        .collect())
}

/// `[I_{a,b}, J_{d,n}]`.
pub fn gen_two_segment(a: u32, b: u32, d: u32, n: u32) -> Result<KnapsackInstance, KnapsackError> {
    if d >= a {
        return Err(KnapsackError::InvalidParameter(format!("need d < a, got d={d}, a={a}")));
    }
    let mut items = gen_segment_i(a, b)?;
    items.extend(gen_segment_j(d, n)?);
    KnapsackInstance::new(items)
}

fn check_family(n: u32, k: u32) -> Result<(), KnapsackError> {
    if !(1..31).contains(&k) || (2u64 << k) > n as u64 {
        return Err(KnapsackError::InvalidParameter(format!("need 2^k <= n/2, got n={n}, k={k}")));
    }
    Ok(())
}

/// `[I_{2k, 2k+n}, J_{k,n}]`.
pub fn gen_instance_i1(n: u32, k: u32) -> Result<KnapsackInstance, KnapsackError> {
    check_family(n, k)?;
    gen_two_segment(2 * k, 2 * k + n, k, n)
}

/// [`gen_instance_i1`] followed by the powers `2^{k+1}, …, 2^{2k-1}`, which
/// complete the first segment to `I_{k+1, 2k+n}` and collapse the Pareto set.
pub fn gen_instance_i2(n: u32, k: u32) -> Result<KnapsackInstance, KnapsackError> {
    let mut items = gen_instance_i1(n, k)?.items;
    items.extend((k + 1..2 * k).map(|e| KnapsackItem::same(pow2(e))));
    KnapsackInstance::new(items)
}

/// Exact Pareto-set size of `[I_{a,b}, J_{d,n}]`.
pub fn pareto_size_formula(a: u32, b: u32, d: u32, n: u32) -> Result<BigInt, KnapsackError> {
    if d < 1 || d >= a || a > b || n < 1 {
        return Err(KnapsackError::InvalidParameter(format!("need 1 <= d < a <= b and n >= 1, got {a},{b},{d},{n}")));
    }
    let span = BigInt::one() << (b - a + 1);
    let cap = if a - d >= 32 { n as u64 } else { (n as u64).min((1u64 << (a - d)) - 1) };
    let sum: BigInt = (0..=cap).map(|i| binomial(n as u64, i)).sum();
    Ok((span - 1) * sum + (BigInt::one() << n))
}

/// Closed-form lower bound on `|P(I1)| / |P(I2)|`.
pub fn ratio_bounds(n: u32, k: u32) -> Result<Rational, KnapsackError> {
    check_family(n, k)?;
    let one = BigInt::one();
    let num = (&one << (n + 1)) - &one;
    let den = (&one << (k + n)) - &one;
    let c = (1i64 << k) - 1;
    let base = Rational::new(n as i64, c);
    Ok(Rational::from_bigints(num, den) * base.pow(c as i32) / Rational::from_int(n as i64 + 2))
}

/// Exact `|P(I1)| / |P(I2)|` from the size formula.
pub fn family_ratio(n: u32, k: u32) -> Result<Rational, KnapsackError> {
    check_family(n, k)?;
    let big = pareto_size_formula(2 * k, 2 * k + n, k, n)?;
    let small = pareto_size_formula(k + 1, 2 * k + n, k, n)?;
    Ok(Rational::from_bigints(big, small))
}

/// Items of a two-segment instance that belong to `I_{a,b}`: the first `b - a + 1`.
pub fn segment_split(a: u32, b: u32) -> usize {
    (b - a + 1) as usize
}

/// Checks that every Pareto-optimal packing missing some first-segment item
/// holds fewer than `2^{a-d}` second-segment items. Needs witnesses.
pub fn check_small_j_lemma(set: &ParetoSet, a: u32, b: u32, d: u32) -> bool {
    let split = segment_split(a, b);
    let limit = 1usize << (a - d);
    set.entries.iter().all(|e| {
        let w = e.witness.as_ref().expect("witnesses required");
        let in_i = w.iter().filter(|&&i| i < split).count();
        in_i == split || w.len() - in_i < limit
    })
}

/// Checks that distinct Pareto-optimal packings have distinct profits.
pub fn check_distinct_profits(set: &ParetoSet) -> bool {
    let mut profits: Vec<&Rational> = set.entries.iter().map(|e| &e.profit).collect();
    profits.sort();
    set.entries.iter().all(|e| e.multiplicity == 1) && profits.windows(2).all(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_item() {
        let inst = KnapsackInstance::from_pairs(&[(1, 1)]).unwrap();
        let r = nu_pareto_sweep(&inst, CountingMode::default());
        assert_eq!(r.sizes, vec![2]);
        assert_eq!(knapsack_score(&inst, CountingMode::default()), Rational::one());
    }

    #[test]
    fn two_items() {
        let inst = KnapsackInstance::from_pairs(&[(2, 1), (1, 2)]).unwrap();
        let r = nu_pareto_sweep(&inst, CountingMode::default());
        assert_eq!(r.sizes, vec![2, 3]);
        let vals: Vec<(Rational, Rational)> = r.pareto.entries().iter().map(|e| (e.weight.clone(), e.profit.clone())).collect();
        assert_eq!(vals, vec![(q(0, 1), q(0, 1)), (q(1, 1), q(2, 1)), (q(3, 1), q(3, 1))]);
        assert_eq!(brute_force_pareto(&inst, CountingMode::default(), false).unwrap().size(), 3);
        assert_eq!(knapsack_score(&inst, CountingMode::default()), Rational::one());
    }

    #[test]
    fn identical_items_by_mode() {
        let inst = KnapsackInstance::from_pairs(&[(1, 1), (1, 1)]).unwrap();
        let pairs = brute_force_pareto(&inst, CountingMode::DistinctValuePairs, false).unwrap();
        assert_eq!(pairs.size(), 3);
        let subsets = brute_force_pareto(&inst, CountingMode::DistinctSubsets, false).unwrap();
        assert_eq!(subsets.entries().len(), 3);
        assert_eq!(subsets.size(), 4);
        assert_eq!(nu_pareto_sweep(&inst, CountingMode::DistinctSubsets).pareto.size(), 4);
    }

    #[test]
    fn segments() {
        let i = gen_segment_i(2, 3).unwrap();
        assert_eq!(i, vec![KnapsackItem::same(q(4, 1)), KnapsackItem::same(q(8, 1))]);
        let j = gen_segment_j(1, 2).unwrap();
        assert_eq!(j[0], KnapsackItem { weight: q(3, 1), profit: q(3, 2) });
        assert_eq!(j[1], KnapsackItem { weight: q(5, 2), profit: q(5, 4) });
        assert!(gen_segment_j(1, 0).is_err());
        assert!(gen_segment_i(3, 2).is_err());
    }

    #[test]
    fn families() {
        let i1 = gen_instance_i1(8, 2).unwrap();
        let i2 = gen_instance_i2(8, 2).unwrap();
        assert_eq!(i1.len(), 17);
        assert_eq!(i2.len(), 18);
        assert_eq!(&i2.items()[..17], i1.items());
        assert_eq!(i2.items()[17], KnapsackItem::same(q(8, 1)));
        assert!(gen_instance_i1(2, 2).is_err());
        assert_eq!(gen_instance_i2(16, 3).unwrap().len(), 35);
    }

    #[test]
    fn formula_values() {
        assert_eq!(pareto_size_formula(2, 3, 1, 2).unwrap(), BigInt::from(13));
        assert_eq!(pareto_size_formula(4, 12, 2, 8).unwrap(), BigInt::from(47_779));
        assert_eq!(pareto_size_formula(3, 12, 2, 8).unwrap(), BigInt::from(9_463));
        assert!(pareto_size_formula(2, 3, 2, 2).is_err());
        let inst = gen_two_segment(2, 3, 1, 2).unwrap();
        assert_eq!(brute_force_pareto(&inst, CountingMode::default(), false).unwrap().size(), 13);
    }

    #[test]
    fn ratio_bound_is_below_ratio() {
        for (n, k) in [(8, 2), (16, 2), (16, 3), (12, 2)] {
            assert!(ratio_bounds(n, k).unwrap() <= family_ratio(n, k).unwrap(), "n={n} k={k}");
        }
        assert!(ratio_bounds(2, 2).is_err());
    }

    #[test]
    fn text_round_trip() {
        let inst = gen_two_segment(2, 3, 1, 3).unwrap();
        assert_eq!(KnapsackInstance::from_text(&inst.to_text()).unwrap(), inst);
        let err = KnapsackInstance::from_text("1 1\n2\n").unwrap_err();
        assert!(matches!(err, KnapsackError::Parse { line: 2, .. }));
        assert!(KnapsackInstance::from_text("0 1\n").is_err());
    }

    #[test]
    fn brute_force_limit() {
        let inst = KnapsackInstance::from_pairs(&[(1, 1); 23]).unwrap();
        assert!(matches!(brute_force_pareto(&inst, CountingMode::default(), false), Err(KnapsackError::TooManyItems { .. })));
    }

    fn arb_instance() -> impl Strategy<Value = KnapsackInstance> {
        prop::collection::vec((1i64..12, 1i64..4, 1i64..12, 1i64..4), 1..=12).prop_map(|v| {
            let items = v.into_iter().map(|(w, wd, p, pd)| KnapsackItem::new(q(w, wd), q(p, pd)).unwrap()).collect();
            KnapsackInstance::new(items).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn sweep_matches_brute_force(inst in arb_instance()) {
            for mode in [CountingMode::DistinctValuePairs, CountingMode::DistinctSubsets] {
                let sweep = nu_pareto_sweep(&inst, mode);
                let brute = brute_force_pareto(&inst, mode, false).unwrap();
                prop_assert_eq!(sweep.pareto.values(), brute.values());
                prop_assert!(sweep.pareto.is_antichain());
                for (i, &s) in sweep.sizes.iter().enumerate() {
                    let p = brute_force_pareto(&inst.prefix(i + 1).unwrap(), mode, false).unwrap();
                    prop_assert_eq!(s, p.size());
                }
            }
        }

        #[test]
        fn witnesses_sum_to_totals(inst in arb_instance()) {
            let r = nu_pareto_sweep_with(&inst, SweepOptions { mode: CountingMode::DistinctSubsets, witnesses: true });
            for e in r.pareto.entries() {
                let w = e.witness.as_ref().unwrap();
                let tw: Rational = w.iter().map(|&i| &inst.items()[i].weight).sum();
                let tp: Rational = w.iter().map(|&i| &inst.items()[i].profit).sum();
                prop_assert_eq!(&tw, &e.weight);
                prop_assert_eq!(&tp, &e.profit);
            }
        }
    }
}
