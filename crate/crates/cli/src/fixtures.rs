//! Reference values shipped with the binary.

use serde::de::DeserializeOwned;
use serde::Deserialize;

const TABLE3: &str = include_str!("../fixtures/table3.csv");
const CLUSTERING: &str = include_str!("../fixtures/clustering_poh.csv");
const BINPACK: &str = include_str!("../fixtures/binpack_ratio.csv");

#[derive(Debug, Clone, Deserialize)]
pub struct Table3Ref {
    pub d: usize,
    pub k: u32,
    pub len_x: usize,
    pub ir: i64,
    pub opt: i64,
    /// As printed, rounded.
    pub ratio: String,
    pub source: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ClusteringRef {
    pub d: usize,
    pub c: String,
    pub bound: f64,
    pub opt_level_cost: f64,
    pub source: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BinpackRef {
    pub m: u32,
    pub lower: f64,
    pub upper: f64,
    pub source: String,
}

fn parse<T: DeserializeOwned>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().expect("bundled fixture parses")
}

pub fn table3() -> Vec<Table3Ref> {
    parse(TABLE3)
}

pub fn clustering() -> Vec<ClusteringRef> {
    parse(CLUSTERING)
}

pub fn binpack() -> Vec<BinpackRef> {
    parse(BINPACK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let t = table3();
        assert_eq!(t.len(), 12);
        assert!(t.iter().all(|r| r.len_x == 2 * (r.d - 1) * ((1 << r.k) - 1)));
        assert_eq!(clustering().len(), 2);
        assert_eq!(binpack()[0].m, 6);
    }

    #[test]
    fn clustering_bounds_match_constants() {
        for r in clustering() {
            let c = advlab::cluster::c_value(r.d);
            assert!((c / r.d as f64 - r.bound).abs() < 1e-12, "{}", r.c);
        }
    }
}
