//! Exact counting and streaming of pattern-avoiding partitions.
//!
//! Partitions are generated as restricted growth strings: element `i` joins
//! one of the blocks opened so far or opens the next one. A prefix is the
//! restriction to an initial segment, so a prefix that already contains the
//! pattern can be pruned, and only occurrences through the newest element
//! need to be checked at each step.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::containment::{contains, Matcher};
use crate::formulas::{self, ln_big, FormulaError};
use crate::partition::{all_partitions, SetPartition};

/// Largest `n` whose partition count fits the fixed-width tallies used while
/// counting (`Bell(24) < 2^63`).
pub const MAX_COUNT_N: usize = 24;

/// Default ceiling for the unpruned oracle.
pub const DEFAULT_ORACLE_CEILING: usize = 10;

/// Prefix depth at which the parallel counter splits work.
pub const SPLIT_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("n={n} exceeds the counting limit {MAX_COUNT_N}")]
    TooLarge { n: usize },
    #[error("n={n} exceeds the oracle ceiling {ceiling}")]
    OracleCeiling { n: usize, ceiling: usize },
    #[error("F_n is undefined for n={n} (need n >= 2)")]
    RatioDomain { n: usize },
    #[error("count is zero for tau={tau}, n={n}")]
    ZeroCount { tau: String, n: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Exact number of partitions of `[n]` avoiding `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub tau: SetPartition,
    pub n: usize,
    #[serde(with = "decimal")]
    pub count: BigUint,
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl CountRecord {
    /// `ln(A_n) / (n ln n)`.
    pub fn f_ratio(&self) -> Result<f64, EnumerationError> {
        f_ratio(self)
    }
}

/// Counts avoiders of `tau` in `[n]`, fanning out over search prefixes when
/// the `parallel` feature is on.
pub fn count_avoiders(tau: &SetPartition, n: usize) -> Result<CountRecord, EnumerationError> {
    #[cfg(feature = "parallel")]
    {
        count_avoiders_parallel(tau, n)
    }
    #[cfg(not(feature = "parallel"))]
    {
        count_avoiders_sequential(tau, n)
    }
}

pub fn count_avoiders_sequential(
    tau: &SetPartition,
    n: usize,
) -> Result<CountRecord, EnumerationError> {
    check_size(n)?;
    let mut matcher = Matcher::new(tau.labels());
    let mut labels = Vec::with_capacity(n);
    let count = count_from(&mut labels, 0, n, &mut matcher);
    Ok(CountRecord { tau: tau.clone(), n, count: BigUint::from(count) })
}

/// Splits the search at prefix depth `min(n, SPLIT_DEPTH)` and counts each
/// surviving prefix on the rayon pool. Totals are summed, so the result does
/// not depend on scheduling.
#[cfg(feature = "parallel")]
pub fn count_avoiders_parallel(
    tau: &SetPartition,
    n: usize,
) -> Result<CountRecord, EnumerationError> {
    use rayon::prelude::*;

    check_size(n)?;
    let depth = n.min(SPLIT_DEPTH);
    let mut prefixes = Vec::new();
    let mut matcher = Matcher::new(tau.labels());
    collect_prefixes(&mut Vec::with_capacity(depth), 0, depth, &mut matcher, &mut prefixes);
    let count: u64 = prefixes
        .into_par_iter()
        .map_init(
            || Matcher::new(tau.labels()),
            |matcher, mut prefix| {
                let blocks = prefix.iter().max().map_or(0, |b| b + 1);
                prefix.reserve(n - depth);
                count_from(&mut prefix, blocks, n, matcher)
            },
        )
        .sum();
    Ok(CountRecord { tau: tau.clone(), n, count: BigUint::from(count) })
}

fn check_size(n: usize) -> Result<(), EnumerationError> {
    if n > MAX_COUNT_N {
        return Err(EnumerationError::TooLarge { n });
    }
    Ok(())
}

fn count_from(labels: &mut Vec<usize>, blocks: usize, n: usize, matcher: &mut Matcher) -> u64 {
    if labels.len() == n {
        return 1;
    }
    let mut total = 0;
    for b in 0..=blocks {
        labels.push(b);
        if !matcher.ends_at_last(labels) {
            total += count_from(labels, blocks.max(b + 1), n, matcher);
        }
        labels.pop();
    }
    total
}

#[cfg(feature = "parallel")]
fn collect_prefixes(
    labels: &mut Vec<usize>,
    blocks: usize,
    depth: usize,
    matcher: &mut Matcher,
    out: &mut Vec<Vec<usize>>,
) {
    if labels.len() == depth {
        out.push(labels.clone());
        return;
    }
    for b in 0..=blocks {
        labels.push(b);
        if !matcher.ends_at_last(labels) {
            collect_prefixes(labels, blocks.max(b + 1), depth, matcher, out);
        }
        labels.pop();
    }
}

/// Unpruned reference count: tests every partition of `[n]` with
/// [`contains`]. Refuses `n` above `ceiling`.
pub fn count_avoiders_oracle(
    tau: &SetPartition,
    n: usize,
    ceiling: usize,
) -> Result<CountRecord, EnumerationError> {
    if n > ceiling {
        return Err(EnumerationError::OracleCeiling { n, ceiling });
    }
    let count = all_partitions(n).filter(|host| !contains(host, tau)).count();
    Ok(CountRecord { tau: tau.clone(), n, count: BigUint::from(count) })
}

pub fn f_ratio(record: &CountRecord) -> Result<f64, EnumerationError> {
    if record.n < 2 {
        return Err(EnumerationError::RatioDomain { n: record.n });
    }
    if record.count == BigUint::ZERO {
        return Err(EnumerationError::ZeroCount { tau: record.tau.to_string(), n: record.n });
    }
    let n = record.n as f64;
    Ok(ln_big(&record.count) / (n * n.ln()))
}

/// Avoiders of `tau` in `[n]`, in lexicographic restricted-growth-string order.
pub fn enumerate_avoiders(tau: &SetPartition, n: usize) -> Avoiders {
    Avoiders {
        matcher: Matcher::new(tau.labels()),
        n,
        labels: Vec::with_capacity(n),
        blocks: Vec::with_capacity(n),
        candidates: vec![0],
        empty_pending: n == 0,
    }
}

pub struct Avoiders {
    matcher: Matcher,
    n: usize,
    labels: Vec<usize>,
    // blocks[i] = number of blocks used by labels[..=i]
    blocks: Vec<usize>,
    // next label to try at each open position
    candidates: Vec<usize>,
    empty_pending: bool,
}

impl Iterator for Avoiders {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.n == 0 {
            return std::mem::take(&mut self.empty_pending).then(SetPartition::empty);
        }
        loop {
            let depth = self.candidates.len().checked_sub(1)?;
            let open = self.blocks.last().copied().unwrap_or(0);
            let c = self.candidates[depth];
            if c > open {
                self.candidates.pop();
                self.labels.pop();
                self.blocks.pop();
                continue;
            }
            self.candidates[depth] += 1;
            self.labels.push(c);
            if self.matcher.ends_at_last(&self.labels) {
                self.labels.pop();
                continue;
            }
            if self.labels.len() == self.n {
                let p = SetPartition::from_labels(&self.labels);
                self.labels.pop();
                return Some(p);
            }
            self.blocks.push(open.max(c + 1));
            self.candidates.push(0);
        }
    }
}

/// One row of a growth table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    #[serde(with = "decimal")]
    pub count: BigUint,
    pub f_ratio: f64,
    /// `1 - 1/pm(tau)`; absent when `pm(tau) = 0`.
    pub pm_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub tau: SetPartition,
    pub pm: usize,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    /// Builds the table from records of a single pattern; records with
    /// `n < 2` are dropped.
    pub fn from_records<'a, I>(tau: &SetPartition, records: I) -> Result<Self, EnumerationError>
    where
        I: IntoIterator<Item = &'a CountRecord>,
    {
        let pm = tau.permeability().value;
        let pm_target = (pm > 0).then(|| 1.0 - 1.0 / pm as f64);
        let mut rows = Vec::new();
        for r in records {
            if r.n < 2 {
                continue;
            }
            rows.push(GrowthRow {
                n: r.n,
                count: r.count.clone(),
                f_ratio: f_ratio(r)?,
                pm_target,
            });
        }
        Ok(GrowthReport { tau: tau.clone(), pm, rows })
    }
}

/// Partitions of `[n]` into `n/t` blocks of size `t` where each of the `t`
/// consecutive sections of length `n/t` holds one element of every block.
#[derive(Debug, Clone)]
pub struct UniformPartitions {
    section: usize,
    // perms[j] assigns the elements of section j + 1 to blocks
    perms: Vec<Vec<usize>>,
    done: bool,
    count: BigUint,
}

pub fn uniform_partitions(n: usize, t: usize) -> Result<UniformPartitions, EnumerationError> {
    let count = formulas::uniform_count(t, n)?;
    let section = n / t;
    Ok(UniformPartitions {
        section,
        perms: vec![(0..section).collect(); t - 1],
        done: false,
        count,
    })
}

impl UniformPartitions {
    /// `(n/t)!^{t-1}`.
    pub fn expected_count(&self) -> &BigUint {
        &self.count
    }
}

impl Iterator for UniformPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let mut labels: Vec<usize> = (0..self.section).collect();
        for perm in &self.perms {
            labels.extend_from_slice(perm);
        }
        let p = SetPartition::from_labels(&labels);
        // odometer over the permutation tuple
        self.done = !self.perms.iter_mut().rev().any(|perm| {
            if next_permutation(perm) {
                true
            } else {
                perm.sort_unstable();
                false
            }
        });
        Some(p)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Sufficient condition for every uniform partition with `t` sections to
/// avoid `tau`: at least `t` same-block adjacencies in `tau`.
pub fn uniform_avoids(tau: &SetPartition, t: usize) -> bool {
    tau.sba() >= t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::LayeredShape;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    fn count(tau: &str, n: usize) -> u64 {
        let r = count_avoiders_sequential(&p(tau), n).unwrap();
        u64::try_from(&r.count).unwrap()
    }

    #[test]
    fn count_examples() {
        for n in 1..8 {
            assert_eq!(count("1/2", n), 1);
        }
        assert_eq!(count("123", 4), 10);
        assert_eq!(count("12/34", 3), 5);
        assert_eq!(count("123", 0), 1);
    }

    #[test]
    fn oracle_examples() {
        let c = |tau: &str, n| {
            u64::try_from(&count_avoiders_oracle(&p(tau), n, DEFAULT_ORACLE_CEILING).unwrap().count)
                .unwrap()
        };
        assert_eq!(c("123", 5), 26);
        assert_eq!(c("1/2/3", 4), 8);
        assert_eq!(c("12", 3), 1);
        assert_eq!(
            count_avoiders_oracle(&p("12"), 11, 10),
            Err(EnumerationError::OracleCeiling { n: 11, ceiling: 10 })
        );
    }

    #[test]
    fn too_large_is_rejected() {
        assert_eq!(
            count_avoiders_sequential(&p("12"), 25),
            Err(EnumerationError::TooLarge { n: 25 })
        );
    }

    #[test]
    fn f_ratio_examples() {
        let rec = |tau: &str, n, c: u64| CountRecord { tau: p(tau), n, count: BigUint::from(c) };
        assert_eq!(f_ratio(&rec("1/2", 5, 1)).unwrap(), 0.0);
        let f = f_ratio(&rec("123", 10, 9496)).unwrap();
        assert!((f - 0.397_754).abs() < 1e-6, "{f}");
        assert!((f - 9496f64.ln() / (10.0 * 10f64.ln())).abs() < 1e-15);
        let nn = BigUint::from(7u32).pow(7);
        assert!(
            (f_ratio(&CountRecord { tau: p("12"), n: 7, count: nn }).unwrap() - 1.0).abs() < 1e-14
        );
        assert_eq!(f_ratio(&rec("12", 1, 1)), Err(EnumerationError::RatioDomain { n: 1 }));
        assert!(matches!(f_ratio(&rec("12", 3, 0)), Err(EnumerationError::ZeroCount { .. })));
    }

    #[test]
    fn enumerate_examples() {
        let list = |tau: &str, n| -> Vec<String> {
            enumerate_avoiders(&p(tau), n).map(|p| p.to_string()).collect()
        };
        assert_eq!(list("12", 2), vec!["1/2"]);
        assert_eq!(list("123", 3), vec!["12/3", "13/2", "1/23", "1/2/3"]);
        assert_eq!(list("1/2", 3), vec!["123"]);
        assert_eq!(list("1", 0), vec![""]);
        assert!(list("1", 3).is_empty());
    }

    #[test]
    fn enumerate_matches_count() {
        for tau in ["123", "12/34", "13/2", "1/2/3"] {
            for n in 0..=8 {
                assert_eq!(enumerate_avoiders(&p(tau), n).count() as u64, count(tau, n));
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        for tau in ["123", "12/34", "1/23", "14/23"] {
            for n in [0, 3, 6, 7, 10] {
                assert_eq!(
                    count_avoiders_parallel(&p(tau), n).unwrap(),
                    count_avoiders_sequential(&p(tau), n).unwrap()
                );
            }
        }
    }

    #[test]
    fn uniform_examples() {
        let u = uniform_partitions(4, 2).unwrap();
        assert_eq!(u.expected_count(), &BigUint::from(2u32));
        let got: Vec<String> = u.map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["13/24", "14/23"]);
        let got: Vec<String> = uniform_partitions(4, 1).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["1/2/3/4"]);
        assert_eq!(uniform_partitions(6, 3).unwrap().count(), 4);
        assert!(matches!(uniform_partitions(7, 3), Err(EnumerationError::Formula(_))));
    }

    #[test]
    fn uniform_matches_filtered_partitions() {
        let filtered: Vec<SetPartition> = all_partitions(6)
            .filter(|q| {
                q.blocks().len() == 2
                    && q.blocks().iter().all(|b| b.len() == 3)
                    && q.blocks().iter().all(|b| {
                        (0..3).all(|s| b.iter().filter(|&&e| (e - 1) / 2 == s).count() == 1)
                    })
            })
            .collect();
        let mut streamed: Vec<SetPartition> = uniform_partitions(6, 3).unwrap().collect();
        streamed.sort();
        let mut filtered = filtered;
        filtered.sort();
        assert_eq!(streamed, filtered);
    }

    #[test]
    fn uniform_avoids_examples() {
        for parts in [vec![3], vec![1, 3], vec![2, 2], vec![2, 1, 2]] {
            let shape = LayeredShape::new(parts).unwrap();
            let t = shape.size() - shape.num_blocks();
            assert!(uniform_avoids(&shape.to_partition(), t));
        }
        for t in 1..4 {
            assert!(!uniform_avoids(&SetPartition::singletons(4), t));
        }
        assert!(uniform_avoids(&p("12/345"), 3));
        assert!(!uniform_avoids(&p("12/345"), 4));
    }

    #[test]
    fn count_record_json_uses_decimal_strings() {
        let r = CountRecord { tau: p("123"), n: 10, count: BigUint::from(9496u32) };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"tau":"123","n":10,"count":"9496"}"#);
        assert_eq!(serde_json::from_str::<CountRecord>(&s).unwrap(), r);
    }

    #[test]
    fn growth_report_skips_small_n() {
        let tau = p("123");
        let recs: Vec<CountRecord> =
            (0..=5).map(|n| count_avoiders_sequential(&tau, n).unwrap()).collect();
        let rep = GrowthReport::from_records(&tau, &recs).unwrap();
        assert_eq!(rep.pm, 2);
        assert_eq!(rep.rows.len(), 4);
        assert_eq!(rep.rows[0].n, 2);
        assert_eq!(rep.rows[0].pm_target, Some(0.5));
    }
}
