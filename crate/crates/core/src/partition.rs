//! Set partitions of `[n]` in canonical form, slash notation, and the
//! structural measures used throughout the crate (layering, permutation
//! partitions, same-block adjacencies, permeability).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reasons a slash-notation string fails to describe a partition of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty block at position {position}")]
    EmptyBlock { position: usize },
    #[error("malformed token {token:?} at position {position}")]
    Malformed { token: String, position: usize },
    #[error("element {element} appears more than once (position {position})")]
    Duplicate { element: usize, position: usize },
    #[error("element {element} is missing from 1..{n}")]
    Missing { element: usize, n: usize },
}

impl ParseError {
    /// Byte offset into the input where the problem was detected, if it has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::EmptyBlock { position }
            | ParseError::Malformed { position, .. }
            | ParseError::Duplicate { position, .. } => Some(*position),
            ParseError::Missing { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("element set is empty")]
    EmptySelection,
    #[error("element {element} is outside 1..{n}")]
    OutOfRange { element: usize, n: usize },
    #[error("blocks do not partition 1..{n}")]
    NotAPartition { n: usize },
}

/// A partition of `{1, ..., n}` into nonempty disjoint blocks.
///
/// Always stored canonically: elements ascend inside each block and blocks
/// are ordered by their minimum. Equality and hashing therefore coincide with
/// equality of the underlying set partition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    // labels[i] is the (0-based, canonical) block index of element i + 1
    labels: Vec<usize>,
}

impl SetPartition {
    /// The empty partition of `[0]`.
    pub fn empty() -> Self {
        SetPartition { blocks: Vec::new(), labels: Vec::new() }
    }

    /// Builds a partition from blocks given in any order.
    pub fn from_blocks<I, B>(blocks: I) -> Result<Self, PartitionError>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = usize>,
    {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|b| {
                let mut b: Vec<usize> = b.into_iter().collect();
                b.sort_unstable();
                b
            })
            .collect();
        let n: usize = blocks.iter().map(Vec::len).sum();
        if blocks.iter().any(Vec::is_empty) {
            return Err(PartitionError::NotAPartition { n });
        }
        let mut seen = vec![false; n];
        for &e in blocks.iter().flatten() {
            if e == 0 || e > n {
                return Err(PartitionError::OutOfRange { element: e, n });
            }
            if std::mem::replace(&mut seen[e - 1], true) {
                return Err(PartitionError::NotAPartition { n });
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self::from_sorted_blocks(blocks, n))
    }

    fn from_sorted_blocks(blocks: Vec<Vec<usize>>, n: usize) -> Self {
        let mut labels = vec![0; n];
        for (i, b) in blocks.iter().enumerate() {
            for &e in b {
                labels[e - 1] = i;
            }
        }
        SetPartition { blocks, labels }
    }

    /// Builds a partition from a block-label sequence: `labels[i]` names the
    /// block of element `i + 1`. Labels may be arbitrary; equal labels mean
    /// the same block.
    pub fn from_labels<T: Eq + Copy>(labels: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut canon = Vec::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            let b = match seen.iter().position(|&s| s == l) {
                Some(b) => b,
                None => {
                    seen.push(l);
                    blocks.push(Vec::new());
                    seen.len() - 1
                }
            };
            blocks[b].push(i + 1);
            canon.push(b);
        }
        SetPartition { blocks, labels: canon }
    }

    /// Builds a partition from a restricted growth string (0-based labels
    /// where each new block takes the next unused label). The input is
    /// relabeled, so any label sequence is accepted.
    pub fn from_rgs(rgs: &[u8]) -> Self {
        Self::from_labels(rgs)
    }

    /// The one-block partition `12...n`.
    pub fn single_block(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Self::from_sorted_blocks(vec![(1..=n).collect()], n)
    }

    /// The all-singleton partition `1/2/.../n`.
    pub fn singletons(n: usize) -> Self {
        Self::from_sorted_blocks((1..=n).map(|e| vec![e]).collect(), n)
    }

    /// Ground-set size.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Canonical block index (0-based) of each element, i.e. the restricted
    /// growth string of the partition.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Canonical block index of element `e` (1-based).
    pub fn block_of(&self, e: usize) -> usize {
        self.labels[e - 1]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of(a) == self.block_of(b)
    }

    /// Induced subpartition on `elements`, relabeled by the increasing
    /// bijection onto `[|elements|]`.
    pub fn standardize<I>(&self, elements: I) -> Result<SetPartition, PartitionError>
    where
        I: IntoIterator<Item = usize>,
    {
        let elements: BTreeSet<usize> = elements.into_iter().collect();
        if elements.is_empty() {
            return Err(PartitionError::EmptySelection);
        }
        let n = self.n();
        let mut labels = Vec::with_capacity(elements.len());
        for &e in &elements {
            if e == 0 || e > n {
                return Err(PartitionError::OutOfRange { element: e, n });
            }
            labels.push(self.labels[e - 1]);
        }
        Ok(Self::from_labels(&labels))
    }

    /// Restriction to the initial segment `[m]`.
    pub fn restrict(&self, m: usize) -> SetPartition {
        Self::from_labels(&self.labels[..m.min(self.n())])
    }

    /// Parts `(a_1, ..., a_r)` if every block is an interval of consecutive
    /// integers.
    pub fn layered_shape(&self) -> Option<LayeredShape> {
        let mut next = 1;
        let mut parts = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            if b[0] != next || b[b.len() - 1] != next + b.len() - 1 {
                return None;
            }
            next += b.len();
            parts.push(b.len());
        }
        Some(LayeredShape { parts })
    }

    pub fn is_layered(&self) -> bool {
        self.layered_shape().is_some()
    }

    /// If this is the permutation partition of `[2k]` with blocks
    /// `{r, k + sigma(r)}`, returns `sigma` as a 1-based sequence.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        let n = self.n();
        if !n.is_multiple_of(2) {
            return None;
        }
        let k = n / 2;
        let mut sigma = vec![0; k];
        for b in &self.blocks {
            match b.as_slice() {
                &[lo, hi] if lo <= k && hi > k => sigma[lo - 1] = hi - k,
                _ => return None,
            }
        }
        Some(sigma)
    }

    /// The permutation partition of `[2k]` with blocks `{r, k + sigma(r)}`.
    pub fn from_permutation(sigma: &[usize]) -> Result<SetPartition, PartitionError> {
        let k = sigma.len();
        Self::from_blocks(sigma.iter().enumerate().map(|(r, &s)| [r + 1, k + s]))
    }

    /// Number of `i` with `i` and `i + 1` in the same block.
    pub fn sba(&self) -> usize {
        self.labels.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Minimum number of cuts splitting `[n]` into intervals that each hold
    /// at most one element of every block, with the greedy witness.
    pub fn permeability(&self) -> Permeability {
        let mut cuts = Vec::new();
        let mut in_interval = vec![false; self.blocks.len()];
        let mut start = 0;
        for (i, &b) in self.labels.iter().enumerate() {
            if in_interval[b] {
                // cut after element i (1-based position i)
                cuts.push(i);
                for &l in &self.labels[start..i] {
                    in_interval[l] = false;
                }
                start = i;
            }
            in_interval[b] = true;
        }
        Permeability { value: cuts.len(), witness: IntervalCut { n: self.n(), cuts } }
    }

    /// Exhaustive permeability over all cut sets, smallest count first and
    /// lexicographically smallest cut list among ties. Exponential in `n`.
    pub fn permeability_exhaustive(&self) -> Permeability {
        let n = self.n();
        let positions: Vec<usize> = (1..n).collect();
        for size in 0..n.max(1) {
            for cuts in itertools::Itertools::combinations(positions.iter().copied(), size) {
                let cut = IntervalCut { n, cuts };
                if cut.separates(self) {
                    return Permeability { value: size, witness: cut };
                }
            }
        }
        unreachable!("cutting after every element always separates blocks")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n() >= 10 { "," } else { "" };
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition({self})")
    }
}

impl FromStr for SetPartition {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for SetPartition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

type Groups = Vec<(usize, Vec<(usize, usize)>)>;

/// Parses slash notation. Blocks are separated by `/`; elements are single
/// digits (`134/25`) or, when any comma is present, comma-separated integers
/// (`1,10,12/2,3,...`). A comma-free string whose groups are each a single
/// multi-digit integer (`1/2/.../10`) is read in the integer form.
///
/// The empty string parses to the empty partition.
pub fn parse(text: &str) -> Result<SetPartition, ParseError> {
    if text.is_empty() {
        return Ok(SetPartition::empty());
    }
    if text.contains(',') {
        return validate(split_groups(text, true)?);
    }
    let digits = split_groups(text, false).and_then(validate);
    match digits {
        Ok(p) => Ok(p),
        Err(e) => match split_groups(text, true).and_then(validate) {
            Ok(p) => Ok(p),
            Err(_) => Err(e),
        },
    }
}

// Each group is (start offset, [(element, offset)]).
fn split_groups(text: &str, integer_tokens: bool) -> Result<Groups, ParseError> {
    let mut groups = Vec::new();
    let mut offset = 0;
    for group in text.split('/') {
        if group.is_empty() {
            return Err(ParseError::EmptyBlock { position: offset });
        }
        let mut elems = Vec::new();
        if integer_tokens {
            let mut tok_off = offset;
            for tok in group.split(',') {
                let e = parse_element(tok, tok_off)?;
                elems.push((e, tok_off));
                tok_off += tok.len() + 1;
            }
        } else {
            for (i, ch) in group.char_indices() {
                let e = parse_element(&group[i..i + ch.len_utf8()], offset + i)?;
                elems.push((e, offset + i));
            }
        }
        groups.push((offset, elems));
        offset += group.len() + 1;
    }
    Ok(groups)
}

fn parse_element(tok: &str, position: usize) -> Result<usize, ParseError> {
    let malformed = || ParseError::Malformed { token: tok.to_string(), position };
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    match tok.parse::<usize>() {
        Ok(0) | Err(_) => Err(malformed()),
        Ok(e) => Ok(e),
    }
}

fn validate(groups: Groups) -> Result<SetPartition, ParseError> {
    let n = groups.iter().flat_map(|(_, g)| g.iter().map(|&(e, _)| e)).max().unwrap_or(0);
    let mut seen = vec![false; n];
    for &(e, position) in groups.iter().flat_map(|(_, g)| g.iter()) {
        if std::mem::replace(&mut seen[e - 1], true) {
            return Err(ParseError::Duplicate { element: e, position });
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(ParseError::Missing { element: i + 1, n });
    }
    let blocks: Vec<Vec<usize>> =
        groups.into_iter().map(|(_, g)| g.into_iter().map(|(e, _)| e).collect()).collect();
    Ok(SetPartition::from_blocks(blocks).expect("validated above"))
}

/// Composition `(a_1, ..., a_r)` describing the layered partition whose
/// first `a_1` elements form a block, the next `a_2` the next block, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayeredShape {
    parts: Vec<usize>,
}

impl LayeredShape {
    /// Returns `None` if any part is zero.
    pub fn new(parts: Vec<usize>) -> Option<Self> {
        if parts.contains(&0) {
            return None;
        }
        Some(LayeredShape { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Total size `k`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of blocks `r`.
    pub fn num_blocks(&self) -> usize {
        self.parts.len()
    }

    pub fn to_partition(&self) -> SetPartition {
        let mut labels = Vec::with_capacity(self.size());
        for (i, &a) in self.parts.iter().enumerate() {
            labels.extend(std::iter::repeat_n(i, a));
        }
        SetPartition::from_labels(&labels)
    }

    /// All compositions of `k`, in lexicographic order.
    pub fn all_of_size(k: usize) -> Vec<LayeredShape> {
        fn go(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<LayeredShape>) {
            if rest == 0 {
                out.push(LayeredShape { parts: cur.clone() });
                return;
            }
            for a in 1..=rest {
                cur.push(a);
                go(rest - a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(k, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for LayeredShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L(")?;
        for (i, a) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Split of `[n]` into consecutive intervals, cutting after each listed position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCut {
    n: usize,
    cuts: Vec<usize>,
}

impl IntervalCut {
    /// `cuts` must be strictly increasing positions in `1..n`.
    pub fn new(n: usize, cuts: Vec<usize>) -> Option<Self> {
        let sorted = cuts.windows(2).all(|w| w[0] < w[1]);
        let in_range = cuts.iter().all(|&c| c >= 1 && c < n);
        (sorted && in_range).then_some(IntervalCut { n, cuts })
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// The `|cuts| + 1` intervals as inclusive `(first, last)` pairs.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        if self.n == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.cuts.len() + 1);
        let mut start = 1;
        for &c in &self.cuts {
            out.push((start, c));
            start = c + 1;
        }
        out.push((start, self.n));
        out
    }

    /// Whether every interval holds at most one element of each block of `p`.
    pub fn separates(&self, p: &SetPartition) -> bool {
        self.intervals().into_iter().all(|(lo, hi)| {
            let mut seen = vec![false; p.num_blocks()];
            (lo..=hi).all(|e| !std::mem::replace(&mut seen[p.block_of(e)], true))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permeability {
    pub value: usize,
    pub witness: IntervalCut,
}

/// Every partition of `[n]` in restricted-growth-string order.
pub fn all_partitions(n: usize) -> impl Iterator<Item = SetPartition> {
    AllPartitions { rgs: vec![0; n], max: vec![0; n], first: true }
}

struct AllPartitions {
    rgs: Vec<u8>,
    // max[i] = max of rgs[..=i]
    max: Vec<u8>,
    first: bool,
}

impl Iterator for AllPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.first {
            self.first = false;
            return Some(SetPartition::from_rgs(&self.rgs));
        }
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.max[i - 1] {
                self.rgs[i] += 1;
                self.max[i] = self.max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[i];
                }
                return Some(SetPartition::from_rgs(&self.rgs));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        let x = p("134/25");
        assert_eq!(x.n(), 5);
        assert_eq!(x.blocks(), &[vec![1, 3, 4], vec![2, 5]]);
        assert_eq!(p("1").blocks(), &[vec![1]]);
        assert_eq!(p("21/3").to_string(), "12/3");
        assert_eq!(p("25/134").to_string(), "134/25");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(parse("12/2"), Err(ParseError::Duplicate { element: 2, position: 3 }));
        assert_eq!(parse("13"), Err(ParseError::Missing { element: 2, n: 3 }));
        assert_eq!(parse("12//3"), Err(ParseError::EmptyBlock { position: 3 }));
        assert!(matches!(parse("1a/2"), Err(ParseError::Malformed { position: 1, .. })));
        assert!(matches!(parse("10"), Err(ParseError::Malformed { .. })));
        assert!(matches!(parse("1,,2"), Err(ParseError::Malformed { position: 2, .. })));
    }

    #[test]
    fn comma_form_for_large_ground_sets() {
        let x = p("1,10,12/2,3/4/5/6/7/8/9/11");
        assert_eq!(x.n(), 12);
        assert_eq!(x.to_string(), "1,10,12/2,3/4/5/6/7/8/9/11");
        let s = SetPartition::singletons(11);
        assert_eq!(s.to_string(), "1/2/3/4/5/6/7/8/9/10/11");
        assert_eq!(p(&s.to_string()), s);
        assert_eq!(p("1,2/3").to_string(), "12/3");
    }

    #[test]
    fn format_examples() {
        let x = SetPartition::from_blocks([vec![2, 5], vec![1, 3, 4]]).unwrap();
        assert_eq!(x.to_string(), "134/25");
        assert_eq!(SetPartition::from_blocks([vec![1]]).unwrap().to_string(), "1");
        assert_eq!(SetPartition::empty().to_string(), "");
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(p("124/35").standardize([1, 3, 5]).unwrap(), p("1/23"));
        assert_eq!(p("134/25").standardize([2, 5]).unwrap(), p("12"));
        let x = p("134/25");
        assert_eq!(x.standardize(1..=5).unwrap(), x);
        assert_eq!(x.standardize([]), Err(PartitionError::EmptySelection));
        assert!(matches!(x.standardize([6]), Err(PartitionError::OutOfRange { .. })));
    }

    #[test]
    fn layered_examples() {
        assert_eq!(p("12/345/67").layered_shape().unwrap().parts(), &[2, 3, 2]);
        assert_eq!(p("13/245/67").layered_shape(), None);
        assert_eq!(p("1").layered_shape().unwrap().parts(), &[1]);
        assert_eq!(SetPartition::empty().layered_shape().unwrap().parts(), &[] as &[usize]);
        let shape = LayeredShape::new(vec![2, 3, 2]).unwrap();
        assert_eq!(shape.to_partition(), p("12/345/67"));
        assert_eq!(LayeredShape::all_of_size(4).len(), 8);
    }

    #[test]
    fn permutation_partition_examples() {
        assert_eq!(p("13/24").permutation(), Some(vec![1, 2]));
        assert_eq!(p("14/23").permutation(), Some(vec![2, 1]));
        assert_eq!(p("123").permutation(), None);
        assert_eq!(p("12/34").permutation(), None);
        assert_eq!(SetPartition::from_permutation(&[2, 1]).unwrap(), p("14/23"));
    }

    #[test]
    fn sba_examples() {
        assert_eq!(SetPartition::single_block(6).sba(), 5);
        assert_eq!(SetPartition::singletons(6).sba(), 0);
        assert_eq!(p("12/345").sba(), 3);
    }

    #[test]
    fn permeability_examples() {
        for k in 1..=6 {
            let pm = SetPartition::single_block(k).permeability();
            assert_eq!(pm.value, k - 1);
            assert_eq!(SetPartition::single_block(k).permeability_exhaustive().value, k - 1);
            assert_eq!(SetPartition::singletons(k).permeability().value, 0);
        }
        let pm = p("13/24").permeability();
        assert_eq!(pm.value, 1);
        assert_eq!(pm.witness.intervals(), vec![(1, 2), (3, 4)]);
        assert_eq!(p("13/24").permeability_exhaustive().value, 1);
        assert_eq!(SetPartition::empty().permeability().value, 0);
    }

    #[test]
    fn greedy_witness_is_leftmost_maximal() {
        // 12/345: greedy cuts at 1, 3, 4
        let pm = p("12/345").permeability();
        assert_eq!(pm.witness.cuts(), &[1, 3, 4]);
        assert!(pm.witness.separates(&p("12/345")));
    }

    #[test]
    fn all_partitions_counts() {
        let counts: Vec<usize> = (0..=7).map(|n| all_partitions(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203, 877]);
        let three: Vec<String> = all_partitions(3).map(|p| p.to_string()).collect();
        assert_eq!(three, vec!["123", "12/3", "13/2", "1/23", "1/2/3"]);
    }
}
