//! Pattern containment between set partitions.
//!
//! `host` contains `pattern` when some subset of the host's ground set,
//! relabeled increasingly, has exactly the pattern's block structure.
//! Distinct pattern blocks must land in distinct host blocks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{LayeredShape, SetPartition};

/// Increasing map from pattern elements `1..=k` to host elements; `map[i]`
/// is the image of pattern element `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occurrence {
    map: Vec<usize>,
}

impl Occurrence {
    pub fn new(map: Vec<usize>) -> Self {
        Occurrence { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Checks that this is a genuine occurrence of `pattern` in `host`.
    pub fn is_valid(&self, host: &SetPartition, pattern: &SetPartition) -> bool {
        self.map.len() == pattern.n()
            && self.map.windows(2).all(|w| w[0] < w[1])
            && self.map.iter().all(|&e| e >= 1 && e <= host.n())
            && (self.map.is_empty()
                || host.standardize(self.map.iter().copied()).ok().as_ref() == Some(pattern))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainmentError {
    #[error("host has {found} blocks of size >= {min_size}, need {needed}")]
    TooFewBigBlocks { needed: usize, found: usize, min_size: usize },
    #[error("pattern contains 123 at {0:?}")]
    Contains123(Occurrence),
    #[error("pattern contains 12/34 at {0:?}")]
    Contains12Over34(Occurrence),
}

/// Reusable backtracking state over block-label sequences.
pub(crate) struct Matcher {
    pattern: Vec<usize>,
    // pattern block -> host block
    block_map: Vec<usize>,
    host_used: Vec<bool>,
    map: Vec<usize>,
}

const UNMAPPED: usize = usize::MAX;

impl Matcher {
    pub(crate) fn new(pattern: &[usize]) -> Self {
        let pattern_blocks = pattern.iter().max().map_or(0, |m| m + 1);
        Matcher {
            pattern: pattern.to_vec(),
            block_map: vec![UNMAPPED; pattern_blocks],
            host_used: Vec::new(),
            map: vec![0; pattern.len()],
        }
    }

    fn reset(&mut self, host: &[usize]) {
        self.block_map.fill(UNMAPPED);
        let host_blocks = host.iter().max().map_or(0, |m| m + 1);
        self.host_used.clear();
        self.host_used.resize(host_blocks, false);
    }

    /// Finds the lexicographically smallest occurrence in `host`.
    pub(crate) fn find(&mut self, host: &[usize]) -> Option<&[usize]> {
        if self.pattern.len() > host.len() {
            return None;
        }
        self.reset(host);
        if self.extend(host, 0, 0, host.len(), self.pattern.len()) {
            Some(&self.map)
        } else {
            None
        }
    }

    /// Whether some occurrence maps the last pattern element onto the last
    /// host element.
    pub(crate) fn ends_at_last(&mut self, host: &[usize]) -> bool {
        let k = self.pattern.len();
        let m = host.len();
        if k == 0 || k > m {
            return false;
        }
        self.reset(host);
        let hb = host[m - 1];
        self.block_map[self.pattern[k - 1]] = hb;
        self.host_used[hb] = true;
        self.map[k - 1] = m - 1;
        self.extend(host, 0, 0, m - 1, k - 1)
    }

    // Assigns pattern elements j..goal to host positions from..limit.
    fn extend(&mut self, host: &[usize], j: usize, from: usize, limit: usize, goal: usize) -> bool {
        if j == goal {
            return true;
        }
        let pb = self.pattern[j];
        let target = self.block_map[pb];
        // leave room for the remaining goal - j - 1 elements
        let last = limit - (goal - j);
        for pos in from..=last {
            let hb = host[pos];
            if target == UNMAPPED {
                if self.host_used[hb] {
                    continue;
                }
                self.block_map[pb] = hb;
                self.host_used[hb] = true;
                self.map[j] = pos;
                if self.extend(host, j + 1, pos + 1, limit, goal) {
                    return true;
                }
                self.block_map[pb] = UNMAPPED;
                self.host_used[hb] = false;
            } else if hb == target {
                self.map[j] = pos;
                if self.extend(host, j + 1, pos + 1, limit, goal) {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether `host` contains `pattern`. The empty pattern is contained in
/// everything.
pub fn contains(host: &SetPartition, pattern: &SetPartition) -> bool {
    pattern.n() == 0 || Matcher::new(pattern.labels()).find(host.labels()).is_some()
}

/// The lexicographically smallest occurrence of `pattern` in `host`.
pub fn find_occurrence(host: &SetPartition, pattern: &SetPartition) -> Option<Occurrence> {
    let mut m = Matcher::new(pattern.labels());
    m.find(host.labels())
        .map(|positions| Occurrence::new(positions.iter().map(|&p| p + 1).collect()))
}

/// Builds an occurrence of the layered partition `shape` by the greedy
/// block selection: at step `j`, among the remaining big blocks (size at
/// least `k - r + 1`), take the one whose `(a_1 + ... + a_j - (j - 1))`-th
/// smallest element is least, and use its elements ranked
/// `a_1 + ... + a_{j-1} - (j - 2)` through `a_1 + ... + a_j - (j - 1)`.
pub fn layered_witness(
    host: &SetPartition,
    shape: &LayeredShape,
) -> Result<Occurrence, ContainmentError> {
    let k = shape.size();
    let r = shape.num_blocks();
    if r == 0 {
        return Ok(Occurrence::new(Vec::new()));
    }
    let min_size = k - r + 1;
    let mut big: Vec<&[usize]> =
        host.blocks().iter().filter(|b| b.len() >= min_size).map(Vec::as_slice).collect();
    if big.len() < r {
        return Err(ContainmentError::TooFewBigBlocks { needed: r, found: big.len(), min_size });
    }
    let mut image = Vec::with_capacity(k);
    let mut prefix = 0;
    for (j, &a) in shape.parts().iter().enumerate() {
        // 1-based ranks; j is 0-based here and never exceeds prefix
        let lo = prefix + 1 - j;
        let hi = prefix + a - j;
        let pick = (0..big.len()).min_by_key(|&i| big[i][hi - 1]).expect("nonempty");
        let block = big.swap_remove(pick);
        image.extend_from_slice(&block[lo - 1..hi]);
        prefix += a;
    }
    debug_assert!(image.windows(2).all(|w| w[0] < w[1]));
    Ok(Occurrence::new(image))
}

/// A permutation partition together with an occurrence of the pattern it
/// was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    /// `sigma(r)` for `r = 1..=k`, 1-based.
    pub sigma: Vec<usize>,
    pub permutation_partition: SetPartition,
    pub occurrence: Occurrence,
}

/// Embeds a pattern avoiding `123` and `12/34` into a permutation partition.
///
/// Every block has at most two elements and all 2-blocks straddle a
/// half-integer `c`, taken just above the largest 2-block minimum. Each
/// singleton below `c` is completed with a fresh value above the current
/// maximum; each singleton above `c` with a fresh value below the current
/// minimum. Singletons are completed in ascending order.
pub fn embed_into_permutation_partition(
    pattern: &SetPartition,
) -> Result<Embedding, ContainmentError> {
    let p123 = SetPartition::single_block(3);
    if let Some(occ) = find_occurrence(pattern, &p123) {
        return Err(ContainmentError::Contains123(occ));
    }
    let p12_34 = LayeredShape::new(vec![2, 2]).expect("positive parts").to_partition();
    if let Some(occ) = find_occurrence(pattern, &p12_34) {
        return Err(ContainmentError::Contains12Over34(occ));
    }

    // work in doubled coordinates so c is an odd integer
    let c =
        2 * pattern.blocks().iter().filter(|b| b.len() == 2).map(|b| b[0]).max().unwrap_or(0) + 1;
    let mut hi = 2 * pattern.n() as i64;
    let mut lo = 2;
    let c = c as i64;
    // (value, is original element) pairs, grouped by block
    let mut blocks: Vec<[i64; 2]> = Vec::with_capacity(pattern.num_blocks());
    for b in pattern.blocks() {
        let v = 2 * b[0] as i64;
        match b.len() {
            2 => blocks.push([v, 2 * b[1] as i64]),
            _ if v < c => {
                hi += 2;
                blocks.push([v, hi]);
            }
            _ => {
                lo -= 2;
                blocks.push([lo, v]);
            }
        }
    }

    let mut values: Vec<i64> = blocks.iter().flatten().copied().collect();
    values.sort_unstable();
    let rank = |v: i64| values.binary_search(&v).expect("present") + 1;
    let k = blocks.len();
    let mut sigma = vec![0; k];
    for [below, above] in &blocks {
        sigma[rank(*below) - 1] = rank(*above) - k;
    }
    let occurrence = Occurrence::new((1..=pattern.n()).map(|e| rank(2 * e as i64)).collect());
    let permutation_partition =
        SetPartition::from_permutation(&sigma).expect("sigma is a permutation");
    Ok(Embedding { sigma, permutation_partition, occurrence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::all_partitions;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&p("124/35"), &p("1/23")));
        assert!(!contains(&SetPartition::single_block(6), &p("1/2")));
        assert!(!contains(&p("13/24"), &p("12/34")));
        assert!(contains(&p("12"), &SetPartition::empty()));
    }

    #[test]
    fn witness_examples() {
        assert_eq!(find_occurrence(&p("124/35"), &p("1/23")).unwrap().map(), &[1, 3, 5]);
        let x = p("134/25");
        assert_eq!(find_occurrence(&x, &x).unwrap().map(), &[1, 2, 3, 4, 5]);
        assert_eq!(find_occurrence(&p("123/456"), &p("12/34")).unwrap().map(), &[1, 2, 4, 5]);
        assert_eq!(find_occurrence(&p("13/24"), &p("12/34")), None);
    }

    #[test]
    fn witnesses_standardize_to_pattern() {
        let pattern = p("13/2");
        for host in all_partitions(6) {
            if let Some(occ) = find_occurrence(&host, &pattern) {
                assert!(occ.is_valid(&host, &pattern), "{host} {occ:?}");
            }
        }
    }

    #[test]
    fn ends_at_last_only_sees_new_element() {
        let pat = p("12");
        let mut m = Matcher::new(pat.labels());
        assert!(!m.ends_at_last(p("12/3").labels()));
        assert!(m.ends_at_last(p("13/2").labels()));
    }

    #[test]
    fn layered_witness_examples() {
        let shape = LayeredShape::new(vec![2, 2]).unwrap();
        assert_eq!(layered_witness(&p("123/456"), &shape).unwrap().map(), &[1, 2, 5, 6]);
        let occ = layered_witness(&p("135/246"), &shape).unwrap();
        assert_eq!(occ.map(), &[1, 3, 4, 6]);
        assert!(occ.is_valid(&p("135/246"), &p("12/34")));
        let one = LayeredShape::new(vec![4]).unwrap();
        assert_eq!(
            layered_witness(&SetPartition::single_block(6), &one).unwrap().map(),
            &[1, 2, 3, 4]
        );
        assert_eq!(
            layered_witness(&p("12/34"), &shape),
            Err(ContainmentError::TooFewBigBlocks { needed: 2, found: 0, min_size: 3 })
        );
    }

    #[test]
    fn embed_examples() {
        let e = embed_into_permutation_partition(&p("12")).unwrap();
        assert_eq!(e.sigma, vec![1]);
        assert_eq!(e.permutation_partition, p("12"));
        assert_eq!(e.occurrence.map(), &[1, 2]);

        let e = embed_into_permutation_partition(&p("1/23")).unwrap();
        assert_eq!(e.sigma, vec![2, 1]);
        assert_eq!(e.permutation_partition, p("14/23"));
        assert_eq!(e.occurrence.map(), &[1, 2, 3]);
        assert!(e.occurrence.is_valid(&e.permutation_partition, &p("1/23")));

        assert_eq!(
            embed_into_permutation_partition(&p("123")),
            Err(ContainmentError::Contains123(Occurrence::new(vec![1, 2, 3])))
        );
        assert!(matches!(
            embed_into_permutation_partition(&p("12/34")),
            Err(ContainmentError::Contains12Over34(_))
        ));
    }

    #[test]
    fn embed_handles_singletons_on_both_sides() {
        for pattern in ["1/2", "1", "1/2/3", "13/2", "1/24/3", "14/2/3"] {
            let pattern = p(pattern);
            let e = embed_into_permutation_partition(&pattern).unwrap();
            assert!(e.permutation_partition.permutation().is_some());
            assert!(e.occurrence.is_valid(&e.permutation_partition, &pattern), "{pattern}");
        }
    }
}
