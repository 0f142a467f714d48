//! Set partitions, Bell numbers, and Stirling numbers of the second kind.
//!
//! The observable of a smells round is the pattern of which parties obtained
//! equal outcomes, i.e. a partition of the party set. Partitions are kept in
//! canonical restricted-growth-string (RGS) form: `rgs[i]` is the index of the
//! block containing element `i`, blocks numbered by first appearance, so
//! `rgs[0] == 0` and `rgs[i] <= 1 + max(rgs[..i])`. Two partitions are equal
//! iff their strings are equal.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::Count;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("partition of an empty set is not representable")]
    Empty,
    #[error("invalid restricted-growth string at position {0}")]
    NotRestrictedGrowth(usize),
    #[error("cannot parse partition {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("partition enumeration for n = {n} would produce {count} partitions, cap is {cap}")]
    TooMany { n: usize, count: Count, cap: u64 },
}

/// A partition of `{0, .., n-1}` in canonical restricted-growth form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    rgs: Vec<u8>,
}

impl SetPartition {
    /// Builds a partition from a restricted-growth string, validating it.
    pub fn from_rgs(rgs: Vec<u8>) -> Result<Self, PartitionError> {
        if rgs.is_empty() {
            return Err(PartitionError::Empty);
        }
        let mut max_seen: i32 = -1;
        for (i, &v) in rgs.iter().enumerate() {
            if i32::from(v) > max_seen + 1 {
                return Err(PartitionError::NotRestrictedGrowth(i));
            }
            max_seen = max_seen.max(i32::from(v));
        }
        Ok(SetPartition { rgs })
    }

    /// The single-block partition of an `n`-set.
    pub fn all_in_one(n: usize) -> Self {
        assert!(n > 0);
        SetPartition { rgs: vec![0; n] }
    }

    /// The all-singletons partition of an `n`-set.
    pub fn all_singletons(n: usize) -> Self {
        assert!(n > 0 && n <= u8::MAX as usize);
        SetPartition {
            rgs: (0..n as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rgs(&self) -> &[u8] {
        &self.rgs
    }

    /// Number of blocks.
    pub fn block_count(&self) -> usize {
        usize::from(*self.rgs.iter().max().expect("non-empty")) + 1
    }

    /// Blocks as sorted index lists, ordered by smallest element (which is the
    /// block-number order for an RGS).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[usize::from(b)].push(i);
        }
        blocks
    }

    /// True iff elements `i` and `j` share a block.
    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.rgs[i] == self.rgs[j]
    }

    /// The single-block partition, `ALL` in the text syntax.
    pub fn is_all_in_one(&self) -> bool {
        self.rgs.iter().all(|&b| b == 0)
    }

    /// The all-singletons partition. Its probability coordinate is dropped by
    /// normalization, so reduced behaviors never carry it.
    pub fn is_all_singletons(&self) -> bool {
        self.rgs.iter().enumerate().all(|(i, &b)| usize::from(b) == i)
    }

    /// Relabels elements through `perm` (element `i` becomes `perm[i]`) and
    /// recanonicalizes.
    pub fn permuted(&self, perm: &[usize]) -> SetPartition {
        let n = self.rgs.len();
        debug_assert_eq!(perm.len(), n);
        let mut moved = vec![0u8; n];
        for (i, &b) in self.rgs.iter().enumerate() {
            moved[perm[i]] = b;
        }
        canonicalize(&moved)
    }
}

/// Canonical RGS of an arbitrary block-label sequence.
fn canonicalize(labels: &[u8]) -> SetPartition {
    let mut map: Vec<Option<u8>> = vec![None; labels.len().max(usize::from(u8::MAX) + 1)];
    let mut next: u8 = 0;
    let mut rgs = Vec::with_capacity(labels.len());
    for &l in labels {
        let id = match map[usize::from(l)] {
            Some(id) => id,
            None => {
                let id = next;
                map[usize::from(l)] = Some(id);
                next += 1;
                id
            }
        };
        rgs.push(id);
    }
    SetPartition { rgs }
}

/// Equality pattern of a tuple of outcome labels: `i` and `j` share a block
/// iff `outcomes[i] == outcomes[j]`. Invariant under any bijective relabeling
/// of the outcome values.
pub fn pattern_of_outcomes<T: PartialEq>(outcomes: &[T]) -> SetPartition {
    assert!(!outcomes.is_empty(), "pattern of an empty tuple");
    let mut rgs: Vec<u8> = Vec::with_capacity(outcomes.len());
    let mut reps: Vec<&T> = Vec::new();
    for o in outcomes {
        match reps.iter().position(|r| *r == o) {
            Some(b) => rgs.push(b as u8),
            None => {
                rgs.push(reps.len() as u8);
                reps.push(o);
            }
        }
    }
    SetPartition { rgs }
}

/// The n-th Bell number, by the Bell-triangle recurrence.
pub fn bell_number(n: usize) -> Count {
    if n == 0 {
        return BigUint::one();
    }
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("non-empty").clone());
        for v in &row {
            let last = next.last().expect("non-empty").clone();
            next.push(last + v);
        }
        row = next;
    }
    row.last().expect("non-empty").clone()
}

/// Stirling number of the second kind: partitions of an n-set into exactly k
/// non-empty blocks. `S(0,0) = 1`, `S(n,k) = 0` for `k > n`.
pub fn stirling2(n: usize, k: usize) -> Count {
    if k > n {
        return BigUint::zero();
    }
    if n == 0 {
        return BigUint::one();
    }
    if k == 0 {
        return BigUint::zero();
    }
    let mut prev = vec![BigUint::zero(); k + 1];
    prev[0] = BigUint::one();
    for i in 1..=n {
        let mut curr = vec![BigUint::zero(); k + 1];
        let limit = usize::min(i, k);
        for j in 1..=limit {
            curr[j] = prev[j - 1].clone() + &prev[j] * BigUint::from(j);
        }
        prev = curr;
    }
    prev[k].clone()
}

/// Default guard for [`enumerate_partitions`].
pub const MAX_ENUMERATED_PARTITIONS: u64 = 5_000_000;

/// All partitions of `{0,..,n-1}` in lexicographic RGS order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>, PartitionError> {
    enumerate_partitions_capped(n, MAX_ENUMERATED_PARTITIONS)
}

/// All partitions of `{0,..,n-1}` in lexicographic RGS order, with an explicit
/// guard on the Bell number.
pub fn enumerate_partitions_capped(n: usize, cap: u64) -> Result<Vec<SetPartition>, PartitionError> {
    if n == 0 {
        return Err(PartitionError::Empty);
    }
    let count = bell_number(n);
    if count > BigUint::from(cap) {
        return Err(PartitionError::TooMany { n, count, cap });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0u8; n];
    loop {
        out.push(SetPartition { rgs: rgs.clone() });
        // next RGS in lexicographic order
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// The non-trivial partitions of an `n`-set — every partition except
/// all-singletons — in lexicographic RGS order. These index the reduced
/// behavior coordinates.
pub fn nontrivial_partitions(n: usize) -> Vec<SetPartition> {
    enumerate_partitions(n)
        .expect("party counts are tiny")
        .into_iter()
        .filter(|p| !p.is_all_singletons())
        .collect()
}

impl fmt::Display for SetPartition {
    /// Text syntax: blocks of zero-based indices joined without separators,
    /// blocks separated by `|`, sorted by smallest element; `ALL` for the
    /// single-block partition.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all_in_one() {
            return write!(f, "ALL");
        }
        let blocks = self.blocks();
        let mut first = true;
        for block in blocks {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            for e in block {
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: &str| PartitionError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Err(parse_err("empty string"));
        }
        if s == "ALL" {
            // Size is ambiguous from the text alone; caller resizes via
            // `parse_partition_sized`. Treat bare ALL as an error here.
            return Err(parse_err("ALL needs an element count, use parse_partition_sized"));
        }
        let mut elements: Vec<(usize, u8)> = Vec::new();
        for (bi, block) in s.split('|').enumerate() {
            if block.is_empty() {
                return Err(parse_err("empty block"));
            }
            if bi > usize::from(u8::MAX) {
                return Err(parse_err("too many blocks"));
            }
            for ch in block.chars() {
                let d = ch
                    .to_digit(10)
                    .ok_or_else(|| parse_err("element indices must be single digits 0-9"))?;
                elements.push((d as usize, bi as u8));
            }
        }
        let n = elements.len();
        let mut labels = vec![None; n];
        for (e, b) in elements {
            if e >= n {
                return Err(parse_err("element index out of range"));
            }
            if labels[e].is_some() {
                return Err(parse_err("duplicate element"));
            }
            labels[e] = Some(b);
        }
        let raw: Vec<u8> = labels.into_iter().map(|l| l.expect("all seen")).collect();
        Ok(canonicalize(&raw))
    }
}

/// Parses the partition text syntax for a known element count, accepting the
/// `ALL` shorthand.
pub fn parse_partition_sized(s: &str, n: usize) -> Result<SetPartition, PartitionError> {
    if s == "ALL" {
        if n == 0 {
            return Err(PartitionError::Empty);
        }
        return Ok(SetPartition::all_in_one(n));
    }
    let p: SetPartition = s.parse()?;
    if p.len() != n {
        return Err(PartitionError::Parse {
            input: s.to_string(),
            reason: format!("partition covers {} elements, scenario has {}", p.len(), n),
        });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: all partitions of an n-set by recursive block
    /// assignment, without the RGS machinery.
    fn brute_force_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if i == n {
                out.push(blocks.clone());
                return;
            }
            for b in 0..blocks.len() {
                blocks[b].push(i);
                go(i + 1, n, blocks, out);
                blocks[b].pop();
            }
            blocks.push(vec![i]);
            go(i + 1, n, blocks, out);
            blocks.pop();
        }
        let mut out = Vec::new();
        go(0, n, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn bell_numbers_match_brute_force() {
        for n in 1..=8 {
            let brute = brute_force_patterns_count(n);
            assert_eq!(bell_number(n), BigUint::from(brute), "n = {n}");
        }
        assert_eq!(bell_number(0), BigUint::one());
        assert_eq!(bell_number(1), BigUint::one());
        assert_eq!(bell_number(3), BigUint::from(5u32));
        assert_eq!(bell_number(4), BigUint::from(15u32));
    }

    fn brute_force_patterns_count(n: usize) -> u64 {
        brute_force_partitions(n).len() as u64
    }

    #[test]
    fn stirling_matches_brute_force() {
        for n in 0..=7 {
            let by_blocks = brute_force_partitions(n);
            for k in 0..=n + 1 {
                let brute = by_blocks.iter().filter(|p| p.len() == k).count() as u64;
                // n = 0: brute_force gives one empty partition with 0 blocks
                let expected = if n == 0 && k == 0 { 1 } else { brute };
                assert_eq!(stirling2(n, k), BigUint::from(expected), "S({n},{k})");
            }
        }
        assert_eq!(stirling2(4, 2), BigUint::from(7u32));
        assert_eq!(stirling2(5, 1), BigUint::one());
        assert_eq!(stirling2(3, 5), BigUint::zero());
    }

    #[test]
    fn stirling_recurrence() {
        for n in 1..=12 {
            for k in 1..=n {
                let lhs = stirling2(n, k);
                let rhs = stirling2(n - 1, k) * BigUint::from(k) + stirling2(n - 1, k - 1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bell_is_stirling_row_sum() {
        for n in 0..=12 {
            let sum: BigUint = (0..=n).map(|k| stirling2(n, k)).sum();
            assert_eq!(bell_number(n), sum, "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_complete_sorted_and_unique() {
        for n in 1..=7 {
            let parts = enumerate_partitions(n).unwrap();
            assert_eq!(BigUint::from(parts.len() as u64), bell_number(n));
            for w in parts.windows(2) {
                assert!(w[0] < w[1], "lexicographic order violated at n = {n}");
            }
            for p in &parts {
                SetPartition::from_rgs(p.rgs().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn enumeration_small_cases() {
        let p1 = enumerate_partitions(1).unwrap();
        assert_eq!(p1, vec![SetPartition::all_in_one(1)]);
        let p2 = enumerate_partitions(2).unwrap();
        assert_eq!(
            p2,
            vec![
                SetPartition::from_rgs(vec![0, 0]).unwrap(),
                SetPartition::from_rgs(vec![0, 1]).unwrap(),
            ]
        );
        let p3 = enumerate_partitions(3).unwrap();
        assert_eq!(p3.len(), 5);
        assert!(p3[0].is_all_in_one());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let err = enumerate_partitions_capped(10, 1000).unwrap_err();
        match err {
            PartitionError::TooMany { n, .. } => assert_eq!(n, 10),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pattern_examples() {
        assert!(pattern_of_outcomes(&[5, 5, 5]).is_all_in_one());
        assert_eq!(
            pattern_of_outcomes(&[0, 1, 0]),
            SetPartition::from_rgs(vec![0, 1, 0]).unwrap()
        );
        assert!(pattern_of_outcomes(&[2, 7]).is_all_singletons());
    }

    #[test]
    fn display_and_parse_round_trip() {
        for n in 1..=6 {
            for p in enumerate_partitions(n).unwrap() {
                let text = p.to_string();
                let back = parse_partition_sized(&text, n).unwrap();
                assert_eq!(back, p, "round trip of {text}");
            }
        }
        assert_eq!(
            SetPartition::from_rgs(vec![0, 1, 0]).unwrap().to_string(),
            "02|1"
        );
        assert_eq!(SetPartition::all_in_one(4).to_string(), "ALL");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<SetPartition>().is_err());
        assert!("0|".parse::<SetPartition>().is_err());
        assert!("00|1".parse::<SetPartition>().is_err());
        assert!("02|3".parse::<SetPartition>().is_err());
        assert!("0a|1".parse::<SetPartition>().is_err());
        assert!(parse_partition_sized("01|2", 4).is_err());
    }

    #[test]
    fn invalid_rgs_rejected() {
        assert!(SetPartition::from_rgs(vec![1, 0]).is_err());
        assert!(SetPartition::from_rgs(vec![0, 2]).is_err());
        assert!(SetPartition::from_rgs(vec![]).is_err());
    }

    #[test]
    fn relabeling_invariance() {
        // any bijective relabeling of outcome values leaves the pattern fixed
        let outcomes = [3u8, 1, 3, 2, 1];
        let base = pattern_of_outcomes(&outcomes);
        let relabel = |v: u8| match v {
            1 => 7,
            2 => 0,
            3 => 9,
            _ => v,
        };
        let relabeled: Vec<u8> = outcomes.iter().map(|&v| relabel(v)).collect();
        assert_eq!(pattern_of_outcomes(&relabeled), base);
    }
}
