//! Zero sets reachable from the filled half line `(-∞, -1]` with a frozen
//! zero at the origin, when at most `n` zeros may coexist.
//!
//! A state is a bitmask of zeros: bit `i` is site `-(i + 1)`. The box holds
//! `2^n + 1` sites, two more than the deepest reachable zero, so the depth
//! found by the search is never an artefact of the box edge.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_BUDGET: u32 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReachResult {
    pub n: u32,
    /// Depth of the leftmost zero over `V(n)`.
    pub ell: u32,
    /// `|V(n, k)|` for `k = 0..=n`.
    pub counts: Vec<u64>,
    pub total: u64,
    /// `ℓ̃(n, k)` for `k = 1..=n`.
    pub ell_tilde: Vec<u32>,
    /// Largest BFS distance from the filled state.
    pub bfs_depth: u32,
    pub states_visited: u64,
    pub box_len: u32,
    /// `2^{n(n-1)/2} n! (0.7)^n`.
    pub cardinality_bound: f64,
    pub bound_holds: bool,
}

/// Visited states with their BFS distance.
#[derive(Debug, Clone)]
pub struct ReachSet {
    pub n: u32,
    pub box_len: u32,
    pub distance: BTreeMap<u64, u32>,
}

fn check_budget(n: u32) -> Result<()> {
    if !(1..=MAX_BUDGET).contains(&n) {
        return Err(Error::UnsupportedSize {
            got: n as usize,
            min: 1,
            max: MAX_BUDGET as usize,
        });
    }
    Ok(())
}

/// Sites whose flip is legal from `z`: the rightmost site, and every site
/// whose right neighbour is empty.
pub fn legal_moves(z: u64, box_len: u32) -> impl Iterator<Item = u32> {
    (0..box_len).filter(move |&i| i == 0 || (z >> (i - 1)) & 1 == 1)
}

/// Breadth-first search over zero sets in a box of `box_len` sites.
pub fn explore(n: u32, box_len: u32) -> Result<ReachSet> {
    check_budget(n)?;
    if box_len == 0 || box_len > 64 {
        return Err(Error::UnsupportedSize {
            got: box_len as usize,
            min: 1,
            max: 64,
        });
    }
    let mut distance = BTreeMap::new();
    let mut queue = VecDeque::new();
    distance.insert(0u64, 0u32);
    queue.push_back(0u64);
    while let Some(z) = queue.pop_front() {
        let d = distance[&z];
        for i in legal_moves(z, box_len) {
            let t = z ^ (1u64 << i);
            if t.count_ones() > n {
                continue;
            }
            if let alloc::collections::btree_map::Entry::Vacant(e) = distance.entry(t) {
                e.insert(d + 1);
                queue.push_back(t);
            }
        }
    }
    Ok(ReachSet { n, box_len, distance })
}

fn depth(z: u64) -> u32 {
    64 - z.leading_zeros()
}

/// `2^{n(n-1)/2} n! c^n` with `c = 0.7`.
pub fn cardinality_bound(n: u32) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let mut b = fact;
    for _ in 0..n * (n.saturating_sub(1)) / 2 {
        b *= 2.0;
    }
    for _ in 0..n {
        b *= 0.7;
    }
    b
}

pub fn enumerate_reachable(n: u32) -> Result<ReachResult> {
    check_budget(n)?;
    let set = explore(n, (1 << n) + 1)?;
    let mut counts = vec![0u64; n as usize + 1];
    let mut ell_tilde = vec![0u32; n as usize + 1];
    let mut bfs_depth = 0;
    for (&z, &d) in &set.distance {
        let k = z.count_ones() as usize;
        counts[k] += 1;
        ell_tilde[k] = ell_tilde[k].max(depth(z));
        bfs_depth = bfs_depth.max(d);
    }
    let ell = ell_tilde.iter().copied().max().unwrap_or(0);
    if ell >= set.box_len {
        return Err(Error::Inconsistent("a zero reached the edge of the box".into()));
    }
    let total = set.distance.len() as u64;
    let bound = cardinality_bound(n);
    Ok(ReachResult {
        n,
        ell,
        counts,
        total,
        ell_tilde: ell_tilde[1..].to_vec(),
        bfs_depth,
        states_visited: total,
        box_len: set.box_len,
        cardinality_bound: bound,
        bound_holds: total as f64 <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Barrier {
    Reachable,
    Unreachable,
}

/// Whether a zero at depth `ell_target` is reachable within budget `n`,
/// decided from the search alone.
pub fn certify_energy_barrier(ell_target: u32, n: u32) -> Result<Barrier> {
    if ell_target == 0 || ell_target > 63 {
        return Err(Error::OutOfRange {
            name: "ell_target",
            value: ell_target as f64,
            expected: "1..=63",
        });
    }
    let box_len = ((1u32 << n) + 1).max(ell_target + 1);
    let set = explore(n, box_len)?;
    let hit = set.distance.keys().any(|&z| (z >> (ell_target - 1)) & 1 == 1);
    Ok(if hit { Barrier::Reachable } else { Barrier::Unreachable })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_one() {
        let r = enumerate_reachable(1).unwrap();
        assert_eq!(r.ell, 1);
        assert_eq!(r.total, 2);
        assert_eq!(r.counts, [1, 1]);
    }

    #[test]
    fn budget_two_by_hand() {
        // {}, {-1}, {-1,-2}, {-2}, {-2,-3}; the last cannot lose -2 without a third zero
        let r = enumerate_reachable(2).unwrap();
        assert_eq!(r.ell, 3);
        assert_eq!(r.total, 5);
        assert_eq!(r.ell_tilde, [2, 3]);
    }

    #[test]
    fn depths_and_recursion() {
        let results: Vec<ReachResult> = (1..=4).map(|n| enumerate_reachable(n).unwrap()).collect();
        for r in &results {
            assert_eq!(r.ell, (1 << r.n) - 1);
            assert_eq!(r.ell, *r.ell_tilde.last().unwrap());
            for w in r.ell_tilde.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
        for w in results.windows(2) {
            assert_eq!(w[1].ell_tilde[0], *w[0].ell_tilde.last().unwrap() + 1);
        }
    }

    #[test]
    fn visited_set_is_closed_and_reversible() {
        for n in 1..=4 {
            let set = explore(n, (1 << n) + 1).unwrap();
            for &z in set.distance.keys() {
                for i in legal_moves(z, set.box_len) {
                    let t = z ^ (1 << i);
                    if t.count_ones() > n {
                        continue;
                    }
                    assert!(set.distance.contains_key(&t));
                    assert!(legal_moves(t, set.box_len).any(|j| j == i));
                }
            }
        }
    }

    #[test]
    fn budgets_are_nested() {
        for n in 2..=4 {
            let small = explore(n - 1, (1 << (n - 1)) + 1).unwrap();
            let big = explore(n, (1 << n) + 1).unwrap();
            assert!(small.distance.keys().all(|z| big.distance.contains_key(z)));
        }
    }

    #[test]
    fn barrier_examples() {
        assert_eq!(certify_energy_barrier(8, 3).unwrap(), Barrier::Unreachable);
        assert_eq!(certify_energy_barrier(7, 3).unwrap(), Barrier::Reachable);
        assert_eq!(certify_energy_barrier(1, 1).unwrap(), Barrier::Reachable);
        assert!(certify_energy_barrier(0, 1).is_err());
        assert!(enumerate_reachable(0).is_err());
        assert!(enumerate_reachable(6).is_err());
    }
}
