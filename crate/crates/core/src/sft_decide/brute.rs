//! Cylinder-resolution semi-oracle.
//!
//! Words of a vertex shift are walks, and the continuations of a word depend
//! only on its last letter, so every quantifier over admissible words of
//! length `D` collapses to a quantifier over the pairs (first, last) they
//! realise. Everything here is bounded set iteration and walk counting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::SftSystem;

pub const DEFAULT_DEPTH: usize = 12;
pub const DEFAULT_PERIOD_BOUND: usize = 12;

/// Answers at cylinder resolution; `None` marks a field whose caps were hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderProfile {
    pub depth: usize,
    pub period_bound: usize,
    pub tt: Option<bool>,
    pub dpp: Option<bool>,
    pub min: Option<bool>,
    pub sensitive: Option<bool>,
    pub infinite: Option<bool>,
}

pub fn brute_force_profile(s: &SftSystem, depth: usize, period_bound: usize) -> Result<CylinderProfile> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let n = s.alphabet_size();
    let alive = s.trimmed_vertices();
    let step = |set: &BTreeSet<usize>| -> BTreeSet<usize> { set.iter().flat_map(|&v| s.successors(v).iter().copied()).collect() };

    // ends[f] = last letters of depth-D words starting at f.
    let ends: Vec<BTreeSet<usize>> = (0..n)
        .map(|f| {
            let mut cur = if s.is_alive(f) { BTreeSet::from([f]) } else { BTreeSet::new() };
            for _ in 1..depth {
                cur = step(&cur);
            }
            cur
        })
        .collect();
    let lasts: BTreeSet<usize> = ends.iter().flatten().copied().collect();

    // reach[a][L] = vertices at the end of a walk of exactly L edges from a, L ≤ n + period_bound.
    let horizon = n + period_bound + 1;
    let reach: Vec<Vec<BTreeSet<usize>>> = (0..n)
        .map(|a| {
            let mut levels = vec![BTreeSet::from([a])];
            for _ in 0..horizon {
                let next = step(levels.last().unwrap());
                levels.push(next);
            }
            levels
        })
        .collect();
    let reaches_in = |a: usize, b: usize, lo: usize, hi: usize| (lo..=hi).any(|l| reach[a][l].contains(&b));

    // Every depth-D word can be followed by every other one.
    let tt = lasts.iter().all(|&a| alive.iter().all(|&b| reaches_in(a, b, 1, n)));

    // Every depth-D word u closes into a periodic walk u·v·u·v… of period ≤ D + P.
    let dpp = alive.iter().all(|&f| ends[f].iter().all(|&l| reaches_in(l, f, 1, period_bound + 1)));

    // Every depth-D word has two continuations that split within P more letters.
    let sensitive = match lasts.iter().map(|&l| walk_count(s, l, period_bound)).collect::<Option<Vec<_>>>() {
        Some(counts) => Some(counts.iter().all(|&c| c >= 2)),
        None => None,
    };

    let total = |len: usize| -> Option<u128> {
        alive.iter().try_fold(0u128, |acc, &v| acc.checked_add(walk_count(s, v, len - 1)?))
    };
    let infinite = match (total(depth), total(depth + 1)) {
        (Some(a), Some(b)) => Some(b > a),
        _ => None,
    };

    let min = total(depth + period_bound).map(|count| {
        let cycle = greedy_cycle(s, alive[0]);
        count == cycle.len() as u128
    });

    Ok(CylinderProfile { depth, period_bound, tt: Some(tt), dpp: Some(dpp), min, sensitive, infinite })
}

/// Number of walks with `edges` edges starting at `v`; `None` on overflow.
fn walk_count(s: &SftSystem, v: usize, edges: usize) -> Option<u128> {
    let n = s.alphabet_size();
    let mut counts = vec![0u128; n];
    counts[v] = 1;
    for _ in 0..edges {
        let mut next = vec![0u128; n];
        for a in 0..n {
            if counts[a] != 0 {
                for &b in s.successors(a) {
                    next[b] = next[b].checked_add(counts[a])?;
                }
            }
        }
        counts = next;
    }
    counts.iter().try_fold(0u128, |acc, &c| acc.checked_add(c))
}

/// Follows first successors from `v` until a vertex repeats; returns the loop.
fn greedy_cycle(s: &SftSystem, v: usize) -> Vec<usize> {
    let mut walk = vec![v];
    loop {
        let next = s.successors(*walk.last().unwrap())[0];
        if let Some(i) = walk.iter().position(|&w| w == next) {
            return walk[i..].to_vec();
        }
        walk.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_graphs_at_default_resolution() {
        let full = brute_force_profile(&SftSystem::full_shift(2).unwrap(), 12, 12).unwrap();
        assert_eq!((full.tt, full.dpp, full.sensitive, full.min), (Some(true), Some(true), Some(true), Some(false)));
        assert_eq!(full.infinite, Some(true));

        let cyc = brute_force_profile(&SftSystem::cycle(3).unwrap(), 12, 12).unwrap();
        assert_eq!((cyc.tt, cyc.dpp, cyc.min, cyc.sensitive), (Some(true), Some(true), Some(true), Some(false)));
        assert_eq!(cyc.infinite, Some(false));

        let ab = brute_force_profile(&SftSystem::new(2, [(0, 1), (1, 1)]).unwrap(), 12, 12).unwrap();
        assert_eq!((ab.tt, ab.dpp), (Some(false), Some(false)));
    }

    #[test]
    fn walk_counts() {
        let full = SftSystem::full_shift(2).unwrap();
        assert_eq!(walk_count(&full, 0, 10), Some(1024));
        let big = SftSystem::full_shift(16).unwrap();
        assert_eq!(walk_count(&big, 0, 40), None);
        let gm = SftSystem::new(2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        // Fibonacci numbers.
        assert_eq!(walk_count(&gm, 0, 5), Some(13));
    }

    #[test]
    fn rejects_zero_depth() {
        assert!(brute_force_profile(&SftSystem::cycle(2).unwrap(), 0, 4).is_err());
    }
}
