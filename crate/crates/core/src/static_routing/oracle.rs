//! Exact minimum makespan for tiny static instances.
//!
//! A state is the number of hops each packet has completed; the time left
//! from a state does not depend on the clock, so the search memoizes
//! `best(state)` and prunes children whose admissible lower bound (longest
//! remaining path, heaviest remaining edge load) cannot beat the incumbent.
//! Every step tries every combination of "one contender or nobody" per
//! edge, skipping only the all-idle step, which is strictly dominated.

use std::collections::HashMap;

use super::StaticInstance;
use crate::network::EdgeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleResult {
    Optimal(u64),
    ExceedsCap,
}

impl OracleResult {
    pub fn optimal(self) -> Option<u64> {
        match self {
            OracleResult::Optimal(t) => Some(t),
            OracleResult::ExceedsCap => None,
        }
    }
}

struct Search<'a> {
    paths: Vec<&'a [EdgeId]>,
    /// Packets with identical paths, used to canonicalize states.
    groups: Vec<Vec<usize>>,
    edge_count: usize,
    memo: HashMap<Vec<u8>, u32>,
}

impl Search<'_> {
    fn canonical(&self, hops: &mut [u8]) {
        for g in &self.groups {
            let mut vals: Vec<u8> = g.iter().map(|&i| hops[i]).collect();
            vals.sort_unstable();
            for (&i, v) in g.iter().zip(vals) {
                hops[i] = v;
            }
        }
    }

    fn lower_bound(&self, hops: &[u8]) -> u32 {
        let mut load = vec![0u32; self.edge_count];
        let mut longest = 0;
        for (p, &h) in self.paths.iter().zip(hops) {
            let rest = &p[h as usize..];
            longest = longest.max(rest.len() as u32);
            for e in rest {
                load[e.0] += 1;
            }
        }
        longest.max(load.into_iter().max().unwrap_or(0))
    }

    /// Minimum number of further steps from `hops`.
    fn best(&mut self, hops: &[u8]) -> u32 {
        if hops.iter().zip(&self.paths).all(|(&h, p)| h as usize == p.len()) {
            return 0;
        }
        if let Some(&v) = self.memo.get(hops) {
            return v;
        }

        // contenders per edge
        let mut waiting: Vec<(EdgeId, Vec<usize>)> = Vec::new();
        for (i, (&h, p)) in hops.iter().zip(&self.paths).enumerate() {
            if let Some(&e) = p.get(h as usize) {
                match waiting.iter_mut().find(|(edge, _)| *edge == e) {
                    Some((_, list)) => list.push(i),
                    None => waiting.push((e, vec![i])),
                }
            }
        }

        let mut best = u32::MAX;
        // choice[k] in 0..=len: index of the mover on edge k, len = nobody
        let mut choice = vec![0usize; waiting.len()];
        loop {
            let mut next = hops.to_vec();
            let mut moved = false;
            for ((_, list), &c) in waiting.iter().zip(&choice) {
                if let Some(&i) = list.get(c) {
                    next[i] += 1;
                    moved = true;
                }
            }
            if moved {
                self.canonical(&mut next);
                if 1 + self.lower_bound(&next) < best {
                    let sub = self.best(&next);
                    best = best.min(1 + sub);
                }
            }
            // odometer increment
            let mut k = 0;
            loop {
                if k == choice.len() {
                    self.memo.insert(hops.to_vec(), best);
                    return best;
                }
                choice[k] += 1;
                if choice[k] <= waiting[k].1.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
}

/// Exhaustive minimum makespan, or `ExceedsCap` when it is larger than
/// `cap`. Meant for a handful of packets on a handful of edges.
pub fn bruteforce_optimal_makespan(instance: &StaticInstance<'_>, cap: u64) -> OracleResult {
    let paths: Vec<&[EdgeId]> = instance.paths().iter().map(|p| p.edges()).collect();
    assert!(
        paths.iter().all(|p| p.len() < u8::MAX as usize),
        "path too long for the oracle"
    );
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..paths.len() {
        match groups.iter_mut().find(|g| paths[g[0]] == paths[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups.retain(|g| g.len() > 1);
    let mut search = Search {
        paths,
        groups,
        edge_count: instance.network().edge_count(),
        memo: HashMap::new(),
    };
    let start = vec![0u8; search.paths.len()];
    let opt = search.best(&start) as u64;
    if opt <= cap {
        OracleResult::Optimal(opt)
    } else {
        OracleResult::ExceedsCap
    }
}
