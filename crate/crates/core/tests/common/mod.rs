#![allow(dead_code)]

use aqt_core::adversary::{Budget, InjectionEvent, Rate};
use aqt_core::network::{EdgeId, Network, PacketPath};
use rand::seq::SliceRandom;
use rand::Rng;

/// A line of 1..=max_edges edges or a random rooted tree with 2..=max_edges
/// edges, oriented either way.
pub fn random_network<R: Rng>(rng: &mut R, max_edges: usize) -> Network {
    if max_edges < 2 || rng.gen_bool(0.5) {
        return Network::line(rng.gen_range(1..=max_edges));
    }
    let m = rng.gen_range(2..=max_edges);
    let parents: Vec<usize> = (0..m).map(|k| rng.gen_range(0..=k)).collect();
    Network::tree(&parents, rng.gen_bool(0.5))
}

pub fn random_paths<R: Rng>(rng: &mut R, net: &Network, count: usize) -> Vec<PacketPath> {
    let all = net.all_simple_paths();
    (0..count).map(|_| all.choose(rng).unwrap().clone()).collect()
}

/// Injection script over steps `1..=steps`, up to `max_per_step` packets
/// per step, about half of the steps empty.
pub fn random_script<R: Rng>(
    rng: &mut R,
    net: &Network,
    steps: u64,
    max_per_step: usize,
) -> Vec<InjectionEvent> {
    let all = net.all_simple_paths();
    let mut out = Vec::new();
    for time in 1..=steps {
        if rng.gen_bool(0.5) {
            continue;
        }
        for _ in 0..rng.gen_range(1..=max_per_step) {
            out.push(InjectionEvent {
                time,
                path: all.choose(rng).unwrap().clone(),
            });
        }
    }
    out
}

fn counts_per_edge(events: &[InjectionEvent], horizon: u64) -> Vec<(EdgeId, Vec<u64>)> {
    let mut out: Vec<(EdgeId, Vec<u64>)> = Vec::new();
    for ev in events {
        for &e in ev.path.edges() {
            let slot = match out.iter().position(|(x, _)| *x == e) {
                Some(i) => i,
                None => {
                    out.push((e, vec![0; horizon as usize + 1]));
                    out.len() - 1
                }
            };
            out[slot].1[ev.time as usize] += 1;
        }
    }
    out
}

/// Smallest burst that makes `events` admissible at `rate`.
pub fn min_burst(events: &[InjectionEvent], rate: Rate, horizon: u64) -> u64 {
    let mut need = 1;
    for (_, counts) in counts_per_edge(events, horizon) {
        for end in 1..=horizon as usize {
            let mut count = 0;
            for start in (1..=end).rev() {
                count += counts[start];
                let allowed = rate.floor_mul((end - start + 1) as u64);
                need = need.max(count.saturating_sub(allowed));
            }
        }
    }
    need
}

/// Second admissibility check, written independently of the library one:
/// windows are visited latest end first, counts are accumulated by
/// extending each window to the left, and the bound is computed as
/// `floor(num * len / den) + b` straight from the rational.
pub fn verify_reversed(events: &[InjectionEvent], budget: &Budget, horizon: u64) -> bool {
    let (num, den) = (budget.rate.numerator(), budget.rate.denominator());
    for (_, counts) in counts_per_edge(events, horizon) {
        for end in (1..=horizon as usize).rev() {
            let mut count = 0u64;
            for start in (1..=end).rev() {
                count += counts[start];
                let len = (end - start + 1) as u64;
                if count > num * len / den + budget.burst {
                    return false;
                }
            }
        }
    }
    true
}

/// Packets crossing `edge` in the window `[start, end]`.
pub fn window_count(events: &[InjectionEvent], edge: EdgeId, start: u64, end: u64) -> u64 {
    events
        .iter()
        .filter(|e| (start..=end).contains(&e.time) && e.path.contains(edge))
        .count() as u64
}

pub fn random_rate<R: Rng>(rng: &mut R) -> Rate {
    let den = rng.gen_range(2..=10);
    let num = rng.gen_range(1..den);
    Rate::new(num, den).unwrap()
}
