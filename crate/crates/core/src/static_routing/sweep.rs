//! Exhaustive enumeration of small static instances on lines and trees,
//! comparing the exact optimum with greedy FIFO, `n + d` and `n * d`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{bruteforce_optimal_makespan, greedy_schedule, StaticInstance};
use crate::network::{Network, PacketPath};
use crate::strategies::Discipline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Line,
    Tree,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "line" => Ok(Shape::Line),
            "tree" => Ok(Shape::Tree),
            other => Err(format!("unknown shape `{other}` (expected line or tree)")),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Line => "line",
            Shape::Tree => "tree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub max_packets: usize,
    pub max_edges: usize,
    pub shapes: Vec<Shape>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_packets: 4,
            max_edges: 4,
            shapes: vec![Shape::Line, Shape::Tree],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub instance_id: usize,
    /// Topology label, e.g. `line4` or `in-tree[0,0,1]`.
    pub network: String,
    /// Packet paths as edge names, e.g. `e1-e2|e2`.
    pub paths: String,
    pub packets: usize,
    pub edges: usize,
    pub n: usize,
    pub d: usize,
    pub optimal: u64,
    pub greedy_fifo: u64,
    pub lemma1_bound: u64,
}

impl SweepRow {
    pub fn exceeds_n_plus_d(&self) -> bool {
        self.optimal > (self.n + self.d) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.exceeds_n_plus_d())
    }

    pub fn summary(&self) -> String {
        let bad: Vec<usize> = self.counterexamples().map(|r| r.instance_id).collect();
        if bad.is_empty() {
            format!(
                "{} instances; no optimal makespan exceeds n+d",
                self.rows.len()
            )
        } else {
            format!(
                "{} instances; {} exceed n+d: {:?}",
                self.rows.len(),
                bad.len(),
                bad
            )
        }
    }
}

/// Topologies in deterministic order: lines by length, then non-line
/// rooted trees (in-trees, then out-trees), one per isomorphism class.
pub fn topologies(max_edges: usize, shapes: &[Shape]) -> Vec<(String, Network)> {
    let mut out = Vec::new();
    if shapes.contains(&Shape::Line) {
        for m in 1..=max_edges {
            out.push((format!("line{m}"), Network::line(m)));
        }
    }
    if shapes.contains(&Shape::Tree) {
        for toward_root in [true, false] {
            let mut seen = HashSet::new();
            for m in 2..=max_edges {
                for parents in parent_arrays(m) {
                    let is_chain = parents.iter().enumerate().all(|(k, &p)| p == k);
                    if is_chain || !seen.insert(canonical_tree(&parents)) {
                        continue;
                    }
                    let kind = if toward_root { "in-tree" } else { "out-tree" };
                    out.push((
                        format!("{kind}{parents:?}").replace(' ', ""),
                        Network::tree(&parents, toward_root),
                    ));
                }
            }
        }
    }
    out
}

/// All arrays where node `k + 1` has parent `parents[k] <= k`.
fn parent_arrays(edges: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..edges {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..=k).map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p);
                    next
                })
            })
            .collect();
    }
    out
}

/// AHU encoding of the rooted tree.
fn canonical_tree(parents: &[usize]) -> String {
    fn encode(node: usize, children: &[Vec<usize>]) -> String {
        let mut parts: Vec<String> = children[node].iter().map(|&c| encode(c, children)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }
    let mut children = vec![Vec::new(); parents.len() + 1];
    for (k, &p) in parents.iter().enumerate() {
        children[p].push(k + 1);
    }
    encode(0, &children)
}

/// Multisets of size `1..=max_size` over `0..items`, each as a
/// non-decreasing index list, smaller sizes first.
fn multisets(items: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for prefix in &layer {
            let from = prefix.last().copied().unwrap_or(0);
            for i in from..items {
                let mut m = prefix.clone();
                m.push(i);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn run_sweep(config: &SweepConfig) -> SweepReport {
    let nets = topologies(config.max_edges, &config.shapes);
    let mut jobs: Vec<(usize, Vec<PacketPath>)> = Vec::new();
    let all_paths: Vec<Vec<PacketPath>> = nets.iter().map(|(_, n)| n.all_simple_paths()).collect();
    for (ni, paths) in all_paths.iter().enumerate() {
        for pick in multisets(paths.len(), config.max_packets) {
            jobs.push((ni, pick.into_iter().map(|i| paths[i].clone()).collect()));
        }
    }
    let rows = jobs
        .into_par_iter()
        .enumerate()
        .map(|(instance_id, (ni, paths))| {
            let (label, net) = &nets[ni];
            let inst = StaticInstance::new(net, paths);
            let cd = inst.congestion_dilation().expect("multisets are non-empty");
            let greedy = greedy_schedule(&inst, Discipline::Fifo).makespan;
            let optimal = bruteforce_optimal_makespan(&inst, greedy)
                .optimal()
                .expect("greedy makespan is an upper bound on the optimum");
            let described = inst
                .paths()
                .iter()
                .map(|p| {
                    p.edges()
                        .iter()
                        .map(|&e| net.edge(e).name.as_str())
                        .collect::<Vec<_>>()
                        .join("-")
                })
                .collect::<Vec<_>>()
                .join("|");
            SweepRow {
                instance_id,
                network: label.clone(),
                paths: described,
                packets: inst.paths().len(),
                edges: net.edge_count(),
                n: cd.n,
                d: cd.d,
                optimal,
                greedy_fifo: greedy,
                lemma1_bound: cd.lemma1_bound() as u64,
            }
        })
        .collect();
    SweepReport { rows }
}
