//! Static routing: every packet is present at step 1 and nothing is
//! injected later. Provides schedule feasibility checking, greedy schedules
//! driven by the simulation engine, the `n * d` worst case, and an exact
//! optimal-makespan oracle for toy instances.

mod oracle;
pub mod sweep;

pub use oracle::{bruteforce_optimal_makespan, OracleResult};

use std::collections::HashSet;

use thiserror::Error;

use crate::adversary::BurstAdversary;
use crate::engine::{Move, Simulation};
use crate::network::{congestion_dilation, CongestionDilation, EdgeId, Network, PacketPath};
use crate::strategies::{Discipline, PacketId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("move at step 0 (steps start at 1)")]
    StepZero,
    #[error("schedule references unknown packet {0}")]
    UnknownPacket(PacketId),
    #[error("edge {edge} carries two packets at step {step}")]
    EdgeConflict { step: u64, edge: EdgeId },
    #[error("packet {packet} moves twice at step {step}")]
    DoubleMove { packet: PacketId, step: u64 },
    #[error("packet {packet} crosses {got} as hop {hop}, but its path needs {expected}")]
    OffPath {
        packet: PacketId,
        hop: usize,
        expected: EdgeId,
        got: EdgeId,
    },
    #[error("packet {packet} made {done} of {needed} hops")]
    Incomplete {
        packet: PacketId,
        done: usize,
        needed: usize,
    },
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("n and d must both be at least 1 (got n = {n}, d = {d})")]
pub struct NonPositiveBound {
    pub n: usize,
    pub d: usize,
}

/// Worst-case makespan of any greedy static schedule.
pub fn lemma1_bound(n: usize, d: usize) -> Result<u64, NonPositiveBound> {
    if n == 0 || d == 0 {
        return Err(NonPositiveBound { n, d });
    }
    Ok((n * d) as u64)
}

/// A packet set routed from scratch. Packet `i` is `paths[i]`.
#[derive(Debug, Clone)]
pub struct StaticInstance<'n> {
    network: &'n Network,
    paths: Vec<PacketPath>,
    cd: Option<CongestionDilation>,
}

impl<'n> StaticInstance<'n> {
    pub fn new(network: &'n Network, paths: Vec<PacketPath>) -> Self {
        debug_assert!(paths.iter().all(|p| network.validate_path(p.edges())));
        let cd = congestion_dilation(&paths).ok();
        StaticInstance { network, paths, cd }
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn paths(&self) -> &[PacketPath] {
        &self.paths
    }

    /// `None` for the empty instance.
    pub fn congestion_dilation(&self) -> Option<CongestionDilation> {
        self.cd
    }
}

/// Edge traversals, one [`Move`] each. Packet ids index the instance paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub moves: Vec<Move>,
}

impl Schedule {
    /// Checks the schedule against the instance and returns its makespan
    /// (last step with a move, 0 when nothing moves).
    pub fn makespan_of(&self, instance: &StaticInstance<'_>) -> Result<u64, ScheduleError> {
        let mut per_packet: Vec<Vec<&Move>> = vec![Vec::new(); instance.paths.len()];
        let mut used: HashSet<(u64, EdgeId)> = HashSet::new();
        for m in &self.moves {
            if m.step == 0 {
                return Err(ScheduleError::StepZero);
            }
            let slot = per_packet
                .get_mut(m.packet.0 as usize)
                .ok_or(ScheduleError::UnknownPacket(m.packet))?;
            if !used.insert((m.step, m.edge)) {
                return Err(ScheduleError::EdgeConflict {
                    step: m.step,
                    edge: m.edge,
                });
            }
            slot.push(m);
        }
        for (i, moves) in per_packet.iter_mut().enumerate() {
            let packet = PacketId(i as u64);
            moves.sort_by_key(|m| m.step);
            for w in moves.windows(2) {
                if w[0].step == w[1].step {
                    return Err(ScheduleError::DoubleMove {
                        packet,
                        step: w[0].step,
                    });
                }
            }
            let path = instance.paths[i].edges();
            for (hop, m) in moves.iter().enumerate() {
                match path.get(hop) {
                    Some(&expected) if expected == m.edge => {}
                    Some(&expected) => {
                        return Err(ScheduleError::OffPath {
                            packet,
                            hop,
                            expected,
                            got: m.edge,
                        })
                    }
                    None => {
                        return Err(ScheduleError::Incomplete {
                            packet,
                            done: moves.len(),
                            needed: path.len(),
                        })
                    }
                }
            }
            if moves.len() != path.len() {
                return Err(ScheduleError::Incomplete {
                    packet,
                    done: moves.len(),
                    needed: path.len(),
                });
            }
        }
        Ok(self.moves.iter().map(|m| m.step).max().unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub schedule: Schedule,
    pub makespan: u64,
}

/// Routes the instance with a greedy discipline: all packets are injected
/// at step 1 and the engine runs to completion.
///
/// Panics if the makespan exceeds `n * d`, which would mean the engine is
/// not work-conserving.
pub fn greedy_schedule(instance: &StaticInstance<'_>, discipline: Discipline) -> GreedyResult {
    let Some(cd) = instance.cd else {
        return GreedyResult {
            schedule: Schedule::default(),
            makespan: 0,
        };
    };
    let adversary = BurstAdversary::new(instance.paths.clone(), cd.n as u64)
        .expect("burst equals the congestion");
    let bound = cd.lemma1_bound() as u64;
    let trace = Simulation::new(instance.network, discipline, adversary)
        .record_moves(true)
        .run(bound + 1);
    assert!(!trace.truncated, "greedy static run exceeded n*d = {bound}");
    let makespan = trace.last_step();
    assert!(makespan <= bound, "greedy makespan {makespan} > n*d = {bound}");
    GreedyResult {
        schedule: Schedule { moves: trace.moves },
        makespan,
    }
}
