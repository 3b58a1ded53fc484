//! The interval-strategy: packets are grouped into phases and each phase is
//! routed as a static instance while later injections wait.
//!
//! Every edge owns an active queue (the running phase) and a holding queue
//! (everything injected since the phase started). Sub-order within a step:
//!
//! 1. injections enter the holding queue of their first edge;
//! 2. active packets advance under the inner discipline;
//! 3. with pass-through enabled and a phase running, the frontmost holding
//!    packet of every edge the phase no longer needs crosses that edge and
//!    lands in the holding queue of its next edge (or is delivered);
//! 4. if the phase has no undelivered packets left, the holding queues are
//!    copied into the active queues (sorted by packet id) and the next phase
//!    starts at the following step.
//!
//! Phase 0 is empty and ends at step 0, so the packets injected at step 1
//! make up phase 1.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::adversary::Adversary;
use crate::engine::{transmit, transmit_where, Move, PacketRecord, StepRecord, Trace};
use crate::network::{congestion_dilation, EdgeId, Network, PacketPath};
use crate::strategies::{Discipline, Packet, PacketId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseRecord {
    pub phase_index: u64,
    pub packet_count: usize,
    /// First step in which the phase's packets may move.
    pub started_at: u64,
    /// Step of the last delivery.
    pub ended_at: u64,
    pub duration: u64,
    /// Congestion of the remaining paths at phase start.
    pub n: usize,
    /// Dilation of the remaining paths at phase start.
    pub d: usize,
    pub max_active_queue_len: usize,
}

impl PhaseRecord {
    pub fn lemma1_bound(&self) -> u64 {
        (self.n * self.d) as u64
    }
}

/// A phase ran longer than `n * d` steps, which no greedy static schedule
/// can do. Indicates an engine bug.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("phase {} took {} steps, exceeding n*d = {}*{} = {}", .0.phase_index, .0.duration, .0.n, .0.d, .0.lemma1_bound())]
pub struct Lemma1Violation(pub PhaseRecord);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRun {
    pub trace: Trace,
    /// Completed phases, starting with the empty phase 0.
    pub phases: Vec<PhaseRecord>,
    /// Phase that routed each packet. Packets delivered entirely by
    /// pass-through never join a phase.
    pub phase_of: BTreeMap<PacketId, u64>,
}

impl IntervalRun {
    /// Durations of phases `1..`, in order.
    pub fn durations(&self) -> Vec<u64> {
        self.phases.iter().skip(1).map(|p| p.duration).collect()
    }
}

pub struct IntervalStrategy<'n, A> {
    network: &'n Network,
    inner: Discipline,
    improvement: bool,
    adversary: A,
    active: Vec<Vec<Packet>>,
    holding: Vec<Vec<Packet>>,
    phase_index: u64,
    phase_started_at: u64,
    active_remaining: usize,
    current: Option<PhaseRecord>,
    now: u64,
    next_id: u64,
    delivered: Vec<Packet>,
    trace: Trace,
    phases: Vec<PhaseRecord>,
    phase_of: BTreeMap<PacketId, u64>,
    record_moves: bool,
}

impl<'n, A: Adversary> IntervalStrategy<'n, A> {
    pub fn new(network: &'n Network, inner: Discipline, adversary: A, improvement: bool) -> Self {
        let m = network.edge_count();
        let phase0 = PhaseRecord {
            phase_index: 0,
            packet_count: 0,
            started_at: 0,
            ended_at: 0,
            duration: 0,
            n: 0,
            d: 0,
            max_active_queue_len: 0,
        };
        IntervalStrategy {
            network,
            inner,
            improvement,
            adversary,
            active: vec![Vec::new(); m],
            holding: vec![Vec::new(); m],
            phase_index: 0,
            phase_started_at: 0,
            active_remaining: 0,
            current: None,
            now: 1,
            next_id: 0,
            delivered: Vec::new(),
            trace: Trace::default(),
            phases: vec![phase0],
            phase_of: BTreeMap::new(),
            record_moves: false,
        }
    }

    pub fn record_moves(mut self, on: bool) -> Self {
        self.record_moves = on;
        self
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn phase_index(&self) -> u64 {
        self.phase_index
    }

    pub fn phase_started_at(&self) -> u64 {
        self.phase_started_at
    }

    pub fn active_remaining(&self) -> usize {
        self.active_remaining
    }

    pub fn active_queues(&self) -> &[Vec<Packet>] {
        &self.active
    }

    pub fn holding_queues(&self) -> &[Vec<Packet>] {
        &self.holding
    }

    pub fn completed_phases(&self) -> &[PhaseRecord] {
        &self.phases
    }

    fn queued(&self) -> usize {
        self.active.iter().chain(&self.holding).map(Vec::len).sum()
    }

    pub fn is_drained(&self) -> bool {
        self.queued() == 0 && self.adversary.is_exhausted_after(self.now - 1)
    }

    /// Edges still needed by some undelivered active packet.
    fn active_demand(&self) -> HashSet<EdgeId> {
        self.active
            .iter()
            .flatten()
            .flat_map(|p| p.remaining_edges().iter().copied())
            .collect()
    }

    pub fn step(&mut self) -> Result<&StepRecord, Lemma1Violation> {
        let now = self.now;

        let injected = self.adversary.inject(now);
        let injections = injected.len();
        for path in injected {
            let p = Packet::new(PacketId(self.next_id), now, path);
            self.next_id += 1;
            let first = p.current_edge().expect("paths are non-empty");
            self.holding[first.0].push(p);
        }

        let running = self.active_remaining > 0;
        let demand = if self.improvement && running {
            Some(self.active_demand())
        } else {
            None
        };

        let (mut moves, delivered) = transmit(&mut self.active, self.inner, now);
        self.active_remaining -= delivered.len();
        let mut deliveries = delivered.len();
        self.delivered.extend(delivered);

        if let Some(demand) = demand {
            let (pass_moves, pass_delivered) =
                transmit_where(&mut self.holding, Discipline::Fifo, now, |e| {
                    !demand.contains(&e)
                });
            // transmit re-enqueues into the same queue family, i.e. holding
            moves.extend(pass_moves);
            deliveries += pass_delivered.len();
            self.delivered.extend(pass_delivered);
        }

        if let Some(cur) = self.current.as_mut() {
            let longest = self.active.iter().map(Vec::len).max().unwrap_or(0);
            cur.max_active_queue_len = cur.max_active_queue_len.max(longest);
        }

        if running && self.active_remaining == 0 {
            let mut rec = self.current.take().expect("running phase has a record");
            rec.ended_at = now;
            rec.duration = now - rec.started_at + 1;
            self.phases.push(rec);
            if rec.duration > rec.lemma1_bound() {
                return Err(Lemma1Violation(rec));
            }
        }
        if self.active_remaining == 0 && self.holding.iter().any(|q| !q.is_empty()) {
            self.start_phase(now + 1);
        }
        if now == 1 {
            // phase 0 is over before anything moves; step-1 packets form phase 1
            let expected = if injections > 0 { (1, 2) } else { (0, 0) };
            assert_eq!(
                (self.phase_index, self.phase_started_at),
                expected,
                "startup rule violated"
            );
            assert_eq!(self.active_remaining, injections, "startup rule violated");
        }

        if self.record_moves {
            self.trace.moves.extend(moves);
        }
        let queue_lens: Vec<usize> = self
            .active
            .iter()
            .zip(&self.holding)
            .map(|(a, h)| a.len() + h.len())
            .collect();
        let queued: usize = queue_lens.iter().sum();
        assert_eq!(
            self.next_id as usize,
            queued + self.delivered.len(),
            "packet conservation violated at step {now}"
        );
        self.trace.steps.push(StepRecord {
            step: now,
            total_in_system: queued,
            injections,
            deliveries,
            max_queue_len: queue_lens.iter().copied().max().unwrap_or(0),
            queue_lens,
        });
        self.now += 1;
        Ok(self.trace.steps.last().unwrap())
    }

    /// Hands every holding packet over to the active queues.
    fn start_phase(&mut self, start: u64) {
        self.phase_index += 1;
        self.phase_started_at = start;
        let mut count = 0;
        let mut remaining: Vec<PacketPath> = Vec::new();
        for (active, holding) in self.active.iter_mut().zip(self.holding.iter_mut()) {
            debug_assert!(active.is_empty());
            let mut batch = std::mem::take(holding);
            batch.sort_by_key(|p| p.id);
            for p in &mut batch {
                p.arrived_in_queue_at = start;
                self.phase_of.insert(p.id, self.phase_index);
                remaining.push(p.path.suffix(p.hops_done));
            }
            count += batch.len();
            active.extend(batch);
        }
        let cd = congestion_dilation(&remaining).expect("phase is non-empty");
        self.active_remaining = count;
        self.current = Some(PhaseRecord {
            phase_index: self.phase_index,
            packet_count: count,
            started_at: start,
            ended_at: 0,
            duration: 0,
            n: cd.n,
            d: cd.d,
            max_active_queue_len: self.active.iter().map(Vec::len).max().unwrap_or(0),
        });
    }

    pub fn run(mut self, max_steps: u64) -> Result<IntervalRun, Lemma1Violation> {
        assert!(max_steps >= 1, "max_steps must be at least 1");
        while self.now <= max_steps {
            self.step()?;
            if self.is_drained() {
                break;
            }
        }
        Ok(self.finish())
    }

    /// Stops the run where it is and assembles the result.
    pub fn finish(mut self) -> IntervalRun {
        self.trace.truncated = !self.is_drained();
        let mut packets: Vec<PacketRecord> = self
            .delivered
            .iter()
            .chain(self.active.iter().flatten())
            .chain(self.holding.iter().flatten())
            .map(PacketRecord::of)
            .collect();
        packets.sort_by_key(|p| p.id);
        self.trace.packets = packets;
        IntervalRun {
            trace: self.trace,
            phases: self.phases,
            phase_of: self.phase_of,
        }
    }
}

/// Convenience wrapper around [`IntervalStrategy::run`].
pub fn run_interval<A: Adversary>(
    network: &Network,
    inner: Discipline,
    adversary: A,
    max_steps: u64,
    improvement: bool,
) -> Result<IntervalRun, Lemma1Violation> {
    IntervalStrategy::new(network, inner, adversary, improvement).run(max_steps)
}

/// Moves of the given packet, in order.
pub fn moves_of(moves: &[Move], packet: PacketId) -> impl Iterator<Item = &Move> {
    moves.iter().filter(move |m| m.packet == packet)
}
