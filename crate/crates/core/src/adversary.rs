//! `(r, b)`-bounded injection processes and the brute-force window checker
//! used to validate them.
//!
//! Windows are closed and counted inclusively: `[s, t]` has length
//! `t - s + 1`, and an edge may receive at most `floor(r * len) + b`
//! packets in it. Steps start at 1.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::network::{EdgeId, PacketPath};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("injection rate must satisfy 0 < r < 1 (got {0})")]
    RateOutOfRange(String),
    #[error("burst must be at least 1 (got {0})")]
    BurstTooSmall(u64),
    #[error("scripted events must be sorted by step (step {later} follows {earlier})")]
    Unsorted { earlier: u64, later: u64 },
    #[error("scripted events start at step 1 (got step 0)")]
    StepZero,
    #[error("inadmissible injections: {0}")]
    Inadmissible(Violation),
    #[error("burst of {count} packets on edge {edge} exceeds b = {burst}")]
    BurstExceeded { edge: EdgeId, count: u64, burst: u64 },
}

/// Injection rate kept as an exact fraction so window bounds never suffer
/// from rounding (`0.29 * 100` must floor to 29).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rate {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rate {
    pub fn new(num: u64, den: u64) -> Result<Self, AdversaryError> {
        if den == 0 || num == 0 || num >= den {
            return Err(AdversaryError::RateOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Rate {
            num: num / g,
            den: den / g,
        })
    }

    /// Parses a plain decimal such as `0.5` or `.125` exactly.
    pub fn parse_decimal(s: &str) -> Result<Self, AdversaryError> {
        let bad = || AdversaryError::RateOutOfRange(s.to_string());
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 15 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Rate::new(num, den).map_err(|_| bad())
    }

    /// Exact rational for the shortest decimal that round-trips `x`.
    pub fn from_f64(x: f64) -> Result<Self, AdversaryError> {
        if !x.is_finite() || x <= 0.0 || x >= 1.0 {
            return Err(AdversaryError::RateOutOfRange(x.to_string()));
        }
        let repr = format!("{x}");
        if repr.contains('e') {
            return Err(AdversaryError::RateOutOfRange(repr));
        }
        Rate::parse_decimal(&repr)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `floor(r * len)`.
    pub fn floor_mul(&self, len: u64) -> u64 {
        (self.num as u128 * len as u128 / self.den as u128) as u64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub rate: Rate,
    pub burst: u64,
}

impl Budget {
    pub fn new(rate: Rate, burst: u64) -> Result<Self, AdversaryError> {
        if burst < 1 {
            return Err(AdversaryError::BurstTooSmall(burst));
        }
        Ok(Budget { rate, burst })
    }

    /// Maximum injections per edge over a window of `len` steps.
    pub fn window_bound(&self, len: u64) -> u64 {
        self.rate.floor_mul(len) + self.burst
    }
}

/// Witness of a window-constraint violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub edge: EdgeId,
    pub start: u64,
    pub end: u64,
    pub count: u64,
    pub bound: u64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "edge {} receives {} packets in [{}, {}] but the bound is {}",
            self.edge, self.count, self.start, self.end, self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionEvent {
    pub time: u64,
    pub path: PacketPath,
}

/// Source of injections. The engine calls `inject` once per step, with
/// steps strictly increasing from 1.
pub trait Adversary {
    fn inject(&mut self, step: u64) -> Vec<PacketPath>;

    /// True when nothing will be injected at any step after `step`.
    fn is_exhausted_after(&self, step: u64) -> bool;
}

impl<A: Adversary + ?Sized> Adversary for Box<A> {
    fn inject(&mut self, step: u64) -> Vec<PacketPath> {
        (**self).inject(step)
    }

    fn is_exhausted_after(&self, step: u64) -> bool {
        (**self).is_exhausted_after(step)
    }
}

/// Exhaustive check of every edge and every window `[s, t] ⊆ [1, horizon]`.
/// Returns the first violation in (edge, start, end) order.
pub fn verify_admissible(
    events: &[InjectionEvent],
    budget: &Budget,
    horizon: u64,
) -> Result<(), Violation> {
    let horizon = events.iter().map(|e| e.time).fold(horizon, u64::max);
    let mut per_edge: BTreeMap<EdgeId, Vec<u64>> = BTreeMap::new();
    for ev in events {
        for &edge in ev.path.edges() {
            let counts = per_edge
                .entry(edge)
                .or_insert_with(|| vec![0; horizon as usize + 1]);
            counts[ev.time as usize] += 1;
        }
    }
    for (&edge, counts) in &per_edge {
        let mut prefix = vec![0u64; counts.len()];
        for t in 1..counts.len() {
            prefix[t] = prefix[t - 1] + counts[t];
        }
        for start in 1..=horizon {
            for end in start..=horizon {
                let count = prefix[end as usize] - prefix[start as usize - 1];
                let bound = budget.window_bound(end - start + 1);
                if count > bound {
                    return Err(Violation {
                        edge,
                        start,
                        end,
                        count,
                        bound,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Drives an adversary for `horizon` steps and records what it injects.
pub fn collect_events<A: Adversary + ?Sized>(adversary: &mut A, horizon: u64) -> Vec<InjectionEvent> {
    let mut out = Vec::new();
    for time in 1..=horizon {
        out.extend(
            adversary
                .inject(time)
                .into_iter()
                .map(|path| InjectionEvent { time, path }),
        );
    }
    out
}

/// Replays a fixed event list.
#[derive(Debug, Clone)]
pub struct ScriptedAdversary {
    events: Vec<InjectionEvent>,
    cursor: usize,
}

impl ScriptedAdversary {
    /// Rejects unsorted scripts and scripts violating `budget`.
    pub fn new(events: Vec<InjectionEvent>, budget: &Budget) -> Result<Self, AdversaryError> {
        if let Some(first) = events.first() {
            if first.time == 0 {
                return Err(AdversaryError::StepZero);
            }
        }
        for w in events.windows(2) {
            if w[1].time < w[0].time {
                return Err(AdversaryError::Unsorted {
                    earlier: w[0].time,
                    later: w[1].time,
                });
            }
        }
        let horizon = events.last().map_or(0, |e| e.time);
        verify_admissible(&events, budget, horizon).map_err(AdversaryError::Inadmissible)?;
        Ok(ScriptedAdversary { events, cursor: 0 })
    }

    pub fn events(&self) -> &[InjectionEvent] {
        &self.events
    }
}

impl Adversary for ScriptedAdversary {
    fn inject(&mut self, step: u64) -> Vec<PacketPath> {
        let mut out = Vec::new();
        while let Some(ev) = self.events.get(self.cursor) {
            if ev.time > step {
                break;
            }
            if ev.time == step {
                out.push(ev.path.clone());
            }
            self.cursor += 1;
        }
        out
    }

    fn is_exhausted_after(&self, step: u64) -> bool {
        self.events.last().is_none_or(|e| e.time <= step)
    }
}

/// Injects a fixed packet set at step 1 and nothing afterwards.
#[derive(Debug, Clone)]
pub struct BurstAdversary {
    paths: Option<Vec<PacketPath>>,
}

impl BurstAdversary {
    pub fn new(paths: Vec<PacketPath>, burst: u64) -> Result<Self, AdversaryError> {
        if burst < 1 {
            return Err(AdversaryError::BurstTooSmall(burst));
        }
        let mut load: BTreeMap<EdgeId, u64> = BTreeMap::new();
        for p in &paths {
            for &e in p.edges() {
                *load.entry(e).or_default() += 1;
            }
        }
        if let Some((&edge, &count)) = load.iter().find(|(_, &c)| c > burst) {
            return Err(AdversaryError::BurstExceeded { edge, count, burst });
        }
        Ok(BurstAdversary { paths: Some(paths) })
    }
}

impl Adversary for BurstAdversary {
    fn inject(&mut self, step: u64) -> Vec<PacketPath> {
        if step == 1 {
            self.paths.take().unwrap_or_default()
        } else {
            Vec::new()
        }
    }

    fn is_exhausted_after(&self, step: u64) -> bool {
        step >= 1
    }
}

/// Injects copies of one path as fast as the window constraint allows:
/// a burst of `b` at step 1, then at most one per step whenever every
/// window ending at the current step still has room.
#[derive(Debug, Clone)]
pub struct SaturatingAdversary {
    path: PacketPath,
    budget: Budget,
    /// `history[t]` = packets injected at step `t` (index 0 unused).
    history: Vec<u64>,
}

impl SaturatingAdversary {
    pub fn new(path: PacketPath, rate: Rate, burst: u64) -> Result<Self, AdversaryError> {
        Ok(SaturatingAdversary {
            path,
            budget: Budget::new(rate, burst)?,
            history: vec![0],
        })
    }

    fn fits(&self, step: u64, extra: u64) -> bool {
        let mut count = extra;
        for start in (1..=step).rev() {
            count += self.history[start as usize];
            if count > self.budget.window_bound(step - start + 1) {
                return false;
            }
        }
        true
    }
}

impl Adversary for SaturatingAdversary {
    fn inject(&mut self, step: u64) -> Vec<PacketPath> {
        assert_eq!(
            step as usize,
            self.history.len(),
            "saturating adversary must be driven one step at a time"
        );
        self.history.push(0);
        let mut n = if step == 1 { self.budget.burst } else { 0 };
        self.history[step as usize] = n;
        if self.fits(step, 1) {
            n += 1;
            self.history[step as usize] = n;
        }
        vec![self.path.clone(); n as usize]
    }

    fn is_exhausted_after(&self, _step: u64) -> bool {
        false
    }
}
