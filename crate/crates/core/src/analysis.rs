//! Per-phase bounds for the interval-strategy and a heuristic growth
//! classifier for phase series.
//!
//! Phases are indexed from 1. Where a bound has both a closed form and a
//! defining recurrence, both are exposed so they can be checked against
//! each other.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("{0}")]
    Parameter(String),
    #[error("k_{index} = {value} <= 1, so log(k_{index}) is not positive and the recurrence leaves its domain")]
    LeavesDomain { index: u32, value: f64 },
    #[error("series of length {len} is too short for window {window} (need window >= 3 and length >= 2*window)")]
    SeriesTooShort { len: usize, window: usize },
}

fn param(msg: String) -> DomainError {
    DomainError::Parameter(msg)
}

fn check_phase(i: u32) -> Result<(), DomainError> {
    if i < 1 {
        return Err(param("phase index i must be at least 1".into()));
    }
    Ok(())
}

fn check_rate(r: f64) -> Result<(), DomainError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(param(format!("r must satisfy 0 < r < 1 (got {r})")));
    }
    Ok(())
}

fn check_at_least(name: &str, v: f64, min: f64) -> Result<(), DomainError> {
    if !v.is_finite() || v < min {
        return Err(param(format!("{name} must be at least {min} (got {v})")));
    }
    Ok(())
}

fn check_rbd(r: f64, b: f64, d: f64) -> Result<(), DomainError> {
    check_rate(r)?;
    check_at_least("b", b, 1.0)?;
    check_at_least("d", d, 1.0)
}

/// Limit of a bound sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Finite(f64),
    Infinite,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(v) => write!(f, "{v}"),
            Limit::Infinite => f.write_str("inf"),
        }
    }
}

// --- one-way line ---------------------------------------------------------

/// Steps needed by phase `i` on a line: `r^(i-1) b + sum_{j<i} r^j d`,
/// evaluated in closed form.
pub fn line_phase_time_bound(i: u32, r: f64, b: f64, d: f64) -> Result<f64, DomainError> {
    check_phase(i)?;
    check_rbd(r, b, d)?;
    Ok(r.powi(i as i32 - 1) * b + d * (1.0 - r.powi(i as i32)) / (1.0 - r))
}

/// Phases `1..=i_max` by iterating the defining recurrence: phase 1 holds
/// `b` packets, a phase with `p` packets needs `p + d` steps, and the next
/// phase receives `r` times that many packets.
pub fn line_phase_time_series(r: f64, b: f64, d: f64, i_max: u32) -> Result<Vec<f64>, DomainError> {
    check_rbd(r, b, d)?;
    let mut packets = b;
    let mut out = Vec::with_capacity(i_max as usize);
    for _ in 0..i_max {
        let time = packets + d;
        out.push(time);
        packets = r * time;
    }
    Ok(out)
}

/// `d / (1 - r)`.
pub fn line_phase_time_limit(r: f64, d: f64) -> Result<f64, DomainError> {
    check_rate(r)?;
    check_at_least("d", d, 1.0)?;
    Ok(d / (1.0 - r))
}

/// Worst delivery time of a packet on a line: one full phase waiting plus
/// one full phase being routed, `2 d / (1 - r)`.
pub fn line_delivery_bound(r: f64, d: f64) -> Result<f64, DomainError> {
    Ok(2.0 * line_phase_time_limit(r, d)?)
}

// --- trees with worst-case static routing -----------------------------------

/// `r^(i-1) b d^i`.
pub fn tree_phase_time_bound(i: u32, r: f64, b: f64, d: f64) -> Result<f64, DomainError> {
    check_phase(i)?;
    check_rbd(r, b, d)?;
    Ok(r.powi(i as i32 - 1) * b * d.powi(i as i32))
}

/// 0 when `r d < 1`, `d b` when `r d = 1`, unbounded when `r d > 1`.
/// `r d` is compared with 1 up to a relative 1e-12.
pub fn tree_limit(r: f64, b: f64, d: f64) -> Result<Limit, DomainError> {
    check_rbd(r, b, d)?;
    let rd = r * d;
    Ok(if (rd - 1.0).abs() <= 1e-12 {
        Limit::Finite(d * b)
    } else if rd < 1.0 {
        Limit::Finite(0.0)
    } else {
        Limit::Infinite
    })
}

// --- non-forward-looking static routing -------------------------------------

/// Logarithm base for the non-forward-looking recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const TWO: LogBase = LogBase(2.0);
    pub const E: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self, DomainError> {
        if !base.is_finite() || base <= 1.0 {
            return Err(param(format!("log base must be > 1 (got {base})")));
        }
        Ok(LogBase(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.0.ln()
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::TWO
    }
}

fn check_nonforward(r: f64, b: f64, d: f64) -> Result<(), DomainError> {
    check_rate(r)?;
    check_at_least("b", b, 2.0)?;
    check_at_least("d", d, 2.0)
}

/// `k_1 .. k_{i_max}` with `k_1 = b (d-1) / log b` and
/// `k_i = r^(i-1) (d-1)^i b / (log b * prod_{j<i} log k_j)`, evaluated as
/// `k_{i+1} = k_i * r (d-1) / log k_i`. Fails as soon as a `k_j` whose
/// logarithm is needed is `<= 1`.
pub fn nonforward_series(
    r: f64,
    b: f64,
    d: f64,
    base: LogBase,
    i_max: u32,
) -> Result<Vec<f64>, DomainError> {
    check_nonforward(r, b, d)?;
    let mut out = Vec::with_capacity(i_max as usize);
    let mut k = b * (d - 1.0) / base.log(b);
    for index in 1..=i_max {
        out.push(k);
        if index == i_max {
            break;
        }
        if k <= 1.0 {
            return Err(DomainError::LeavesDomain { index, value: k });
        }
        k = k * r * (d - 1.0) / base.log(k);
    }
    Ok(out)
}

/// `k_i` of the non-forward-looking recurrence.
pub fn nonforward_k(i: u32, r: f64, b: f64, d: f64, base: LogBase) -> Result<f64, DomainError> {
    check_phase(i)?;
    Ok(*nonforward_series(r, b, d, base, i)?.last().unwrap())
}

/// The positive fixed point `base^(r (d-1))` of `k -> k r (d-1) / log k`,
/// which the recurrence approaches whenever it stays in its domain.
pub fn nonforward_fixed_point(r: f64, d: f64, base: LogBase) -> Result<f64, DomainError> {
    check_rate(r)?;
    check_at_least("d", d, 2.0)?;
    Ok(base.value().powf(r * (d - 1.0)))
}

// --- static routing in c1 n + c2 d + c3 -------------------------------------

/// Constants of a static-routing bound `c1 n + c2 d + c3` together with the
/// adversary `(r, b)` and dilation `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub r: f64,
    pub b: f64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), DomainError> {
        check_rbd(self.r, self.b, self.d)?;
        if !(0.0..=1.0).contains(&self.c1) {
            return Err(param(format!("c1 must satisfy 0 <= c1 <= 1 (got {})", self.c1)));
        }
        check_at_least("c2", self.c2, 0.0)?;
        check_at_least("c3", self.c3, 0.0)
    }

    fn additive(&self) -> f64 {
        self.c2 * self.d + self.c3
    }
}

/// `r^(i-1) c1^i b + (c2 d + c3) ((r c1)^i - 1) / (r c1 - 1)`.
pub fn theorem_phase_time_bound(i: u32, p: &BoundParams) -> Result<f64, DomainError> {
    check_phase(i)?;
    p.validate()?;
    let rc = p.r * p.c1;
    let i = i as i32;
    Ok(p.r.powi(i - 1) * p.c1.powi(i) * p.b + p.additive() * (rc.powi(i) - 1.0) / (rc - 1.0))
}

/// `r^(i-1) c1^(i-1) b + sum_{j=1}^{i-1} r^j c1^(j-1) (c2 d + c3)`.
pub fn theorem_phase_packet_bound(i: u32, p: &BoundParams) -> Result<f64, DomainError> {
    check_phase(i)?;
    p.validate()?;
    let i = i as i32;
    let sum: f64 = (1..i).map(|j| p.r.powi(j) * p.c1.powi(j - 1)).sum();
    Ok((p.r * p.c1).powi(i - 1) * p.b + sum * p.additive())
}

/// `(packets_i, time_i)` for phases `1..=i_max` by iterating
/// `packets_1 = b`, `time_i = c1 packets_i + c2 d + c3`,
/// `packets_{i+1} = r time_i`.
pub fn theorem_series(p: &BoundParams, i_max: u32) -> Result<Vec<(f64, f64)>, DomainError> {
    p.validate()?;
    let mut packets = p.b;
    let mut out = Vec::with_capacity(i_max as usize);
    for _ in 0..i_max {
        let time = p.c1 * packets + p.additive();
        out.push((packets, time));
        packets = p.r * time;
    }
    Ok(out)
}

/// `(c2 d + c3) / (1 - r c1)`.
pub fn theorem_time_limit(p: &BoundParams) -> Result<f64, DomainError> {
    p.validate()?;
    Ok(p.additive() / (1.0 - p.r * p.c1))
}

/// `r (c2 d + c3) / (1 - r c1)`.
pub fn theorem_packet_limit(p: &BoundParams) -> Result<f64, DomainError> {
    Ok(p.r * theorem_time_limit(p)?)
}

// --- growth classification ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthLabel {
    Convergent,
    Bounded,
    Divergent,
}

impl fmt::Display for GrowthLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrowthLabel::Convergent => "CONVERGENT",
            GrowthLabel::Bounded => "BOUNDED",
            GrowthLabel::Divergent => "DIVERGENT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub label: GrowthLabel,
    /// Mean successive ratio over the last window.
    pub ratio: f64,
}

pub const GROWTH_EPSILON: f64 = 0.01;

/// Empirical trend of a non-negative series. Uses the mean ratio `rho` of
/// consecutive terms inside the last `window` terms: DIVERGENT when
/// `rho >= 1 + eps` and the last window peaks above the first window,
/// CONVERGENT when `rho <= 1 - eps`, BOUNDED otherwise. This flags trends;
/// it does not decide stability.
pub fn classify_growth(series: &[f64], window: usize) -> Result<Growth, DomainError> {
    if window < 3 || series.len() < 2 * window {
        return Err(DomainError::SeriesTooShort {
            len: series.len(),
            window,
        });
    }
    if let Some(v) = series.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(param(format!("series values must be non-negative (got {v})")));
    }
    let tail = &series[series.len() - window..];
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (0.0, 0.0) => 1.0,
            (0.0, _) => f64::INFINITY,
            (a, b) => b / a,
        })
        .collect();
    let ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let peak = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let label = if ratio >= 1.0 + GROWTH_EPSILON && peak(tail) > peak(&series[..window]) {
        GrowthLabel::Divergent
    } else if ratio <= 1.0 - GROWTH_EPSILON {
        GrowthLabel::Convergent
    } else {
        GrowthLabel::Bounded
    };
    Ok(Growth { label, ratio })
}
