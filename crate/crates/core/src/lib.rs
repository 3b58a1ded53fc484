//! Adversarial queueing simulator: networks, (r, b)-adversaries, greedy
//! queueing disciplines, the interval-strategy and its analytic bounds.

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod engine;
pub mod export;
pub mod interval;
pub mod network;
pub mod scenario;
pub mod static_routing;
pub mod strategies;
