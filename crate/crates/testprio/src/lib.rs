//! Uncertainty-aware, time-budgeted test case prioritization.
//!
//! The library models test suites whose tests carry uncertainty
//! characterizations, formulates prioritization as multi-objective search
//! over permutations under a time budget, solves it with several
//! evolutionary algorithms, and evaluates outcomes with quality indicators,
//! nonparametric statistics, and a simulated uncertainty-aware execution.

pub mod indicators;
pub mod objectives;
pub mod rng;
pub mod search;
pub mod sim;
pub mod stats;
pub mod suite;
