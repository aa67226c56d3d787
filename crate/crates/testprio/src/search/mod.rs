//! Permutation-encoded multi-objective search over prioritization problems.
//!
//! Five solvers share one contract: exactly `max_evaluations` fitness
//! evaluations, full determinism per seed (every tie anywhere is broken by
//! the seeded RNG, never by memory order), and a returned front that is
//! pairwise nondominated with duplicate objective vectors removed.

mod cellde;
mod mocell;
mod nsga2;
pub mod operators;
pub mod pareto;
mod random_search;
mod spea2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objectives::{
    evaluate_values, truncate_to_budget, Direction, EvalSuite, ObjectiveVector,
    PrioritizedSolution, ProblemDef,
};

pub use cellde::DE_SCALE_FACTOR;

/// Search parameters. Defaults follow the standard multi-objective setup
/// this tool is calibrated against: population 100, 25000 evaluations,
/// crossover 0.9, mutation 1/n, archive 100, binary tournament selection,
/// 1-hop (8-neighbor) cellular neighborhoods, 100 repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub population_size: usize,
    pub max_evaluations: usize,
    pub crossover_rate: f64,
    /// Per-offspring swap-mutation probability; `None` means 1/n.
    pub mutation_rate: Option<f64>,
    /// Bounded archive size for the cellular algorithms.
    pub archive_size: usize,
    pub rng_seed: u64,
    /// Repetitions per experiment cell (used by the runner, not by a
    /// single search invocation).
    pub runs: usize,
    /// Seeds the initial population (cycled to the population size) instead
    /// of sampling it randomly. Random search ignores this.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub initial_population: Option<Vec<Vec<usize>>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population_size: 100,
            max_evaluations: 25_000,
            crossover_rate: 0.9,
            mutation_rate: None,
            archive_size: 100,
            rng_seed: 0,
            runs: 100,
            initial_population: None,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn mutation_rate_for(&self, n: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Nsga2,
    Spea2,
    Mocell,
    Cellde,
    Rs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Nsga2,
        Algorithm::Spea2,
        Algorithm::Mocell,
        Algorithm::Cellde,
        Algorithm::Rs,
    ];

    pub const MOSAS: [Algorithm; 4] = [
        Algorithm::Nsga2,
        Algorithm::Spea2,
        Algorithm::Mocell,
        Algorithm::Cellde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Spea2 => "spea2",
            Algorithm::Mocell => "mocell",
            Algorithm::Cellde => "cellde",
            Algorithm::Rs => "rs",
        }
    }

    pub fn parse(name: &str) -> Option<Algorithm> {
        Algorithm::ALL.iter().copied().find(|a| a.name() == name)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("suite has {0} tests; search needs at least 2")]
    DegenerateSuite(usize),
    #[error("max_evaluations must be positive")]
    NoBudget,
}

/// One front member: the truncated solution and its objective vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub solution: PrioritizedSolution,
    pub objectives: ObjectiveVector,
}

/// A pairwise-nondominated set of solutions, deduplicated by objective
/// vector and canonically ordered, so equal fronts are byte-equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub members: Vec<FrontMember>,
}

impl Front {
    /// Filters candidates down to the nondominated, deduplicated front.
    pub fn from_candidates(
        problem: &ProblemDef,
        suite: &EvalSuite,
        candidates: Vec<(Vec<usize>, ObjectiveVector)>,
    ) -> Front {
        let mut kept: Vec<(Vec<usize>, ObjectiveVector)> = Vec::new();
        for (perm, vec) in candidates {
            if kept
                .iter()
                .any(|(_, v)| crate::objectives::dominates(v, &vec))
            {
                continue;
            }
            kept.retain(|(_, v)| !crate::objectives::dominates(&vec, v));
            kept.push((perm, vec));
        }
        kept.sort_by(|(pa, va), (pb, vb)| va.bits_cmp(vb).then_with(|| pa.cmp(pb)));
        kept.dedup_by(|a, b| a.1.bits_eq(&b.1));

        let members = kept
            .into_iter()
            .map(|(perm, objectives)| {
                let prefix_len = truncate_to_budget(suite, &perm, problem.budget);
                FrontMember {
                    solution: PrioritizedSolution {
                        permutation: perm,
                        prefix_len,
                        budget: problem.budget,
                    },
                    objectives,
                }
            })
            .collect();
        Front { members }
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|m| m.objectives.values.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Per-generation elite snapshot: best value of each objective
/// (direction-aware) over the algorithm's current elite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub evaluations_used: usize,
    pub best: Vec<f64>,
}

/// Best per objective over a set of vectors, respecting directions.
pub(crate) fn per_objective_best<'a>(
    vectors: impl Iterator<Item = &'a ObjectiveVector>,
    directions: &[Direction],
) -> Vec<f64> {
    let mut best: Vec<f64> = directions
        .iter()
        .map(|d| match d {
            Direction::Minimize => f64::INFINITY,
            Direction::Maximize => f64::NEG_INFINITY,
        })
        .collect();
    for v in vectors {
        for (k, &x) in v.values.iter().enumerate() {
            best[k] = match directions[k] {
                Direction::Minimize => best[k].min(x),
                Direction::Maximize => best[k].max(x),
            };
        }
    }
    best
}

/// Result of one search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRun {
    pub front: Front,
    pub evaluations: usize,
    pub generations: Vec<GenerationStats>,
}

/// Wraps fitness evaluation with a hard call budget so every algorithm
/// performs exactly `max_evaluations` evaluations.
pub(crate) struct Evaluator<'a> {
    problem: &'a ProblemDef,
    suite: &'a EvalSuite,
    used: usize,
    max: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a ProblemDef, suite: &'a EvalSuite, max: usize) -> Self {
        Evaluator { problem, suite, used: 0, max }
    }

    pub fn remaining(&self) -> usize {
        self.max - self.used
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn evaluate(&mut self, perm: &[usize]) -> ObjectiveVector {
        assert!(self.used < self.max, "evaluation budget exhausted");
        self.used += 1;
        evaluate_values(self.problem, perm, self.suite)
    }
}

/// The k-th initial genome: a seeded one when provided, otherwise random.
pub(crate) fn initial_genome<R: rand::Rng>(
    config: &SearchConfig,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    match &config.initial_population {
        Some(pop) if !pop.is_empty() => pop[k % pop.len()].clone(),
        _ => operators::random_permutation(n, rng),
    }
}

/// Runs the chosen algorithm. Deterministic per `config.rng_seed`.
pub fn run(
    algorithm: Algorithm,
    problem: &ProblemDef,
    suite: &EvalSuite,
    config: &SearchConfig,
) -> Result<SearchRun, SearchError> {
    if suite.n < 2 {
        return Err(SearchError::DegenerateSuite(suite.n));
    }
    if config.max_evaluations == 0 {
        return Err(SearchError::NoBudget);
    }
    match algorithm {
        Algorithm::Nsga2 => nsga2::run(problem, suite, config),
        Algorithm::Spea2 => spea2::run(problem, suite, config),
        Algorithm::Mocell => mocell::run(problem, suite, config),
        Algorithm::Cellde => cellde::run(problem, suite, config),
        Algorithm::Rs => random_search::run(problem, suite, config),
    }
}

/// Nearest-factor grid for the cellular algorithms: width x height = n with
/// the most square shape (10x10 for 100).
pub(crate) fn grid_shape(n: usize) -> (usize, usize) {
    let mut w = (n as f64).sqrt().floor() as usize;
    while w > 1 && n % w != 0 {
        w -= 1;
    }
    (w.max(1), n / w.max(1))
}

/// Indices of the 8 surrounding cells on a toroidal grid.
pub(crate) fn moore_neighbors(idx: usize, width: usize, height: usize) -> Vec<usize> {
    let x = (idx % width) as isize;
    let y = (idx / width) as isize;
    let (w, h) = (width as isize, height as isize);
    let mut out = Vec::with_capacity(8);
    for dy in -1..=1 {
        for dx in -1..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let nx = (x + dx).rem_euclid(w);
            let ny = (y + dy).rem_euclid(h);
            let n = (ny * w + nx) as usize;
            if n != idx && !out.contains(&n) {
                out.push(n);
            }
        }
    }
    out
}
