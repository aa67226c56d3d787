//! Baseline: uniform random permutations, returning the nondominated subset
//! of everything evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{dominates, EvalSuite, ObjectiveVector, ProblemDef};

use super::operators::random_permutation;
use super::{per_objective_best, Evaluator, Front, GenerationStats, SearchConfig, SearchError, SearchRun};

pub(super) fn run(
    problem: &ProblemDef,
    suite: &EvalSuite,
    config: &SearchConfig,
) -> Result<SearchRun, SearchError> {
    let n = suite.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut eval = Evaluator::new(problem, suite, config.max_evaluations);
    let directions = problem.directions();

    let mut pareto: Vec<(Vec<usize>, ObjectiveVector)> = Vec::new();
    let mut generations = Vec::new();
    let chunk = config.population_size.max(1);

    while eval.remaining() > 0 {
        let perm = random_permutation(n, &mut rng);
        let vector = eval.evaluate(&perm);
        let dominated_or_duplicate = pareto
            .iter()
            .any(|(_, v)| dominates(v, &vector) || v.bits_eq(&vector));
        if !dominated_or_duplicate {
            pareto.retain(|(_, v)| !dominates(&vector, v));
            pareto.push((perm, vector));
        }
        if eval.used() % chunk == 0 || eval.remaining() == 0 {
            generations.push(GenerationStats {
                evaluations_used: eval.used(),
                best: per_objective_best(pareto.iter().map(|(_, v)| v), &directions),
            });
        }
    }

    Ok(SearchRun {
        front: Front::from_candidates(problem, suite, pareto),
        evaluations: eval.used(),
        generations,
    })
}
