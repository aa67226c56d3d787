//! Cellular differential evolution over random-key genomes. Solutions are
//! real vectors in [0, 1]^n decoded to permutations by argsort, which makes
//! rand/1/bin recombination well-defined on a permutation problem. The
//! cellular structure and archive match the cellular GA.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{dominates, EvalSuite, ObjectiveVector, ProblemDef};

use super::operators::{decode_random_keys, encode_as_keys};
use super::pareto::CrowdingArchive;
use super::{
    grid_shape, moore_neighbors, per_objective_best, Evaluator, Front, GenerationStats,
    SearchConfig, SearchError, SearchRun,
};

/// Differential weight for the rand/1 difference vector.
pub const DE_SCALE_FACTOR: f64 = 0.5;



struct Cell {
    keys: Vec<f64>,
    vector: ObjectiveVector,
}

pub(super) fn run(
    problem: &ProblemDef,
    suite: &EvalSuite,
    config: &SearchConfig,
) -> Result<SearchRun, SearchError> {
    let n = suite.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut eval = Evaluator::new(problem, suite, config.max_evaluations);
    let directions = problem.directions();
    let (width, height) = grid_shape(config.population_size);
    let pop_size = width * height;
    let cr = config.crossover_rate;

    let mut archive: CrowdingArchive<Vec<f64>> = CrowdingArchive::new(config.archive_size);
    let mut grid: Vec<Cell> = Vec::with_capacity(pop_size);
    while grid.len() < pop_size && eval.remaining() > 0 {
        let keys: Vec<f64> = match &config.initial_population {
            Some(pop) if !pop.is_empty() => encode_as_keys(&pop[grid.len() % pop.len()]),
            _ => (0..n).map(|_| rng.gen::<f64>()).collect(),
        };
        let vector = eval.evaluate(&decode_random_keys(&keys));
        archive.insert(keys.clone(), vector.clone(), &mut rng);
        grid.push(Cell { keys, vector });
    }

    let mut generations = vec![GenerationStats {
        evaluations_used: eval.used(),
        best: per_objective_best(archive.members().iter().map(|(_, v)| v), &directions),
    }];

    while eval.remaining() > 0 {
        for idx in 0..grid.len() {
            if eval.remaining() == 0 {
                break;
            }
            let neighbors = moore_neighbors(idx, width, height);
            let (r1, r2, r3) = pick_three_distinct(&neighbors, &mut rng);

            // rand/1/bin with the keys clamped back into the unit interval.
            let jrand = rng.gen_range(0..n);
            let mut trial = grid[idx].keys.clone();
            for d in 0..n {
                if d == jrand || rng.gen::<f64>() < cr {
                    let v = grid[r1].keys[d]
                        + DE_SCALE_FACTOR * (grid[r2].keys[d] - grid[r3].keys[d]);
                    trial[d] = v.clamp(0.0, 1.0);
                }
            }
            let vector = eval.evaluate(&decode_random_keys(&trial));
            archive.insert(trial.clone(), vector.clone(), &mut rng);

            let replace = if dominates(&vector, &grid[idx].vector) {
                true
            } else if dominates(&grid[idx].vector, &vector) {
                false
            } else {
                rng.gen_bool(0.5)
            };
            if replace {
                grid[idx] = Cell { keys: trial, vector };
            }
        }

        if !archive.is_empty() {
            let feedback = (pop_size / 5).max(1).min(archive.len());
            for _ in 0..feedback {
                let pick = rng.gen_range(0..archive.len());
                let target = rng.gen_range(0..grid.len());
                let (keys, vector) = archive.members()[pick].clone();
                grid[target] = Cell { keys, vector };
            }
        }

        generations.push(GenerationStats {
            evaluations_used: eval.used(),
            best: per_objective_best(archive.members().iter().map(|(_, v)| v), &directions),
        });
    }

    let candidates = archive
        .members()
        .iter()
        .map(|(keys, vector)| (decode_random_keys(keys), vector.clone()))
        .collect();
    Ok(SearchRun {
        front: Front::from_candidates(problem, suite, candidates),
        evaluations: eval.used(),
        generations,
    })
}

fn pick_three_distinct<R: Rng>(neighbors: &[usize], rng: &mut R) -> (usize, usize, usize) {
    debug_assert!(neighbors.len() >= 3, "cellular DE needs at least 3 neighbors");
    let mut pool = neighbors.to_vec();
    let i = rng.gen_range(0..pool.len());
    let r1 = pool.swap_remove(i);
    let i = rng.gen_range(0..pool.len());
    let r2 = pool.swap_remove(i);
    let i = rng.gen_range(0..pool.len());
    let r3 = pool.swap_remove(i);
    (r1, r2, r3)
}
