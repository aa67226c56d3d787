//! Elitist nondominated-sorting genetic algorithm with crowding-distance
//! diversity, PMX crossover and swap mutation on permutation genomes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{EvalSuite, ObjectiveVector, ProblemDef};

use super::operators::{pmx, swap_mutation};
use super::pareto::{crowding_distances, fast_nondominated_sort};
use super::{initial_genome, per_objective_best, Evaluator, Front, GenerationStats, SearchConfig, SearchError, SearchRun};

struct Individual {
    perm: Vec<usize>,
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
    let mutation_rate = config.mutation_rate_for(n);
    let directions = problem.directions();

    let mut population: Vec<Individual> = Vec::with_capacity(config.population_size);
    while population.len() < config.population_size && eval.remaining() > 0 {
        let perm = initial_genome(config, population.len(), n, &mut rng);
        let vector = eval.evaluate(&perm);
        population.push(Individual { perm, vector });
    }

    let mut generations = vec![GenerationStats {
        evaluations_used: eval.used(),
        best: per_objective_best(population.iter().map(|i| &i.vector), &directions),
    }];

    while eval.remaining() > 0 {
        let (ranks, crowding) = rank_and_crowd(&population);
        let want = config.population_size.min(eval.remaining());
        let mut offspring: Vec<Individual> = Vec::with_capacity(want);
        while offspring.len() < want {
            let a = tournament(&population, &ranks, &crowding, &mut rng);
            let b = tournament(&population, &ranks, &crowding, &mut rng);
            let (mut c1, mut c2) = if rng.gen::<f64>() < config.crossover_rate {
                pmx(&population[a].perm, &population[b].perm, &mut rng)
            } else {
                (population[a].perm.clone(), population[b].perm.clone())
            };
            if rng.gen::<f64>() < mutation_rate {
                swap_mutation(&mut c1, &mut rng);
            }
            if rng.gen::<f64>() < mutation_rate {
                swap_mutation(&mut c2, &mut rng);
            }
            for child in [c1, c2] {
                if offspring.len() == want {
                    break;
                }
                let vector = eval.evaluate(&child);
                offspring.push(Individual { perm: child, vector });
            }
        }
        population.extend(offspring);
        population = environmental_selection(population, config.population_size, &mut rng);
        generations.push(GenerationStats {
            evaluations_used: eval.used(),
            best: per_objective_best(population.iter().map(|i| &i.vector), &directions),
        });
    }

    let vectors: Vec<ObjectiveVector> = population.iter().map(|i| i.vector.clone()).collect();
    let fronts = fast_nondominated_sort(&vectors);
    let candidates = fronts[0]
        .iter()
        .map(|&i| (population[i].perm.clone(), population[i].vector.clone()))
        .collect();
    Ok(SearchRun {
        front: Front::from_candidates(problem, suite, candidates),
        evaluations: eval.used(),
        generations,
    })
}

fn rank_and_crowd(population: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let vectors: Vec<ObjectiveVector> = population.iter().map(|i| i.vector.clone()).collect();
    let fronts = fast_nondominated_sort(&vectors);
    let mut ranks = vec![0usize; population.len()];
    let mut crowding = vec![0.0; population.len()];
    for (rank, front) in fronts.iter().enumerate() {
        let refs: Vec<&ObjectiveVector> = front.iter().map(|&i| &vectors[i]).collect();
        let dist = crowding_distances(&refs);
        for (slot, &i) in front.iter().enumerate() {
            ranks[i] = rank;
            crowding[i] = dist[slot];
        }
    }
    (ranks, crowding)
}

fn tournament<R: Rng>(
    population: &[Individual],
    ranks: &[usize],
    crowding: &[f64],
    rng: &mut R,
) -> usize {
    let a = rng.gen_range(0..population.len());
    let b = rng.gen_range(0..population.len());
    if ranks[a] != ranks[b] {
        return if ranks[a] < ranks[b] { a } else { b };
    }
    if crowding[a] != crowding[b] {
        return if crowding[a] > crowding[b] { a } else { b };
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

fn environmental_selection<R: Rng>(
    mut union: Vec<Individual>,
    target: usize,
    rng: &mut R,
) -> Vec<Individual> {
    if union.len() <= target {
        return union;
    }
    let vectors: Vec<ObjectiveVector> = union.iter().map(|i| i.vector.clone()).collect();
    let fronts = fast_nondominated_sort(&vectors);
    let mut keep: Vec<usize> = Vec::with_capacity(target);
    for front in fronts {
        if keep.len() + front.len() <= target {
            keep.extend(front);
            if keep.len() == target {
                break;
            }
            continue;
        }
        // Partial front: best crowding first; exact ties fall to the RNG.
        let refs: Vec<&ObjectiveVector> = front.iter().map(|&i| &vectors[i]).collect();
        let dist = crowding_distances(&refs);
        let mut order: Vec<usize> = (0..front.len()).collect();
        let jitter: Vec<u64> = order.iter().map(|_| rng.gen()).collect();
        order.sort_by(|&a, &b| {
            dist[b]
                .partial_cmp(&dist[a])
                .unwrap()
                .then(jitter[a].cmp(&jitter[b]))
        });
        keep.extend(order.into_iter().take(target - keep.len()).map(|s| front[s]));
        break;
    }
    keep.sort_unstable();
    let mut keep_flags = vec![false; union.len()];
    for &i in &keep {
        keep_flags[i] = true;
    }
    let mut idx = 0;
    union.retain(|_| {
        let k = keep_flags[idx];
        idx += 1;
        k
    });
    union
}
