//! Strength-Pareto evolutionary algorithm: strength-based raw fitness plus
//! k-th-nearest-neighbor density, environmental selection into a fixed-size
//! archive with iterative nearest-neighbor truncation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{dominates, EvalSuite, ObjectiveVector, ProblemDef};

use super::operators::{pmx, swap_mutation};
use super::{initial_genome, per_objective_best, Evaluator, Front, GenerationStats, SearchConfig, SearchError, SearchRun};

#[derive(Clone)]
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
    let archive_cap = config.archive_size;

    let mut population: Vec<Individual> = Vec::new();
    while population.len() < config.population_size && eval.remaining() > 0 {
        let perm = initial_genome(config, population.len(), n, &mut rng);
        let vector = eval.evaluate(&perm);
        population.push(Individual { perm, vector });
    }
    let mut archive: Vec<Individual> = Vec::new();
    let mut generations: Vec<GenerationStats> = Vec::new();

    loop {
        let union: Vec<Individual> = population.iter().chain(archive.iter()).cloned().collect();
        let fitness = spea2_fitness(&union);

        let mut next: Vec<usize> = (0..union.len()).filter(|&i| fitness[i] < 1.0).collect();
        if next.len() > archive_cap {
            truncate_by_nearest_neighbor(&union, &mut next, archive_cap, &mut rng);
        } else if next.len() < archive_cap {
            // Fill with the best dominated individuals by fitness.
            let mut rest: Vec<usize> = (0..union.len()).filter(|&i| fitness[i] >= 1.0).collect();
            let jitter: Vec<u64> = (0..union.len()).map(|_| rng.gen()).collect();
            rest.sort_by(|&a, &b| {
                fitness[a]
                    .partial_cmp(&fitness[b])
                    .unwrap()
                    .then(jitter[a].cmp(&jitter[b]))
            });
            let missing = (archive_cap - next.len()).min(rest.len());
            next.extend(rest.into_iter().take(missing));
        }
        archive = next.into_iter().map(|i| union[i].clone()).collect();

        generations.push(GenerationStats {
            evaluations_used: eval.used(),
            best: per_objective_best(archive.iter().map(|i| &i.vector), &directions),
        });

        if eval.remaining() == 0 {
            break;
        }

        // Mating selection on the archive by binary tournament on fitness.
        let arc_fitness = spea2_fitness(&archive);
        let want = config.population_size.min(eval.remaining());
        let mut offspring: Vec<Individual> = Vec::with_capacity(want);
        while offspring.len() < want {
            let a = tournament(&arc_fitness, &mut rng);
            let b = tournament(&arc_fitness, &mut rng);
            let (mut c1, mut c2) = if rng.gen::<f64>() < config.crossover_rate {
                pmx(&archive[a].perm, &archive[b].perm, &mut rng)
            } else {
                (archive[a].perm.clone(), archive[b].perm.clone())
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
        population = offspring;
    }

    let candidates = archive
        .iter()
        .filter(|i| !archive.iter().any(|j| dominates(&j.vector, &i.vector)))
        .map(|i| (i.perm.clone(), i.vector.clone()))
        .collect();
    Ok(SearchRun {
        front: Front::from_candidates(problem, suite, candidates),
        evaluations: eval.used(),
        generations,
    })
}

/// Raw strength fitness plus density: F(i) = R(i) + 1 / (sigma_k + 2).
/// Nondominated members have F < 1.
fn spea2_fitness(members: &[Individual]) -> Vec<f64> {
    let n = members.len();
    let mut strength = vec![0usize; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&members[i].vector, &members[j].vector) {
                strength[i] += 1;
                dominators[j].push(i);
            }
        }
    }
    let k = ((n as f64).sqrt() as usize).max(1);
    (0..n)
        .map(|i| {
            let raw: usize = dominators[i].iter().map(|&j| strength[j]).sum();
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(&members[i].vector.values, &members[j].vector.values))
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let sigma_k = dists.get(k - 1).copied().unwrap_or(0.0);
            raw as f64 + 1.0 / (sigma_k + 2.0)
        })
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn tournament<R: Rng>(fitness: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..fitness.len());
    let b = rng.gen_range(0..fitness.len());
    if fitness[a] != fitness[b] {
        if fitness[a] < fitness[b] {
            a
        } else {
            b
        }
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Removes members one at a time: always the one with the lexicographically
/// smallest sorted-distance vector to the survivors (ties to the RNG). One
/// holder of each per-objective best value is exempt from eviction so the
/// elite trace never worsens.
fn truncate_by_nearest_neighbor<R: Rng>(
    union: &[Individual],
    selected: &mut Vec<usize>,
    cap: usize,
    rng: &mut R,
) {
    while selected.len() > cap {
        let protected = protected_extremes(union, selected);
        let dist_vectors: Vec<Vec<f64>> = selected
            .iter()
            .map(|&i| {
                let mut d: Vec<f64> = selected
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| euclidean(&union[i].vector.values, &union[j].vector.values))
                    .collect();
                d.sort_by(|a, b| a.partial_cmp(b).unwrap());
                d
            })
            .collect();
        let mut tied: Vec<usize> = Vec::new();
        for s in 0..selected.len() {
            if protected.contains(&s) {
                continue;
            }
            match tied.first() {
                None => tied.push(s),
                Some(&w) => match compare_distance_vectors(&dist_vectors[s], &dist_vectors[w]) {
                    std::cmp::Ordering::Less => tied = vec![s],
                    std::cmp::Ordering::Equal => tied.push(s),
                    std::cmp::Ordering::Greater => {}
                },
            }
        }
        let evict = tied[rng.gen_range(0..tied.len())];
        selected.swap_remove(evict);
    }
}

/// One slot per objective: the member holding the best value there, ties
/// resolved by vector bits then position for determinism.
fn protected_extremes(union: &[Individual], selected: &[usize]) -> Vec<usize> {
    let directions = union[selected[0]].vector.directions();
    let mut protected = Vec::with_capacity(directions.len());
    for (k, dir) in directions.iter().enumerate() {
        let mut best = 0;
        for s in 1..selected.len() {
            let a = &union[selected[s]].vector;
            let b = &union[selected[best]].vector;
            let better = match dir {
                crate::objectives::Direction::Minimize => a.values[k] < b.values[k],
                crate::objectives::Direction::Maximize => a.values[k] > b.values[k],
            };
            if better || (a.values[k] == b.values[k] && a.bits_cmp(b) == std::cmp::Ordering::Less) {
                best = s;
            }
        }
        if !protected.contains(&best) {
            protected.push(best);
        }
    }
    protected
}

fn compare_distance_vectors(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}
