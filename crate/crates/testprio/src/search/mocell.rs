//! Cellular genetic algorithm on a toroidal grid. One parent comes from the
//! 8-cell Moore neighborhood, the other from the external crowding archive
//! (feedback through selection), replacement is dominance-based.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{dominates, EvalSuite, ObjectiveVector, ProblemDef};

use super::operators::{pmx, swap_mutation};
use super::pareto::{crowding_distances, CrowdingArchive};
use super::{
    grid_shape, initial_genome, moore_neighbors, per_objective_best, Evaluator, Front,
    GenerationStats, SearchConfig, SearchError, SearchRun,
};

struct Cell {
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
    let (width, height) = grid_shape(config.population_size);
    let pop_size = width * height;

    let mut archive: CrowdingArchive<Vec<usize>> = CrowdingArchive::new(config.archive_size);
    let mut grid: Vec<Cell> = Vec::with_capacity(pop_size);
    while grid.len() < pop_size && eval.remaining() > 0 {
        let perm = initial_genome(config, grid.len(), n, &mut rng);
        let vector = eval.evaluate(&perm);
        archive.insert(perm.clone(), vector.clone(), &mut rng);
        grid.push(Cell { perm, vector });
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
            let local = neighborhood_tournament(&grid, &neighbors, &mut rng);
            let elite = archive_tournament(&archive, &mut rng);

            let mut child = if rng.gen::<f64>() < config.crossover_rate {
                match &elite {
                    Some(e) => pmx(&grid[local].perm, e, &mut rng).0,
                    None => grid[local].perm.clone(),
                }
            } else {
                grid[local].perm.clone()
            };
            if rng.gen::<f64>() < mutation_rate {
                swap_mutation(&mut child, &mut rng);
            }
            let vector = eval.evaluate(&child);
            archive.insert(child.clone(), vector.clone(), &mut rng);

            let replace = if dominates(&vector, &grid[idx].vector) {
                true
            } else if dominates(&grid[idx].vector, &vector) {
                false
            } else {
                rng.gen_bool(0.5)
            };
            if replace {
                grid[idx] = Cell { perm: child, vector };
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
        .map(|(perm, vector)| (perm.clone(), vector.clone()))
        .collect();
    Ok(SearchRun {
        front: Front::from_candidates(problem, suite, candidates),
        evaluations: eval.used(),
        generations,
    })
}

fn neighborhood_tournament<R: Rng>(grid: &[Cell], neighbors: &[usize], rng: &mut R) -> usize {
    let a = neighbors[rng.gen_range(0..neighbors.len())];
    let b = neighbors[rng.gen_range(0..neighbors.len())];
    if dominates(&grid[a].vector, &grid[b].vector) {
        a
    } else if dominates(&grid[b].vector, &grid[a].vector) {
        b
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Binary tournament on the archive by crowding distance (more isolated
/// wins), pulling search toward sparse regions of the current front.
fn archive_tournament<R: Rng>(
    archive: &CrowdingArchive<Vec<usize>>,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let members = archive.members();
    if members.is_empty() {
        return None;
    }
    if members.len() == 1 {
        return Some(members[0].0.clone());
    }
    let refs: Vec<&ObjectiveVector> = members.iter().map(|(_, v)| v).collect();
    let dist = crowding_distances(&refs);
    let a = rng.gen_range(0..members.len());
    let b = rng.gen_range(0..members.len());
    let pick = if dist[a] != dist[b] {
        if dist[a] > dist[b] {
            a
        } else {
            b
        }
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    };
    Some(members[pick].0.clone())
}
