//! Contract tests for the search algorithms: determinism, exact evaluation
//! budgets, nondominated fronts, elitism traces, and agreement with the
//! exhaustive oracle on small suites.

mod common;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{exhaustive_pareto_vectors, oracle_dominates, random_small_suite, vector_key};
use testprio::objectives::{EvalSuite, ProblemDef, TimeBudget};
use testprio::search::{run, Algorithm, SearchConfig, SearchError};

fn small_config(evals: usize, seed: u64) -> SearchConfig {
    SearchConfig {
        population_size: 20,
        max_evaluations: evals,
        archive_size: 20,
        rng_seed: seed,
        ..SearchConfig::default()
    }
}

fn fixture(seed: u64, n_tests: usize) -> EvalSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EvalSuite::new(&random_small_suite(n_tests, &mut rng))
}

#[test]
fn same_seed_gives_identical_runs() {
    let suite = fixture(3, 6);
    let problem = ProblemDef::new(6, TimeBudget::percent(70)).unwrap();
    for algo in Algorithm::ALL {
        let a = run(algo, &problem, &suite, &small_config(403, 99)).unwrap();
        let b = run(algo, &problem, &suite, &small_config(403, 99)).unwrap();
        assert_eq!(a, b, "{algo} is not deterministic");
        let c = run(algo, &problem, &suite, &small_config(403, 100)).unwrap();
        // A different seed virtually always changes something observable.
        assert!(
            a.front != c.front || a.generations != c.generations,
            "{algo} ignored the seed"
        );
    }
}

#[test]
fn evaluation_budget_is_exact() {
    let suite = fixture(5, 5);
    let problem = ProblemDef::new(1, TimeBudget::percent(100)).unwrap();
    // Deliberately awkward budgets: smaller than one population, one
    // population plus a remainder, several generations plus a remainder.
    for evals in [7, 23, 109] {
        for algo in Algorithm::ALL {
            let r = run(algo, &problem, &suite, &small_config(evals, 1)).unwrap();
            assert_eq!(r.evaluations, evals, "{algo} with budget {evals}");
        }
    }
}

#[test]
fn fronts_are_pairwise_nondominated_and_deduplicated() {
    let suite = fixture(11, 6);
    for (pid, budget) in [(1, 100), (6, 50), (9, 80)] {
        let problem = ProblemDef::new(pid, TimeBudget::percent(budget)).unwrap();
        for algo in Algorithm::ALL {
            let r = run(algo, &problem, &suite, &small_config(600, 5)).unwrap();
            let vectors = r.front.vectors();
            assert!(!vectors.is_empty(), "{algo} returned an empty front");
            let mut seen = BTreeSet::new();
            for v in &vectors {
                assert!(seen.insert(vector_key(v)), "{algo} front contains duplicates");
            }
            for a in &vectors {
                for b in &vectors {
                    assert!(
                        !oracle_dominates(a, b),
                        "{algo} front contains a dominated member"
                    );
                }
            }
        }
    }
}

#[test]
fn no_variation_preserves_the_seeded_genome() {
    let suite = fixture(17, 6);
    let problem = ProblemDef::new(6, TimeBudget::percent(100)).unwrap();
    let genome: Vec<usize> = vec![3, 1, 4, 0, 5, 2];
    let expected = testprio::objectives::evaluate_values(&problem, &genome, &suite);
    for algo in Algorithm::MOSAS {
        let config = SearchConfig {
            population_size: 12,
            max_evaluations: 120,
            mutation_rate: Some(0.0),
            crossover_rate: if algo == Algorithm::Cellde { 0.0 } else { 0.9 },
            archive_size: 12,
            rng_seed: 7,
            initial_population: Some(vec![genome.clone()]),
            ..SearchConfig::default()
        };
        let r = run(algo, &problem, &suite, &config).unwrap();
        assert_eq!(r.front.len(), 1, "{algo} front should hold one vector");
        assert!(
            r.front.members[0].objectives.bits_eq(&expected),
            "{algo} front changed without variation"
        );
    }
}

#[test]
fn random_search_single_evaluation() {
    let suite = fixture(23, 5);
    let problem = ProblemDef::new(1, TimeBudget::percent(100)).unwrap();
    let r = run(Algorithm::Rs, &problem, &suite, &small_config(1, 4)).unwrap();
    assert_eq!(r.evaluations, 1);
    assert_eq!(r.front.len(), 1);
}

#[test]
fn random_search_saturates_tiny_suite() {
    // 3 tests -> 6 permutations; 500 draws hit all of them, so the front
    // must equal the exhaustive Pareto set.
    let suite = fixture(29, 3);
    let problem = ProblemDef::new(6, TimeBudget::percent(100)).unwrap();
    let r = run(Algorithm::Rs, &problem, &suite, &small_config(500, 12)).unwrap();
    let oracle: BTreeSet<Vec<u64>> = exhaustive_pareto_vectors(&problem, &suite)
        .iter()
        .map(|v| vector_key(v))
        .collect();
    let got: BTreeSet<Vec<u64>> = r.front.vectors().iter().map(|v| vector_key(v)).collect();
    assert_eq!(got, oracle);
}

#[test]
fn elitism_trace_is_monotone() {
    let suite = fixture(31, 7);
    let problem = ProblemDef::new(6, TimeBudget::percent(100)).unwrap();
    let directions = problem.directions();
    // Small population keeps archives below their truncation thresholds, so
    // every algorithm's elite trace must be monotone.
    for algo in Algorithm::ALL {
        let r = run(algo, &problem, &suite, &small_config(800, 21)).unwrap();
        for w in r.generations.windows(2) {
            for (k, dir) in directions.iter().enumerate() {
                let (prev, cur) = (w[0].best[k], w[1].best[k]);
                let ok = match dir {
                    testprio::objectives::Direction::Minimize => cur <= prev + 1e-12,
                    testprio::objectives::Direction::Maximize => cur >= prev - 1e-12,
                };
                assert!(ok, "{algo} objective {k} worsened: {prev} -> {cur}");
            }
        }
    }
}

#[test]
fn mosa_fronts_agree_with_exhaustive_oracle_on_small_suites() {
    // Quick version of the full acceptance sweep: one suite, two problems.
    let suite = fixture(37, 6);
    for (pid, budget) in [(1, 100), (10, 50)] {
        let problem = ProblemDef::new(pid, TimeBudget::percent(budget)).unwrap();
        let oracle: BTreeSet<Vec<u64>> = exhaustive_pareto_vectors(&problem, &suite)
            .iter()
            .map(|v| vector_key(v))
            .collect();
        for algo in Algorithm::MOSAS {
            let config = SearchConfig {
                population_size: 40,
                max_evaluations: 2000,
                archive_size: 40,
                rng_seed: 5,
                ..SearchConfig::default()
            };
            let r = run(algo, &problem, &suite, &config).unwrap();
            for v in r.front.vectors() {
                assert!(
                    oracle.contains(&vector_key(&v)),
                    "{algo} returned a non-Pareto vector {v:?} on problem {pid}"
                );
            }
        }
    }
}

#[test]
fn degenerate_suite_is_rejected() {
    let suite = fixture(41, 1);
    let problem = ProblemDef::new(1, TimeBudget::percent(100)).unwrap();
    for algo in Algorithm::ALL {
        assert_eq!(
            run(algo, &problem, &suite, &small_config(10, 0)).unwrap_err(),
            SearchError::DegenerateSuite(1)
        );
    }
}
