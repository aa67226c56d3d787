//! Shared test support: hand-built suites and independent brute-force
//! oracles for Pareto sets. The oracle enumerates every permutation and
//! applies its own dominance comparator, so it shares no search-path code
//! with the algorithms under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::Rng;

use testprio::objectives::{evaluate_values, EvalSuite, ProblemDef};
use testprio::suite::{
    combine_measures, DurationMs, MeasurementTheory, TestCase, TestSuite, Transition, Uncertainty,
    UncertaintySpace,
};

/// A randomized but invariant-respecting suite for small oracle checks.
/// Uses its own construction (not the library generator) so generator bugs
/// cannot mask search bugs.
pub fn random_small_suite<R: Rng>(n_tests: usize, rng: &mut R) -> TestSuite {
    let n_spaces = rng.gen_range(1..=2usize);
    let n_unc = rng.gen_range(n_spaces..=4usize);
    let n_tr = rng.gen_range(2..=6usize);

    let mut spaces: BTreeMap<String, UncertaintySpace> = (0..n_spaces)
        .map(|s| {
            let id = format!("sp{s}");
            (id.clone(), UncertaintySpace { id, members: BTreeSet::new() })
        })
        .collect();
    let mut uncertainties = BTreeMap::new();
    for u in 0..n_unc {
        let id = format!("u{u}");
        let space_id = format!("sp{}", if u < n_spaces { u } else { rng.gen_range(0..n_spaces) });
        spaces.get_mut(&space_id).unwrap().members.insert(id.clone());
        uncertainties.insert(
            id.clone(),
            Uncertainty {
                id,
                space_id,
                measure: rng.gen_range(0.3..=1.0),
                sources: BTreeSet::new(),
                occurrence_rate: Some(rng.gen_range(0.0..=1.0)),
            },
        );
    }

    let transitions: Vec<Transition> = (0..n_tr)
        .map(|k| Transition::new(format!("e{k}"), format!("s{k}"), format!("s{}", k + 1)))
        .collect();

    let mut tests = Vec::new();
    let mut total = 0u64;
    for t in 0..n_tests {
        let tr: BTreeSet<Transition> = (0..n_tr)
            .filter(|_| rng.gen_bool(0.5))
            .map(|k| transitions[k].clone())
            .collect();
        let tr = if tr.is_empty() {
            [transitions[rng.gen_range(0..n_tr)].clone()].into_iter().collect()
        } else {
            tr
        };
        let us_len = rng.gen_range(0..=4usize);
        let us: Vec<String> = (0..us_len)
            .map(|_| format!("u{}", rng.gen_range(0..n_unc)))
            .collect();
        let uu: BTreeSet<String> = us.iter().cloned().collect();
        let usp: BTreeSet<String> = uu
            .iter()
            .map(|u| uncertainties[u].space_id.clone())
            .collect();
        let um = combine_measures(
            MeasurementTheory::UncertaintyTheory,
            us.iter().map(|u| uncertainties[u].measure),
        );
        let et = DurationMs(rng.gen_range(500..=8000));
        total += et.millis();
        tests.push(TestCase { id: format!("t{t}"), et, tr, us, uu, usp, um });
    }

    TestSuite {
        tests,
        spaces,
        uncertainties,
        ntr: n_tr as u32,
        nuu: n_unc as u32,
        nusp: n_spaces as u32,
        et_total: DurationMs(total),
        theory: MeasurementTheory::UncertaintyTheory,
    }
}

/// Independent dominance for the oracle: first objective lower-is-better,
/// the rest higher-is-better, strict improvement somewhere.
pub fn oracle_dominates(a: &[f64], b: &[f64]) -> bool {
    if a[0] > b[0] {
        return false;
    }
    for k in 1..a.len() {
        if a[k] < b[k] {
            return false;
        }
    }
    a[0] < b[0] || (1..a.len()).any(|k| a[k] > b[k])
}

/// Exhaustively enumerates every permutation and returns the set of
/// nondominated objective vectors (deduplicated bit-exactly).
pub fn exhaustive_pareto_vectors(problem: &ProblemDef, suite: &EvalSuite) -> Vec<Vec<f64>> {
    let n = suite.n;
    let mut unique: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for perm in (0..n).permutations(n) {
        let v = evaluate_values(problem, &perm, suite).values;
        let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
        if unique.insert(key) {
            vectors.push(v);
        }
    }
    let mut pareto: Vec<Vec<f64>> = Vec::new();
    'outer: for v in &vectors {
        for w in &vectors {
            if oracle_dominates(w, v) {
                continue 'outer;
            }
        }
        pareto.push(v.clone());
    }
    pareto
}

pub fn vector_key(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}
