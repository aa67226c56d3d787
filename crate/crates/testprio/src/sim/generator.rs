//! Synthetic suite generation: random walks over a generated state-machine
//! skeleton produce tests whose coverage fields satisfy every suite
//! invariant, plus a matching execution profile whose occurrence rates can
//! be tuned to correlate (or not) with the per-test uncertainty counts.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::suite::{
    combine_measures, DurationMs, MeasurementTheory, TestCase, TestSuite, Transition, Uncertainty,
    UncertaintySpace,
};

use super::{SimProfile, DEFAULT_TRIGGER_PROBABILITY, DEFAULT_UNKNOWN_RATE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n_tests: usize,
    pub n_transitions: usize,
    pub n_uncertainties: usize,
    pub n_spaces: usize,
    /// Target total execution time; the generated suite lands within
    /// rounding of it.
    pub et_total_s: f64,
    /// Inclusive walk-length range in steps.
    pub walk_len: (usize, usize),
    /// Belief-degree range for the uncertainty measures.
    pub measure_range: (f64, f64),
    /// 1.0 couples occurrence rates to per-test uncertainty counts (more
    /// uncertainties, more observations); 0.0 balances rates so the
    /// expected observation count is flat across tests.
    pub linkage: f64,
    /// Fraction of uncertainties that get indeterminacy sources.
    pub source_fraction: f64,
    pub unknown_rate: f64,
    pub theory: MeasurementTheory,
}

impl GeneratorSpec {
    pub fn new(
        n_tests: usize,
        n_transitions: usize,
        n_uncertainties: usize,
        n_spaces: usize,
    ) -> Self {
        let states = state_count(n_transitions);
        GeneratorSpec {
            n_tests,
            n_transitions,
            n_uncertainties,
            n_spaces,
            et_total_s: n_tests as f64 * 10.0,
            walk_len: (2, (2 * states).max(4)),
            measure_range: (0.85, 0.999),
            linkage: 1.0,
            source_fraction: 0.3,
            unknown_rate: DEFAULT_UNKNOWN_RATE,
            theory: MeasurementTheory::UncertaintyTheory,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("infeasible spec: {0}")]
    Infeasible(String),
}

fn state_count(n_transitions: usize) -> usize {
    if n_transitions < 2 {
        return 2;
    }
    ((n_transitions as f64).sqrt().ceil() as usize + 1).clamp(2, n_transitions)
}

/// Generates a valid suite and its execution profile. Deterministic per
/// (spec, seed).
pub fn generate_synthetic_suite(
    spec: &GeneratorSpec,
    seed: u64,
) -> Result<(TestSuite, SimProfile), GeneratorError> {
    validate_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // State-machine skeleton: a cycle over the states guarantees every
    // state has an outgoing edge, extra transitions are random chords.
    let states = state_count(spec.n_transitions);
    let mut transitions: Vec<Transition> = Vec::with_capacity(spec.n_transitions);
    if spec.n_transitions == 1 {
        transitions.push(Transition::new("e0", "s0", "s1"));
    } else {
        for k in 0..states {
            transitions.push(Transition::new(
                format!("e{k}"),
                format!("s{k}"),
                format!("s{}", (k + 1) % states),
            ));
        }
        for k in states..spec.n_transitions {
            let src = rng.gen_range(0..states);
            let dst = rng.gen_range(0..states);
            transitions.push(Transition::new(format!("e{k}"), format!("s{src}"), format!("s{dst}")));
        }
    }
    let mut outgoing: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (k, t) in transitions.iter().enumerate() {
        outgoing.entry(t.source.clone()).or_default().push(k);
    }

    // Spaces tie to transitions; uncertainties join a space.
    let space_transition: Vec<usize> = (0..spec.n_spaces)
        .map(|s| s % spec.n_transitions)
        .collect();
    let mut spaces: BTreeMap<String, UncertaintySpace> = (0..spec.n_spaces)
        .map(|s| {
            let id = format!("usp{s}");
            (id.clone(), UncertaintySpace { id, members: BTreeSet::new() })
        })
        .collect();
    let mut unc_space: Vec<usize> = Vec::with_capacity(spec.n_uncertainties);
    for u in 0..spec.n_uncertainties {
        let s = if u < spec.n_spaces { u } else { rng.gen_range(0..spec.n_spaces) };
        unc_space.push(s);
        spaces
            .get_mut(&format!("usp{s}"))
            .unwrap()
            .members
            .insert(format!("un{u}"));
    }
    let mut transition_spaces: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &tr) in space_transition.iter().enumerate() {
        transition_spaces.entry(tr).or_default().push(s);
    }
    let space_members: Vec<Vec<usize>> = (0..spec.n_spaces)
        .map(|s| (0..spec.n_uncertainties).filter(|&u| unc_space[u] == s).collect())
        .collect();

    // Indeterminacy sources.
    let source_pool: Vec<String> = (0..(spec.n_uncertainties / 3).max(1))
        .map(|k| format!("src{k}"))
        .collect();
    let mut unc_sources: Vec<BTreeSet<String>> = Vec::with_capacity(spec.n_uncertainties);
    for _ in 0..spec.n_uncertainties {
        let mut set = BTreeSet::new();
        if rng.gen::<f64>() < spec.source_fraction {
            set.insert(source_pool[rng.gen_range(0..source_pool.len())].clone());
            if source_pool.len() > 1 && rng.gen_bool(0.3) {
                set.insert(source_pool[rng.gen_range(0..source_pool.len())].clone());
            }
        }
        unc_sources.push(set);
    }

    let (m_lo, m_hi) = spec.measure_range;
    let measures: Vec<f64> = (0..spec.n_uncertainties)
        .map(|_| rng.gen_range(m_lo..=m_hi))
        .collect();

    // Random walks, collecting the sequence of uncertainty-space crossings;
    // concrete members are assigned afterwards, once rates exist.
    let (len_lo, len_hi) = spec.walk_len;
    let mut walks: Vec<(BTreeSet<Transition>, Vec<usize>, f64)> = Vec::with_capacity(spec.n_tests);
    let start_states: Vec<String> = outgoing.keys().cloned().collect();
    for _ in 0..spec.n_tests {
        let target_len = rng.gen_range(len_lo..=len_hi.max(len_lo));
        let mut state = start_states[rng.gen_range(0..start_states.len())].clone();
        let mut tr = BTreeSet::new();
        let mut crossings: Vec<usize> = Vec::new();
        let mut raw_cost = 0.0;
        for _ in 0..target_len {
            let Some(out) = outgoing.get(&state) else { break };
            let &edge = &out[rng.gen_range(0..out.len())];
            tr.insert(transitions[edge].clone());
            raw_cost += rng.gen_range(0.3..=2.2);
            if let Some(space_ids) = transition_spaces.get(&edge) {
                for &s in space_ids {
                    if rng.gen_bool(0.85) {
                        crossings.push(s);
                    }
                }
            }
            state = transitions[edge].target.clone();
        }
        if tr.is_empty() {
            // A one-transition model can strand walks; cover the first edge.
            tr.insert(transitions[0].clone());
            raw_cost += 1.0;
        }
        if crossings.is_empty() {
            // Generated tests exist to exercise uncertainty: detour the
            // walk through one uncertain transition.
            let s = rng.gen_range(0..spec.n_spaces);
            crossings.push(s);
            tr.insert(transitions[space_transition[s]].clone());
            raw_cost += rng.gen_range(0.3..=2.2);
        }
        walks.push((tr, crossings, raw_cost));
    }

    // Scale execution times onto the requested total.
    let raw_total: f64 = walks.iter().map(|(_, _, c)| c).sum();
    let factor = spec.et_total_s * 1000.0 / raw_total;
    let et_ms: Vec<u64> = walks
        .iter()
        .map(|(_, _, c)| ((c * factor).round() as u64).max(1))
        .collect();

    // Occurrence rates spread from low to high within each space. Member
    // selection then decides the coupling: uniform picks couple observation
    // counts to crossing counts; target-seeking picks flatten the expected
    // count per test. `linkage` blends the two policies per crossing.
    let rates = spread_rates(&space_members, spec.n_uncertainties, &mut rng);
    let walks: Vec<(BTreeSet<Transition>, Vec<usize>, f64)> = walks
        .into_iter()
        .map(|(tr, crossings, cost)| {
            let us = assign_members(&crossings, &space_members, &rates, spec.linkage, &mut rng);
            (tr, us, cost)
        })
        .collect();

    // Assemble the suite.
    let uncertainties: BTreeMap<String, Uncertainty> = (0..spec.n_uncertainties)
        .map(|u| {
            let id = format!("un{u}");
            (
                id.clone(),
                Uncertainty {
                    id,
                    space_id: format!("usp{}", unc_space[u]),
                    measure: measures[u],
                    sources: unc_sources[u].clone(),
                    occurrence_rate: Some(rates[u]),
                },
            )
        })
        .collect();

    let mut tests = Vec::with_capacity(spec.n_tests);
    let mut total_ms = 0u64;
    for (i, (tr, us_idx, _)) in walks.iter().enumerate() {
        let us: Vec<String> = us_idx.iter().map(|&u| format!("un{u}")).collect();
        let uu: BTreeSet<String> = us.iter().cloned().collect();
        let usp: BTreeSet<String> = us_idx
            .iter()
            .map(|&u| format!("usp{}", unc_space[u]))
            .collect();
        let um = combine_measures(spec.theory, us_idx.iter().map(|&u| measures[u]));
        total_ms += et_ms[i];
        tests.push(TestCase {
            id: format!("t{i}"),
            et: DurationMs(et_ms[i]),
            tr: tr.clone(),
            us,
            uu,
            usp,
            um,
        });
    }

    let suite = TestSuite {
        tests,
        spaces,
        uncertainties,
        ntr: spec.n_transitions as u32,
        nuu: spec.n_uncertainties as u32,
        nusp: spec.n_spaces as u32,
        et_total: DurationMs(total_ms),
        theory: spec.theory,
    };

    let mut profile = SimProfile::from_suite(&suite, seed);
    profile.unknown_rate = spec.unknown_rate;
    for p in profile.trigger_probabilities.values_mut() {
        *p = DEFAULT_TRIGGER_PROBABILITY;
    }
    Ok((suite, profile))
}

fn validate_spec(spec: &GeneratorSpec) -> Result<(), GeneratorError> {
    if spec.n_tests < 2 {
        return Err(GeneratorError::Infeasible("need at least 2 tests".into()));
    }
    if spec.n_transitions < 1 || spec.n_uncertainties < 1 || spec.n_spaces < 1 {
        return Err(GeneratorError::Infeasible(
            "transitions, uncertainties and spaces must be positive".into(),
        ));
    }
    if spec.n_spaces > spec.n_uncertainties {
        return Err(GeneratorError::Infeasible(format!(
            "{} spaces cannot be filled by {} uncertainties",
            spec.n_spaces, spec.n_uncertainties
        )));
    }
    if !(spec.et_total_s > 0.0) {
        return Err(GeneratorError::Infeasible("et_total must be positive".into()));
    }
    if !(0.0..=1.0).contains(&spec.linkage) {
        return Err(GeneratorError::Infeasible("linkage must be in [0, 1]".into()));
    }
    let (lo, hi) = spec.measure_range;
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(GeneratorError::Infeasible("measure range must be within (0, 1]".into()));
    }
    if spec.walk_len.0 < 1 || spec.walk_len.0 > spec.walk_len.1 {
        return Err(GeneratorError::Infeasible("walk length range is empty".into()));
    }
    Ok(())
}

/// Per-uncertainty occurrence rates spread across each space from a low to
/// a high anchor, so both frequent and rare members exist everywhere.
fn spread_rates<R: Rng>(
    space_members: &[Vec<usize>],
    n_uncertainties: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut rates = vec![0.5; n_uncertainties];
    for members in space_members {
        let m = members.len();
        for (j, &u) in members.iter().enumerate() {
            let base = if m == 1 {
                rng.gen_range(0.35..=0.75)
            } else {
                0.08 + 0.84 * j as f64 / (m - 1) as f64
            };
            rates[u] = (base + rng.gen_range(-0.04..=0.04)).clamp(0.02, 0.98);
        }
    }
    rates
}

/// Expected observations per test in the fully decoupled regime.
const FLAT_NOU_TARGET: f64 = 0.9;

/// Chooses a concrete member for every space crossing. With probability
/// `linkage` the pick is uniform (observation count then grows with the
/// crossing count); otherwise the pick steers the test's expected
/// observation sum toward a flat target.
fn assign_members<R: Rng>(
    crossings: &[usize],
    space_members: &[Vec<usize>],
    rates: &[f64],
    linkage: f64,
    rng: &mut R,
) -> Vec<usize> {
    let k = crossings.len();
    let target = FLAT_NOU_TARGET * rng.gen_range(0.85..=1.15);
    let mut partial = 0.0;
    let mut us = Vec::with_capacity(k);
    for (i, &s) in crossings.iter().enumerate() {
        let members = &space_members[s];
        let pick = if rng.gen::<f64>() < linkage {
            members[rng.gen_range(0..members.len())]
        } else {
            let desired = (target - partial) / (k - i) as f64;
            *members
                .iter()
                .min_by(|&&a, &&b| {
                    (rates[a] - desired)
                        .abs()
                        .partial_cmp(&(rates[b] - desired).abs())
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .unwrap()
        };
        partial += rates[pick];
        us.push(pick);
    }
    us
}
