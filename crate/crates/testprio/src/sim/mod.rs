//! Simulated uncertainty-aware test execution: draws uncertainty
//! occurrences from per-uncertainty rates, classifies each into one of the
//! seven verdicts, counts observed uncertainties (NOU), and aggregates the
//! position-weighted ANOU metric and its over-time trace.

pub mod generator;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::pi;
use crate::rng::{fnv1a64, mix_seed};
use crate::suite::{TestCase, TestSuite};

/// Status of the indeterminacy sources attached to one uncertainty at the
/// moment it was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceStatus {
    /// At least one specified source was enabled and triggered.
    SpecifiedTriggered,
    /// Sources are specified but none triggered.
    SpecifiedSilent,
    /// No source is specified for this uncertainty.
    Unspecified,
}

/// The seven uncertainty-aware verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    KnOccurredWithInS,
    KnOccurredWithoutInS,
    KnNotOccurredWithInS,
    KnNotOccurredWithoutInS,
    KnOccurredUkInS,
    KnNotOccurredUkInS,
    UkOccurred,
}

impl Verdict {
    /// An observation of an uncertainty actually occurring (known or
    /// unknown).
    pub fn observed(self) -> bool {
        matches!(
            self,
            Verdict::KnOccurredWithInS
                | Verdict::KnOccurredWithoutInS
                | Verdict::KnOccurredUkInS
                | Verdict::UkOccurred
        )
    }
}

/// Total, exclusive classification of a known uncertainty check.
pub fn classify(occurred: bool, status: SourceStatus) -> Verdict {
    match (occurred, status) {
        (true, SourceStatus::SpecifiedTriggered) => Verdict::KnOccurredWithInS,
        (true, SourceStatus::SpecifiedSilent) => Verdict::KnOccurredWithoutInS,
        (true, SourceStatus::Unspecified) => Verdict::KnOccurredUkInS,
        (false, SourceStatus::SpecifiedTriggered) => Verdict::KnNotOccurredWithInS,
        (false, SourceStatus::SpecifiedSilent) => Verdict::KnNotOccurredWithoutInS,
        (false, SourceStatus::Unspecified) => Verdict::KnNotOccurredUkInS,
    }
}

/// One per-uncertainty observation inside an execution outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyObservation {
    /// `None` for injected unknown uncertainties.
    pub uncertainty_id: Option<String>,
    pub verdict: Verdict,
}

/// Result of one simulated execution of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionOutcome {
    pub test_id: String,
    pub observations: Vec<UncertaintyObservation>,
    /// Observed uncertainties, counted with multiplicity.
    pub nou: u32,
    pub wall_time_ms: u64,
}

/// Ground-truth execution model: per-uncertainty occurrence rates, source
/// enablement policy, unknown-uncertainty injection rate, and the master
/// seed. Self-contained so a serialized profile replays bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimProfile {
    pub rates: BTreeMap<String, f64>,
    /// Sources of each uncertainty (copied from the suite catalog).
    pub uncertainty_sources: BTreeMap<String, Vec<String>>,
    pub enabled_sources: BTreeSet<String>,
    /// Per-source probability that an enabled source triggers during a
    /// check.
    pub trigger_probabilities: BTreeMap<String, f64>,
    /// Per-test Bernoulli rate of injecting one unknown-uncertainty event.
    pub unknown_rate: f64,
    pub rng_seed: u64,
}

pub const DEFAULT_UNKNOWN_RATE: f64 = 0.02;
pub const DEFAULT_TRIGGER_PROBABILITY: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("uncertainty '{0}' has no occurrence rate in the profile")]
    MissingRate(String),
    #[error("rate {value} for '{subject}' outside [0, 1]")]
    RateOutOfRange { subject: String, value: f64 },
}

impl SimProfile {
    /// Builds a profile from the suite's declared rates, enabling every
    /// declared source at the default trigger probability. Uncertainties
    /// without a rate in the suite are left out and will fail execution
    /// with a configuration error naming them.
    pub fn from_suite(suite: &TestSuite, seed: u64) -> Self {
        let mut rates = BTreeMap::new();
        let mut uncertainty_sources = BTreeMap::new();
        let mut enabled_sources = BTreeSet::new();
        let mut trigger_probabilities = BTreeMap::new();
        for (id, unc) in &suite.uncertainties {
            if let Some(rate) = unc.occurrence_rate {
                rates.insert(id.clone(), rate);
            }
            uncertainty_sources.insert(id.clone(), unc.sources.iter().cloned().collect());
            for s in &unc.sources {
                enabled_sources.insert(s.clone());
                trigger_probabilities
                    .entry(s.clone())
                    .or_insert(DEFAULT_TRIGGER_PROBABILITY);
            }
        }
        SimProfile {
            rates,
            uncertainty_sources,
            enabled_sources,
            trigger_probabilities,
            unknown_rate: DEFAULT_UNKNOWN_RATE,
            rng_seed: seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (id, &rate) in &self.rates {
            if !(0.0..=1.0).contains(&rate) {
                return Err(SimError::RateOutOfRange { subject: id.clone(), value: rate });
            }
        }
        for (id, &p) in &self.trigger_probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::RateOutOfRange { subject: id.clone(), value: p });
            }
        }
        if !(0.0..=1.0).contains(&self.unknown_rate) {
            return Err(SimError::RateOutOfRange {
                subject: "unknown_rate".into(),
                value: self.unknown_rate,
            });
        }
        Ok(())
    }
}

/// Executes one test under the profile: every uncertainty in `us` (with
/// multiplicity) is drawn by its rate and classified; one unknown event may
/// be injected per test. Deterministic in (profile seed, test id,
/// repetition) so executions parallelize safely.
pub fn execute(
    test: &TestCase,
    profile: &SimProfile,
    repetition: u64,
) -> Result<ExecutionOutcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
        profile.rng_seed,
        &[fnv1a64(test.id.as_bytes()), repetition],
    ));
    let mut observations = Vec::with_capacity(test.us.len() + 1);
    let mut nou = 0u32;

    for id in &test.us {
        let &rate = profile
            .rates
            .get(id)
            .ok_or_else(|| SimError::MissingRate(id.clone()))?;
        let occurred = rng.gen::<f64>() < rate;

        let sources = profile
            .uncertainty_sources
            .get(id)
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let status = if sources.is_empty() {
            SourceStatus::Unspecified
        } else {
            let triggered = sources.iter().any(|s| {
                profile.enabled_sources.contains(s)
                    && rng.gen::<f64>()
                        < profile
                            .trigger_probabilities
                            .get(s)
                            .copied()
                            .unwrap_or(DEFAULT_TRIGGER_PROBABILITY)
            });
            if triggered {
                SourceStatus::SpecifiedTriggered
            } else {
                SourceStatus::SpecifiedSilent
            }
        };

        let verdict = classify(occurred, status);
        if verdict.observed() {
            nou += 1;
        }
        observations.push(UncertaintyObservation {
            uncertainty_id: Some(id.clone()),
            verdict,
        });
    }

    if rng.gen::<f64>() < profile.unknown_rate {
        observations.push(UncertaintyObservation {
            uncertainty_id: None,
            verdict: Verdict::UkOccurred,
        });
        nou += 1;
    }

    Ok(ExecutionOutcome {
        test_id: test.id.clone(),
        observations,
        nou,
        wall_time_ms: test.et.millis(),
    })
}

/// Position-weighted average number of observed uncertainties over a
/// prioritized sequence of outcomes.
pub fn anou(outcomes: &[ExecutionOutcome]) -> f64 {
    let mt = outcomes.len();
    if mt == 0 {
        return 0.0;
    }
    let sum: f64 = outcomes
        .iter()
        .enumerate()
        .map(|(k, o)| o.nou as f64 * pi(k + 1, mt))
        .sum();
    sum / mt as f64
}

/// One point of an over-time trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Fraction of the total used time at this checkpoint (0.1 .. 1.0).
    pub fraction: f64,
    /// ANOU over the tests completed by this checkpoint.
    pub anou: f64,
    pub tests_executed: usize,
}

/// ANOU recomputed at every 10% of the sequence's total used time. Emits a
/// point whenever the completed prefix has grown, so a single test yields a
/// single point.
pub fn anou_trace(outcomes: &[ExecutionOutcome]) -> Vec<TracePoint> {
    let total: u64 = outcomes.iter().map(|o| o.wall_time_ms).sum();
    if total == 0 {
        return Vec::new();
    }
    let mut cumulative = Vec::with_capacity(outcomes.len());
    let mut cum = 0u64;
    for o in outcomes {
        cum += o.wall_time_ms;
        cumulative.push(cum);
    }
    let mut points = Vec::new();
    let mut prev_len = 0usize;
    for k in 1..=10u64 {
        // Completed prefix at this checkpoint: wall time * 10 <= total * k.
        let mut len = prev_len;
        while len < outcomes.len() && cumulative[len] * 10 <= total * k {
            len += 1;
        }
        if len > prev_len {
            points.push(TracePoint {
                fraction: k as f64 / 10.0,
                anou: anou(&outcomes[..len]),
                tests_executed: len,
            });
            prev_len = len;
        }
    }
    points
}
