//! Domain model for test suites annotated with uncertainty information.
//!
//! A suite holds the tests to prioritize together with the model-level
//! catalogs they were characterized against: the uncertainty spaces, the
//! individual uncertainties with their belief degrees, and the totals of
//! the source model (transition, uncertainty and space counts). Everything
//! here is immutable after construction and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A state-machine transition. Identity is the full (event, source, target)
/// triple: the same event between different states is a distinct transition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub event: String,
    pub source: String,
    pub target: String,
}

impl Transition {
    pub fn new(
        event: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Self {
            event: event.into(),
            source: source.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.event, self.source, self.target)
    }
}

/// How a test's uncertainty measure is combined from the belief degrees of
/// the uncertainties it covers: minimum for subjective belief degrees,
/// product (with multiplicity) for frequency-style probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementTheory {
    UncertaintyTheory,
    ProbabilityTheory,
}

/// One alternative system behavior whose occurrence is not certain.
///
/// `occurrence_rate` is simulator ground truth: it never participates in
/// fitness evaluation and is only read when building an execution profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub id: String,
    pub space_id: String,
    /// Belief degree (or probability), in (0, 1].
    pub measure: f64,
    /// Known indeterminacy sources that can trigger this uncertainty.
    pub sources: BTreeSet<String>,
    pub occurrence_rate: Option<f64>,
}

/// The universal set of alternative uncertainties sharing a source state and
/// trigger. Covered as soon as any member is covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertaintySpace {
    pub id: String,
    pub members: BTreeSet<String>,
}

/// A duration stored as exact integer milliseconds so that budget-prefix
/// arithmetic is deterministic and order-independent.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct DurationMs(pub u64);

impl DurationMs {
    pub fn from_seconds(secs: f64) -> Self {
        DurationMs((secs * 1000.0).round() as u64)
    }

    pub fn as_seconds(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn millis(self) -> u64 {
        self.0
    }
}

/// One executable test with its uncertainty characterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    /// One-time execution time; strictly positive.
    pub et: DurationMs,
    /// Unique transitions covered along the test's path.
    pub tr: BTreeSet<Transition>,
    /// Multiset of covered uncertainties, in path order (repeats allowed).
    pub us: Vec<String>,
    /// Distinct elements of `us`.
    pub uu: BTreeSet<String>,
    /// Spaces of the members of `uu`.
    pub usp: BTreeSet<String>,
    /// Combined uncertainty measure, in (0, 1]. 1 when `us` is empty.
    pub um: f64,
}

impl TestCase {
    /// Multiset size of covered uncertainties.
    pub fn nu(&self) -> usize {
        self.us.len()
    }
}

/// The pool of tests to prioritize plus the source-model totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
    pub spaces: BTreeMap<String, UncertaintySpace>,
    pub uncertainties: BTreeMap<String, Uncertainty>,
    /// Unique transitions in the source model (may exceed the covered union).
    pub ntr: u32,
    /// Unique uncertainties in the source model.
    pub nuu: u32,
    /// Uncertainty spaces in the source model.
    pub nusp: u32,
    pub et_total: DurationMs,
    pub theory: MeasurementTheory,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("uncertainty '{id}': measure {value} outside (0, 1]")]
    MeasureOutOfRange { id: String, value: f64 },
    #[error("test '{test}': unknown uncertainty '{id}'")]
    UnknownUncertainty { test: String, id: String },
}

/// Combines already-validated measures under the given theory.
/// An empty iterator yields 1 (no uncertainty, full confidence).
pub fn combine_measures(
    theory: MeasurementTheory,
    measures: impl IntoIterator<Item = f64>,
) -> f64 {
    match theory {
        MeasurementTheory::UncertaintyTheory => measures.into_iter().fold(1.0, f64::min),
        MeasurementTheory::ProbabilityTheory => measures.into_iter().product(),
    }
}

/// Derives the combined uncertainty measure of a test from the catalog of
/// declared uncertainties. Multiplicity in `us` matters under probability
/// combination; an empty `us` yields 1.
pub fn derive_um(
    test: &TestCase,
    catalog: &BTreeMap<String, Uncertainty>,
    theory: MeasurementTheory,
) -> Result<f64, ModelError> {
    let mut measures = Vec::with_capacity(test.us.len());
    for id in &test.us {
        let unc = catalog.get(id).ok_or_else(|| ModelError::UnknownUncertainty {
            test: test.id.clone(),
            id: id.clone(),
        })?;
        if !(unc.measure > 0.0 && unc.measure <= 1.0) {
            return Err(ModelError::MeasureOutOfRange {
                id: id.clone(),
                value: unc.measure,
            });
        }
        measures.push(unc.measure);
    }
    Ok(combine_measures(theory, measures))
}

/// A single invariant breach found while validating a suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Test id, uncertainty id, space id, or "suite".
    pub subject: String,
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(subject: impl Into<String>, field: impl Into<String>, message: String) -> Self {
        Self {
            subject: subject.into(),
            field: field.into(),
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.field, self.message)
    }
}

const UM_TOLERANCE: f64 = 1e-9;

/// Checks every test-case, catalog, and total invariant. Returns one record
/// per breach; an empty list means the suite is internally consistent.
pub fn validate_suite(suite: &TestSuite) -> Vec<Violation> {
    let mut v = Vec::new();

    if suite.tests.is_empty() {
        v.push(Violation::new("suite", "tests", "suite has no tests".into()));
    }
    if suite.ntr == 0 {
        v.push(Violation::new("suite", "ntr", "model transition count is zero".into()));
    }
    if suite.nuu == 0 {
        v.push(Violation::new("suite", "nuu", "model uncertainty count is zero".into()));
    }
    if suite.nusp == 0 {
        v.push(Violation::new("suite", "nusp", "model space count is zero".into()));
    }

    // Catalog invariants.
    for (id, unc) in &suite.uncertainties {
        if *id != unc.id {
            v.push(Violation::new(
                id.clone(),
                "id",
                format!("catalog key '{id}' does not match uncertainty id '{}'", unc.id),
            ));
        }
        if !(unc.measure > 0.0 && unc.measure <= 1.0) {
            v.push(Violation::new(
                id.clone(),
                "measure",
                format!("measure {} outside (0, 1]", unc.measure),
            ));
        }
        if let Some(rate) = unc.occurrence_rate {
            if !(0.0..=1.0).contains(&rate) {
                v.push(Violation::new(
                    id.clone(),
                    "occurrence_rate",
                    format!("rate {rate} outside [0, 1]"),
                ));
            }
        }
        if !suite.spaces.contains_key(&unc.space_id) {
            v.push(Violation::new(
                id.clone(),
                "space_id",
                format!("undeclared space '{}'", unc.space_id),
            ));
        } else if !suite.spaces[&unc.space_id].members.contains(id) {
            v.push(Violation::new(
                id.clone(),
                "space_id",
                format!("space '{}' does not list '{id}' as a member", unc.space_id),
            ));
        }
    }

    // Space invariants: non-empty, disjoint, members declared.
    let mut seen_members: BTreeMap<&String, &String> = BTreeMap::new();
    for (sid, space) in &suite.spaces {
        if space.members.is_empty() {
            v.push(Violation::new(sid.clone(), "members", "space has no members".into()));
        }
        for m in &space.members {
            if !suite.uncertainties.contains_key(m) {
                v.push(Violation::new(
                    sid.clone(),
                    "members",
                    format!("member '{m}' is not a declared uncertainty"),
                ));
            }
            if let Some(other) = seen_members.insert(m, sid) {
                v.push(Violation::new(
                    sid.clone(),
                    "members",
                    format!("member '{m}' already belongs to space '{other}'"),
                ));
            }
        }
    }

    // Per-test invariants.
    let mut covered_tr: BTreeSet<&Transition> = BTreeSet::new();
    let mut covered_uu: BTreeSet<&String> = BTreeSet::new();
    let mut covered_usp: BTreeSet<&String> = BTreeSet::new();
    let mut et_sum: u64 = 0;
    let mut seen_test_ids: BTreeSet<&String> = BTreeSet::new();

    for test in &suite.tests {
        if !seen_test_ids.insert(&test.id) {
            v.push(Violation::new(test.id.clone(), "id", "duplicate test id".into()));
        }
        if test.et.millis() == 0 {
            v.push(Violation::new(
                test.id.clone(),
                "et",
                "execution time must be positive".into(),
            ));
        }
        et_sum = et_sum.saturating_add(test.et.millis());

        let distinct: BTreeSet<String> = test.us.iter().cloned().collect();
        if distinct != test.uu {
            v.push(Violation::new(
                test.id.clone(),
                "uu",
                "uu does not equal the distinct elements of us".into(),
            ));
        }

        let mut expected_usp = BTreeSet::new();
        for id in &test.uu {
            match suite.uncertainties.get(id) {
                Some(unc) => {
                    expected_usp.insert(unc.space_id.clone());
                }
                None => {
                    v.push(Violation::new(
                        test.id.clone(),
                        "us",
                        format!("unknown uncertainty '{id}'"),
                    ));
                }
            }
        }
        if expected_usp != test.usp {
            v.push(Violation::new(
                test.id.clone(),
                "usp",
                "usp does not equal the spaces of the uu members".into(),
            ));
        }

        match derive_um(test, &suite.uncertainties, suite.theory) {
            Ok(expected) => {
                if (expected - test.um).abs() > UM_TOLERANCE {
                    v.push(Violation::new(
                        test.id.clone(),
                        "um",
                        format!("um {} does not match derived value {expected}", test.um),
                    ));
                }
            }
            Err(ModelError::MeasureOutOfRange { id, value }) => {
                v.push(Violation::new(
                    test.id.clone(),
                    "um",
                    format!("uncertainty '{id}' has measure {value} outside (0, 1]"),
                ));
            }
            // Unknown ids already reported above.
            Err(ModelError::UnknownUncertainty { .. }) => {}
        }

        covered_tr.extend(test.tr.iter());
        covered_uu.extend(test.uu.iter());
        covered_usp.extend(test.usp.iter());
    }

    // Totals: tests may undercover the model, never overcover it.
    if (suite.ntr as usize) < covered_tr.len() {
        v.push(Violation::new(
            "suite",
            "ntr",
            format!("ntr {} < {} transitions covered by tests", suite.ntr, covered_tr.len()),
        ));
    }
    if (suite.nuu as usize) < covered_uu.len() {
        v.push(Violation::new(
            "suite",
            "nuu",
            format!("nuu {} < {} uncertainties covered by tests", suite.nuu, covered_uu.len()),
        ));
    }
    if (suite.nuu as usize) < suite.uncertainties.len() {
        v.push(Violation::new(
            "suite",
            "nuu",
            format!("nuu {} < {} declared uncertainties", suite.nuu, suite.uncertainties.len()),
        ));
    }
    if (suite.nusp as usize) < covered_usp.len() {
        v.push(Violation::new(
            "suite",
            "nusp",
            format!("nusp {} < {} spaces covered by tests", suite.nusp, covered_usp.len()),
        ));
    }
    if suite.et_total.millis() != et_sum {
        v.push(Violation::new(
            "suite",
            "et_total",
            format!(
                "et_total {}ms does not equal the sum of test times {et_sum}ms",
                suite.et_total.millis()
            ),
        ));
    }

    v
}
