//! Nonparametric statistics for comparing stochastic optimizers:
//! Kruskal-Wallis, Mann-Whitney U (exact and tie-corrected normal
//! approximation), Vargha-Delaney A12, Spearman rank correlation,
//! Holm-Bonferroni adjustment, and the significance-aware rank/confidence
//! scoring used to order algorithms and problems.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("group '{0}' is empty")]
    EmptyGroup(String),
    #[error("group '{label}' has {got} observations, need at least {needed}")]
    TooFewObservations { label: String, needed: usize, got: usize },
    #[error("samples must have equal length >= 3 (got {x} and {y})")]
    BadPairedInput { x: usize, y: usize },
}

/// Midranks (1-based, tie-averaged) of the pooled values, returned in input
/// order, together with the tie-group sizes.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for k in i..j {
            ranks[order[k]] = avg;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

fn normal_sf(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    1.0 - normal.cdf(z)
}

fn chi_squared_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let chi = ChiSquared::new(df).expect("valid degrees of freedom");
    1.0 - chi.cdf(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallisResult {
    pub h: f64,
    pub p_value: f64,
}

/// Rank-based k-sample test with tie correction; p from the chi-squared
/// approximation with k-1 degrees of freedom. Constant pooled data yields
/// H = 0 and p = 1 (no evidence).
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallisResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, got: groups.len() });
    }
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(StatsError::EmptyGroup(format!("#{i}")));
        }
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let (ranks, ties) = midranks(&pooled);

    let mut h = 0.0;
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        h += r * r / g.len() as f64;
        offset += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    let correction = 1.0 - tie_sum(&ties) / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalWallisResult { h: 0.0, p_value: 1.0 });
    }
    let h = h / correction;
    let p = chi_squared_sf(h, (groups.len() - 1) as f64).clamp(0.0, 1.0);
    Ok(KruskalWallisResult { h, p_value: p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    /// U statistic of the first sample: pairs where a beats b, ties half.
    pub u: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: MwuMethod,
}

/// Number of rank arrangements of n-vs-m samples with U statistic equal to
/// each u in 0..=n*m. Exact enumeration by the classic recurrence on
/// whether the largest remaining element belongs to the first sample.
fn mwu_exact_counts(n: usize, m: usize) -> Vec<u64> {
    let size = n * m + 1;
    // table[a][u] for the current m-level; iterate m from 0 upward.
    let mut table = vec![vec![0u64; size]; n + 1];
    for row in table.iter_mut() {
        row[0] = 0;
    }
    table[0][0] = 1;
    for a in 1..=n {
        table[a][0] = 1; // m = 0: only u = 0
    }
    for b in 1..=m {
        let mut next = vec![vec![0u64; size]; n + 1];
        next[0][0] = 1;
        for a in 1..=n {
            for u in 0..size {
                let take_a = if u >= b { next[a - 1][u - b] } else { 0 };
                let take_b = table[a][u];
                next[a][u] = take_a + take_b;
            }
        }
        table = next;
    }
    table[n].clone()
}

const MWU_EXACT_LIMIT: usize = 400;

/// Two-sided Mann-Whitney U test. Uses the exact null distribution when
/// |a|*|b| <= 400 and the pooled sample is tie-free; otherwise the normal
/// approximation with tie and continuity corrections. Constant pooled data
/// yields p = 1.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitneyResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup("a".into()));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup("b".into()));
    }
    let (n, m) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let r_a: f64 = ranks[..n].iter().sum();
    let u_a = r_a - (n * (n + 1)) as f64 / 2.0;
    let nm = (n * m) as f64;
    let has_ties = ties.iter().any(|&t| t > 1);

    if !has_ties && n * m <= MWU_EXACT_LIMIT {
        let counts = mwu_exact_counts(n, m);
        let total: u64 = counts.iter().sum();
        let u_int = u_a.round() as usize; // integral without ties
        let u_min = u_int.min(n * m - u_int);
        let tail: u64 = counts[..=u_min].iter().sum();
        let p = (2.0 * tail as f64 / total as f64).min(1.0);
        return Ok(MannWhitneyResult { u: u_a, p_value: p, method: MwuMethod::Exact });
    }

    let total_n = (n + m) as f64;
    let variance =
        nm / 12.0 * ((total_n + 1.0) - tie_sum(&ties) / (total_n * (total_n - 1.0)));
    if variance <= 0.0 {
        return Ok(MannWhitneyResult { u: u_a, p_value: 1.0, method: MwuMethod::NormalApprox });
    }
    let z = ((u_a - nm / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
    let p = (2.0 * normal_sf(z)).clamp(0.0, 1.0);
    Ok(MannWhitneyResult { u: u_a, p_value: p, method: MwuMethod::NormalApprox })
}

/// Vargha-Delaney effect size: probability (with tie credit) that a draw
/// from `a` exceeds a draw from `b`. Computed from the rank sum so large
/// samples stay O(n log n).
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "a12 needs non-empty samples");
    let (n, m) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let r_a: f64 = ranks[..n].iter().sum();
    (r_a / n as f64 - (n as f64 + 1.0) / 2.0) / m as f64
}

/// Correlation strength bands for |rho|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationStrength {
    Negligible,
    Weak,
    Moderate,
    Strong,
    VeryStrong,
}

impl CorrelationStrength {
    pub fn of(rho: f64) -> Self {
        let r = rho.abs();
        if r < 0.1 {
            CorrelationStrength::Negligible
        } else if r < 0.4 {
            CorrelationStrength::Weak
        } else if r < 0.7 {
            CorrelationStrength::Moderate
        } else if r < 0.9 {
            CorrelationStrength::Strong
        } else {
            CorrelationStrength::VeryStrong
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CorrelationStrength::Negligible => "negligible",
            CorrelationStrength::Weak => "weak",
            CorrelationStrength::Moderate => "moderate",
            CorrelationStrength::Strong => "strong",
            CorrelationStrength::VeryStrong => "very_strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpearmanResult {
    Defined {
        rho: f64,
        p_value: f64,
        strength: CorrelationStrength,
    },
    /// One of the inputs is constant; the coefficient is undefined.
    Undefined,
}

/// Spearman rank correlation: Pearson correlation of tie-averaged ranks,
/// with a t-approximation for the p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<SpearmanResult, StatsError> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(StatsError::BadPairedInput { x: x.len(), y: y.len() });
    }
    let n = x.len();
    let (rx, _) = midranks(x);
    let (ry, _) = midranks(y);
    let mean = (n as f64 + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for k in 0..n {
        let dx = rx[k] - mean;
        let dy = ry[k] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(SpearmanResult::Undefined);
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(SpearmanResult::Defined { rho, p_value, strength: CorrelationStrength::of(rho) })
}

/// Holm-Bonferroni step-down procedure at level `alpha`: sort p-values
/// ascending, reject while p_(i) <= alpha / (m - i + 1), stop at the first
/// failure. Booleans are returned in the original order.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).unwrap().then(a.cmp(&b)));
    let mut rejected = vec![false; m];
    for (i, &idx) in order.iter().enumerate() {
        if p_values[idx] <= alpha / (m - i) as f64 {
            rejected[idx] = true;
        } else {
            break;
        }
    }
    rejected
}

/// Whether the compared metric improves downward (PET, IGD) or upward (HV).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricDirection {
    LowerIsBetter,
    HigherIsBetter,
}

/// When to apply Holm-Bonferroni inside the ranking: to the whole pairwise
/// family before deciding superiority (default), or not at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolmPolicy {
    #[default]
    AdjustFirst,
    Unadjusted,
}

/// One pairwise comparison outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub group_a: String,
    pub group_b: String,
    pub p_value: f64,
    /// A12 of group_a vs group_b.
    pub a12: f64,
    /// Significance after Holm-Bonferroni at alpha = 0.05 (or raw when the
    /// policy is `Unadjusted`).
    pub adjusted_significant: bool,
}

/// A labeled sample of indicator values for one algorithm or problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutcome {
    /// (label, rank) in the input order. Rank 1 is worst; a higher rank
    /// means significantly better than the chain below it.
    pub ranks: Vec<(String, u32)>,
    /// Confidence percentages in the input order; they sum to 100.
    pub confidence: Vec<f64>,
    pub comparisons: Vec<Comparison>,
}

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Significance-aware ordinal scoring. Sorts the groups by pairwise
/// superiority (worst first; incomparable pairs ordered by label so the
/// result does not depend on input order), then assigns rank 1 to the worst
/// and increments only where the next group is significantly superior to
/// its predecessor. Superiority means p < 0.05 (Holm-adjusted within this
/// family by default) with A12 on the winning side of 0.5 for the metric's
/// direction.
pub fn rank_algorithms(
    groups: &[LabeledSample],
    direction: MetricDirection,
    policy: HolmPolicy,
) -> Result<RankOutcome, StatsError> {
    let n = groups.len();
    if n < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, got: n });
    }
    for g in groups {
        if g.values.len() < 2 {
            return Err(StatsError::TooFewObservations {
                label: g.label.clone(),
                needed: 2,
                got: g.values.len(),
            });
        }
    }

    // Pairwise p-values and effect sizes over the unordered pairs.
    let mut pair_p = vec![vec![0.0; n]; n];
    let mut pair_a12 = vec![vec![0.5; n]; n];
    let mut family_p = Vec::with_capacity(n * (n - 1) / 2);
    let mut pair_index = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mwu = mann_whitney_u(&groups[i].values, &groups[j].values)?;
            let a12 = vargha_delaney_a12(&groups[i].values, &groups[j].values);
            pair_p[i][j] = mwu.p_value;
            pair_p[j][i] = mwu.p_value;
            pair_a12[i][j] = a12;
            pair_a12[j][i] = 1.0 - a12;
            family_p.push(mwu.p_value);
            pair_index.push((i, j));
        }
    }
    let significant_family = match policy {
        HolmPolicy::AdjustFirst => holm_bonferroni(&family_p, DEFAULT_ALPHA),
        HolmPolicy::Unadjusted => family_p.iter().map(|&p| p < DEFAULT_ALPHA).collect(),
    };
    let mut significant = vec![vec![false; n]; n];
    for (k, &(i, j)) in pair_index.iter().enumerate() {
        significant[i][j] = significant_family[k];
        significant[j][i] = significant_family[k];
    }

    let better = |x: usize, y: usize| -> bool {
        if !significant[x][y] {
            return false;
        }
        match direction {
            MetricDirection::HigherIsBetter => pair_a12[x][y] > 0.5,
            MetricDirection::LowerIsBetter => pair_a12[x][y] < 0.5,
        }
    };

    // Selection-style sort: a superior group sinks toward the end, so the
    // worst ends up first. Incomparable pairs fall back to label order to
    // keep the outcome independent of input order.
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..n - 1 {
        for j in (i + 1)..n {
            let (x, y) = (order[i], order[j]);
            if better(x, y) || (!better(y, x) && groups[x].label > groups[y].label) {
                order.swap(i, j);
            }
        }
    }

    let mut rank = vec![0u32; n];
    rank[order[0]] = 1;
    for k in 1..n {
        let prev = order[k - 1];
        let cur = order[k];
        rank[cur] = rank[prev] + if better(cur, prev) { 1 } else { 0 };
    }

    let ranks: Vec<(String, u32)> = groups
        .iter()
        .zip(&rank)
        .map(|(g, &r)| (g.label.clone(), r))
        .collect();
    let confidence = confidence(&rank);
    let comparisons = pair_index
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| Comparison {
            group_a: groups[i].label.clone(),
            group_b: groups[j].label.clone(),
            p_value: family_p[k],
            a12: pair_a12[i][j],
            adjusted_significant: significant_family[k],
        })
        .collect();

    Ok(RankOutcome { ranks, confidence, comparisons })
}

/// Rank-proportional percentages: rank_j / sum(rank) * 100.
pub fn confidence(ranks: &[u32]) -> Vec<f64> {
    let total: u32 = ranks.iter().sum();
    assert!(total > 0, "confidence needs at least one positive rank");
    ranks
        .iter()
        .map(|&r| r as f64 / total as f64 * 100.0)
        .collect()
}
