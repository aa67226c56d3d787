//! Quality indicators over normalized fronts: exact hypervolume and
//! inverted generational distance, plus reference-front construction.
//!
//! All indicator math runs in a normalized, all-minimization unit cube with
//! the hypervolume reference point at (1, ..., 1). Normalization bounds are
//! the per-objective min/max over the union of fronts being compared, so
//! values are comparable within one experimental cell.

use serde::{Deserialize, Serialize};

use crate::objectives::{dominates_directed, Direction};

/// Per-objective normalization bounds (raw objective space).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    /// Min/max per coordinate over a non-empty point set.
    pub fn of_points(points: &[Vec<f64>]) -> Self {
        assert!(!points.is_empty(), "bounds need at least one point");
        let d = points[0].len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in points {
            for (k, &x) in p.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        Bounds { lo, hi }
    }
}

/// Maps one raw objective vector into the unit cube, minimization-oriented:
/// minimized objectives become (f - lo) / (hi - lo), maximized ones
/// 1 - (f - lo) / (hi - lo). A degenerate objective (hi == lo) maps to 0 for
/// every point, i.e. the best corner.
pub fn normalize_point(values: &[f64], bounds: &Bounds, directions: &[Direction]) -> Vec<f64> {
    debug_assert_eq!(values.len(), bounds.lo.len());
    debug_assert_eq!(values.len(), directions.len());
    values
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let (lo, hi) = (bounds.lo[k], bounds.hi[k]);
            if hi <= lo {
                return 0.0;
            }
            let scaled = ((f - lo) / (hi - lo)).clamp(0.0, 1.0);
            match directions[k] {
                Direction::Minimize => scaled,
                Direction::Maximize => 1.0 - scaled,
            }
        })
        .collect()
}

/// Normalizes a whole front.
pub fn normalize_front(
    front: &[Vec<f64>],
    bounds: &Bounds,
    directions: &[Direction],
) -> Vec<Vec<f64>> {
    front
        .iter()
        .map(|p| normalize_point(p, bounds, directions))
        .collect()
}

fn min_directions(d: usize) -> Vec<Direction> {
    vec![Direction::Minimize; d]
}

/// Keeps only pairwise-nondominated points (minimization orientation when
/// `directions` covers them), deduplicated bit-exactly.
pub fn nondominated_filter(points: &[Vec<f64>], directions: &[Direction]) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if kept
            .iter()
            .any(|q| dominates_directed(q, p, directions) || bits_eq(q, p))
        {
            continue;
        }
        kept.retain(|q| !dominates_directed(p, q, directions));
        kept.push(p.clone());
    }
    kept.sort_by(|a, b| bits_key(a).cmp(&bits_key(b)));
    kept
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn bits_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| x.to_bits()).collect()
}

/// The nondominated union of all fronts produced for one experimental cell,
/// with the normalization bounds of that union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    /// Raw objective space, pairwise nondominated.
    pub points: Vec<Vec<f64>>,
    pub bounds: Bounds,
    pub directions: Vec<Direction>,
}

impl ReferenceFront {
    /// Builds the reference from the union of all given fronts (raw
    /// objective space). Bounds come from the full union, not just its
    /// nondominated subset, so every compared point normalizes into the
    /// cube.
    pub fn build(all_points: &[Vec<f64>], directions: &[Direction]) -> Option<Self> {
        if all_points.is_empty() {
            return None;
        }
        let bounds = Bounds::of_points(all_points);
        let points = nondominated_filter(all_points, directions);
        Some(ReferenceFront {
            points,
            bounds,
            directions: directions.to_vec(),
        })
    }

    /// Reference points mapped into the normalized unit cube.
    pub fn normalized_points(&self) -> Vec<Vec<f64>> {
        normalize_front(&self.points, &self.bounds, &self.directions)
    }
}

fn assert_in_unit_cube(points: &[Vec<f64>]) {
    for p in points {
        for &x in p {
            assert!(
                (0.0..=1.0).contains(&x),
                "hypervolume input {x} outside the unit cube"
            );
        }
    }
}

/// Exact hypervolume of the union of boxes [point, reference] for
/// minimization-oriented points. Recursive exclusive-volume slicing; exact
/// and fast for the 2-4 objective fronts used here.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    assert_in_unit_cube(points);
    if points.is_empty() {
        return 0.0;
    }
    let dirs = min_directions(reference.len());
    let front = nondominated_filter(points, &dirs);
    hv_recursive(&front, reference)
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter()
        .zip(reference)
        .map(|(&x, &r)| (r - x).max(0.0))
        .product()
}

fn component_max(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect()
}

fn hv_recursive(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => box_volume(&points[0], reference),
        2 => {
            box_volume(&points[0], reference) + box_volume(&points[1], reference)
                - box_volume(&component_max(&points[0], &points[1]), reference)
        }
        _ => {
            let mut sorted = points.to_vec();
            sorted.sort_by(|a, b| {
                a[0].partial_cmp(&b[0])
                    .unwrap()
                    .then_with(|| bits_key(a).cmp(&bits_key(b)))
            });
            (0..sorted.len())
                .map(|i| exclusive_hv(&sorted[i], &sorted[i + 1..], reference))
                .sum()
        }
    }
}

/// Volume dominated by `p` alone and by none of `rest`.
fn exclusive_hv(p: &[f64], rest: &[Vec<f64>], reference: &[f64]) -> f64 {
    let limited: Vec<Vec<f64>> = rest.iter().map(|q| component_max(p, q)).collect();
    let dirs = min_directions(reference.len());
    let limited = nondominated_filter(&limited, &dirs);
    box_volume(p, reference) - hv_recursive(&limited, reference)
}

/// Mean over reference points of the Euclidean distance to the nearest
/// front point. Both fronts must live in the same (normalized) space.
pub fn igd(front: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    assert!(!reference.is_empty(), "igd needs a non-empty reference front");
    assert!(!front.is_empty(), "igd needs a non-empty front");
    let total: f64 = reference
        .iter()
        .map(|r| {
            front
                .iter()
                .map(|p| euclidean(p, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / reference.len() as f64
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
