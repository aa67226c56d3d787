//! Pareto machinery shared by the search algorithms: fast nondominated
//! sorting, crowding distances, and a bounded crowding-truncated archive.

use rand::Rng;

use crate::objectives::{dominates, ObjectiveVector};

/// Fronts of indices into `vectors`, best (rank 0) first.
pub fn fast_nondominated_sort(vectors: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = vectors.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&vectors[i], &vectors[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&vectors[j], &vectors[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance per member of one front. Boundary members per
/// objective get infinity; interior members sum normalized gaps.
pub fn crowding_distances(front: &[&ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    let d = front[0].values.len();
    for k in 0..d {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            front[a].values[k]
                .partial_cmp(&front[b].values[k])
                .unwrap()
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].values[k];
        let hi = front[order[n - 1]].values[k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi - lo <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = front[order[w + 1]].values[k] - front[order[w - 1]].values[k];
            dist[order[w]] += gap / (hi - lo);
        }
    }
    dist
}

/// A bounded archive of nondominated solutions. Duplicate objective vectors
/// are kept (genotypic diversity); overflow evicts the most crowded member,
/// with exact ties broken by the caller's seeded RNG.
#[derive(Debug, Clone)]
pub struct CrowdingArchive<G> {
    capacity: usize,
    members: Vec<(G, ObjectiveVector)>,
}

impl<G: Clone> CrowdingArchive<G> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        CrowdingArchive { capacity, members: Vec::new() }
    }

    pub fn members(&self) -> &[(G, ObjectiveVector)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts unless dominated; evicts members the newcomer dominates.
    pub fn insert<R: Rng>(&mut self, genome: G, vector: ObjectiveVector, rng: &mut R) -> bool {
        if self.members.iter().any(|(_, v)| dominates(v, &vector)) {
            return false;
        }
        self.members.retain(|(_, v)| !dominates(&vector, v));
        self.members.push((genome, vector));
        if self.members.len() > self.capacity {
            let refs: Vec<&ObjectiveVector> = self.members.iter().map(|(_, v)| v).collect();
            let dist = crowding_distances(&refs);
            let min = dist.iter().copied().fold(f64::INFINITY, f64::min);
            let tied: Vec<usize> = (0..dist.len()).filter(|&i| dist[i] == min).collect();
            let evict = tied[rng.gen_range(0..tied.len())];
            self.members.swap_remove(evict);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vec3(a: f64, b: f64, c: f64) -> ObjectiveVector {
        ObjectiveVector { problem_id: 1, values: vec![a, b, c] }
    }

    #[test]
    fn sorting_splits_fronts() {
        // Directions are (min, max, max).
        let vectors = vec![
            vec3(0.1, 0.9, 0.9), // rank 0
            vec3(0.2, 0.8, 0.8), // dominated by the first
            vec3(0.05, 0.5, 0.95), // rank 0 (trade-off)
            vec3(0.3, 0.7, 0.7), // dominated by first and second
        ];
        let fronts = fast_nondominated_sort(&vectors);
        assert_eq!(fronts[0], vec![0, 2]);
        assert_eq!(fronts[1], vec![1]);
        assert_eq!(fronts[2], vec![3]);
    }

    #[test]
    fn crowding_boundaries_are_infinite() {
        let vectors = vec![
            vec3(0.0, 1.0, 0.5),
            vec3(0.5, 0.5, 0.5),
            vec3(1.0, 0.0, 0.5),
        ];
        let refs: Vec<&ObjectiveVector> = vectors.iter().collect();
        let d = crowding_distances(&refs);
        assert!(d[0].is_infinite());
        assert!(d[2].is_infinite());
        assert!(d[1].is_finite());
    }

    #[test]
    fn archive_rejects_dominated_and_evicts_on_overflow() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut archive: CrowdingArchive<usize> = CrowdingArchive::new(3);
        assert!(archive.insert(0, vec3(0.1, 0.9, 0.9), &mut rng));
        assert!(!archive.insert(1, vec3(0.2, 0.8, 0.8), &mut rng));
        // The newcomer dominating an existing member replaces it.
        assert!(archive.insert(2, vec3(0.05, 0.95, 0.95), &mut rng));
        assert_eq!(archive.len(), 1);
        // Fill beyond capacity with mutually nondominated points.
        assert!(archive.insert(3, vec3(0.01, 0.5, 0.5), &mut rng));
        assert!(archive.insert(4, vec3(0.02, 0.6, 0.4), &mut rng));
        assert!(archive.insert(5, vec3(0.03, 0.4, 0.6), &mut rng));
        assert_eq!(archive.len(), 3);
    }
}
