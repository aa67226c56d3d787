//! Variation operators for permutation genomes and the random-key encoding
//! used by the differential-evolution variant.

use rand::seq::SliceRandom;
use rand::Rng;

/// Uniformly random permutation of 0..n.
pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Swaps two distinct random positions.
pub fn swap_mutation<R: Rng>(perm: &mut [usize], rng: &mut R) {
    let n = perm.len();
    if n < 2 {
        return;
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    perm.swap(i, j);
}

/// Partially mapped crossover: children keep one parent's segment in place
/// and resolve the other parent's conflicting values through the mapping
/// chain, preserving the bijection.
pub fn pmx<R: Rng>(a: &[usize], b: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let mut start = rng.gen_range(0..n);
    let mut end = rng.gen_range(0..n);
    if start > end {
        std::mem::swap(&mut start, &mut end);
    }
    (pmx_child(a, b, start, end), pmx_child(b, a, start, end))
}

fn pmx_child(seg_parent: &[usize], other: &[usize], start: usize, end: usize) -> Vec<usize> {
    let n = seg_parent.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in start..=end {
        child[i] = seg_parent[i];
        used[seg_parent[i]] = true;
    }
    let mut pos_in_other = vec![0usize; n];
    for (i, &v) in other.iter().enumerate() {
        pos_in_other[v] = i;
    }
    for i in start..=end {
        let v = other[i];
        if used[v] {
            continue;
        }
        // Chase the mapping chain until it leaves the segment.
        let mut j = i;
        loop {
            j = pos_in_other[child[j]];
            if !(start..=end).contains(&j) {
                break;
            }
        }
        child[j] = v;
        used[v] = true;
    }
    for i in 0..n {
        if child[i] == usize::MAX {
            child[i] = other[i];
        }
    }
    debug_assert!(is_permutation(&child));
    child
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Decodes a random-key vector into the permutation that sorts the keys
/// ascending (stable: equal keys keep index order).
pub fn decode_random_keys(keys: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..keys.len()).collect();
    perm.sort_by(|&i, &j| keys[i].partial_cmp(&keys[j]).unwrap().then(i.cmp(&j)));
    perm
}

/// Keys whose ascending order reproduces `perm` exactly.
pub fn encode_as_keys(perm: &[usize]) -> Vec<f64> {
    let n = perm.len();
    let mut keys = vec![0.0; n];
    for (rank, &v) in perm.iter().enumerate() {
        keys[v] = (rank as f64 + 0.5) / n as f64;
    }
    keys
}
