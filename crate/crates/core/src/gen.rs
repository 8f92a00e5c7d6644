//! Seeded random generators for trees, orderings, weights and vertex
//! subsets. Used by the test suites and the experiment sweeps; none of the
//! distributions is uniform over its combinatorial class, they just cover it.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bst::{Bst, Weights};
use crate::caterpillar::{Caterpillar, VertexId};
use crate::stg::Stg;

/// BST built by inserting the keys in a random order.
pub fn random_bst<R: Rng>(n: usize, rng: &mut R) -> Bst {
    assert!(n >= 1);
    let mut keys: Vec<usize> = (1..=n).collect();
    keys.shuffle(rng);
    let mut left = vec![0usize; n + 1];
    let mut right = vec![0usize; n + 1];
    let root = keys[0];
    for &k in &keys[1..] {
        let mut v = root;
        loop {
            let slot = if k < v { &mut left[v] } else { &mut right[v] };
            if *slot == 0 {
                *slot = k;
                break;
            }
            v = *slot;
        }
    }
    let mut parents = vec![0usize; n];
    for p in 1..=n {
        if left[p] != 0 {
            parents[left[p] - 1] = p;
        }
        if right[p] != 0 {
            parents[right[p] - 1] = p;
        }
    }
    Bst::from_parents(&parents).expect("random insertion builds a search tree")
}

/// Search tree built by recursively picking a uniform root per component.
pub fn random_stg<R: Rng>(cat: &Caterpillar, rng: &mut R) -> Stg {
    fn rec<R: Rng>(
        cat: &Caterpillar,
        comp: &[VertexId],
        rng: &mut R,
        edges: &mut Vec<(VertexId, VertexId)>,
    ) -> VertexId {
        let root = comp[rng.random_range(0..comp.len())];
        let mut seen: Vec<VertexId> = vec![root];
        let inside = |v: &VertexId| comp.contains(v);
        // components of comp minus root, by repeated flooding
        for &start in comp {
            if start == root || seen.contains(&start) {
                continue;
            }
            let mut sub = vec![start];
            let mut stack = vec![start];
            seen.push(start);
            while let Some(x) = stack.pop() {
                for y in cat.neighbors(x).unwrap() {
                    if y != root && inside(&y) && !seen.contains(&y) {
                        seen.push(y);
                        sub.push(y);
                        stack.push(y);
                    }
                }
            }
            sub.sort_unstable();
            let sub_root = rec(cat, &sub, rng, edges);
            edges.push((sub_root, root));
        }
        root
    }
    let comp: Vec<VertexId> = cat.vertices().collect();
    let mut edges = Vec::new();
    let root = rec(cat, &comp, rng, &mut edges);
    let t = Stg::from_parent_map(cat, root, &edges).expect("recursive construction is a tree");
    debug_assert!(t.is_valid());
    t
}

/// Uniformly shuffled ordering of all legs.
pub fn random_leg_order<R: Rng>(cat: &Caterpillar, rng: &mut R) -> Vec<VertexId> {
    let mut legs: Vec<VertexId> = cat.leg_vertices().collect();
    legs.shuffle(rng);
    legs
}

/// Weight vector with entries in `0..=max_entry` and at least one nonzero.
pub fn random_weights<R: Rng>(n: usize, max_entry: usize, rng: &mut R) -> Weights {
    assert!(n >= 1 && max_entry >= 1);
    loop {
        let counts: Vec<usize> = (0..n).map(|_| rng.random_range(0..=max_entry)).collect();
        if counts.iter().any(|&c| c > 0) {
            return Weights::new(counts).unwrap();
        }
    }
}

/// Random connected vertex subset, grown as a flood from a random start.
pub fn random_connected_subset<R: Rng>(cat: &Caterpillar, rng: &mut R) -> Vec<VertexId> {
    let v = cat.vertex_count();
    let target = rng.random_range(1..=v);
    let start = rng.random_range(0..v);
    let mut chosen = vec![cat.vertex(start)];
    let mut frontier: Vec<VertexId> = cat.neighbors(chosen[0]).unwrap();
    while chosen.len() < target && !frontier.is_empty() {
        let pick = frontier.swap_remove(rng.random_range(0..frontier.len()));
        if chosen.contains(&pick) {
            continue;
        }
        chosen.push(pick);
        for y in cat.neighbors(pick).unwrap() {
            if !chosen.contains(&y) {
                frontier.push(y);
            }
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = StdRng::seed_from_u64(42);
        let cat = Caterpillar::new(vec![2, 0, 1, 1, 2]).unwrap();
        for _ in 0..50 {
            let t = random_stg(&cat, &mut rng);
            assert!(t.is_valid());

            let b = random_bst(7, &mut rng);
            assert_eq!(b.in_order(), (1..=7).collect::<Vec<_>>());

            let order = random_leg_order(&cat, &mut rng);
            assert_eq!(order.len(), cat.m());

            let w = random_weights(5, 9, &mut rng);
            assert!(w.total() > 0);

            let subset = random_connected_subset(&cat, &mut rng);
            assert!(!subset.is_empty());
            // a projection onto the subset must succeed, which checks
            // connectivity
            assert!(t.project(&subset).is_ok());
        }
    }
}
