//! Wilber's first lower bound for access sequences in a fixed BST, and the
//! worst-case (tree, sequence) construction that pushes it up to the entropy
//! of the access distribution.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bst::{Bst, Weights};
use crate::error::{Error, Result};

/// Per-node switch counts `lambda(S, u, sigma)` with their totals.
#[derive(Debug, Clone, Serialize)]
pub struct WilberReport {
    /// key -> lambda
    #[serde(rename = "lambda")]
    pub per_node: BTreeMap<usize, usize>,
    /// sum of all per-node counts
    #[serde(rename = "Lambda")]
    pub total: usize,
    /// total plus the sequence length
    #[serde(rename = "LambdaPrime")]
    pub total_with_accesses: usize,
}

fn check_sequence(s: &Bst, seq: &[usize]) -> Result<()> {
    for &x in seq {
        if x == 0 || x > s.n() {
            return Err(Error::AccessOutOfRange { key: x, n: s.n() });
        }
    }
    Ok(())
}

/// Number of switches at `u`: adjacent pairs of the sequence restricted to
/// `u`'s subtree that do not stay inside one child subtree and are not both
/// `u` itself. Zero when `u` has fewer than two children.
pub fn lambda(s: &Bst, u: usize, seq: &[usize]) -> Result<usize> {
    if u == 0 || u > s.n() {
        return Err(Error::KeyOutOfRange { key: u, n: s.n() });
    }
    check_sequence(s, seq)?;
    if s.left(u).is_none() || s.right(u).is_none() {
        return Ok(0);
    }
    let (lo, hi) = s.subtree_ranges()[u - 1];
    let mut count = 0;
    let mut prev: Option<usize> = None;
    for &x in seq.iter().filter(|&&x| x >= lo && x <= hi) {
        if let Some(y) = prev {
            let both_left = x < u && y < u;
            let both_right = x > u && y > u;
            let both_u = x == u && y == u;
            if !both_left && !both_right && !both_u {
                count += 1;
            }
        }
        prev = Some(x);
    }
    Ok(count)
}

/// `lambda` plus the number of occurrences of `u` in the sequence.
pub fn lambda_prime(s: &Bst, u: usize, seq: &[usize]) -> Result<usize> {
    Ok(lambda(s, u, seq)? + seq.iter().filter(|&&x| x == u).count())
}

/// Per-node switch counts for every key, with totals.
pub fn report(s: &Bst, seq: &[usize]) -> Result<WilberReport> {
    check_sequence(s, seq)?;
    let mut per_node = BTreeMap::new();
    let mut total = 0;
    for u in 1..=s.n() {
        let l = lambda(s, u, seq)?;
        per_node.insert(u, l);
        total += l;
    }
    Ok(WilberReport {
        per_node,
        total,
        total_with_accesses: total + seq.len(),
    })
}

/// `prefix`, then strict alternation starting with `left` while both sides
/// last, then whatever remains.
pub fn interleave(left: &[usize], right: &[usize], prefix: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(prefix.len() + left.len() + right.len());
    out.extend_from_slice(prefix);
    let common = left.len().min(right.len());
    for i in 0..common {
        out.push(left[i]);
        out.push(right[i]);
    }
    out.extend_from_slice(&left[common..]);
    out.extend_from_slice(&right[common..]);
    out
}

fn sigma_of(s: &Bst, node: Option<usize>, w: &Weights) -> Vec<usize> {
    let Some(u) = node else {
        return Vec::new();
    };
    let prefix = vec![u; w.get(u)];
    let left = sigma_of(s, s.left(u), w);
    let right = sigma_of(s, s.right(u), w);
    interleave(&left, &right, &prefix)
}

/// Worst-case instance for the given access frequencies: the weight-balanced
/// tree together with a sequence that, on every subtree, first accesses the
/// root and then alternates between the two sides for as long as possible.
/// Each key `i` occurs exactly `w_i` times.
pub fn worst_case_instance(w: &Weights) -> Result<(Bst, Vec<usize>)> {
    if w.total() == 0 {
        return Err(Error::ZeroTotalWeight);
    }
    let s = Bst::mehlhorn(w)?;
    let sigma = sigma_of(&s, Some(s.root()), w);
    debug_assert_eq!(sigma.len(), w.total());
    Ok((s, sigma))
}

/// One recursion interval of [`worst_case_instance`], with both sides of the
/// certificate that drives its lower bound.
#[derive(Debug, Clone)]
pub struct IntervalCheck {
    pub lo: usize,
    pub hi: usize,
    pub root: usize,
    /// total weight of the interval
    pub weight: usize,
    /// min of the left/right subinterval weights at the root
    pub side_min: usize,
    /// lambda'(subtree root, interval sequence)
    pub root_switches: usize,
    /// Lambda'(subtree, interval sequence)
    pub subtree_switches: usize,
    /// weighted depth sum of the subtree under the interval weights
    pub cost: usize,
}

/// Recompute the full recursion of [`worst_case_instance`], reporting per
/// interval the weighted cost, the switch totals, and the root guarantee
/// `root_switches >= w_root + side_min`.
pub fn interval_checks(w: &Weights) -> Result<Vec<IntervalCheck>> {
    if w.total() == 0 {
        return Err(Error::ZeroTotalWeight);
    }
    let s = Bst::mehlhorn(w)?;
    let ranges = s.subtree_ranges();
    let mut out = Vec::new();
    fn rec(
        s: &Bst,
        u: usize,
        w: &Weights,
        ranges: &[(usize, usize)],
        out: &mut Vec<IntervalCheck>,
    ) -> (Vec<usize>, usize) {
        let (lo, hi) = ranges[u - 1];
        let (left_sigma, left_cost) = match s.left(u) {
            Some(l) => rec(s, l, w, ranges, out),
            None => (Vec::new(), 0),
        };
        let (right_sigma, right_cost) = match s.right(u) {
            Some(r) => rec(s, r, w, ranges, out),
            None => (Vec::new(), 0),
        };
        let sigma = interleave(&left_sigma, &right_sigma, &vec![u; w.get(u)]);
        let weight: usize = (lo..=hi).map(|i| w.get(i)).sum();
        // every node of the subtree is one level deeper than in its child
        // subtree, so the weighted cost telescopes
        let cost = weight + left_cost + right_cost;
        let subtree_switches = (lo..=hi)
            .map(|v| lambda(s, v, &sigma).unwrap())
            .sum::<usize>()
            + sigma.len();
        out.push(IntervalCheck {
            lo,
            hi,
            root: u,
            weight,
            side_min: left_sigma.len().min(right_sigma.len()),
            root_switches: lambda_prime(s, u, &sigma).unwrap(),
            subtree_switches,
            cost,
        });
        (sigma, cost)
    }
    rec(&s, s.root(), w, &ranges, &mut out);
    Ok(out)
}

/// The bit-reversal permutation of `1..=n`; `n` must be a power of two.
pub fn bit_reversal_sequence(n: usize) -> Vec<usize> {
    assert!(
        n.is_power_of_two(),
        "bit reversal needs a power-of-two length"
    );
    let bits = n.trailing_zeros();
    (0..n)
        .map(|x| {
            let mut rev = 0usize;
            for b in 0..bits {
                if x & (1 << b) != 0 {
                    rev |= 1 << (bits - 1 - b);
                }
            }
            rev + 1
        })
        .collect()
}
