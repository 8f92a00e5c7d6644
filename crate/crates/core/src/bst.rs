//! Binary search trees over the keys `1..=n`: rotations, weighted static
//! access cost, optimal static trees (interval dynamic program), the
//! weight-balancing construction behind the entropy bound, and rotation
//! schedules restricted to the top of the tree.

use serde::{Deserialize, Serialize};

use crate::caterpillar::shannon_entropy;
use crate::error::{Error, Result};

/// Access frequencies `(m_1, ..., m_n)` for the keys of a [`Bst`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(Vec<usize>);

impl Weights {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyWeights);
        }
        Ok(Weights(counts))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Weight of key `i` (1-based).
    pub fn get(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.0)
    }

    pub fn entropy_plus_one(&self) -> f64 {
        self.entropy() + 1.0
    }
}

/// An ordered rotation: `(parent_key, child_key)`, the child becoming the
/// parent when applied.
pub type BstRotation = (usize, usize);

/// Binary search tree on keys `1..=n`. Values are immutable; every operation
/// returns a fresh tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BstJson", into = "BstJson")]
pub struct Bst {
    /// left child of key k at slot k-1
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
    root: usize,
}

/// Wire form: `{"n":5,"parent":[2,0,4,2,4]}` with 0 marking the root.
#[derive(Clone, Serialize, Deserialize)]
struct BstJson {
    n: usize,
    parent: Vec<usize>,
}

impl TryFrom<BstJson> for Bst {
    type Error = Error;

    fn try_from(raw: BstJson) -> Result<Self> {
        if raw.parent.len() != raw.n {
            return Err(Error::LengthMismatch {
                expected: raw.n,
                got: raw.parent.len(),
            });
        }
        Bst::from_parents(&raw.parent)
    }
}

impl From<Bst> for BstJson {
    fn from(t: Bst) -> Self {
        BstJson {
            n: t.n(),
            parent: t.parents(),
        }
    }
}

impl Bst {
    /// Rebuild a tree from its parent array (0 marks the root). Fails unless
    /// the links describe a single tree whose in-order traversal is sorted.
    pub fn from_parents(parent: &[usize]) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::EmptyWeights);
        }
        let mut left = vec![None; n];
        let mut right = vec![None; n];
        let mut root = None;
        for (slot, &p) in parent.iter().enumerate() {
            let k = slot + 1;
            if p == 0 {
                if root.replace(k).is_some() {
                    return Err(Error::MalformedTree("two roots".into()));
                }
            } else if p > n {
                return Err(Error::KeyOutOfRange { key: p, n });
            } else if k < p {
                if left[p - 1].replace(k).is_some() {
                    return Err(Error::MalformedTree(format!(
                        "key {p} has two left children"
                    )));
                }
            } else if k > p {
                if right[p - 1].replace(k).is_some() {
                    return Err(Error::MalformedTree(format!(
                        "key {p} has two right children"
                    )));
                }
            } else {
                return Err(Error::MalformedTree(format!("key {k} is its own parent")));
            }
        }
        let root = root.ok_or_else(|| Error::MalformedTree("no root".into()))?;
        let t = Bst { left, right, root };
        let mut order = Vec::with_capacity(n);
        t.in_order_into(t.root, &mut order);
        if order.len() != n || order.iter().enumerate().any(|(i, &k)| k != i + 1) {
            return Err(Error::MalformedTree(
                "links do not form a search tree".into(),
            ));
        }
        Ok(t)
    }

    /// The right path `1 -> 2 -> ... -> n` (no node has a left child).
    pub fn right_path(n: usize) -> Self {
        assert!(n >= 1);
        let mut right = vec![None; n];
        for k in 1..n {
            right[k - 1] = Some(k + 1);
        }
        Bst {
            left: vec![None; n],
            right,
            root: 1,
        }
    }

    /// The left path `n -> n-1 -> ... -> 1`.
    pub fn left_path(n: usize) -> Self {
        assert!(n >= 1);
        let mut left = vec![None; n];
        for k in 2..=n {
            left[k - 1] = Some(k - 1);
        }
        Bst {
            left,
            right: vec![None; n],
            root: n,
        }
    }

    /// Perfectly balanced tree (midpoint roots).
    pub fn balanced(n: usize) -> Self {
        assert!(n >= 1);
        let mut left = vec![None; n];
        let mut right = vec![None; n];
        fn build(
            lo: usize,
            hi: usize,
            left: &mut [Option<usize>],
            right: &mut [Option<usize>],
        ) -> Option<usize> {
            if lo > hi {
                return None;
            }
            let mid = (lo + hi) / 2;
            left[mid - 1] = build(lo, mid - 1, left, right);
            right[mid - 1] = if mid == hi {
                None
            } else {
                build(mid + 1, hi, left, right)
            };
            Some(mid)
        }
        let root = build(1, n, &mut left, &mut right).unwrap();
        Bst { left, right, root }
    }

    pub fn n(&self) -> usize {
        self.left.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn left(&self, key: usize) -> Option<usize> {
        self.left[key - 1]
    }

    pub fn right(&self, key: usize) -> Option<usize> {
        self.right[key - 1]
    }

    pub fn parent_of(&self, key: usize) -> Option<usize> {
        (1..=self.n()).find(|&p| self.left[p - 1] == Some(key) || self.right[p - 1] == Some(key))
    }

    /// Parent array with 0 marking the root.
    pub fn parents(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for p in 1..=self.n() {
            if let Some(c) = self.left[p - 1] {
                out[c - 1] = p;
            }
            if let Some(c) = self.right[p - 1] {
                out[c - 1] = p;
            }
        }
        out
    }

    pub fn edges(&self) -> Vec<BstRotation> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for p in 1..=self.n() {
            if let Some(c) = self.left[p - 1] {
                out.push((p, c));
            }
            if let Some(c) = self.right[p - 1] {
                out.push((p, c));
            }
        }
        out
    }

    fn in_order_into(&self, key: usize, out: &mut Vec<usize>) {
        if out.len() > self.n() {
            return; // cycle guard for unvalidated links
        }
        if let Some(l) = self.left[key - 1] {
            self.in_order_into(l, out);
        }
        out.push(key);
        if out.len() > self.n() {
            return;
        }
        if let Some(r) = self.right[key - 1] {
            self.in_order_into(r, out);
        }
    }

    pub fn in_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        self.in_order_into(self.root, &mut out);
        out
    }

    pub fn is_right_path(&self) -> bool {
        self.left.iter().all(|l| l.is_none())
    }

    fn check_key(&self, key: usize) -> Result<()> {
        if key == 0 || key > self.n() {
            return Err(Error::KeyOutOfRange { key, n: self.n() });
        }
        Ok(())
    }

    /// Number of nodes on the path from the root to `key`, the root having
    /// depth 1.
    pub fn depth(&self, key: usize) -> Result<usize> {
        self.check_key(key)?;
        Ok(self.depths()[key - 1])
    }

    /// Depths of all keys (slot k-1 for key k).
    pub fn depths(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        let mut stack = vec![(self.root, 1usize)];
        while let Some((k, d)) = stack.pop() {
            out[k - 1] = d;
            if let Some(l) = self.left[k - 1] {
                stack.push((l, d + 1));
            }
            if let Some(r) = self.right[k - 1] {
                stack.push((r, d + 1));
            }
        }
        out
    }

    /// Key interval `[lo, hi]` spanned by each key's subtree.
    pub fn subtree_ranges(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.n()];
        fn rec(t: &Bst, k: usize, out: &mut Vec<(usize, usize)>) -> (usize, usize) {
            let mut lo = k;
            let mut hi = k;
            if let Some(l) = t.left[k - 1] {
                lo = rec(t, l, out).0;
            }
            if let Some(r) = t.right[k - 1] {
                hi = rec(t, r, out).1;
            }
            out[k - 1] = (lo, hi);
            (lo, hi)
        }
        rec(self, self.root, &mut out);
        out
    }

    /// Rotate the tree edge `(p, c)`: `c` becomes the parent of `p`, the
    /// inner subtree of `c` is re-hung on `p`, everything else stays.
    pub fn rotate(&self, p: usize, c: usize) -> Result<Bst> {
        self.check_key(p)?;
        self.check_key(c)?;
        let mut t = self.clone();
        if t.left[p - 1] == Some(c) {
            t.left[p - 1] = t.right[c - 1];
            t.right[c - 1] = Some(p);
        } else if t.right[p - 1] == Some(c) {
            t.right[p - 1] = t.left[c - 1];
            t.left[c - 1] = Some(p);
        } else {
            return Err(Error::NotAnEdge {
                parent: p.to_string(),
                child: c.to_string(),
            });
        }
        match self.parent_of(p) {
            None => t.root = c,
            Some(g) => {
                if t.left[g - 1] == Some(p) {
                    t.left[g - 1] = Some(c);
                } else {
                    t.right[g - 1] = Some(c);
                }
            }
        }
        Ok(t)
    }

    pub fn apply_sequence(&self, seq: &[BstRotation]) -> Result<Bst> {
        let mut cur = self.clone();
        for (index, &(p, c)) in seq.iter().enumerate() {
            cur = cur.rotate(p, c).map_err(|e| Error::SequenceStuck {
                index,
                source: Box::new(e),
            })?;
        }
        Ok(cur)
    }

    /// Weighted access cost `sum of w_i * depth(i)`.
    pub fn static_cost(&self, w: &Weights) -> Result<usize> {
        if w.n() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: w.n(),
            });
        }
        Ok(self
            .depths()
            .iter()
            .zip(w.as_slice())
            .map(|(&d, &wi)| d * wi)
            .sum())
    }

    /// Minimum-cost static tree for the given access frequencies, via the
    /// interval dynamic program (the classical O(n^2) root-monotonicity
    /// speedup is deliberately not applied; the full scan keeps the chosen
    /// roots independent of evaluation order). Ties pick the smallest root.
    pub fn optimal(w: &Weights) -> Result<(Bst, usize)> {
        let n = w.n();
        let mut prefix = vec![0usize; n + 1];
        for i in 1..=n {
            prefix[i] = prefix[i - 1] + w.get(i);
        }
        let wsum = |i: usize, j: usize| prefix[j] - prefix[i - 1];

        // dp[i][j] over 1 <= i <= j <= n; empty intervals cost 0
        let mut dp = vec![vec![0usize; n + 2]; n + 2];
        let mut best_root = vec![vec![0usize; n + 2]; n + 2];
        for len in 1..=n {
            for i in 1..=(n - len + 1) {
                let j = i + len - 1;
                let mut best = usize::MAX;
                let mut root = i;
                for r in i..=j {
                    let below = dp[i][r - 1] + dp[r + 1][j];
                    if below < best {
                        best = below;
                        root = r;
                    }
                }
                dp[i][j] = best + wsum(i, j);
                best_root[i][j] = root;
            }
        }

        let mut left = vec![None; n];
        let mut right = vec![None; n];
        fn build(
            i: usize,
            j: usize,
            best_root: &[Vec<usize>],
            left: &mut [Option<usize>],
            right: &mut [Option<usize>],
        ) -> Option<usize> {
            if i > j {
                return None;
            }
            let r = best_root[i][j];
            left[r - 1] = build(i, r - 1, best_root, left, right);
            right[r - 1] = build(r + 1, j, best_root, left, right);
            Some(r)
        }
        let root = build(1, n, &best_root, &mut left, &mut right).unwrap();
        Ok((Bst { left, right, root }, dp[1][n]))
    }

    /// Weight-balancing construction (Mehlhorn): on every interval `[p, q]`
    /// with positive weight, the chosen root `i` maximizes
    /// `w_i + min(a_i, b_i)` where `a_i`, `b_i` are the weights of the left
    /// and right subintervals; such a root always satisfies
    /// `w_i + min(a_i, b_i) >= weight(p, q) / 2`. Zero-weight intervals get
    /// midpoint roots. Ties pick the smallest index.
    pub fn mehlhorn(w: &Weights) -> Result<Bst> {
        let n = w.n();
        let mut prefix = vec![0usize; n + 1];
        for i in 1..=n {
            prefix[i] = prefix[i - 1] + w.get(i);
        }
        let wsum = |i: usize, j: usize| if i > j { 0 } else { prefix[j] - prefix[i - 1] };

        let mut left = vec![None; n];
        let mut right = vec![None; n];
        fn build(
            p: usize,
            q: usize,
            w: &Weights,
            wsum: &dyn Fn(usize, usize) -> usize,
            left: &mut [Option<usize>],
            right: &mut [Option<usize>],
        ) -> Option<usize> {
            if p > q {
                return None;
            }
            let total = wsum(p, q);
            let r = if total == 0 {
                (p + q) / 2
            } else {
                let mut best = p;
                let mut best_score = 0usize;
                for i in p..=q {
                    let score = w.get(i) + wsum(p, i - 1).min(wsum(i + 1, q));
                    if score > best_score {
                        best_score = score;
                        best = i;
                    }
                }
                best
            };
            left[r - 1] = build(p, r - 1, w, wsum, left, right);
            right[r - 1] = build(r + 1, q, w, wsum, left, right);
            Some(r)
        }
        let root = build(1, n, w, &wsum, &mut left, &mut right).unwrap();
        Ok(Bst { left, right, root })
    }

    /// Rotation sequence turning this tree into the right path. Every
    /// rotation's parent node is, when applied, the root or the root's right
    /// child, and the sequence has length at most `3n`.
    ///
    /// Works in three stages: consume the root's left spine, then flatten the
    /// right side while parking finished keys as a left path under the root,
    /// then unwind the parked path.
    pub fn right_path_transform(&self) -> Vec<BstRotation> {
        let mut seq = Vec::new();
        let mut cur = self.clone();
        while let Some(c) = cur.left(cur.root) {
            seq.push((cur.root, c));
            cur = cur.rotate(cur.root, c).unwrap();
        }
        loop {
            // stop once everything right of the root is a clean right path
            let mut v = cur.right(cur.root);
            let mut clean = true;
            while let Some(x) = v {
                if cur.left(x).is_some() {
                    clean = false;
                    break;
                }
                v = cur.right(x);
            }
            if clean {
                break;
            }
            let rr = cur.right(cur.root).unwrap();
            let (p, c) = match cur.left(rr) {
                Some(c) => (rr, c),
                // right child is the minimum of the right subtree: park it
                None => (cur.root, rr),
            };
            seq.push((p, c));
            cur = cur.rotate(p, c).unwrap();
        }
        while let Some(c) = cur.left(cur.root) {
            seq.push((cur.root, c));
            cur = cur.rotate(cur.root, c).unwrap();
        }
        debug_assert!(cur.is_right_path());
        debug_assert!(seq.len() <= 3 * self.n());
        seq
    }

    /// [`Bst::right_path_transform`] followed by `n - 1` rotations of the
    /// root with its right child. Applying the schedule, every key is the
    /// root at some point and no rotation touches a node of depth > 3.
    pub fn root_visit_schedule(&self) -> Vec<BstRotation> {
        let mut seq = self.right_path_transform();
        for k in 1..self.n() {
            seq.push((k, k + 1));
        }
        seq
    }

    /// Rotation sequence transforming `self` into `target`, routed through
    /// the right path from both ends. Length at most `6n`.
    pub fn transform_sequence(&self, target: &Bst) -> Result<Vec<BstRotation>> {
        if self.n() != target.n() {
            return Err(Error::KeyRangeMismatch(self.n(), target.n()));
        }
        if self == target {
            return Ok(Vec::new());
        }
        let mut seq = self.right_path_transform();
        let back = target.right_path_transform();
        seq.extend(back.iter().rev().map(|&(p, c)| (c, p)));
        debug_assert_eq!(&self.apply_sequence(&seq).unwrap(), target);
        Ok(seq)
    }

    /// All BSTs on `1..=n`, in a deterministic order. Grows like the Catalan
    /// numbers; intended for small-scale oracles and tests.
    pub fn enumerate_all(n: usize) -> Vec<Bst> {
        assert!(n >= 1);
        // (root, edges as (parent, child, is_left))
        type Shape = (Option<usize>, Vec<(usize, usize, bool)>);
        fn rec(lo: usize, hi: usize) -> Vec<Shape> {
            if lo > hi {
                return vec![(None, Vec::new())];
            }
            let mut out = Vec::new();
            for r in lo..=hi {
                for (lroot, ledges) in rec(lo, r - 1) {
                    for (rroot, redges) in rec(r + 1, hi) {
                        let mut edges = ledges.clone();
                        edges.extend(redges.iter().cloned());
                        if let Some(lr) = lroot {
                            edges.push((r, lr, true));
                        }
                        if let Some(rr) = rroot {
                            edges.push((r, rr, false));
                        }
                        out.push((Some(r), edges));
                    }
                }
            }
            out
        }
        rec(1, n)
            .into_iter()
            .map(|(root, edges)| {
                let mut left = vec![None; n];
                let mut right = vec![None; n];
                for (p, c, is_left) in edges {
                    if is_left {
                        left[p - 1] = Some(c);
                    } else {
                        right[p - 1] = Some(c);
                    }
                }
                Bst {
                    left,
                    right,
                    root: root.unwrap(),
                }
            })
            .collect()
    }
}
