//! Rooted search trees on caterpillars: the root of (every subtree of) a
//! search tree splits its graph into connected components, one child subtree
//! per component. Includes rotations with child redistribution, pruning and
//! projection, spine-BST extraction, leg classification, the two canonical
//! tree shapes (all legs stacked above the spine / all legs bound), and
//! alternation numbers over a root partition.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bst::Bst;
use crate::caterpillar::{Caterpillar, VertexId};
use crate::error::{Error, Result};

/// A rotation step `(parent, child)`; the child becomes the parent.
pub type StgRotation = (VertexId, VertexId);

/// Whether a leg node currently has a child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegState {
    /// Childless; its parent is the adjacent spine node.
    Bound,
    /// Has exactly one child; its adjacent spine node is a descendant.
    Free,
}

/// A search tree on (an induced connected subgraph of) a caterpillar.
/// Values are immutable; operations return fresh trees. Two trees compare
/// equal iff they are on the same caterpillar with identical vertex sets and
/// parent links.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StgJson", into = "StgJson")]
pub struct Stg {
    cat: Caterpillar,
    present: Vec<bool>,
    root: usize,
    parent: Vec<Option<usize>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct StgJson {
    caterpillar: Caterpillar,
    root: String,
    parent: BTreeMap<String, String>,
}

impl TryFrom<StgJson> for Stg {
    type Error = Error;

    fn try_from(raw: StgJson) -> Result<Self> {
        let cat = raw.caterpillar;
        let root: VertexId = raw.root.parse()?;
        let mut pairs = Vec::with_capacity(raw.parent.len());
        for (child, parent) in &raw.parent {
            pairs.push((child.parse::<VertexId>()?, parent.parse::<VertexId>()?));
        }
        Stg::from_partial_parent_map(&cat, root, &pairs)
    }
}

impl From<Stg> for StgJson {
    fn from(t: Stg) -> Self {
        let mut parent = BTreeMap::new();
        for ix in t.present_ixs() {
            if let Some(p) = t.parent[ix] {
                parent.insert(t.cat.vertex(ix).to_string(), t.cat.vertex(p).to_string());
            }
        }
        StgJson {
            root: t.cat.vertex(t.root).to_string(),
            caterpillar: t.cat,
            parent,
        }
    }
}

impl Stg {
    /// Build a tree on the full caterpillar from explicit `(child, parent)`
    /// links. Checks that the links form a single rooted tree covering every
    /// vertex; it does not have to satisfy the search-tree condition (see
    /// [`Stg::is_valid`]).
    pub fn from_parent_map(
        cat: &Caterpillar,
        root: VertexId,
        parents: &[(VertexId, VertexId)],
    ) -> Result<Stg> {
        let t = Self::from_partial_parent_map(cat, root, parents)?;
        if t.present_count() != cat.vertex_count() {
            return Err(Error::MalformedTree(
                "parent map does not cover every vertex".into(),
            ));
        }
        Ok(t)
    }

    /// Like [`Stg::from_parent_map`] but the vertex set is inferred from the
    /// links, so projected trees round-trip too.
    pub fn from_partial_parent_map(
        cat: &Caterpillar,
        root: VertexId,
        parents: &[(VertexId, VertexId)],
    ) -> Result<Stg> {
        let v = cat.vertex_count();
        let root_ix = cat.index(root)?;
        let mut present = vec![false; v];
        let mut parent = vec![None; v];
        present[root_ix] = true;
        for &(child, par) in parents {
            let c = cat.index(child)?;
            let p = cat.index(par)?;
            if c == root_ix {
                return Err(Error::MalformedTree(format!(
                    "root {child} also has a parent"
                )));
            }
            if parent[c].replace(p).is_some() {
                return Err(Error::MalformedTree(format!("{child} has two parents")));
            }
            present[c] = true;
            present[p] = true;
        }
        let t = Stg {
            cat: cat.clone(),
            present,
            root: root_ix,
            parent,
        };
        // every present non-root vertex needs a parent, and all links must
        // lead back to the root
        let mut reached = 0;
        for ix in t.present_ixs() {
            let mut cur = ix;
            let mut steps = 0;
            while let Some(p) = t.parent[cur] {
                cur = p;
                steps += 1;
                if steps > v {
                    return Err(Error::MalformedTree("parent links contain a cycle".into()));
                }
            }
            if cur != t.root {
                return Err(Error::MalformedTree(format!(
                    "{} is not connected to the root",
                    t.cat.vertex(ix)
                )));
            }
            reached += 1;
        }
        debug_assert!(reached >= 1);
        Ok(t)
    }

    /// Assemble a full tree from dense-index edges without validation; the
    /// caller guarantees the edges form a rooted tree covering every vertex.
    pub(crate) fn from_raw_parts(
        cat: &Caterpillar,
        root: usize,
        child_parent_edges: &[(usize, usize)],
    ) -> Stg {
        let v = cat.vertex_count();
        let mut parent = vec![None; v];
        for &(c, p) in child_parent_edges {
            parent[c] = Some(p);
        }
        debug_assert_eq!(child_parent_edges.len(), v - 1);
        Stg {
            cat: cat.clone(),
            present: vec![true; v],
            root,
            parent,
        }
    }

    pub fn caterpillar(&self) -> &Caterpillar {
        &self.cat
    }

    pub fn root_vertex(&self) -> VertexId {
        self.cat.vertex(self.root)
    }

    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.cat
            .index(v)
            .map(|ix| self.present[ix])
            .unwrap_or(false)
    }

    pub fn present_vertices(&self) -> Vec<VertexId> {
        self.present_ixs().map(|ix| self.cat.vertex(ix)).collect()
    }

    fn present_ixs(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(ix, _)| ix)
    }

    fn require(&self, v: VertexId) -> Result<usize> {
        let ix = self.cat.index(v)?;
        if !self.present[ix] {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(ix)
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>> {
        let ix = self.require(v)?;
        Ok(self.parent[ix].map(|p| self.cat.vertex(p)))
    }

    fn children_raw(&self, ix: usize) -> Vec<usize> {
        self.present_ixs()
            .filter(|&c| self.parent[c] == Some(ix))
            .collect()
    }

    fn subtree_ix(&self, ix: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![ix];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children_raw(v));
        }
        out.sort_unstable();
        out
    }

    /// Children of `v` in canonical order: sorted by the smallest dense
    /// vertex index contained in each child subtree.
    pub fn children(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let ix = self.require(v)?;
        let mut kids: Vec<(usize, usize)> = self
            .children_raw(ix)
            .into_iter()
            .map(|c| (self.subtree_ix(c)[0], c))
            .collect();
        kids.sort_unstable();
        Ok(kids.into_iter().map(|(_, c)| self.cat.vertex(c)).collect())
    }

    pub fn subtree(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let ix = self.require(v)?;
        Ok(self
            .subtree_ix(ix)
            .into_iter()
            .map(|i| self.cat.vertex(i))
            .collect())
    }

    /// Number of spine vertices strictly above `v`.
    pub fn spine_ancestors(&self, v: VertexId) -> Result<usize> {
        let mut ix = self.require(v)?;
        let mut count = 0;
        while let Some(p) = self.parent[ix] {
            if self.cat.is_spine_ix(p) {
                count += 1;
            }
            ix = p;
        }
        Ok(count)
    }

    pub fn tree_edges(&self) -> Vec<StgRotation> {
        self.present_ixs()
            .filter_map(|c| self.parent[c].map(|p| (self.cat.vertex(p), self.cat.vertex(c))))
            .collect()
    }

    fn induced_components(&self, members: &[usize], skip: usize) -> Vec<Vec<usize>> {
        let v = self.cat.vertex_count();
        let mut inside = vec![false; v];
        for &ix in members {
            inside[ix] = true;
        }
        inside[skip] = false;
        let mut seen = vec![false; v];
        let mut comps = Vec::new();
        for &start in members {
            if start == skip || seen[start] || !inside[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                comp.push(x);
                for y in self.cat.neighbors_ix(x) {
                    if inside[y] && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Recursive search-tree condition: removing any subtree root from its
    /// graph leaves exactly one connected component per child, with matching
    /// vertex sets.
    pub fn is_valid(&self) -> bool {
        let all: Vec<usize> = self.present_ixs().collect();
        self.valid_on(&all, self.root)
    }

    fn valid_on(&self, members: &[usize], root: usize) -> bool {
        let comps = self.induced_components(members, root);
        let kids = self.children_raw(root);
        if kids.len() != comps.len() {
            return false;
        }
        for kid in kids {
            let sub = self.subtree_ix(kid);
            let Some(comp) = comps.iter().find(|c| c.binary_search(&kid).is_ok()) else {
                return false;
            };
            if &sub != comp {
                return false;
            }
            if !self.valid_on(&sub, kid) {
                return false;
            }
        }
        true
    }

    /// Rotate the tree edge `(p, c)`: `c` takes `p`'s place and `p` becomes a
    /// child of `c`; a former child subtree of `c` moves to `p` exactly when
    /// it contains a vertex adjacent to `p`. Rotating a valid tree yields a
    /// valid tree.
    pub fn rotate(&self, p: VertexId, c: VertexId) -> Result<Stg> {
        let pi = self.require(p)?;
        let ci = self.require(c)?;
        if self.parent[ci] != Some(pi) {
            return Err(Error::NotAnEdge {
                parent: p.to_string(),
                child: c.to_string(),
            });
        }
        let mut t = self.clone();
        t.parent[ci] = self.parent[pi];
        t.parent[pi] = Some(ci);
        if self.root == pi {
            t.root = ci;
        }
        for x in self.children_raw(ci) {
            let sub = self.subtree_ix(x);
            if sub.iter().any(|&y| self.cat.adjacent_ix(y, pi)) {
                t.parent[x] = Some(pi);
            }
        }
        Ok(t)
    }

    pub fn apply(&self, seq: &[StgRotation]) -> Result<Stg> {
        let mut cur = self.clone();
        for (index, &(p, c)) in seq.iter().enumerate() {
            cur = cur.rotate(p, c).map_err(|e| Error::SequenceStuck {
                index,
                source: Box::new(e),
            })?;
        }
        Ok(cur)
    }

    /// Remove a vertex that is a leaf of the current graph, splicing its
    /// single child (if any) to its parent, or making the child the root.
    pub fn prune(&self, v: VertexId) -> Result<Stg> {
        let ix = self.require(v)?;
        if self.present_count() == 1 {
            return Err(Error::MalformedTree("cannot prune the last vertex".into()));
        }
        let degree = self
            .cat
            .neighbors_ix(ix)
            .into_iter()
            .filter(|&x| self.present[x])
            .count();
        if degree > 1 {
            return Err(Error::NotAGraphLeaf(v.to_string()));
        }
        let kids = self.children_raw(ix);
        if kids.len() > 1 {
            return Err(Error::MalformedTree(format!(
                "graph leaf {v} has {} children",
                kids.len()
            )));
        }
        let mut t = self.clone();
        t.present[ix] = false;
        t.parent[ix] = None;
        match kids.first() {
            Some(&c) => {
                t.parent[c] = self.parent[ix];
                if self.root == ix {
                    t.root = c;
                }
            }
            None => {
                if self.root == ix {
                    return Err(Error::MalformedTree(
                        "childless root is the whole tree".into(),
                    ));
                }
            }
        }
        Ok(t)
    }

    /// Project onto a vertex subset whose induced subgraph is connected, by
    /// pruning everything else; the pruning order does not affect the result.
    pub fn project(&self, keep: &[VertexId]) -> Result<Stg> {
        let v = self.cat.vertex_count();
        let mut mask = vec![false; v];
        let mut count = 0;
        for &vid in keep {
            let ix = self.require(vid)?;
            if !mask[ix] {
                mask[ix] = true;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::DisconnectedProjection);
        }
        // connectivity of the induced subgraph
        let start = mask.iter().position(|&b| b).unwrap();
        let mut seen = vec![false; v];
        seen[start] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for y in self.cat.neighbors_ix(x) {
                if mask[y] && !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != count {
            return Err(Error::DisconnectedProjection);
        }

        let mut cur = self.clone();
        while cur.present_count() > count {
            let removable = (0..v).find(|&ix| {
                cur.present[ix]
                    && !mask[ix]
                    && self
                        .cat
                        .neighbors_ix(ix)
                        .into_iter()
                        .filter(|&x| cur.present[x])
                        .count()
                        <= 1
            });
            match removable {
                Some(ix) => cur = cur.prune(self.cat.vertex(ix))?,
                None => return Err(Error::DisconnectedProjection),
            }
        }
        Ok(cur)
    }

    /// The projection onto the spine, re-indexed so spine vertex `s_i` is
    /// key `i`. All spine vertices must be present (always true for trees on
    /// the full caterpillar).
    pub fn spine_bst(&self) -> Bst {
        let spine: Vec<VertexId> = (1..=self.cat.n()).map(VertexId::Spine).collect();
        let proj = self.project(&spine).expect("spine vertices present");
        let mut parents = vec![0; self.cat.n()];
        for i in 1..=self.cat.n() {
            if let Some(VertexId::Spine(p)) = proj.parent(VertexId::Spine(i)).unwrap() {
                parents[i - 1] = p;
            }
        }
        Bst::from_parents(&parents).expect("spine projection is a search tree")
    }

    /// Classify every present leg: bound if childless, free otherwise.
    pub fn leg_states(&self) -> BTreeMap<VertexId, LegState> {
        let mut out = BTreeMap::new();
        for v in self.cat.leg_vertices() {
            let ix = self.cat.index(v).unwrap();
            if self.present[ix] {
                let state = if self.children_raw(ix).is_empty() {
                    LegState::Bound
                } else {
                    LegState::Free
                };
                out.insert(v, state);
            }
        }
        out
    }

    pub fn is_all_bound(&self) -> bool {
        self.leg_states().values().all(|&s| s == LegState::Bound)
    }

    /// True if no leg has a spine ancestor, i.e. the legs form a path on top
    /// of the tree with the whole spine below.
    pub fn is_legs_above(&self) -> bool {
        self.cat
            .leg_vertices()
            .filter(|&v| self.contains(v))
            .all(|v| self.spine_ancestors(v).unwrap() == 0)
    }

    /// Spine-BST edge `(p, c)` is light iff `(s_p, s_c)` is also an edge of
    /// this tree. Only light edges can be rotated as spine rotations.
    pub fn light_edges(&self) -> Vec<(usize, usize)> {
        let bst = self.spine_bst();
        bst.edges()
            .into_iter()
            .filter(|&(p, c)| self.is_light(p, c))
            .collect()
    }

    /// Whether the spine pair `(p, c)` is a direct tree edge.
    pub fn is_light(&self, p_key: usize, c_key: usize) -> bool {
        let p = self.cat.index(VertexId::Spine(p_key)).unwrap();
        let c = self.cat.index(VertexId::Spine(c_key)).unwrap();
        self.parent[c] == Some(p)
    }

    /// The unique tree with spine shaped like `spine` and all legs stacked
    /// above the spine, bottom-to-top in the given order.
    pub fn legs_above(cat: &Caterpillar, spine: &Bst, order: &[VertexId]) -> Result<Stg> {
        if spine.n() != cat.n() {
            return Err(Error::KeyRangeMismatch(spine.n(), cat.n()));
        }
        let mut legs: Vec<VertexId> = order.to_vec();
        legs.sort_unstable();
        legs.dedup();
        let mut expected: Vec<VertexId> = cat.leg_vertices().collect();
        expected.sort_unstable();
        if legs != expected || order.len() != expected.len() {
            return Err(Error::BadLegOrdering);
        }

        let mut t = Self::spine_only(cat, spine);
        let bst_root_ix = cat.index(VertexId::Spine(spine.root())).unwrap();
        let mut below = bst_root_ix;
        for &leg in order {
            let ix = cat.index(leg)?;
            t.present[ix] = true;
            t.parent[below] = Some(ix);
            below = ix;
        }
        t.root = below;
        Ok(t)
    }

    /// The unique tree with spine shaped like `spine` and every leg bound to
    /// its adjacent spine vertex.
    pub fn all_bound(cat: &Caterpillar, spine: &Bst) -> Result<Stg> {
        if spine.n() != cat.n() {
            return Err(Error::KeyRangeMismatch(spine.n(), cat.n()));
        }
        let mut t = Self::spine_only(cat, spine);
        for leg in cat.leg_vertices() {
            let ix = cat.index(leg).unwrap();
            let spine_ix = cat.index(VertexId::Spine(leg.spine_position())).unwrap();
            t.present[ix] = true;
            t.parent[ix] = Some(spine_ix);
        }
        Ok(t)
    }

    /// Tree holding only the spine, shaped like `spine`; legs absent.
    fn spine_only(cat: &Caterpillar, spine: &Bst) -> Stg {
        let v = cat.vertex_count();
        let mut present = vec![false; v];
        let mut parent = vec![None; v];
        for i in 1..=cat.n() {
            let ix = cat.index(VertexId::Spine(i)).unwrap();
            present[ix] = true;
            parent[ix] = spine
                .parent_of(i)
                .map(|p| cat.index(VertexId::Spine(p)).unwrap());
        }
        let root = cat.index(VertexId::Spine(spine.root())).unwrap();
        Stg {
            cat: cat.clone(),
            present,
            root,
            parent,
        }
    }
}

/// Replace every leg in the ordering by its adjacent spine position, giving
/// the access sequence the legs induce on the spine keys.
pub fn spine_accesses(order: &[VertexId]) -> Vec<usize> {
    debug_assert!(order.iter().all(VertexId::is_leg));
    order.iter().map(VertexId::spine_position).collect()
}

/// Inverse direction: a leg ordering realizing the given spine accesses, the
/// k-th access of position `i` served by leg `(i, k)`. The sequence must hit
/// each spine position exactly its leg count.
pub fn order_for_accesses(cat: &Caterpillar, sigma: &[usize]) -> Result<Vec<VertexId>> {
    let mut next = vec![1usize; cat.n() + 1];
    let mut out = Vec::with_capacity(sigma.len());
    for &i in sigma {
        if i == 0 || i > cat.n() {
            return Err(Error::AccessOutOfRange { key: i, n: cat.n() });
        }
        if next[i] > cat.leg_count(i) {
            return Err(Error::BadLegOrdering);
        }
        out.push(VertexId::Leg(i, next[i]));
        next[i] += 1;
    }
    if out.len() != cat.m() {
        return Err(Error::BadLegOrdering);
    }
    Ok(out)
}

/// Region of the root partition derived from a spine BST: the root's spine
/// vertex and its legs form the center; the vertices under the root's left
/// and right BST children (plus their legs) form the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Center,
    Lower,
    Upper,
}

/// Partition of all caterpillar vertices into center / lower side / upper
/// side, as determined by the root of a spine BST. A side is empty when the
/// BST root lacks the corresponding child.
#[derive(Debug, Clone)]
pub struct RootPartition {
    cat: Caterpillar,
    region: Vec<Region>,
}

impl RootPartition {
    pub fn new(cat: &Caterpillar, spine: &Bst) -> Result<Self> {
        if spine.n() != cat.n() {
            return Err(Error::KeyRangeMismatch(spine.n(), cat.n()));
        }
        let r = spine.root();
        let mut region = vec![Region::Center; cat.vertex_count()];
        let assign = |key: usize, reg: Region, region: &mut Vec<Region>| {
            region[cat.index(VertexId::Spine(key)).unwrap()] = reg;
            for j in 1..=cat.leg_count(key) {
                region[cat.index(VertexId::Leg(key, j)).unwrap()] = reg;
            }
        };
        let ranges = spine.subtree_ranges();
        let (lo, hi) = ranges[r - 1];
        for key in lo..r {
            assign(key, Region::Lower, &mut region);
        }
        for key in (r + 1)..=hi {
            assign(key, Region::Upper, &mut region);
        }
        Ok(RootPartition {
            cat: cat.clone(),
            region,
        })
    }

    pub fn region_of(&self, v: VertexId) -> Result<Region> {
        Ok(self.region[self.cat.index(v)?])
    }

    pub fn members(&self, r: Region) -> Vec<VertexId> {
        self.region
            .iter()
            .enumerate()
            .filter(|(_, &reg)| reg == r)
            .map(|(ix, _)| self.cat.vertex(ix))
            .collect()
    }
}

impl Stg {
    /// Maximum, over root-to-node paths, of the number of path edges whose
    /// endpoints lie in different partition regions. One rotation changes
    /// this by at most two, and not at all when both rotated vertices share
    /// a region.
    pub fn alternation_number(&self, part: &RootPartition) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0usize)];
        while let Some((ix, alt)) = stack.pop() {
            best = best.max(alt);
            for c in self.children_raw(ix) {
                let step = usize::from(part.region[c] != part.region[ix]);
                stack.push((c, alt + step));
            }
        }
        best
    }
}
