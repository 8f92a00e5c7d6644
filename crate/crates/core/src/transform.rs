//! The constructive upper-bound pipeline: lift every leg above the spine,
//! reshape the spine through restricted rotations, settle the legs through a
//! cost-optimal static spine tree, and glue two such halves into an
//! end-to-end rotation sequence between arbitrary trees on the same
//! caterpillar.

use serde::Serialize;

use crate::bst::{Bst, Weights};
use crate::caterpillar::VertexId;
use crate::error::{Error, Result};
use crate::stg::{Stg, StgRotation};

/// Rotation counts of the five phases of [`transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseLengths {
    /// lift the source tree's legs above its spine
    pub reduce1: usize,
    /// reshape the source spine and settle its legs into the pivot tree
    pub settle1: usize,
    /// bridge between the two all-bound trees (empty: both halves settle
    /// into the same pivot)
    pub core: usize,
    /// inverse of the target tree's settle phase
    pub settle2_inv: usize,
    /// inverse of the target tree's lift phase
    pub reduce2_inv: usize,
}

impl PhaseLengths {
    pub fn total(&self) -> usize {
        self.reduce1 + self.settle1 + self.core + self.settle2_inv + self.reduce2_inv
    }
}

/// A verified rotation sequence from one tree to another, with per-phase
/// accounting and the reference budget `n + m * (H + 1)` it is measured
/// against.
#[derive(Debug, Clone, Serialize)]
pub struct TransformTrace {
    pub rotations: Vec<StgRotation>,
    pub phase_lengths: PhaseLengths,
    pub bound_budget: f64,
}

impl TransformTrace {
    pub fn total(&self) -> usize {
        self.rotations.len()
    }
}

/// Rotate up every leg that hangs from a spine vertex while having at most
/// two spine ancestors, until none is left. Eligible legs are processed in
/// ascending vertex order. Afterwards no spine vertex of spine-BST depth <= 2
/// has a leg child, so all spine edges at the root and its children are
/// light; each touched leg is rotated at most twice and ends with no spine
/// ancestor.
pub fn cleanup(t: &Stg) -> (Vec<StgRotation>, Stg) {
    let mut seq = Vec::new();
    let mut cur = t.clone();
    let legs: Vec<VertexId> = t.caterpillar().leg_vertices().collect();
    'scan: loop {
        for &leg in &legs {
            if !cur.contains(leg) {
                continue;
            }
            let parent = cur.parent(leg).unwrap();
            let eligible =
                matches!(parent, Some(p) if p.is_spine()) && cur.spine_ancestors(leg).unwrap() <= 2;
            if eligible {
                let p = parent.unwrap();
                seq.push((p, leg));
                cur = cur.rotate(p, leg).unwrap();
                continue 'scan;
            }
        }
        break;
    }
    debug_assert!(no_shallow_leg_children(&cur));
    (seq, cur)
}

fn no_shallow_leg_children(t: &Stg) -> bool {
    let depths = t.spine_bst().depths();
    (1..=t.caterpillar().n())
        .filter(|&i| depths[i - 1] <= 2)
        .all(|i| {
            t.children(VertexId::Spine(i))
                .unwrap()
                .iter()
                .all(VertexId::is_spine)
        })
}

/// Transform into legs-above form: alternate a cleanup step with the spine
/// rotations of the root-visit schedule, so every leg's spine parent
/// eventually surfaces near the spine-BST root and the leg is lifted away.
/// Costs at most `2m` leg rotations plus the schedule's `4n`.
pub fn to_legs_above(t: &Stg) -> (Vec<StgRotation>, Stg) {
    let (mut seq, mut cur) = cleanup(t);
    let schedule = cur.spine_bst().root_visit_schedule();
    for (pk, ck) in schedule {
        assert!(
            cur.is_light(pk, ck),
            "root-visit schedule hit a heavy spine edge"
        );
        let (p, c) = (VertexId::Spine(pk), VertexId::Spine(ck));
        seq.push((p, c));
        cur = cur.rotate(p, c).unwrap();
        let (more, next) = cleanup(&cur);
        seq.extend(more);
        cur = next;
    }
    assert!(
        cur.is_legs_above(),
        "lift finished but a leg still has a spine ancestor"
    );
    (seq, cur)
}

/// From legs-above form: reshape the spine into `target`, then repeatedly
/// rotate the lowest leg down until it is bound. The leg phase costs exactly
/// `sum of m_i * depth_target(s_i)` rotations; the result is the all-bound
/// tree over `target`.
pub fn settle_legs(t: &Stg, target: &Bst) -> Result<(Vec<StgRotation>, Stg)> {
    if !t.is_legs_above() {
        return Err(Error::NotLegsAboveForm);
    }
    let cat = t.caterpillar().clone();
    if target.n() != cat.n() {
        return Err(Error::KeyRangeMismatch(target.n(), cat.n()));
    }
    let mut seq = Vec::new();
    let mut cur = t.clone();

    // spine phase: in legs-above form every spine edge is light and spine
    // rotations keep the legs where they are, so the whole BST sequence maps
    // onto the tree one rotation at a time
    for (pk, ck) in cur.spine_bst().transform_sequence(target)? {
        assert!(cur.is_light(pk, ck), "spine reshape hit a heavy edge");
        let (p, c) = (VertexId::Spine(pk), VertexId::Spine(ck));
        seq.push((p, c));
        cur = cur.rotate(p, c).unwrap();
    }

    // read the leg chain top-down; settle bottom-up
    let mut chain = Vec::new();
    let mut v = cur.root_vertex();
    while v.is_leg() {
        chain.push(v);
        v = cur.children(v).unwrap()[0];
    }
    let target_depths = target.depths();
    for &leg in chain.iter().rev() {
        let mut steps = 0;
        while let Some(&child) = cur.children(leg).unwrap().first() {
            seq.push((leg, child));
            cur = cur.rotate(leg, child).unwrap();
            steps += 1;
        }
        debug_assert_eq!(steps, target_depths[leg.spine_position() - 1]);
    }

    debug_assert_eq!(cur, Stg::all_bound(&cat, target)?);
    Ok((seq, cur))
}

/// Between trees without free legs, the spine transformation alone carries
/// one tree to the other: spine rotations never free a bound leg, so every
/// edge along the way stays light.
pub fn transform_all_bound(t1: &Stg, t2: &Stg) -> Result<Vec<StgRotation>> {
    if t1.caterpillar() != t2.caterpillar() {
        return Err(Error::CaterpillarMismatch);
    }
    if !t1.is_all_bound() || !t2.is_all_bound() {
        return Err(Error::FreeLegsPresent);
    }
    let keys = t1.spine_bst().transform_sequence(&t2.spine_bst())?;
    let mut seq = Vec::with_capacity(keys.len());
    let mut cur = t1.clone();
    for (pk, ck) in keys {
        assert!(cur.is_light(pk, ck), "all-bound transform hit a heavy edge");
        let (p, c) = (VertexId::Spine(pk), VertexId::Spine(ck));
        seq.push((p, c));
        cur = cur.rotate(p, c).unwrap();
    }
    debug_assert_eq!(&cur, t2);
    Ok(seq)
}

fn inverted(seq: &[StgRotation]) -> impl Iterator<Item = StgRotation> + '_ {
    seq.iter().rev().map(|&(p, c)| (c, p))
}

/// End-to-end rotation sequence from `t1` to `t2`: both endpoints are lifted
/// to legs-above form and settled into the all-bound tree over the
/// cost-optimal static spine for the leg counts, so the middle phase
/// collapses. The returned trace has been replayed against `t1` and verified
/// to land exactly on `t2`.
pub fn transform(t1: &Stg, t2: &Stg) -> Result<TransformTrace> {
    if t1.caterpillar() != t2.caterpillar() {
        return Err(Error::CaterpillarMismatch);
    }
    let cat = t1.caterpillar().clone();
    let weights = Weights::new(cat.leg_counts().to_vec())?;
    let (pivot, _) = Bst::optimal(&weights)?;

    let (reduce1, a1) = to_legs_above(t1);
    let (settle1, b1) = settle_legs(&a1, &pivot)?;
    let (reduce2, a2) = to_legs_above(t2);
    let (settle2, b2) = settle_legs(&a2, &pivot)?;
    let core = transform_all_bound(&b1, &b2)?;
    debug_assert!(core.is_empty());

    let phase_lengths = PhaseLengths {
        reduce1: reduce1.len(),
        settle1: settle1.len(),
        core: core.len(),
        settle2_inv: settle2.len(),
        reduce2_inv: reduce2.len(),
    };
    let mut rotations = reduce1;
    rotations.extend(settle1);
    rotations.extend(core);
    rotations.extend(inverted(&settle2));
    rotations.extend(inverted(&reduce2));

    if &t1.apply(&rotations)? != t2 {
        return Err(Error::ReplayMismatch);
    }
    Ok(TransformTrace {
        rotations,
        phase_lengths,
        bound_budget: cat.n() as f64 + cat.m() as f64 * cat.entropy_plus_one(),
    })
}
