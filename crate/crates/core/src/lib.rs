//! Search trees on caterpillar graphs.
//!
//! A caterpillar is a path (the spine) with pendant vertices (legs). Search
//! trees on such a graph generalize binary search trees: the root of every
//! subtree splits its graph into connected components, one child subtree per
//! component, and a rotation restructures one tree edge while redistributing
//! children by adjacency.
//!
//! The crate provides:
//!
//! * [`caterpillar`] — the graph family, its vertex universe, and the
//!   Shannon entropy of the leg distribution;
//! * [`bst`] — binary search trees over the spine keys: rotations, weighted
//!   access cost, optimal static trees, the weight-balancing construction,
//!   and rotation schedules restricted to the top of the tree;
//! * [`stg`] — search trees on caterpillars: validity, rotation, pruning and
//!   projection, spine-BST extraction, light edges, leg classification, the
//!   canonical legs-above/all-bound shapes, and alternation numbers;
//! * [`wilber`] — the first-order switching lower bound for access sequences
//!   and its worst-case instance construction;
//! * [`transform`] — the constructive rotation-sequence pipeline between any
//!   two trees, with per-phase accounting against the `n + m*(H+1)` budget;
//! * [`oracle`] — exhaustive enumeration, exact BFS rotation distances, and
//!   exact diameters at small scale;
//! * [`gen`] — seeded random generators for tests and sweeps.

pub mod bst;
pub mod caterpillar;
mod error;
pub mod gen;
pub mod oracle;
pub mod stg;
pub mod transform;
pub mod wilber;

pub use bst::{Bst, Weights};
pub use caterpillar::{Caterpillar, VertexId};
pub use error::{Error, Result};
pub use stg::{LegState, Region, RootPartition, Stg};
pub use transform::TransformTrace;
