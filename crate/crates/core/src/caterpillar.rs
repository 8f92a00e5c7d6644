//! The caterpillar graph family `C(m_1, ..., m_n)`: a spine path
//! `s_1 - s_2 - ... - s_n` where spine vertex `s_i` carries `m_i` pendant
//! leg vertices `l_{i,1}, ..., l_{i,m_i}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex of a caterpillar. Spine positions and leg numbers are 1-based,
/// matching the text form `s3` / `l3.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    Spine(usize),
    Leg(usize, usize),
}

impl VertexId {
    pub fn is_spine(&self) -> bool {
        matches!(self, VertexId::Spine(_))
    }

    pub fn is_leg(&self) -> bool {
        matches!(self, VertexId::Leg(_, _))
    }

    /// Spine position this vertex is attached to: `i` for `s_i` and for `l_{i,j}`.
    pub fn spine_position(&self) -> usize {
        match *self {
            VertexId::Spine(i) => i,
            VertexId::Leg(i, _) => i,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexId::Spine(i) => write!(f, "s{i}"),
            VertexId::Leg(i, j) => write!(f, "l{i}.{j}"),
        }
    }
}

impl Serialize for VertexId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownVertex(s.to_string());
        let rest = &s[1..];
        match s.as_bytes().first() {
            Some(b's') => {
                let i: usize = rest.parse().map_err(|_| bad())?;
                if i == 0 {
                    return Err(bad());
                }
                Ok(VertexId::Spine(i))
            }
            Some(b'l') => {
                let (a, b) = rest.split_once('.').ok_or_else(bad)?;
                let i: usize = a.parse().map_err(|_| bad())?;
                let j: usize = b.parse().map_err(|_| bad())?;
                if i == 0 || j == 0 {
                    return Err(bad());
                }
                Ok(VertexId::Leg(i, j))
            }
            _ => Err(bad()),
        }
    }
}

/// The caterpillar `C(m_1, ..., m_n)`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CaterpillarJson", into = "CaterpillarJson")]
pub struct Caterpillar {
    legs: Vec<usize>,
    /// legs placed before spine vertex i (prefix sums, length n + 1)
    offsets: Vec<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct CaterpillarJson {
    legs: Vec<usize>,
}

impl TryFrom<CaterpillarJson> for Caterpillar {
    type Error = Error;

    fn try_from(raw: CaterpillarJson) -> Result<Self> {
        Caterpillar::new(raw.legs)
    }
}

impl From<Caterpillar> for CaterpillarJson {
    fn from(c: Caterpillar) -> Self {
        CaterpillarJson { legs: c.legs }
    }
}

impl Caterpillar {
    /// Build `C(m_1, ..., m_n)` from the per-spine leg counts. The spine must
    /// have at least one vertex; a single spine vertex (a star) and zero legs
    /// (a path) are both allowed.
    pub fn new(legs: Vec<usize>) -> Result<Self> {
        if legs.is_empty() {
            return Err(Error::MalformedTree(
                "caterpillar needs n >= 1 spine vertices".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(legs.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &m in &legs {
            acc += m;
            offsets.push(acc);
        }
        Ok(Caterpillar { legs, offsets })
    }

    /// Pure path on `n` vertices, `C(0, ..., 0)`.
    pub fn path(n: usize) -> Result<Self> {
        Caterpillar::new(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    /// Total number of legs.
    pub fn m(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn leg_counts(&self) -> &[usize] {
        &self.legs
    }

    pub fn leg_count(&self, i: usize) -> usize {
        self.legs[i - 1]
    }

    pub fn vertex_count(&self) -> usize {
        self.n() + self.m()
    }

    pub fn edge_count(&self) -> usize {
        self.n() - 1 + self.m()
    }

    /// Shannon entropy of the leg distribution in bits:
    /// `sum over i with m_i > 0 of (m_i/m) * log2(m/m_i)`; 0 when there are no legs.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.legs)
    }

    /// `entropy() + 1`, the per-access budget of an entropy-balanced search tree.
    pub fn entropy_plus_one(&self) -> f64 {
        self.entropy() + 1.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        match v {
            VertexId::Spine(i) => i >= 1 && i <= self.n(),
            VertexId::Leg(i, j) => i >= 1 && i <= self.n() && j >= 1 && j <= self.legs[i - 1],
        }
    }

    /// Dense index: spine vertices first (s_i -> i-1), then legs grouped by
    /// spine position.
    pub fn index(&self, v: VertexId) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(match v {
            VertexId::Spine(i) => i - 1,
            VertexId::Leg(i, j) => self.n() + self.offsets[i - 1] + (j - 1),
        })
    }

    /// Inverse of [`Caterpillar::index`]. Panics on an out-of-range index.
    pub fn vertex(&self, ix: usize) -> VertexId {
        let n = self.n();
        if ix < n {
            return VertexId::Spine(ix + 1);
        }
        let off = ix - n;
        assert!(off < self.m(), "dense index {ix} out of range");
        // offsets is sorted; find the spine vertex owning this leg slot
        let i = match self.offsets.binary_search(&off) {
            Ok(k) => {
                // first spine position whose offset equals off and has legs
                let mut k = k;
                while self.legs[k] == 0 {
                    k += 1;
                }
                k + 1
            }
            Err(k) => k,
        };
        VertexId::Leg(i, off - self.offsets[i - 1] + 1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(|ix| self.vertex(ix))
    }

    /// All leg vertices, grouped by spine position.
    pub fn leg_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (self.n()..self.vertex_count()).map(|ix| self.vertex(ix))
    }

    pub fn is_spine_ix(&self, ix: usize) -> bool {
        ix < self.n()
    }

    /// Neighbors of `v`: spine vertices see their path neighbors and their
    /// legs; a leg sees exactly its spine vertex.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(match v {
            VertexId::Spine(i) => {
                let mut out = Vec::new();
                if i > 1 {
                    out.push(VertexId::Spine(i - 1));
                }
                if i < self.n() {
                    out.push(VertexId::Spine(i + 1));
                }
                for j in 1..=self.legs[i - 1] {
                    out.push(VertexId::Leg(i, j));
                }
                out
            }
            VertexId::Leg(i, _) => vec![VertexId::Spine(i)],
        })
    }

    pub(crate) fn neighbors_ix(&self, ix: usize) -> Vec<usize> {
        let n = self.n();
        if ix < n {
            let i = ix + 1;
            let mut out = Vec::new();
            if i > 1 {
                out.push(ix - 1);
            }
            if i < n {
                out.push(ix + 1);
            }
            let (lo, hi) = (self.offsets[i - 1], self.offsets[i]);
            out.extend((n + lo)..(n + hi));
            out
        } else {
            let VertexId::Leg(i, _) = self.vertex(ix) else {
                unreachable!()
            };
            vec![i - 1]
        }
    }

    pub(crate) fn adjacent_ix(&self, a: usize, b: usize) -> bool {
        let n = self.n();
        match (a < n, b < n) {
            (true, true) => a.abs_diff(b) == 1,
            (true, false) => self.vertex(b).spine_position() == a + 1,
            (false, true) => self.vertex(a).spine_position() == b + 1,
            (false, false) => false,
        }
    }
}

/// Shannon entropy in bits of the distribution induced by nonnegative counts.
/// Zero counts contribute nothing; the empty distribution has entropy 0.
pub fn shannon_entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let m = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / m;
            p * (1.0 / p).log2()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        let uniform = Caterpillar::new(vec![1, 1, 1, 1]).unwrap();
        assert!((uniform.entropy() - 2.0).abs() < 1e-12);
        assert!((uniform.entropy_plus_one() - 3.0).abs() < 1e-12);

        let path = Caterpillar::path(3).unwrap();
        assert_eq!(path.entropy(), 0.0);
        assert_eq!(path.entropy_plus_one(), 1.0);

        // independent summation for C(2,0,1,1,2)
        let legs = [2usize, 0, 1, 1, 2];
        let m: usize = legs.iter().sum();
        let expected: f64 = legs
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| (c as f64 / m as f64) * ((m as f64 / c as f64).log2()))
            .sum();
        let fig = Caterpillar::new(legs.to_vec()).unwrap();
        assert!((fig.entropy() - expected).abs() < 1e-12);
        assert!((fig.entropy() - 1.9183).abs() < 1e-4);
        assert!((fig.entropy_plus_one() - 2.9183).abs() < 1e-4);
    }

    #[test]
    fn neighbors_examples() {
        let fig = Caterpillar::new(vec![2, 0, 1, 1, 2]).unwrap();
        assert_eq!(
            fig.neighbors(VertexId::Leg(1, 1)).unwrap(),
            vec![VertexId::Spine(1)]
        );
        assert_eq!(
            fig.neighbors(VertexId::Spine(1)).unwrap(),
            vec![VertexId::Spine(2), VertexId::Leg(1, 1), VertexId::Leg(1, 2)]
        );

        let path = Caterpillar::path(3).unwrap();
        assert_eq!(
            path.neighbors(VertexId::Spine(2)).unwrap(),
            vec![VertexId::Spine(1), VertexId::Spine(3)]
        );

        assert_eq!(
            path.neighbors(VertexId::Spine(4)),
            Err(Error::UnknownVertex("s4".into()))
        );
        assert_eq!(
            fig.neighbors(VertexId::Leg(2, 1)),
            Err(Error::UnknownVertex("l2.1".into()))
        );
    }

    #[test]
    fn degrees_match_leg_counts() {
        let fig = Caterpillar::new(vec![2, 0, 1, 1, 2]).unwrap();
        for v in fig.vertices() {
            let deg = fig.neighbors(v).unwrap().len();
            match v {
                VertexId::Spine(i) => {
                    let path_deg = if fig.n() == 1 {
                        0
                    } else if i == 1 || i == fig.n() {
                        1
                    } else {
                        2
                    };
                    assert_eq!(deg, fig.leg_count(i) + path_deg);
                }
                VertexId::Leg(..) => assert_eq!(deg, 1),
            }
        }
    }

    #[test]
    fn dense_index_round_trips() {
        let fig = Caterpillar::new(vec![2, 0, 1, 1, 2]).unwrap();
        for (k, v) in fig.vertices().enumerate() {
            assert_eq!(fig.index(v).unwrap(), k);
            assert_eq!(fig.vertex(k), v);
        }
    }

    #[test]
    fn vertex_text_forms() {
        assert_eq!(VertexId::Spine(3).to_string(), "s3");
        assert_eq!(VertexId::Leg(3, 1).to_string(), "l3.1");
        assert_eq!("s3".parse::<VertexId>().unwrap(), VertexId::Spine(3));
        assert_eq!("l3.1".parse::<VertexId>().unwrap(), VertexId::Leg(3, 1));
        assert!("x1".parse::<VertexId>().is_err());
        assert!("l3".parse::<VertexId>().is_err());
        assert!("s0".parse::<VertexId>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let fig = Caterpillar::new(vec![2, 0, 1, 1, 2]).unwrap();
        let js = serde_json::to_string(&fig).unwrap();
        assert_eq!(js, r#"{"legs":[2,0,1,1,2]}"#);
        let back: Caterpillar = serde_json::from_str(&js).unwrap();
        assert_eq!(back, fig);
        assert!(serde_json::from_str::<Caterpillar>(r#"{"legs":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn entropy_ignores_zeros_and_order(legs in proptest::collection::vec(0usize..6, 1..8)) {
            let c = Caterpillar::new(legs.clone()).unwrap();
            let mut positive: Vec<usize> = legs.iter().copied().filter(|&x| x > 0).collect();
            positive.sort_unstable();
            positive.reverse();
            if positive.is_empty() {
                prop_assert_eq!(c.entropy(), 0.0);
            } else {
                let d = Caterpillar::new(positive.clone()).unwrap();
                prop_assert!((c.entropy() - d.entropy()).abs() < 1e-12);
                let support = positive.len() as f64;
                prop_assert!(c.entropy() >= -1e-12);
                prop_assert!(c.entropy() <= support.log2() + 1e-12);
            }
        }
    }
}
