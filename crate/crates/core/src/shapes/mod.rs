//! Shape algebra: shapes of vertex sets over a neighborhood-diversity
//! partition, fair costs, r-equivalence, and enumeration of minimal-cost
//! representatives. Signatures of edge sets live in [`signature`].

pub mod signature;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::graph::{ClassKind, Graph, NdPartition};

pub use signature::{
    enumerate_signature_representatives, fair_edge_cost_of_signature_shape, realize_signature,
    signature_of, signature_shape, signature_shapes_r_equivalent, RepresentativeMode, Signature,
    SignatureCandidates, SignatureError, SignatureShape,
};

/// Per-class intersection counts of a vertex set: `s[i] = |X ∩ N_i|`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Shape(pub Vec<u32>);

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl Shape {
    /// Panics unless `0 <= s_i <= |N_i|` for every class.
    pub fn validate(&self, nd: &NdPartition) {
        assert_eq!(self.0.len(), nd.class_count(), "shape length must match the class count");
        for (i, &s) in self.0.iter().enumerate() {
            assert!(
                (s as usize) <= nd.class_size(i),
                "shape entry {i} is {s} but the class has {} vertices",
                nd.class_size(i)
            );
        }
    }
}

/// Worst per-vertex deletion count of a set: `max_v |N(v) ∩ W|` for vertex
/// sets, the maximum number of incident deleted edges for edge sets.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize,
)]
pub struct FairCost(pub u32);

impl fmt::Display for FairCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The shape of `set`: per-class intersection counts.
pub fn shape_of(nd: &NdPartition, set: &BTreeSet<usize>) -> Shape {
    let mut counts = vec![0u32; nd.class_count()];
    for &v in set {
        counts[nd.class_of(v)] += 1;
    }
    Shape(counts)
}

/// The shape of the complement set: `|N_i| - s_i` per class.
pub fn complement_shape(nd: &NdPartition, s: &Shape) -> Shape {
    Shape(
        s.0.iter()
            .enumerate()
            .map(|(i, &si)| nd.class_size(i) as u32 - si)
            .collect(),
    )
}

/// Picks the `s_i` lowest-indexed vertices of every class; any set of shape
/// `s` maps onto this one by a graph automorphism.
pub fn realize_shape(nd: &NdPartition, s: &Shape) -> BTreeSet<usize> {
    s.validate(nd);
    let mut out = BTreeSet::new();
    for (i, &si) in s.0.iter().enumerate() {
        out.extend(nd.class(i)[..si as usize].iter().copied());
    }
    out
}

/// Definitional fair vertex cost: `max_v |N(v) ∩ set|` over all vertices,
/// including the deleted ones.
pub fn fair_vertex_cost(g: &Graph, set: &BTreeSet<usize>) -> FairCost {
    let mut worst = 0u32;
    for v in 0..g.vertex_count() {
        let hit = g.neighbors(v).iter().filter(|u| set.contains(u)).count() as u32;
        worst = worst.max(hit);
    }
    FairCost(worst)
}

/// Fair vertex cost computed from the shape alone.
///
/// A vertex of class `i` sees all deletions in adjacent classes plus, in a
/// clique class, its deleted classmates: `s_i` of them for a survivor and
/// `s_i - 1` when the whole class is deleted. Independent classes
/// contribute nothing to their own members.
pub fn fair_vertex_cost_of_shape(nd: &NdPartition, s: &Shape) -> FairCost {
    s.validate(nd);
    let mut worst = 0u32;
    for i in 0..nd.class_count() {
        let own = match nd.kind(i) {
            ClassKind::Independent => 0,
            ClassKind::Clique => {
                if s.0[i] as usize == nd.class_size(i) {
                    s.0[i].saturating_sub(1)
                } else {
                    s.0[i]
                }
            }
        };
        let mut cost = own;
        for j in 0..nd.class_count() {
            if j != i && nd.classes_adjacent(i, j) {
                cost += s.0[j];
            }
        }
        worst = worst.max(cost);
    }
    FairCost(worst)
}

/// Definitional fair edge cost: the maximum number of edges of `set`
/// incident to one vertex.
pub fn fair_edge_cost(g: &Graph, set: &BTreeSet<(usize, usize)>) -> FairCost {
    let mut incident = vec![0u32; g.vertex_count()];
    for &(u, v) in set {
        incident[u] += 1;
        incident[v] += 1;
    }
    FairCost(incident.into_iter().max().unwrap_or(0))
}

/// r-equivalence of two shapes: per class the entries agree exactly or are
/// both greater than `r`, and likewise for the complementary shapes.
pub fn shapes_r_equivalent(nd: &NdPartition, a: &Shape, b: &Shape, r: u64) -> bool {
    let coord = |x: u32, y: u32| x == y || (x as u64 > r && y as u64 > r);
    (0..nd.class_count()).all(|i| {
        let size = nd.class_size(i) as u32;
        coord(a.0[i], b.0[i]) && coord(size - a.0[i], size - b.0[i])
    })
}

/// Streams exactly one shape per r-equivalence class, each the minimal-cost
/// member of its class.
///
/// Per class the candidate values are all of `0..=|N_i|` when the class has
/// at most `2r+2` vertices, and otherwise `{0..r}`, the least
/// both-sides-beyond-r value `r+1`, and `{|N_i|-r..=|N_i|}`. Minimality
/// holds because the fair cost of a shape is nondecreasing in every
/// coordinate.
pub fn enumerate_representatives(nd: &NdPartition, r: u64) -> ShapeRepresentatives {
    let candidates: Vec<Vec<u32>> = (0..nd.class_count())
        .map(|i| class_candidates(nd.class_size(i), r))
        .collect();
    ShapeRepresentatives { state: vec![0; candidates.len()], candidates, done: false }
}

fn class_candidates(size: usize, r: u64) -> Vec<u32> {
    let size = size as u64;
    if size <= 2 * r + 2 {
        (0..=size as u32).collect()
    } else {
        let mut out: Vec<u32> = (0..=r as u32).collect();
        out.push(r as u32 + 1);
        out.extend(((size - r) as u32)..=(size as u32));
        out
    }
}

/// Odometer over per-class candidate lists, yielding shapes in ascending
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct ShapeRepresentatives {
    candidates: Vec<Vec<u32>>,
    state: Vec<usize>,
    done: bool,
}

impl ShapeRepresentatives {
    /// Exact number of shapes the stream will yield.
    pub fn total(&self) -> u128 {
        self.candidates.iter().map(|c| c.len() as u128).product()
    }
}

impl Iterator for ShapeRepresentatives {
    type Item = Shape;

    fn next(&mut self) -> Option<Shape> {
        if self.done {
            return None;
        }
        let shape = Shape(
            self.state
                .iter()
                .zip(&self.candidates)
                .map(|(&idx, cands)| cands[idx])
                .collect(),
        );
        // advance rightmost-fastest
        let mut pos = self.state.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.state[pos] += 1;
            if self.state[pos] < self.candidates[pos].len() {
                break;
            }
            self.state[pos] = 0;
        }
        if self.state.is_empty() {
            self.done = true;
        }
        Some(shape)
    }
}
