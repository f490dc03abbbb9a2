//! Generators for the equitable-coloring gadget instances and the reverse
//! search that looks for cheap deletion sets on them.
//!
//! The vertex-deletion gadget adds per-color class vertices, subdivides
//! every original-class edge with a selector vertex, and guards each
//! original vertex with a fan of degree-one dangling vertices. Deleting
//! the selector between an original vertex and a class vertex encodes a
//! color choice; the fair-cost limit makes the encoded partition
//! equitable.

mod search;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use search::{
    reverse_spot_check, search_vertex_deletion, SearchError, SearchLimits, SearchStats,
};

use crate::graph::Graph;
use crate::logic::{formula_library, LibraryFormula};
use crate::solvers::{is_equitable_3_coloring, DeletionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Original,
    Class,
    Selector,
    Dangling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionVariant {
    /// selector gadget, fair vertex deletion, 3 colors
    Vertex,
    /// direct class edges plus dangling fans, fair edge deletion, 3 colors
    Edge,
    /// selector gadget with `parts` class vertices, connectivity formula
    EquitableConnectedPartition { parts: usize },
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
}

/// A generated instance: the gadget graph, its formula, the fair-cost
/// target, and role bookkeeping for audits and back-mapping.
#[derive(Debug)]
pub struct ReducedInstance {
    pub graph: Graph,
    pub formula: LibraryFormula,
    pub target: u32,
    pub roles: Vec<Role>,
    /// the padded source graph; its vertices are the gadget's originals
    pub source_padded: Graph,
    /// isolated vertices appended to the source to meet divisibility
    pub padding: usize,
    pub variant: ReductionVariant,
    parts: usize,
    dangling_per_original: usize,
}

impl ReducedInstance {
    pub fn original_count(&self) -> usize {
        self.source_padded.vertex_count()
    }

    pub fn class_vertex(&self, color: usize) -> usize {
        debug_assert!(color < self.parts);
        self.original_count() + color
    }

    /// The selector subdividing the original-class edge (vertex variants).
    pub fn selector_vertex(&self, original: usize, color: usize) -> usize {
        debug_assert!(!matches!(self.variant, ReductionVariant::Edge));
        self.original_count() + self.parts + original * self.parts + color
    }

    pub fn dangling_vertex(&self, original: usize, i: usize) -> usize {
        debug_assert!(i < self.dangling_per_original);
        let selectors = match self.variant {
            ReductionVariant::Edge => 0,
            _ => self.original_count() * self.parts,
        };
        self.original_count()
            + self.parts
            + selectors
            + original * self.dangling_per_original
            + i
    }

    /// The original vertex a selector or dangling vertex guards.
    pub fn owner(&self, v: usize) -> Option<usize> {
        match self.roles[v] {
            Role::Original | Role::Class => None,
            Role::Selector => {
                Some((v - self.original_count() - self.parts) / self.parts)
            }
            Role::Dangling => {
                let selectors = match self.variant {
                    ReductionVariant::Edge => 0,
                    _ => self.original_count() * self.parts,
                };
                Some(
                    (v - self.original_count() - self.parts - selectors)
                        / self.dangling_per_original,
                )
            }
        }
    }
}

fn pad_source(g: &Graph, divisor: usize, minimum: usize) -> (Graph, usize) {
    let mut n = g.vertex_count().max(minimum);
    while n % divisor != 0 {
        n += 1;
    }
    let padding = n - g.vertex_count();
    let padded = Graph::new(n, g.edges()).expect("padding preserves validity");
    (padded, padding)
}

fn build_vertex_gadget(
    source: &Graph,
    parts: usize,
    dangling_per_original: usize,
) -> (Graph, Vec<Role>) {
    let n = source.vertex_count();
    let mut edges: Vec<(usize, usize)> = source.edges().to_vec();
    let class0 = n;
    let sel0 = n + parts;
    let dang0 = sel0 + n * parts;
    for v in 0..n {
        for c in 0..parts {
            let sel = sel0 + v * parts + c;
            edges.push((v, sel));
            edges.push((sel, class0 + c));
        }
        for i in 0..dangling_per_original {
            edges.push((v, dang0 + v * dangling_per_original + i));
        }
    }
    let total = dang0 + n * dangling_per_original;
    let mut roles = vec![Role::Original; total];
    roles[class0..sel0].fill(Role::Class);
    roles[sel0..dang0].fill(Role::Selector);
    roles[dang0..].fill(Role::Dangling);
    (Graph::new(total, &edges).expect("gadget edges are valid"), roles)
}

/// The fair-vertex-deletion instance for equitable 3-coloring. The source
/// is padded with isolated vertices until 3 divides n and n >= 6; the
/// gadget has `n^2 + 4n + 3` vertices and `m + 6n + n^2` edges, and the
/// fair-cost target is `n/3`.
pub fn reduce_eq3col_to_fair_vertex(g: &Graph) -> ReducedInstance {
    let (source, padding) = pad_source(g, 3, 6);
    let n = source.vertex_count();
    let (graph, roles) = build_vertex_gadget(&source, 3, n);
    ReducedInstance {
        graph,
        formula: formula_library("eq_3_col_vertex").unwrap(),
        target: (n / 3) as u32,
        roles,
        source_padded: source,
        padding,
        variant: ReductionVariant::Vertex,
        parts: 3,
        dangling_per_original: n,
    }
}

/// The fair-edge-deletion variant: class vertices connect directly to the
/// originals (no subdivision) and every original carries `n/3 + 1`
/// dangling guards. Target `n/3`.
pub fn reduce_eq3col_to_fair_edge(g: &Graph) -> ReducedInstance {
    let (source, padding) = pad_source(g, 3, 6);
    let n = source.vertex_count();
    let dangling = n / 3 + 1;
    let mut edges: Vec<(usize, usize)> = source.edges().to_vec();
    let class0 = n;
    let dang0 = n + 3;
    for v in 0..n {
        for c in 0..3 {
            edges.push((v, class0 + c));
        }
        for i in 0..dangling {
            edges.push((v, dang0 + v * dangling + i));
        }
    }
    let total = dang0 + n * dangling;
    let mut roles = vec![Role::Original; total];
    roles[class0..dang0].fill(Role::Class);
    roles[dang0..].fill(Role::Dangling);
    ReducedInstance {
        graph: Graph::new(total, &edges).expect("gadget edges are valid"),
        formula: formula_library("eq_3_col_edge").unwrap(),
        target: (n / 3) as u32,
        roles,
        source_padded: source,
        padding,
        variant: ReductionVariant::Edge,
        parts: 3,
        dangling_per_original: dangling,
    }
}

/// The equitable-connected-partition instance: `parts` class vertices and
/// fair-cost target `n / parts`, with the connectivity formula.
pub fn reduce_eqcp_to_fair_vertex(g: &Graph, parts: usize) -> ReducedInstance {
    assert!(parts >= 2, "a partition needs at least two parts");
    let (source, padding) = pad_source(g, parts, parts);
    let n = source.vertex_count();
    let (graph, roles) = build_vertex_gadget(&source, parts, n);
    ReducedInstance {
        graph,
        formula: formula_library("eq_conn").unwrap(),
        target: (n / parts) as u32,
        roles,
        source_padded: source,
        padding,
        variant: ReductionVariant::EquitableConnectedPartition { parts },
        parts,
        dangling_per_original: n,
    }
}

/// Turns an equitable proper coloring of the (padded) source into the
/// gadget's deletion witness.
///
/// Vertex variants delete, for every original, the selector toward its
/// color's class vertex. The edge variant deletes the direct edge to the
/// color's class vertex plus all but two dangling edges of every original,
/// as the degree-one budget in the formula demands. Either way the witness
/// has fair cost exactly `n / parts`.
pub fn witness_from_coloring(
    inst: &ReducedInstance,
    colors: &[u8],
) -> Result<DeletionSet, ReductionError> {
    let n = inst.original_count();
    if colors.len() != n {
        return Err(ReductionError::InvalidColoring(format!(
            "coloring covers {} vertices, the padded source has {n}",
            colors.len()
        )));
    }
    if colors.iter().any(|&c| c as usize >= inst.parts) {
        return Err(ReductionError::InvalidColoring(format!(
            "color out of range (parts = {})",
            inst.parts
        )));
    }
    match inst.variant {
        ReductionVariant::Vertex => {
            if !is_equitable_3_coloring(&inst.source_padded, colors) {
                return Err(ReductionError::InvalidColoring(
                    "not a proper equitable 3-coloring of the padded source".into(),
                ));
            }
            let set: BTreeSet<usize> = (0..n)
                .map(|v| inst.selector_vertex(v, colors[v] as usize))
                .collect();
            Ok(DeletionSet::Vertices(set))
        }
        ReductionVariant::EquitableConnectedPartition { .. } => {
            validate_connected_partition(inst, colors)?;
            let set: BTreeSet<usize> = (0..n)
                .map(|v| inst.selector_vertex(v, colors[v] as usize))
                .collect();
            Ok(DeletionSet::Vertices(set))
        }
        ReductionVariant::Edge => {
            if !is_equitable_3_coloring(&inst.source_padded, colors) {
                return Err(ReductionError::InvalidColoring(
                    "not a proper equitable 3-coloring of the padded source".into(),
                ));
            }
            let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
            for v in 0..n {
                let class = inst.class_vertex(colors[v] as usize);
                set.insert((v.min(class), v.max(class)));
                // keep exactly two dangling guards per original
                for i in 0..inst.dangling_per_original.saturating_sub(2) {
                    let d = inst.dangling_vertex(v, i);
                    set.insert((v.min(d), v.max(d)));
                }
            }
            Ok(DeletionSet::Edges(set))
        }
    }
}

fn validate_connected_partition(
    inst: &ReducedInstance,
    colors: &[u8],
) -> Result<(), ReductionError> {
    let mut counts = vec![0usize; inst.parts];
    for &c in colors {
        counts[c as usize] += 1;
    }
    let (min, max) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    if max - min > 1 {
        return Err(ReductionError::InvalidColoring(format!(
            "part sizes {counts:?} are not equitable"
        )));
    }
    for part in 0..inst.parts {
        let members: Vec<usize> =
            (0..colors.len()).filter(|&v| colors[v] as usize == part).collect();
        if !is_connected_subset(&inst.source_padded, &members) {
            return Err(ReductionError::InvalidColoring(format!(
                "part {part} does not induce a connected subgraph"
            )));
        }
    }
    Ok(())
}

fn is_connected_subset(g: &Graph, members: &[usize]) -> bool {
    let Some(&start) = members.first() else { return true };
    let inside: BTreeSet<usize> = members.iter().copied().collect();
    let mut seen: BTreeSet<usize> = [start].into();
    let mut queue = vec![start];
    while let Some(v) = queue.pop() {
        for &u in g.neighbors(v) {
            if inside.contains(&u) && seen.insert(u) {
                queue.push(u);
            }
        }
    }
    seen.len() == members.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{eval_bruteforce, Assignment, EvalOptions};
    use crate::shapes::{fair_edge_cost, fair_vertex_cost, FairCost};
    use crate::solvers::equitable_3_coloring;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        e.push((n - 1, 0));
        Graph::new(n, &e).unwrap()
    }

    #[test]
    fn vertex_gadget_counts_match_the_closed_form() {
        let inst = reduce_eq3col_to_fair_vertex(&complete(3));
        let n = inst.original_count();
        assert_eq!(n, 6);
        assert_eq!(inst.padding, 3);
        assert_eq!(inst.graph.vertex_count(), n * n + 4 * n + 3);
        assert_eq!(inst.graph.vertex_count(), 63);
        assert_eq!(inst.graph.edge_count(), 3 + 6 * n + n * n);
        assert_eq!(inst.graph.edge_count(), 75);
        assert_eq!(inst.target, 2);
        // role census and degree profile
        let count = |r: Role| inst.roles.iter().filter(|&&x| x == r).count();
        assert_eq!(count(Role::Original), n);
        assert_eq!(count(Role::Class), 3);
        assert_eq!(count(Role::Selector), 3 * n);
        assert_eq!(count(Role::Dangling), n * n);
        for v in 0..inst.graph.vertex_count() {
            match inst.roles[v] {
                Role::Selector => assert_eq!(inst.graph.degree(v), 2),
                Role::Class => assert_eq!(inst.graph.degree(v), n),
                Role::Dangling => assert_eq!(inst.graph.degree(v), 1),
                Role::Original => {}
            }
        }
    }

    #[test]
    fn edge_gadget_counts_match_the_closed_form() {
        let inst = reduce_eq3col_to_fair_edge(&complete(3));
        let n = inst.original_count();
        assert_eq!(inst.graph.vertex_count(), n + 3 + n * (n / 3 + 1));
        assert_eq!(inst.graph.vertex_count(), 27);
        assert_eq!(inst.graph.edge_count(), 3 + 3 * n + n * (n / 3 + 1));
        assert_eq!(inst.dangling_per_original, 3);
        assert_eq!(inst.target, 2);
    }

    #[test]
    fn eqcp_gadget_shape() {
        let inst = reduce_eqcp_to_fair_vertex(&cycle(6), 3);
        assert_eq!(inst.roles.iter().filter(|&&r| r == Role::Class).count(), 3);
        assert_eq!(inst.target, 2);
        let inst = reduce_eqcp_to_fair_vertex(&cycle(6), 6);
        assert_eq!(inst.roles.iter().filter(|&&r| r == Role::Class).count(), 6);
        assert_eq!(inst.target, 1);
    }

    #[test]
    fn vertex_witness_has_target_cost_and_satisfies_the_formula() {
        for source in [complete(3), cycle(6)] {
            let inst = reduce_eq3col_to_fair_vertex(&source);
            let colors = equitable_3_coloring(&inst.source_padded).unwrap();
            let witness = witness_from_coloring(&inst, &colors).unwrap();
            let DeletionSet::Vertices(set) = &witness else { panic!() };
            assert_eq!(set.len(), inst.original_count());
            assert_eq!(fair_vertex_cost(&inst.graph, set), FairCost(inst.target));
            let rest = inst.graph.delete_vertices(set);
            let ok = eval_bruteforce(
                &rest,
                &inst.formula.formula,
                &inst.formula.free,
                &Assignment::new(),
                &EvalOptions::default(),
            )
            .unwrap();
            assert!(ok);
        }
    }

    #[test]
    fn edge_witness_has_target_cost_and_satisfies_the_formula() {
        let inst = reduce_eq3col_to_fair_edge(&cycle(6));
        let colors = equitable_3_coloring(&inst.source_padded).unwrap();
        let witness = witness_from_coloring(&inst, &colors).unwrap();
        let DeletionSet::Edges(set) = &witness else { panic!() };
        let n = inst.original_count();
        // one class edge plus (n/3 + 1) - 2 dangling edges per original
        assert_eq!(set.len(), n + n * (n / 3 - 1));
        assert_eq!(fair_edge_cost(&inst.graph, set), FairCost(inst.target));
        let rest = inst.graph.delete_edges(set);
        let ok = eval_bruteforce(
            &rest,
            &inst.formula.formula,
            &inst.formula.free,
            &Assignment::new(),
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn improper_or_unbalanced_colorings_are_rejected() {
        let inst = reduce_eq3col_to_fair_vertex(&complete(3));
        // K3 padded: vertices 0,1,2 form the triangle
        let improper = vec![0u8, 0, 1, 1, 2, 2];
        assert!(witness_from_coloring(&inst, &improper).is_err());
        let unbalanced = vec![0u8, 1, 2, 0, 0, 0];
        assert!(witness_from_coloring(&inst, &unbalanced).is_err());
        let short = vec![0u8, 1, 2];
        assert!(witness_from_coloring(&inst, &short).is_err());
    }
}
