//! Simple undirected graphs, text IO, and the two structural parameters
//! (neighborhood diversity, minimum vertex cover) that drive the solvers.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A simple undirected graph over vertices `0..n`.
///
/// No self-loops, no parallel edges. Immutable after construction; all
/// queries are read-only and safe to share across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, edges={:?})", self.n, self.edge_count(), self.edges)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: malformed header, expected `n m`")]
    BadHeader { line: usize },
    #[error("line {line}: expected `u v`")]
    BadEdgeLine { line: usize },
    #[error("line {line}: vertex index {index} out of range (n = {n})")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("self-loop at vertex {0}")]
    ConstructedSelfLoop(usize),
    #[error("vertex index {0} out of range (n = {1})")]
    ConstructedOutOfRange(usize, usize),
}

/// Result of parsing a graph file: the graph plus non-fatal warnings
/// (currently only duplicate edge lines).
#[derive(Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges collapse silently.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edge_list {
            if u >= n {
                return Err(GraphError::ConstructedOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::ConstructedOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::ConstructedSelfLoop(u));
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Ok(Self::from_matrix(n, adj))
    }

    fn from_matrix(n: usize, adj: Vec<Vec<bool>>) -> Graph {
        let mut neighbors = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if adj[u][v] {
                    neighbors[u].push(v);
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
        }
        Graph { n, adj, neighbors, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Index of the edge `{u, v}` in `edges()`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Induced subgraph after deleting `removed`. Surviving vertices are
    /// reindexed in ascending order of their original index.
    pub fn delete_vertices(&self, removed: &BTreeSet<usize>) -> Graph {
        let kept: Vec<usize> = (0..self.n).filter(|v| !removed.contains(v)).collect();
        self.induced(&kept)
    }

    /// Induced subgraph on `kept` (ascending, duplicate-free); vertex `i` of
    /// the result corresponds to `kept[i]`.
    pub fn induced(&self, kept: &[usize]) -> Graph {
        let n = kept.len();
        let mut adj = vec![vec![false; n]; n];
        for (i, &u) in kept.iter().enumerate() {
            for (j, &v) in kept.iter().enumerate() {
                if self.adj[u][v] {
                    adj[i][j] = true;
                }
            }
        }
        Self::from_matrix(n, adj)
    }

    /// Same vertex set with the edges in `removed` deleted.
    pub fn delete_edges(&self, removed: &BTreeSet<(usize, usize)>) -> Graph {
        let mut adj = self.adj.clone();
        for &(u, v) in removed {
            let (u, v) = (u.min(v), u.max(v));
            adj[u][v] = false;
            adj[v][u] = false;
        }
        Self::from_matrix(self.n, adj)
    }

    /// Parses the graph file format: first non-comment line `n m`, then m
    /// lines `u v`; `#` starts a comment. Duplicate edges are tolerated with
    /// a warning; self-loops and out-of-range indices are errors.
    pub fn parse(text: &str) -> Result<ParsedGraph, GraphError> {
        let mut warnings = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut adj: Vec<Vec<bool>> = Vec::new();
        let mut found_edges = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(GraphError::BadHeader { line });
                    }
                    let n: usize = fields[0].parse().map_err(|_| GraphError::BadHeader { line })?;
                    let m: usize = fields[1].parse().map_err(|_| GraphError::BadHeader { line })?;
                    header = Some((n, m));
                    adj = vec![vec![false; n]; n];
                }
                Some((n, m)) => {
                    if fields.len() != 2 {
                        return Err(GraphError::BadEdgeLine { line });
                    }
                    let u: usize = fields[0].parse().map_err(|_| GraphError::BadEdgeLine { line })?;
                    let v: usize = fields[1].parse().map_err(|_| GraphError::BadEdgeLine { line })?;
                    for x in [u, v] {
                        if x >= n {
                            return Err(GraphError::IndexOutOfRange { line, index: x, n });
                        }
                    }
                    if u == v {
                        return Err(GraphError::SelfLoop { line, vertex: u });
                    }
                    found_edges += 1;
                    if found_edges > m {
                        return Err(GraphError::EdgeCountMismatch { expected: m, found: found_edges });
                    }
                    if adj[u][v] {
                        warnings.push(format!("line {line}: duplicate edge {u} {v}"));
                    }
                    adj[u][v] = true;
                    adj[v][u] = true;
                }
            }
        }
        let (n, m) = header.ok_or(GraphError::BadHeader { line: 0 })?;
        if found_edges != m {
            return Err(GraphError::EdgeCountMismatch { expected: m, found: found_edges });
        }
        Ok(ParsedGraph { graph: Self::from_matrix(n, adj), warnings })
    }

    /// Renders the graph in the same file format `parse` reads.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Clique,
    Independent,
}

/// Partition of the vertices into neighborhood-diversity classes.
///
/// Two vertices share a class iff `N(u) \ {v} = N(v) \ {u}`. Every class is
/// a clique or an independent set; between two distinct classes either all
/// cross pairs are edges or none. Classes of size one are flagged as
/// cliques, and the class adjacency relation is reflexive exactly on the
/// clique classes.
#[derive(Debug, Clone)]
pub struct NdPartition {
    classes: Vec<Vec<usize>>,
    kinds: Vec<ClassKind>,
    class_adj: Vec<Vec<bool>>,
    class_of: Vec<usize>,
}

impl NdPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Vertices of class `i` in ascending order.
    pub fn class(&self, i: usize) -> &[usize] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.classes[i].len()
    }

    pub fn kind(&self, i: usize) -> ClassKind {
        self.kinds[i]
    }

    pub fn is_clique(&self, i: usize) -> bool {
        self.kinds[i] == ClassKind::Clique
    }

    /// Class adjacency `i ~ j`; reflexive exactly on clique classes.
    pub fn classes_adjacent(&self, i: usize, j: usize) -> bool {
        self.class_adj[i][j]
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Splits classes so that every vertex of `cover` forms a singleton
    /// class. The result is still a valid twin partition (possibly finer
    /// than the coarsest one); signature shapes are defined against it.
    pub fn refine_to_singletons(&self, g: &Graph, cover: &[usize]) -> NdPartition {
        let pulled: BTreeSet<usize> = cover.iter().copied().collect();
        let mut classes = Vec::new();
        for class in &self.classes {
            let (single, rest): (Vec<usize>, Vec<usize>) =
                class.iter().partition(|v| pulled.contains(v));
            for v in single {
                classes.push(vec![v]);
            }
            if !rest.is_empty() {
                classes.push(rest);
            }
        }
        classes.sort_by_key(|c| c[0]);
        Self::assemble(g, classes)
    }

    fn assemble(g: &Graph, classes: Vec<Vec<usize>>) -> NdPartition {
        let k = classes.len();
        let mut class_of = vec![usize::MAX; g.vertex_count()];
        for (i, class) in classes.iter().enumerate() {
            for &v in class {
                class_of[v] = i;
            }
        }
        let kinds: Vec<ClassKind> = classes
            .iter()
            .map(|class| {
                if class.len() == 1 || g.adjacent(class[0], class[1]) {
                    ClassKind::Clique
                } else {
                    ClassKind::Independent
                }
            })
            .collect();
        let mut class_adj = vec![vec![false; k]; k];
        for (i, kind) in kinds.iter().enumerate() {
            class_adj[i][i] = *kind == ClassKind::Clique;
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if g.adjacent(classes[i][0], classes[j][0]) {
                    class_adj[i][j] = true;
                    class_adj[j][i] = true;
                }
            }
        }
        NdPartition { classes, kinds, class_adj, class_of }
    }
}

/// Computes the coarsest twin partition of `g` (its class count is the
/// neighborhood diversity). Open and closed twins both merge: vertices are
/// grouped by canonical neighborhood fingerprints, i.e. either equal open
/// neighborhoods or equal closed neighborhoods.
pub fn nd_partition(g: &Graph) -> NdPartition {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut open: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    let mut closed: std::collections::HashMap<Vec<usize>, usize> = std::collections::HashMap::new();
    for v in 0..n {
        let open_key = g.neighbors(v).to_vec();
        let mut closed_key = open_key.clone();
        closed_key.push(v);
        closed_key.sort_unstable();
        if let Some(&u) = open.get(&open_key) {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        } else {
            open.insert(open_key, v);
        }
        if let Some(&u) = closed.get(&closed_key) {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        } else {
            closed.insert(closed_key, v);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    let mut classes: Vec<Vec<usize>> = groups.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    NdPartition::assemble(g, classes)
}

/// An ordered vertex cover; signatures refer to cover positions, so the
/// ordering (ascending vertex index) is fixed for the whole run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    verts: Vec<usize>,
}

impl VertexCover {
    pub fn size(&self) -> usize {
        self.verts.len()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    pub fn position_of(&self, v: usize) -> Option<usize> {
        self.verts.binary_search(&v).ok()
    }
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("no vertex cover of size at most {budget}")]
    BudgetExceeded { budget: usize },
}

/// Minimum vertex cover by a bounded search tree, branching on the two
/// endpoints of an uncovered edge. With `budget` set, reports failure
/// instead of returning a cover larger than the budget.
pub fn min_vertex_cover(g: &Graph, budget: Option<usize>) -> Result<VertexCover, CoverError> {
    let hard_cap = budget.unwrap_or(g.vertex_count());
    for k in 0..=hard_cap {
        let mut chosen = vec![false; g.vertex_count()];
        if cover_search(g, k, &mut chosen) {
            let mut verts: Vec<usize> =
                (0..g.vertex_count()).filter(|&v| chosen[v]).collect();
            verts.sort_unstable();
            return Ok(VertexCover { verts });
        }
    }
    Err(CoverError::BudgetExceeded { budget: hard_cap })
}

fn cover_search(g: &Graph, k: usize, chosen: &mut Vec<bool>) -> bool {
    let uncovered = g
        .edges()
        .iter()
        .find(|&&(u, v)| !chosen[u] && !chosen[v])
        .copied();
    let (u, v) = match uncovered {
        None => return true,
        Some(e) => e,
    };
    if k == 0 {
        return false;
    }
    for pick in [u, v] {
        chosen[pick] = true;
        if cover_search(g, k - 1, chosen) {
            return true;
        }
        chosen[pick] = false;
    }
    false
}

/// True iff every edge of `g` has an endpoint in `cover`.
pub fn covers_all_edges(g: &Graph, cover: &[usize]) -> bool {
    let in_cover: BTreeSet<usize> = cover.iter().copied().collect();
    g.edges().iter().all(|&(u, v)| in_cover.contains(&u) || in_cover.contains(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, &(0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        e.push((n - 1, 0));
        Graph::new(n, &e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).unwrap()
    }

    fn biclique(a: usize, b: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..a {
            for v in 0..b {
                e.push((u, a + v));
            }
        }
        Graph::new(a + b, &e).unwrap()
    }

    #[test]
    fn parse_triangle() {
        let p = Graph::parse("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.edge_count(), 3);
        assert!(p.graph.adjacent(0, 2));
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn parse_isolated_pair() {
        let p = Graph::parse("2 0").unwrap();
        assert_eq!(p.graph.vertex_count(), 2);
        assert_eq!(p.graph.edge_count(), 0);
    }

    #[test]
    fn parse_cycle_with_comments() {
        let p = Graph::parse("# a four-cycle\n4 4\n0 1\n1 2\n2 3\n3 0  # closing edge\n").unwrap();
        assert_eq!(p.graph, cycle(4));
    }

    #[test]
    fn parse_duplicate_edge_warns_and_collapses() {
        let p = Graph::parse("3 3\n0 1\n0 1\n1 2").unwrap();
        assert_eq!(p.graph.edge_count(), 2);
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].contains("line 3"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Graph::parse("x y") {
            Err(GraphError::BadHeader { line: 1 }) => {}
            other => panic!("{other:?}"),
        }
        match Graph::parse("2 1\n0 5") {
            Err(GraphError::IndexOutOfRange { line: 2, index: 5, n: 2 }) => {}
            other => panic!("{other:?}"),
        }
        match Graph::parse("2 1\n1 1") {
            Err(GraphError::SelfLoop { line: 2, vertex: 1 }) => {}
            other => panic!("{other:?}"),
        }
        assert!(Graph::parse("2 2\n0 1").is_err());
    }

    #[test]
    fn graph_roundtrips_through_text() {
        let g = cycle(5);
        let p = Graph::parse(&g.to_text()).unwrap();
        assert_eq!(p.graph, g);
    }

    #[test]
    fn nd_of_path4_is_four_singletons() {
        let nd = nd_partition(&path(4));
        assert_eq!(nd.class_count(), 4);
        assert!(nd.classes().iter().all(|c| c.len() == 1));
        assert!((0..4).all(|i| nd.is_clique(i)));
    }

    #[test]
    fn nd_of_biclique_is_two_independent_classes() {
        let nd = nd_partition(&biclique(3, 3));
        assert_eq!(nd.class_count(), 2);
        assert_eq!(nd.class(0), &[0, 1, 2]);
        assert_eq!(nd.class(1), &[3, 4, 5]);
        assert_eq!(nd.kind(0), ClassKind::Independent);
        assert_eq!(nd.kind(1), ClassKind::Independent);
        assert!(nd.classes_adjacent(0, 1));
        assert!(!nd.classes_adjacent(0, 0));
    }

    #[test]
    fn nd_of_single_vertex_is_one_clique_class() {
        let nd = nd_partition(&Graph::new(1, &[]).unwrap());
        assert_eq!(nd.class_count(), 1);
        assert_eq!(nd.kind(0), ClassKind::Clique);
        assert!(nd.classes_adjacent(0, 0));
    }

    #[test]
    fn isolated_vertices_merge_into_one_singleton_like_class() {
        // Isolated vertices are pairwise twins, so they form one class;
        // it is independent when it has two or more members.
        let nd = nd_partition(&Graph::new(3, &[]).unwrap());
        assert_eq!(nd.class_count(), 1);
        assert_eq!(nd.kind(0), ClassKind::Independent);
    }

    /// Independent pairwise-twin oracle: u, v are twins iff
    /// N(u) \ {v} = N(v) \ {u}.
    fn twins(g: &Graph, u: usize, v: usize) -> bool {
        let nu: BTreeSet<usize> =
            g.neighbors(u).iter().copied().filter(|&x| x != v).collect();
        let nv: BTreeSet<usize> =
            g.neighbors(v).iter().copied().filter(|&x| x != u).collect();
        nu == nv
    }

    fn random_graph(n: usize, p_num: u64, seed: u64) -> Graph {
        // tiny deterministic LCG; p_num out of 100
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (state >> 33) % 100 < p_num {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn nd_matches_pairwise_twin_oracle_and_is_coarsest() {
        for seed in 0..60 {
            for n in 1..=8 {
                let g = random_graph(n, 15 + (seed % 8) * 10, seed * 31 + n as u64);
                let nd = nd_partition(&g);
                // valid partition
                let mut seen = vec![false; n];
                for class in nd.classes() {
                    for &v in class {
                        assert!(!seen[v]);
                        seen[v] = true;
                    }
                }
                assert!(seen.iter().all(|&b| b));
                // classes agree with the twin relation, so the partition is
                // both valid and coarsest (the twin relation is transitive)
                for u in 0..n {
                    for v in (u + 1)..n {
                        assert_eq!(
                            nd.class_of(u) == nd.class_of(v),
                            twins(&g, u, v),
                            "n={n} seed={seed} u={u} v={v}"
                        );
                    }
                }
                // cross-class edges are all-or-nothing
                for i in 0..nd.class_count() {
                    for j in (i + 1)..nd.class_count() {
                        let any = nd.classes_adjacent(i, j);
                        for &u in nd.class(i) {
                            for &v in nd.class(j) {
                                assert_eq!(g.adjacent(u, v), any);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vc_examples() {
        assert_eq!(min_vertex_cover(&Graph::new(4, &[]).unwrap(), None).unwrap().size(), 0);
        assert_eq!(min_vertex_cover(&cycle(4), None).unwrap().size(), 2);
        assert_eq!(min_vertex_cover(&complete(3), None).unwrap().size(), 2);
    }

    #[test]
    fn vc_budget_exceeded_is_distinct() {
        match min_vertex_cover(&complete(4), Some(2)) {
            Err(CoverError::BudgetExceeded { budget: 2 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vc_is_minimum_by_brute_force() {
        for seed in 0..40 {
            let n = 4 + (seed as usize % 6);
            let g = random_graph(n, 35, 1000 + seed);
            let cover = min_vertex_cover(&g, None).unwrap();
            assert!(covers_all_edges(&g, cover.vertices()));
            let mut best = usize::MAX;
            for mask in 0u32..(1 << n) {
                let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                if covers_all_edges(&g, &set) {
                    best = best.min(set.len());
                }
            }
            assert_eq!(cover.size(), best, "seed={seed}");
        }
    }

    #[test]
    fn refine_to_singletons_pulls_cover_vertices_out() {
        let g = biclique(3, 3);
        let nd = nd_partition(&g);
        let refined = nd.refine_to_singletons(&g, &[0, 1, 2]);
        assert_eq!(refined.class_count(), 4);
        assert_eq!(refined.class(0), &[0]);
        assert_eq!(refined.kind(0), ClassKind::Clique);
        assert_eq!(refined.class(3), &[3, 4, 5]);
    }
}
