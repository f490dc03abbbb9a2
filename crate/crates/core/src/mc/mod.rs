//! Model checking: a brute-force Tarskian evaluator (the ground-truth
//! oracle) and a kernelized evaluator that decides shape queries on graphs
//! of bounded neighborhood diversity.

mod compile;
mod eval;
pub mod partial;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use eval::{EvalOptions, DEFAULT_EVAL_BUDGET};
pub use partial::{eval_partial_deleted, Truth3};

use crate::graph::{Graph, NdPartition};
use crate::logic::{
    compute_r, desugar_counting, Formula, LogicError, QuantifierCounts, Sort, TypedVar,
};
use crate::shapes::Shape;
use compile::Compiled;
use eval::{Evaluator, Value};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluation budget of {budget} steps exceeded")]
    Budget { budget: u64 },
    #[error("{0}")]
    TooLarge(String),
    #[error("free variable `{0}` has no value in the assignment")]
    MissingValue(String),
    #[error("assignment for `{name}`: {message}")]
    BadValue { name: String, message: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Values for the free variables of a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignedValue {
    Vertex(usize),
    VertexSet(BTreeSet<usize>),
    Edge(usize, usize),
    EdgeSet(BTreeSet<(usize, usize)>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, AssignedValue>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn set(mut self, name: impl Into<String>, value: AssignedValue) -> Assignment {
        self.values.insert(name.into(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: AssignedValue) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&AssignedValue> {
        self.values.get(name)
    }
}

/// A sort-checked formula compiled for repeated evaluation.
#[derive(Debug)]
pub struct CompiledFormula {
    pub(crate) inner: Compiled,
}

impl CompiledFormula {
    pub fn compile(f: &Formula, free: &[TypedVar]) -> Result<CompiledFormula, EvalError> {
        Ok(CompiledFormula { inner: Compiled::new(f, free)? })
    }

    pub fn counts(&self) -> QuantifierCounts {
        self.inner.counts
    }

    pub fn free(&self) -> &[TypedVar] {
        &self.inner.free
    }

    /// Tarskian truth value of the formula on `g` under `a`. Element
    /// quantifiers iterate vertices or edges, set quantifiers iterate
    /// subsets in increasing popcount order, and evaluation short-circuits
    /// on witnesses and counterexamples.
    pub fn eval(&self, g: &Graph, a: &Assignment, opts: &EvalOptions) -> Result<bool, EvalError> {
        let free_values = self.convert_assignment(g, a)?;
        Evaluator::new(g, &self.inner, free_values, opts)?.run()
    }

    fn convert_assignment(&self, g: &Graph, a: &Assignment) -> Result<Vec<Value>, EvalError> {
        let n = g.vertex_count();
        let check_vertex = |name: &str, v: usize| -> Result<(), EvalError> {
            if v >= n {
                return Err(EvalError::BadValue {
                    name: name.to_string(),
                    message: format!("vertex {v} out of range (n = {n})"),
                });
            }
            Ok(())
        };
        let mut out = Vec::with_capacity(self.inner.free.len());
        for tv in &self.inner.free {
            let value = a
                .get(&tv.name)
                .ok_or_else(|| EvalError::MissingValue(tv.name.clone()))?;
            let value = match (tv.sort, value) {
                (Sort::VertexElem, AssignedValue::Vertex(v)) => {
                    check_vertex(&tv.name, *v)?;
                    Value::Vertex(*v as u32)
                }
                (Sort::VertexSet, AssignedValue::VertexSet(set)) => {
                    let mut mask = 0u128;
                    for &v in set {
                        check_vertex(&tv.name, v)?;
                        mask |= 1 << v;
                    }
                    Value::VSet(mask)
                }
                (Sort::EdgeElem, AssignedValue::Edge(u, v)) => {
                    let idx = g.edge_index(*u, *v).ok_or_else(|| EvalError::BadValue {
                        name: tv.name.clone(),
                        message: format!("({u}, {v}) is not an edge"),
                    })?;
                    Value::Edge(idx as u32)
                }
                (Sort::EdgeSet, AssignedValue::EdgeSet(set)) => {
                    let mut mask = 0u128;
                    for &(u, v) in set {
                        let idx = g.edge_index(u, v).ok_or_else(|| EvalError::BadValue {
                            name: tv.name.clone(),
                            message: format!("({u}, {v}) is not an edge"),
                        })?;
                        mask |= 1 << idx;
                    }
                    Value::ESet(mask)
                }
                (sort, other) => {
                    return Err(EvalError::BadValue {
                        name: tv.name.clone(),
                        message: format!("expected a {sort:?} value, got {other:?}"),
                    })
                }
            };
            out.push(value);
        }
        Ok(out)
    }
}

/// One-shot evaluation; compile once with [`CompiledFormula`] when checking
/// many assignments of the same formula.
pub fn eval_bruteforce(
    g: &Graph,
    f: &Formula,
    free: &[TypedVar],
    a: &Assignment,
    opts: &EvalOptions,
) -> Result<bool, EvalError> {
    CompiledFormula::compile(f, free)?.eval(g, a, opts)
}

/// A per-class truncation of a graph: each neighborhood-diversity class
/// keeps its `min(|N_i|, cap)` lowest-indexed vertices. The kernel's class
/// structure, kinds, and adjacency mirror the original partition.
#[derive(Debug)]
pub struct Kernel {
    pub graph: Graph,
    pub cap: u64,
    /// original vertices retained, per class, ascending
    retained: Vec<Vec<usize>>,
    /// kernel vertex indices per class, aligned with `retained`
    kernel_classes: Vec<Vec<usize>>,
}

impl Kernel {
    pub fn class_size(&self, class: usize) -> usize {
        self.kernel_classes[class].len()
    }

    pub fn retained(&self, class: usize) -> &[usize] {
        &self.retained[class]
    }

    /// Kernel-graph vertices realizing a kernel shape: the lowest-indexed
    /// vertices of each kernel class.
    pub fn realize(&self, t: &Shape) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (class, &count) in t.0.iter().enumerate() {
            out.extend(self.kernel_classes[class][..count as usize].iter().copied());
        }
        out
    }

    /// Maps a shape of the original graph to a kernel shape in the same
    /// r-equivalence class: exact values stay exact, complement-exact
    /// values keep their complement, and both-sides-beyond-r values become
    /// `r + 1`.
    pub fn map_shape(&self, nd: &NdPartition, s: &Shape, r: u64) -> Shape {
        Shape(
            s.0.iter()
                .enumerate()
                .map(|(i, &si)| {
                    let size = nd.class_size(i) as u64;
                    let kernel_size = self.kernel_classes[i].len() as u64;
                    if size == kernel_size {
                        si
                    } else if si as u64 <= r {
                        si
                    } else if size - si as u64 <= r {
                        (kernel_size - (size - si as u64)) as u32
                    } else {
                        (r + 1) as u32
                    }
                })
                .collect(),
        )
    }
}

/// Truncates every class to its `min(|N_i|, cap)` lowest-indexed vertices
/// and takes the induced subgraph.
pub fn kernelize(g: &Graph, nd: &NdPartition, cap: u64) -> Kernel {
    let retained: Vec<Vec<usize>> = nd
        .classes()
        .iter()
        .map(|class| class[..class.len().min(cap as usize)].to_vec())
        .collect();
    let mut kept: Vec<usize> = retained.iter().flatten().copied().collect();
    kept.sort_unstable();
    let kernel_classes: Vec<Vec<usize>> = retained
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|v| kept.binary_search(v).expect("retained vertex"))
                .collect()
        })
        .collect();
    Kernel { graph: g.induced(&kept), cap, retained, kernel_classes }
}

/// How a deletion formula consumes its set: `DeletedGraph` evaluates a
/// sentence on the graph minus the set, `FreeSet` passes the set as the
/// named free variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTarget<'a> {
    DeletedGraph,
    FreeSet(&'a str),
}

/// Decides whether the sets of shape `s` satisfy the formula, evaluating on
/// a kernel truncated at `2r + 2` per class. The answer does not depend on
/// which set of shape `s` is realized.
pub fn check_shape(
    g: &Graph,
    nd: &NdPartition,
    f: &Formula,
    free: &[TypedVar],
    target: EvalTarget<'_>,
    s: &Shape,
    opts: &EvalOptions,
) -> Result<bool, EvalError> {
    let desugared = desugar_counting(f);
    let compiled = CompiledFormula::compile(&desugared, free)?;
    let counts = compiled.counts();
    let r = compute_r(counts.vertex_elem, counts.vertex_set);
    let kernel = kernelize(g, nd, 2 * r + 2);
    check_shape_on_kernel(&kernel, nd, &compiled, target, s, r, opts)
}

/// The solver's hot path: `check_shape` against a prebuilt kernel and
/// compiled formula.
pub fn check_shape_on_kernel(
    kernel: &Kernel,
    nd: &NdPartition,
    compiled: &CompiledFormula,
    target: EvalTarget<'_>,
    s: &Shape,
    r: u64,
    opts: &EvalOptions,
) -> Result<bool, EvalError> {
    s.validate(nd);
    let t = kernel.map_shape(nd, s, r);
    let realized = kernel.realize(&t);
    match target {
        EvalTarget::DeletedGraph => {
            let remaining = kernel.graph.delete_vertices(&realized);
            compiled.eval(&remaining, &Assignment::new(), opts)
        }
        EvalTarget::FreeSet(name) => {
            let a = Assignment::new().set(name, AssignedValue::VertexSet(realized));
            compiled.eval(&kernel.graph, &a, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::nd_partition;
    use crate::logic::{parse_formula, parse_formula_file};
    use crate::shapes::{realize_shape, shape_of};

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

    fn opts() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn no_isolated_vertex_on_c4() {
        let p = parse_formula("A x. E y. adj(x,y)").unwrap();
        let v = eval_bruteforce(&cycle(4), &p.formula, &p.free, &Assignment::new(), &opts());
        assert!(v.unwrap());
    }

    #[test]
    fn survivors_of_k3_form_an_independent_set() {
        let p = parse_formula_file(
            "free: W\nA u. A v. ((~(u in W)) & (~(v in W)) -> ~adj(u,v))",
        )
        .unwrap();
        let a = Assignment::new().set("W", AssignedValue::VertexSet([0, 1].into()));
        assert!(eval_bruteforce(&complete(3), &p.formula, &p.free, &a, &opts()).unwrap());
    }

    #[test]
    fn full_set_witnesses_exists_set_query() {
        let p = parse_formula("E S. A x. (x in S)").unwrap();
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert!(eval_bruteforce(&g, &p.formula, &p.free, &Assignment::new(), &opts()).unwrap());
    }

    #[test]
    fn edge_quantifiers_work() {
        let p = parse_formula("A v. E e^E. inc(v,e)").unwrap();
        assert!(eval_bruteforce(&cycle(4), &p.formula, &p.free, &Assignment::new(), &opts())
            .unwrap());
        let with_isolated = Graph::new(3, &[(0, 1)]).unwrap();
        assert!(!eval_bruteforce(
            &with_isolated,
            &p.formula,
            &p.free,
            &Assignment::new(),
            &opts()
        )
        .unwrap());
    }

    #[test]
    fn budget_exceeded_is_an_error_not_an_answer() {
        let p = parse_formula("E S. A x. (x in S)").unwrap();
        let g = complete(5);
        let tight = EvalOptions { budget: 10, memo: true };
        match eval_bruteforce(&g, &p.formula, &p.free, &Assignment::new(), &tight) {
            Err(EvalError::Budget { budget: 10 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counting_is_evaluated_natively_and_matches_desugaring() {
        let texts = [
            "E= 2 w. adj(w,w)",
            "A v. (E= 1 w. adj(v,w) -> adj(v,v))",
            "E<= 2 w. (E u. adj(w,u))",
            "E= 0 w. (A u. adj(w,u))",
            "E= 3 w. (E u. adj(w,u))",
        ];
        let mut lcg = 99u64;
        let mut rand = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 33) as usize
        };
        for round in 0..120 {
            let n = 1 + rand() % 5;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rand() % 100 < 40 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            for text in texts {
                let p = parse_formula(text).unwrap();
                let sugared =
                    eval_bruteforce(&g, &p.formula, &p.free, &Assignment::new(), &opts()).unwrap();
                let desugared = desugar_counting(&p.formula);
                let plain =
                    eval_bruteforce(&g, &desugared, &p.free, &Assignment::new(), &opts()).unwrap();
                assert_eq!(sugared, plain, "round={round} text={text} g={g:?}");
            }
        }
    }

    #[test]
    fn kernelize_examples() {
        let g = biclique(3, 3);
        let nd = nd_partition(&g);
        let kernel = kernelize(&g, &nd, 2);
        assert_eq!(kernel.graph, biclique(2, 2));
        assert_eq!(kernel.class_size(0), 2);

        // class sizes (1, 5, 12) capped at 6 keep (1, 5, 6)
        let mut edges = Vec::new();
        for v in 1..=5 {
            edges.push((0, v));
        }
        for v in 1..=5 {
            for w in 6..18 {
                edges.push((v, w));
            }
        }
        for w in 6..18 {
            edges.push((0, w));
        }
        let g = Graph::new(18, &edges).unwrap();
        let nd = nd_partition(&g);
        let kernel = kernelize(&g, &nd, 6);
        assert_eq!(
            (0..3).map(|i| kernel.class_size(i)).collect::<Vec<_>>(),
            vec![1, 5, 6]
        );

        let g = cycle(5);
        let nd = nd_partition(&g);
        let kernel = kernelize(&g, &nd, 9);
        assert_eq!(kernel.graph, g);
    }

    #[test]
    fn check_shape_examples() {
        let g = biclique(3, 3);
        let nd = nd_partition(&g);
        // W is a nonempty independent dominating set: satisfied exactly by
        // one full side of the biclique
        let p = parse_formula_file(
            "free: W\n(E x. x in W) & (A x. A y. (x in W & y in W -> ~adj(x,y))) \
             & (A z. (~(z in W) -> (E x. (x in W & adj(x,z)))))",
        )
        .unwrap();
        let yes = check_shape(
            &g,
            &nd,
            &p.formula,
            &p.free,
            EvalTarget::FreeSet("W"),
            &Shape(vec![3, 0]),
            &opts(),
        )
        .unwrap();
        assert!(yes);
        // brute force on the full graph agrees
        let side = realize_shape(&nd, &Shape(vec![3, 0]));
        let a = Assignment::new().set("W", AssignedValue::VertexSet(side));
        assert!(eval_bruteforce(&g, &p.formula, &p.free, &a, &opts()).unwrap());

        let nonempty = parse_formula_file("free: W\nE x. x in W").unwrap();
        assert!(!check_shape(
            &g,
            &nd,
            &nonempty.formula,
            &nonempty.free,
            EvalTarget::FreeSet("W"),
            &Shape(vec![0, 0]),
            &opts()
        )
        .unwrap());

        let tautology = parse_formula_file("free: W\ntrue").unwrap();
        assert!(check_shape(
            &g,
            &nd,
            &tautology.formula,
            &tautology.free,
            EvalTarget::FreeSet("W"),
            &Shape(vec![1, 2]),
            &opts()
        )
        .unwrap());
    }

    fn random_graph(n: usize, percent: u64, seed: u64) -> Graph {
        let mut lcg = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(13);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (lcg >> 33) % 100 < percent {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    fn small_corpus() -> Vec<(&'static str, EvalTargetKind)> {
        vec![
            ("A u. A v. ~adj(u,v)", EvalTargetKind::Deleted),
            ("A v. A u. A w. (adj(v,u) & adj(v,w) -> u = w)", EvalTargetKind::Deleted),
            (
                "free: W\nA v. ((v in W) | (E u. (u in W & adj(u,v))))",
                EvalTargetKind::Free,
            ),
            (
                "free: W\nA u. A v. (u in W & v in W -> ~adj(u,v))",
                EvalTargetKind::Free,
            ),
        ]
    }

    enum EvalTargetKind {
        Deleted,
        Free,
    }

    #[test]
    fn kernel_answer_agrees_with_full_graph_on_random_instances() {
        // oracle agreement, sampled; the acceptance suite runs it
        // exhaustively over all graphs on up to 6 vertices
        for seed in 0..40u64 {
            let n = 1 + (seed as usize % 6);
            let g = random_graph(n, 20 + (seed % 7) * 10, seed);
            let nd = nd_partition(&g);
            for (text, kind) in small_corpus() {
                let p = parse_formula_file(text).unwrap();
                let mut reps = vec![Shape(vec![0; nd.class_count()])];
                // all shapes
                for i in 0..nd.class_count() {
                    let mut next = Vec::new();
                    for s in reps {
                        for v in 0..=nd.class_size(i) as u32 {
                            let mut t = s.clone();
                            t.0[i] = v;
                            next.push(t);
                        }
                    }
                    reps = next;
                }
                for s in reps {
                    let set = realize_shape(&nd, &s);
                    let (target, expected) = match kind {
                        EvalTargetKind::Deleted => {
                            let rest = g.delete_vertices(&set);
                            let e = eval_bruteforce(
                                &rest,
                                &p.formula,
                                &p.free,
                                &Assignment::new(),
                                &opts(),
                            )
                            .unwrap();
                            (EvalTarget::DeletedGraph, e)
                        }
                        EvalTargetKind::Free => {
                            let a = Assignment::new()
                                .set("W", AssignedValue::VertexSet(set.clone()));
                            let e = eval_bruteforce(&g, &p.formula, &p.free, &a, &opts())
                                .unwrap();
                            (EvalTarget::FreeSet("W"), e)
                        }
                    };
                    let got =
                        check_shape(&g, &nd, &p.formula, &p.free, target, &s, &opts()).unwrap();
                    assert_eq!(got, expected, "seed={seed} text={text} shape={s}");
                }
            }
        }
    }

    #[test]
    fn equal_shapes_evaluate_equally() {
        // sets of one shape are automorphic images of each other
        let mut lcg = 4242u64;
        let mut rand = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 33) as usize
        };
        let p = parse_formula_file(
            "free: W\n(E x. x in W) & (A x. A y. (x in W & y in W -> ~adj(x,y)))",
        )
        .unwrap();
        let compiled = CompiledFormula::compile(&p.formula, &p.free).unwrap();
        for round in 0..200 {
            let n = 2 + rand() % 7;
            let g = random_graph(n, 40, round as u64 * 7 + 3);
            let nd = nd_partition(&g);
            let x: BTreeSet<usize> = (0..n).filter(|_| rand() % 2 == 0).collect();
            let shape = shape_of(&nd, &x);
            let y = realize_shape(&nd, &shape);
            let ax = Assignment::new().set("W", AssignedValue::VertexSet(x));
            let ay = Assignment::new().set("W", AssignedValue::VertexSet(y));
            assert_eq!(
                compiled.eval(&g, &ax, &opts()).unwrap(),
                compiled.eval(&g, &ay, &opts()).unwrap(),
                "round={round}"
            );
        }
    }

    #[test]
    fn partial_eval_is_exact_on_decided_sets_and_sound_on_refinements() {
        let texts = [
            "A x. E y. adj(x,y)",
            "A u. A v. ~adj(u,v)",
            "E u. E v. (adj(u,v) & (A w. (adj(u,w) -> w = v)))",
        ];
        let mut lcg = 31337u64;
        let mut rand = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 33) as usize
        };
        for round in 0..150 {
            let n = 1 + rand() % 6;
            let g = random_graph(n, 45, round as u64);
            for text in texts {
                let p = parse_formula(text).unwrap();
                let compiled = CompiledFormula::compile(&p.formula, &p.free).unwrap();
                // crisp alive vector matches evaluation on the deleted graph
                let deleted: BTreeSet<usize> = (0..n).filter(|_| rand() % 3 == 0).collect();
                let alive: Vec<Truth3> = (0..n)
                    .map(|v| {
                        if deleted.contains(&v) {
                            Truth3::False
                        } else {
                            Truth3::True
                        }
                    })
                    .collect();
                let three = eval_partial_deleted(&compiled, &g, &alive, &opts()).unwrap();
                let two = compiled
                    .eval(&g.delete_vertices(&deleted), &Assignment::new(), &opts())
                    .unwrap();
                assert_eq!(three, Truth3::from(two), "text={text} deleted={deleted:?}");

                // a partially unknown vector never contradicts a completion
                let fuzzy: Vec<Truth3> = (0..n)
                    .map(|v| {
                        if rand() % 2 == 0 {
                            Truth3::Unknown
                        } else if deleted.contains(&v) {
                            Truth3::False
                        } else {
                            Truth3::True
                        }
                    })
                    .collect();
                let coarse = eval_partial_deleted(&compiled, &g, &fuzzy, &opts()).unwrap();
                // complete the unknowns in line with `deleted`
                let completed: Vec<Truth3> = (0..n)
                    .map(|v| {
                        if deleted.contains(&v) {
                            Truth3::False
                        } else {
                            Truth3::True
                        }
                    })
                    .zip(&fuzzy)
                    .map(|(c, &f)| if f == Truth3::Unknown { c } else { f })
                    .collect();
                let fine = eval_partial_deleted(&compiled, &g, &completed, &opts()).unwrap();
                if coarse != Truth3::Unknown {
                    assert_eq!(coarse, fine, "text={text}");
                }
            }
        }
    }
}
