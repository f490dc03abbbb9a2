//! The two parameterized solvers, brute-force oracles, and the exact
//! equitable 3-coloring search.

mod brute;
mod coloring;
mod edge;
mod vertex;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use serde::Serialize;
use thiserror::Error;

pub use brute::{brute_force_fair_edge, brute_force_fair_vertex};
pub use coloring::{equitable_3_coloring, is_equitable_3_coloring};
pub use edge::solve_fair_edge_vc;
pub use vertex::solve_fair_vertex_nd;

use crate::logic::LogicError;
use crate::mc::{EvalError, EvalOptions, DEFAULT_EVAL_BUDGET};
use crate::shapes::{FairCost, RepresentativeMode, SignatureError};

/// Plain mode deletes the set and evaluates a sentence on what remains;
/// Generalized mode passes the set to a formula with one free set variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Generalized,
}

/// Decide against a fair-cost bound, or minimize the fair cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost(u32),
    Minimize,
}

impl Bound {
    pub(crate) fn cap(self) -> u32 {
        match self {
            Bound::AtMost(k) => k,
            Bound::Minimize => u32::MAX,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Step budget per evaluator call.
    pub eval_budget: u64,
    pub memo: bool,
    /// Enumerate signature shapes exactly while their number stays within
    /// this budget; beyond it fall back to greedy r-representatives.
    pub exact_signature_budget: u64,
    /// Hard cap on any candidate list.
    pub candidate_cap: u64,
    /// Worker threads for representative checking.
    pub jobs: usize,
    /// Force greedy signature representatives even when exact enumeration
    /// would fit the budget (used to cross-validate the greedy path).
    pub force_greedy_signatures: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eval_budget: DEFAULT_EVAL_BUDGET,
            memo: true,
            exact_signature_budget: 200_000,
            candidate_cap: 2_000_000,
            jobs: 1,
            force_greedy_signatures: false,
        }
    }
}

impl SolverConfig {
    pub(crate) fn eval_options(&self) -> EvalOptions {
        EvalOptions { budget: self.eval_budget, memo: self.memo }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionSet {
    Vertices(BTreeSet<usize>),
    Edges(BTreeSet<(usize, usize)>),
}

/// How the candidate space was searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    NdShapes,
    VcSignatures,
    BruteForce,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub engine: SearchKind,
    pub nd_classes: usize,
    pub vertex_cover: Option<usize>,
    pub r: u64,
    /// Candidates enumerated (shapes, signature shapes, or raw subsets).
    pub representatives: u64,
    pub evaluator_calls: u64,
    pub elapsed_ms: u128,
    /// Edge solver only: exact enumeration or greedy (heuristic)
    /// representatives. Greedy answers are flagged because the greedy
    /// realization is not proven cost-minimal within its class.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative_mode: Option<RepresentativeMode>,
}

/// Outcome of a solve: when `answer` holds, `witness` re-verified against
/// the formula and `fair_cost` is its definitional fair cost.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub answer: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DeletionSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fair_cost: Option<FairCost>,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("evaluator budget of {budget} steps exceeded; result inconclusive")]
    BudgetExceeded { budget: u64 },
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("unsuitable input: {0}")]
    BadInput(String),
    #[error("internal solver check failed: {0}")]
    Internal(String),
}

impl From<LogicError> for SolveError {
    fn from(e: LogicError) -> SolveError {
        SolveError::BadInput(e.to_string())
    }
}

impl From<EvalError> for SolveError {
    fn from(e: EvalError) -> SolveError {
        match e {
            EvalError::Budget { budget } => SolveError::BudgetExceeded { budget },
            EvalError::TooLarge(msg) => SolveError::SearchSpaceTooLarge(msg),
            other => SolveError::BadInput(other.to_string()),
        }
    }
}

impl From<SignatureError> for SolveError {
    fn from(e: SignatureError) -> SolveError {
        match e {
            SignatureError::TooLarge { needed, cap } => SolveError::SearchSpaceTooLarge(format!(
                "signature enumeration needs {needed} candidates, cap is {cap}"
            )),
            other => SolveError::Internal(other.to_string()),
        }
    }
}

/// A candidate that passed its model check, tagged with the enumeration
/// index for deterministic selection.
pub(crate) struct ScanOutcome {
    pub hits: Vec<(usize, FairCost)>,
    pub first_error: Option<(usize, EvalError)>,
    pub examined: u64,
}

/// Checks candidates in enumeration order, optionally in parallel. With
/// `stop_at_first_hit`, the outcome carries the hit with the smallest
/// index, which matches the sequential result regardless of scheduling.
pub(crate) fn scan_candidates(
    total: usize,
    jobs: usize,
    stop_at_first_hit: bool,
    check: impl Fn(usize) -> Result<Option<FairCost>, EvalError> + Sync,
) -> ScanOutcome {
    if jobs <= 1 || total <= 1 {
        let mut hits = Vec::new();
        let mut examined = 0;
        for index in 0..total {
            examined += 1;
            match check(index) {
                Ok(Some(cost)) => {
                    hits.push((index, cost));
                    if stop_at_first_hit {
                        return ScanOutcome { hits, first_error: None, examined };
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    return ScanOutcome { hits, first_error: Some((index, e)), examined }
                }
            }
        }
        return ScanOutcome { hits, first_error: None, examined };
    }

    let stop_at = AtomicUsize::new(usize::MAX);
    let examined = AtomicU64::new(0);
    let worker_count = jobs.min(total);
    let mut results: Vec<(Vec<(usize, FairCost)>, Option<(usize, EvalError)>)> =
        Vec::with_capacity(worker_count);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..worker_count {
            let check = &check;
            let stop_at = &stop_at;
            let examined = &examined;
            handles.push(scope.spawn(move || {
                let mut hits = Vec::new();
                let mut error = None;
                let mut index = w;
                while index < total {
                    if index > stop_at.load(Ordering::Acquire) {
                        break;
                    }
                    examined.fetch_add(1, Ordering::Relaxed);
                    match check(index) {
                        Ok(Some(cost)) => {
                            hits.push((index, cost));
                            if stop_at_first_hit {
                                stop_at.fetch_min(index, Ordering::AcqRel);
                            }
                        }
                        Ok(None) => {}
                        Err(e) => {
                            error = Some((index, e));
                            stop_at.fetch_min(index, Ordering::AcqRel);
                            break;
                        }
                    }
                    index += jobs;
                }
                (hits, error)
            }));
        }
        for handle in handles {
            results.push(handle.join().expect("scan worker"));
        }
    });
    let mut hits = Vec::new();
    let mut first_error: Option<(usize, EvalError)> = None;
    for (mut worker_hits, error) in results {
        hits.append(&mut worker_hits);
        if let Some((idx, e)) = error {
            if first_error.as_ref().is_none_or(|(fi, _)| idx < *fi) {
                first_error = Some((idx, e));
            }
        }
    }
    hits.sort_by_key(|(idx, _)| *idx);
    ScanOutcome { hits, first_error, examined: examined.load(Ordering::Relaxed) }
}

/// Applies the decision/minimize selection rule to a scan outcome.
///
/// Decision: the hit with the smallest enumeration index wins; an error at
/// a smaller index than every hit makes the run inconclusive. Minimize: any
/// error is inconclusive, otherwise the minimum by (cost, index).
pub(crate) fn select_hit(
    outcome: &ScanOutcome,
    bound: Bound,
) -> Result<Option<(usize, FairCost)>, SolveError> {
    match bound {
        Bound::AtMost(_) => {
            let best = outcome.hits.iter().min_by_key(|(idx, _)| *idx).copied();
            if let Some((err_idx, err)) = &outcome.first_error {
                if best.is_none_or(|(hit_idx, _)| hit_idx > *err_idx) {
                    return Err(clone_eval_error(err));
                }
            }
            Ok(best)
        }
        Bound::Minimize => {
            if let Some((_, err)) = &outcome.first_error {
                return Err(clone_eval_error(err));
            }
            Ok(outcome
                .hits
                .iter()
                .min_by_key(|(idx, cost)| (*cost, *idx))
                .copied())
        }
    }
}

fn clone_eval_error(e: &EvalError) -> SolveError {
    match e {
        EvalError::Budget { budget } => SolveError::BudgetExceeded { budget: *budget },
        EvalError::TooLarge(msg) => SolveError::SearchSpaceTooLarge(msg.clone()),
        other => SolveError::BadInput(other.to_string()),
    }
}

#[cfg(test)]
mod solver_tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::Graph;
    use crate::logic::{parse_formula, parse_formula_file, ParsedFormula};

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

    fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, &(1..=leaves).map(|v| (0, v)).collect::<Vec<_>>()).unwrap()
    }

    fn edgeless_after() -> ParsedFormula {
        parse_formula("A u. A v. ~adj(u,v)").unwrap()
    }

    #[test]
    fn c4_edgeless_deletion_costs_two() {
        let cfg = SolverConfig::default();
        let s = solve_fair_vertex_nd(
            &cycle(4),
            &edgeless_after(),
            Mode::Plain,
            Bound::Minimize,
            &cfg,
        )
        .unwrap();
        assert!(s.answer);
        assert_eq!(s.fair_cost, Some(crate::shapes::FairCost(2)));
        let Some(DeletionSet::Vertices(w)) = &s.witness else { panic!() };
        assert_eq!(cycle(4).delete_vertices(w).edge_count(), 0);
        let b = brute_force_fair_vertex(
            &cycle(4),
            &edgeless_after(),
            Mode::Plain,
            Bound::Minimize,
            &cfg,
        )
        .unwrap();
        assert_eq!(b.fair_cost, s.fair_cost);
    }

    #[test]
    fn k3_edgeless_deletion_costs_two() {
        let cfg = SolverConfig::default();
        let b = brute_force_fair_vertex(
            &complete(3),
            &edgeless_after(),
            Mode::Plain,
            Bound::Minimize,
            &cfg,
        )
        .unwrap();
        assert_eq!(b.fair_cost, Some(crate::shapes::FairCost(2)));
    }

    #[test]
    fn tautology_with_zero_bound_deletes_nothing() {
        let cfg = SolverConfig::default();
        let p = parse_formula("true").unwrap();
        let s =
            solve_fair_vertex_nd(&cycle(4), &p, Mode::Plain, Bound::AtMost(0), &cfg).unwrap();
        assert!(s.answer);
        assert_eq!(s.witness, Some(DeletionSet::Vertices(BTreeSet::new())));
        assert_eq!(s.fair_cost, Some(crate::shapes::FairCost(0)));
    }

    #[test]
    fn dominating_set_on_biclique_matches_brute_force() {
        let cfg = SolverConfig::default();
        let p = parse_formula_file(
            "free: W\nA v. ((v in W) | (E u. (u in W & adj(u,v))))",
        )
        .unwrap();
        let g = biclique(3, 3);
        let s =
            solve_fair_vertex_nd(&g, &p, Mode::Generalized, Bound::Minimize, &cfg).unwrap();
        let b =
            brute_force_fair_vertex(&g, &p, Mode::Generalized, Bound::Minimize, &cfg).unwrap();
        assert!(s.answer && b.answer);
        assert_eq!(s.fair_cost, b.fair_cost);
    }

    #[test]
    fn vertex_solver_rejects_edge_formulas() {
        let cfg = SolverConfig::default();
        let p = parse_formula("A e^E. E v. inc(v,e)").unwrap();
        assert!(matches!(
            solve_fair_vertex_nd(&cycle(4), &p, Mode::Plain, Bound::Minimize, &cfg),
            Err(SolveError::BadInput(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_inconclusive_not_wrong() {
        let cfg = SolverConfig { eval_budget: 3, ..SolverConfig::default() };
        let err = solve_fair_vertex_nd(
            &cycle(4),
            &edgeless_after(),
            Mode::Plain,
            Bound::Minimize,
            &cfg,
        );
        assert!(matches!(err, Err(SolveError::BudgetExceeded { .. })));
    }

    #[test]
    fn c4_max_degree_one_edge_deletion_costs_one() {
        let cfg = SolverConfig::default();
        let p = parse_formula("A v. A u. A w. (adj(v,u) & adj(v,w) -> u = w)").unwrap();
        let s =
            solve_fair_edge_vc(&cycle(4), &p, Mode::Plain, Bound::Minimize, &cfg).unwrap();
        assert!(s.answer);
        assert_eq!(s.fair_cost, Some(crate::shapes::FairCost(1)));
        let Some(DeletionSet::Edges(f)) = &s.witness else { panic!() };
        assert_eq!(f.len(), 2);
        let b =
            brute_force_fair_edge(&cycle(4), &p, Mode::Plain, Bound::Minimize, &cfg).unwrap();
        assert_eq!(b.fair_cost, s.fair_cost);
    }

    #[test]
    fn empty_edge_set_constraint_is_satisfiable_at_cost_zero() {
        let cfg = SolverConfig::default();
        let p = parse_formula_file("free: F^ES\nA e^E. ~(e in F)").unwrap();
        let s = solve_fair_edge_vc(&cycle(4), &p, Mode::Generalized, Bound::AtMost(3), &cfg)
            .unwrap();
        assert!(s.answer);
        assert_eq!(s.fair_cost, Some(crate::shapes::FairCost(0)));
        assert_eq!(s.witness, Some(DeletionSet::Edges(BTreeSet::new())));
    }

    #[test]
    fn covering_every_vertex_of_a_star_costs_its_degree() {
        let cfg = SolverConfig::default();
        let p = parse_formula_file("free: F^ES\nA v. E e^E. (e in F & inc(v,e))").unwrap();
        let s = solve_fair_edge_vc(&star(3), &p, Mode::Generalized, Bound::Minimize, &cfg)
            .unwrap();
        assert!(s.answer);
        assert_eq!(s.fair_cost, Some(crate::shapes::FairCost(3)));
        let b = brute_force_fair_edge(&star(3), &p, Mode::Generalized, Bound::Minimize, &cfg)
            .unwrap();
        assert_eq!(b.fair_cost, s.fair_cost);
    }

    #[test]
    fn edgeless_graph_short_circuits_the_edge_solver() {
        let cfg = SolverConfig::default();
        let g = Graph::new(3, &[]).unwrap();
        let p = parse_formula_file("free: F^ES\nA e^E. ~(e in F)").unwrap();
        let s =
            solve_fair_edge_vc(&g, &p, Mode::Generalized, Bound::Minimize, &cfg).unwrap();
        assert!(s.answer);
        assert_eq!(s.stats.vertex_cover, Some(0));
    }

    #[test]
    fn greedy_and_exact_signature_modes_agree_here() {
        let exact_cfg = SolverConfig::default();
        let greedy_cfg =
            SolverConfig { force_greedy_signatures: true, ..SolverConfig::default() };
        let p = parse_formula("A v. A u. A w. (adj(v,u) & adj(v,w) -> u = w)").unwrap();
        for g in [cycle(4), cycle(5), star(4)] {
            let e = solve_fair_edge_vc(&g, &p, Mode::Plain, Bound::Minimize, &exact_cfg)
                .unwrap();
            let h = solve_fair_edge_vc(&g, &p, Mode::Plain, Bound::Minimize, &greedy_cfg)
                .unwrap();
            assert_eq!(e.answer, h.answer);
            assert_eq!(e.fair_cost, h.fair_cost);
            assert_eq!(e.stats.representative_mode, Some(RepresentativeMode::Exact));
            assert_eq!(h.stats.representative_mode, Some(RepresentativeMode::Greedy));
        }
    }

    #[test]
    fn bound_answers_are_monotone_in_the_bound() {
        let cfg = SolverConfig::default();
        let mut lcg = 77u64;
        let mut rand = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 33) as usize
        };
        for round in 0..25 {
            let n = 2 + rand() % 5;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rand() % 100 < 50 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, &edges).unwrap();
            let p = edgeless_after();
            let mut last = false;
            for cap in 0..n as u32 {
                let s = solve_fair_vertex_nd(&g, &p, Mode::Plain, Bound::AtMost(cap), &cfg)
                    .unwrap();
                assert!(!last || s.answer, "round={round} cap={cap}: yes flipped to no");
                last = s.answer;
            }
        }
    }

    #[test]
    fn parallel_jobs_produce_the_same_solution() {
        let p = edgeless_after();
        let g = cycle(6);
        let serial = SolverConfig::default();
        let parallel = SolverConfig { jobs: 4, ..SolverConfig::default() };
        let a = solve_fair_vertex_nd(&g, &p, Mode::Plain, Bound::Minimize, &serial).unwrap();
        let b = solve_fair_vertex_nd(&g, &p, Mode::Plain, Bound::Minimize, &parallel).unwrap();
        assert_eq!(a.answer, b.answer);
        assert_eq!(a.fair_cost, b.fair_cost);
        assert_eq!(a.witness, b.witness);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_finds_the_first_hit_in_index_order() {
        for jobs in [1, 4] {
            let outcome = scan_candidates(100, jobs, true, |i| {
                Ok((i % 7 == 3).then_some(FairCost(i as u32)))
            });
            let best = select_hit(&outcome, Bound::AtMost(100)).unwrap();
            assert_eq!(best, Some((3, FairCost(3))), "jobs={jobs}");
        }
    }

    #[test]
    fn scan_minimize_is_deterministic_across_jobs() {
        let run = |jobs| {
            let outcome = scan_candidates(200, jobs, false, |i| {
                Ok((i % 3 == 1).then_some(FairCost((i as u32 * 7) % 11)))
            });
            select_hit(&outcome, Bound::Minimize).unwrap()
        };
        assert_eq!(run(1), run(8));
        assert_eq!(run(1), Some((22, FairCost(0))));
    }

    #[test]
    fn error_before_any_hit_is_inconclusive() {
        let outcome = scan_candidates(50, 1, true, |i| {
            if i == 2 {
                Err(EvalError::Budget { budget: 7 })
            } else {
                Ok((i >= 10).then_some(FairCost(0)))
            }
        });
        assert!(matches!(
            select_hit(&outcome, Bound::AtMost(5)),
            Err(SolveError::BudgetExceeded { budget: 7 })
        ));
    }

    #[test]
    fn hit_before_error_still_answers_decision() {
        let outcome = scan_candidates(50, 1, true, |i| match i {
            1 => Ok(Some(FairCost(4))),
            3 => Err(EvalError::Budget { budget: 7 }),
            _ => Ok(None),
        });
        let best = select_hit(&outcome, Bound::AtMost(5)).unwrap();
        assert_eq!(best, Some((1, FairCost(4))));
    }
}
