//! Ground-truth oracles: exhaustive sweeps over all vertex or edge subsets.

use std::collections::BTreeSet;
use std::time::Instant;

use super::vertex::validate_vertex_formula;
use super::{
    Bound, DeletionSet, Mode, SearchKind, Solution, SolveError, SolveStats, SolverConfig,
};
use crate::graph::{nd_partition, Graph};
use crate::logic::{desugar_counting, ParsedFormula, Sort};
use crate::mc::{Assignment, AssignedValue, CompiledFormula, EvalTarget};
use crate::shapes::{fair_edge_cost, fair_vertex_cost, FairCost};

const MAX_BRUTE_BITS: usize = 22;

/// Enumerates every vertex subset in ascending bitmask order; exact ground
/// truth for small graphs.
pub fn brute_force_fair_vertex(
    g: &Graph,
    parsed: &ParsedFormula,
    mode: Mode,
    bound: Bound,
    cfg: &SolverConfig,
) -> Result<Solution, SolveError> {
    let started = Instant::now();
    let target = validate_vertex_formula(parsed, mode)?;
    let n = g.vertex_count();
    if n > MAX_BRUTE_BITS {
        return Err(SolveError::SearchSpaceTooLarge(format!(
            "brute force enumerates 2^{n} vertex subsets; the limit is 2^{MAX_BRUTE_BITS}"
        )));
    }
    let desugared = desugar_counting(&parsed.formula);
    let compiled = CompiledFormula::compile(&desugared, &parsed.free)?;
    let opts = cfg.eval_options();
    let cap = bound.cap();

    let mut best: Option<(BTreeSet<usize>, FairCost)> = None;
    let mut examined = 0u64;
    let mut calls = 0u64;
    for mask in 0u64..(1 << n) {
        examined += 1;
        let set: BTreeSet<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let cost = fair_vertex_cost(g, &set);
        if cost.0 > cap {
            continue;
        }
        if let Some((_, c)) = &best {
            if *c <= cost {
                continue;
            }
        }
        calls += 1;
        let sat = match target {
            EvalTarget::DeletedGraph => {
                compiled.eval(&g.delete_vertices(&set), &Assignment::new(), &opts)?
            }
            EvalTarget::FreeSet(name) => {
                let a = Assignment::new().set(name, AssignedValue::VertexSet(set.clone()));
                compiled.eval(g, &a, &opts)?
            }
        };
        if sat {
            best = Some((set, cost));
            if matches!(bound, Bound::AtMost(_)) {
                break;
            }
        }
    }
    finish(g, best, examined, calls, started, SearchKind::BruteForce, DeletionSet::Vertices)
}

/// Enumerates every edge subset in ascending bitmask order.
pub fn brute_force_fair_edge(
    g: &Graph,
    parsed: &ParsedFormula,
    mode: Mode,
    bound: Bound,
    cfg: &SolverConfig,
) -> Result<Solution, SolveError> {
    let started = Instant::now();
    let m = g.edge_count();
    if m > MAX_BRUTE_BITS {
        return Err(SolveError::SearchSpaceTooLarge(format!(
            "brute force enumerates 2^{m} edge subsets; the limit is 2^{MAX_BRUTE_BITS}"
        )));
    }
    match mode {
        Mode::Plain if !parsed.free.is_empty() => {
            return Err(SolveError::BadInput(
                "plain mode evaluates a sentence on the edge-deleted graph".into(),
            ))
        }
        Mode::Generalized
            if !matches!(parsed.free.as_slice(), [only] if only.sort == Sort::EdgeSet) =>
        {
            return Err(SolveError::BadInput(
                "generalized mode needs exactly one free edge-set variable".into(),
            ))
        }
        _ => {}
    }
    let desugared = desugar_counting(&parsed.formula);
    let compiled = CompiledFormula::compile(&desugared, &parsed.free)?;
    let opts = cfg.eval_options();
    let cap = bound.cap();

    let mut best: Option<(BTreeSet<(usize, usize)>, FairCost)> = None;
    let mut examined = 0u64;
    let mut calls = 0u64;
    for mask in 0u64..(1 << m) {
        examined += 1;
        let set: BTreeSet<(usize, usize)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        let cost = fair_edge_cost(g, &set);
        if cost.0 > cap {
            continue;
        }
        if let Some((_, c)) = &best {
            if *c <= cost {
                continue;
            }
        }
        calls += 1;
        let sat = match (mode, parsed.free.as_slice()) {
            (Mode::Plain, _) => {
                compiled.eval(&g.delete_edges(&set), &Assignment::new(), &opts)?
            }
            (Mode::Generalized, [only]) => {
                let a = Assignment::new()
                    .set(&only.name, AssignedValue::EdgeSet(set.clone()));
                compiled.eval(g, &a, &opts)?
            }
            _ => unreachable!("validated above"),
        };
        if sat {
            best = Some((set, cost));
            if matches!(bound, Bound::AtMost(_)) {
                break;
            }
        }
    }
    finish(g, best, examined, calls, started, SearchKind::BruteForce, DeletionSet::Edges)
}

fn finish<T>(
    g: &Graph,
    best: Option<(T, FairCost)>,
    examined: u64,
    calls: u64,
    started: Instant,
    engine: SearchKind,
    wrap: impl Fn(T) -> DeletionSet,
) -> Result<Solution, SolveError> {
    let stats = SolveStats {
        engine,
        nd_classes: nd_partition(g).class_count(),
        vertex_cover: None,
        r: 0,
        representatives: examined,
        evaluator_calls: calls,
        elapsed_ms: started.elapsed().as_millis(),
        representative_mode: None,
    };
    Ok(match best {
        None => Solution { answer: false, witness: None, fair_cost: None, stats },
        Some((set, cost)) => Solution {
            answer: true,
            witness: Some(wrap(set)),
            fair_cost: Some(cost),
            stats,
        },
    })
}
