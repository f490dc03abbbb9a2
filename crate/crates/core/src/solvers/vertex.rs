//! Fair vertex deletion parameterized by neighborhood diversity: sweep the
//! minimal-cost representatives of the shape r-equivalence classes and
//! model-check each on a kernel.

use std::time::Instant;

use super::{
    scan_candidates, select_hit, Bound, DeletionSet, Mode, SearchKind, Solution, SolveError,
    SolveStats, SolverConfig,
};
use crate::graph::{nd_partition, Graph};
use crate::logic::{compute_r, desugar_counting, Dialect, ParsedFormula, Sort};
use crate::mc::{
    check_shape_on_kernel, kernelize, Assignment, AssignedValue, CompiledFormula, EvalTarget,
};
use crate::shapes::{
    enumerate_representatives, fair_vertex_cost, fair_vertex_cost_of_shape, realize_shape, Shape,
};

pub(crate) fn validate_vertex_formula<'a>(
    parsed: &'a ParsedFormula,
    mode: Mode,
) -> Result<EvalTarget<'a>, SolveError> {
    if parsed.dialect == Dialect::Mso2 {
        return Err(SolveError::BadInput(
            "the vertex solver takes FO or MSO1 formulas; this one uses edge sorts".into(),
        ));
    }
    match mode {
        Mode::Plain => {
            if !parsed.free.is_empty() {
                return Err(SolveError::BadInput(
                    "plain mode evaluates a sentence on the deleted graph; remove the free \
                     variables or use generalized mode"
                        .into(),
                ));
            }
            Ok(EvalTarget::DeletedGraph)
        }
        Mode::Generalized => match parsed.free.as_slice() {
            [only] if only.sort == Sort::VertexSet => Ok(EvalTarget::FreeSet(&only.name)),
            _ => Err(SolveError::BadInput(
                "generalized mode needs exactly one free vertex-set variable".into(),
            )),
        },
    }
}

/// Decides (or minimizes) the fair vertex cost of a deletion set
/// satisfying the formula. Exact; a budget error is reported as
/// inconclusive, never as a wrong answer.
pub fn solve_fair_vertex_nd(
    g: &Graph,
    parsed: &ParsedFormula,
    mode: Mode,
    bound: Bound,
    cfg: &SolverConfig,
) -> Result<Solution, SolveError> {
    let started = Instant::now();
    let target = validate_vertex_formula(parsed, mode)?;
    let desugared = desugar_counting(&parsed.formula);
    let compiled = CompiledFormula::compile(&desugared, &parsed.free)?;
    let counts = compiled.counts();
    let r = compute_r(counts.vertex_elem, counts.vertex_set);

    let nd = nd_partition(g);
    let kernel = kernelize(g, &nd, 2 * r + 2);
    let stream = enumerate_representatives(&nd, r);
    let total = stream.total();
    if total > cfg.candidate_cap as u128 {
        return Err(SolveError::SearchSpaceTooLarge(format!(
            "{total} shape representatives exceed the cap of {}",
            cfg.candidate_cap
        )));
    }
    let cap = bound.cap();
    let shapes: Vec<Shape> = stream.collect();
    let affordable: Vec<(Shape, u32)> = shapes
        .into_iter()
        .filter_map(|s| {
            let cost = fair_vertex_cost_of_shape(&nd, &s).0;
            (cost <= cap).then_some((s, cost))
        })
        .collect();

    let opts = cfg.eval_options();
    let outcome = scan_candidates(
        affordable.len(),
        cfg.jobs,
        matches!(bound, Bound::AtMost(_)),
        |index| {
            let (shape, cost) = &affordable[index];
            let sat =
                check_shape_on_kernel(&kernel, &nd, &compiled, target, shape, r, &opts)?;
            Ok(sat.then_some(crate::shapes::FairCost(*cost)))
        },
    );
    let best = select_hit(&outcome, bound)?;

    let mut stats = SolveStats {
        engine: SearchKind::NdShapes,
        nd_classes: nd.class_count(),
        vertex_cover: None,
        r,
        representatives: total as u64,
        evaluator_calls: outcome.examined,
        elapsed_ms: 0,
        representative_mode: None,
    };

    let solution = match best {
        None => {
            stats.elapsed_ms = started.elapsed().as_millis();
            Solution { answer: false, witness: None, fair_cost: None, stats }
        }
        Some((index, cost)) => {
            let witness = realize_shape(&nd, &affordable[index].0);
            // witness self-check: definitional cost and a direct evaluation
            // on the full graph, before anything is returned
            let definitional = fair_vertex_cost(g, &witness);
            if definitional != cost || definitional.0 > cap {
                return Err(SolveError::Internal(format!(
                    "witness cost {definitional} disagrees with shape cost {cost}"
                )));
            }
            stats.evaluator_calls += 1;
            let verified = match target {
                EvalTarget::DeletedGraph => {
                    compiled.eval(&g.delete_vertices(&witness), &Assignment::new(), &opts)?
                }
                EvalTarget::FreeSet(name) => {
                    let a = Assignment::new()
                        .set(name, AssignedValue::VertexSet(witness.clone()));
                    compiled.eval(g, &a, &opts)?
                }
            };
            if !verified {
                return Err(SolveError::Internal(
                    "witness failed direct re-evaluation on the full graph".into(),
                ));
            }
            stats.elapsed_ms = started.elapsed().as_millis();
            Solution {
                answer: true,
                witness: Some(DeletionSet::Vertices(witness)),
                fair_cost: Some(cost),
                stats,
            }
        }
    };
    Ok(solution)
}
