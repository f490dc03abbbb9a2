//! Built-in formulas used by the hardness-instance generators.
//!
//! The equitable-coloring formulas recognize the gadget roles structurally:
//! dangling vertices have degree one, original vertices have a dangling
//! neighbor, selector vertices have degree two, and class vertices are
//! everything else. A vertex "belongs to" a class vertex when the selector
//! between them was deleted (vertex version) or the direct edge was deleted
//! (edge version).

use super::ast::*;
use super::{sort_check, Dialect, LogicError};

/// A library formula with its free variables and dialect.
#[derive(Debug, Clone)]
pub struct LibraryFormula {
    pub name: &'static str,
    pub formula: Formula,
    pub free: Vec<TypedVar>,
    pub dialect: Dialect,
}

pub fn library_names() -> &'static [&'static str] {
    &["eq_3_col_vertex", "eq_3_col_edge", "eq_conn", "connected_set"]
}

/// Looks up a library formula by name.
pub fn formula_library(name: &str) -> Result<LibraryFormula, LogicError> {
    let (formula, free) = match name {
        "eq_3_col_vertex" => (eq_3_col_vertex(), vec![]),
        "eq_3_col_edge" => (eq_3_col_edge(), vec![]),
        "eq_conn" => (eq_conn(), vec![]),
        "connected_set" => (connected_in("W"), vec![vset("W")]),
        _ => {
            return Err(LogicError::Unsupported(format!(
                "unknown library formula `{name}` (known: {})",
                library_names().join(", ")
            )))
        }
    };
    let dialect = sort_check(&formula, &free).expect("library formula must be well-sorted");
    let name = library_names().iter().find(|n| **n == name).unwrap();
    Ok(LibraryFormula { name, formula, free, dialect })
}

fn isolated(v: &str) -> Formula {
    let w = format!("{v}_n");
    forall(velem(&w), not(adj(v, &w)))
}

fn dangling(v: &str) -> Formula {
    let w = format!("{v}_d");
    let w2 = format!("{v}_e");
    exists(
        velem(&w),
        and(
            adj(v, &w),
            forall(velem(&w2), implies(adj(v, &w2), eq(&w2, &w))),
        ),
    )
}

fn original(v: &str) -> Formula {
    let w = format!("{v}_o");
    exists(velem(&w), and(dangling(&w), adj(v, &w)))
}

fn selector(v: &str) -> Formula {
    let w = format!("{v}_s");
    Formula::Count(CountKind::Exactly, 2, velem(&w), Box::new(adj(v, &w)))
}

fn class_vertex(v: &str) -> Formula {
    and_all([not(original(v)), not(selector(v)), not(dangling(v))])
}

fn class_vertex_edge(v: &str) -> Formula {
    // deleting a dangling edge isolates its endpoint, and isolated
    // vertices must not pass as class vertices, so the edge variant
    // excludes them here explicitly
    and_all([not(original(v)), not(dangling(v)), not(isolated(v))])
}

fn belongs_to(v: &str, a: &str) -> Formula {
    let w = format!("{v}_m");
    and_all([
        original(v),
        class_vertex(a),
        not(exists(velem(&w), and(adj(v, &w), adj(&w, a)))),
    ])
}

fn belongs_to_edge(v: &str, a: &str) -> Formula {
    and_all([original(v), class_vertex_edge(a), not(adj(v, a))])
}

fn same_class(v: &str, w: &str, edge_version: bool) -> Formula {
    let (cls, bel): (fn(&str) -> Formula, fn(&str, &str) -> Formula) = if edge_version {
        (class_vertex_edge, belongs_to_edge)
    } else {
        (class_vertex, belongs_to)
    };
    and_all([
        original(v),
        original(w),
        exists(velem("q"), and_all([cls("q"), bel(v, "q"), bel(w, "q")])),
    ])
}

fn valid_deletion_vertex() -> Formula {
    and(
        forall(velem("v"), not(isolated("v"))),
        forall(
            velem("v"),
            implies(
                original("v"),
                Formula::Count(CountKind::Exactly, 1, velem("c"), Box::new(belongs_to("v", "c"))),
            ),
        ),
    )
}

fn valid_deletion_edge() -> Formula {
    let t = "v_t";
    and(
        forall(
            velem("v"),
            Formula::Count(
                CountKind::AtMost,
                2,
                velem(t),
                Box::new(and(adj("v", t), dangling(t))),
            ),
        ),
        forall(
            velem("v"),
            implies(
                original("v"),
                Formula::Count(
                    CountKind::Exactly,
                    1,
                    velem("c"),
                    Box::new(belongs_to_edge("v", "c")),
                ),
            ),
        ),
    )
}

/// The vertex-deletion coloring formula: a valid deletion encodes a
/// partition of the original vertices into color classes, and no two
/// same-class originals are adjacent.
pub fn eq_3_col_vertex() -> Formula {
    and(
        valid_deletion_vertex(),
        forall(
            velem("v"),
            forall(velem("w"), implies(same_class("v", "w", false), not(adj("v", "w")))),
        ),
    )
}

/// The edge-deletion variant: class membership is encoded by deleting the
/// direct original-class edge, and every vertex keeps at most two
/// degree-one neighbors.
pub fn eq_3_col_edge() -> Formula {
    and(
        valid_deletion_edge(),
        forall(
            velem("v"),
            forall(velem("w"), implies(same_class("v", "w", true), not(adj("v", "w")))),
        ),
    )
}

/// Standard MSO1 connectivity of a vertex set: no proper nonempty subset of
/// the set is closed under edges inside the set. A singleton is connected.
pub fn connected_in(set: &str) -> Formula {
    let t = "T";
    forall(
        vset(t),
        implies(
            and(
                exists(velem("x"), and(is_in("x", t), is_in("x", set))),
                exists(velem("y"), and(is_in("y", set), not(is_in("y", t)))),
            ),
            exists(
                velem("p"),
                exists(
                    velem("z"),
                    and_all([
                        is_in("p", t),
                        is_in("p", set),
                        is_in("z", set),
                        not(is_in("z", t)),
                        adj("p", "z"),
                    ]),
                ),
            ),
        ),
    )
}

fn class_set(set: &str) -> Formula {
    and_all([
        exists(velem("x"), is_in("x", set)),
        forall(
            velem("x"),
            forall(
                velem("y"),
                implies(and(is_in("x", set), is_in("y", set)), same_class("x", "y", false)),
            ),
        ),
        forall(
            velem("x"),
            forall(
                velem("y"),
                implies(
                    and(is_in("x", set), not(is_in("y", set))),
                    not(same_class("x", "y", false)),
                ),
            ),
        ),
    ])
}

/// The equitable-connected-partition formula: a valid deletion whose color
/// classes each induce a connected subgraph. The same formula serves every
/// part count; the number of parts only shapes the instance.
pub fn eq_conn() -> Formula {
    and(
        valid_deletion_vertex(),
        forall(vset("S"), implies(class_set("S"), connected_in("S"))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{desugar_counting, quantifier_counts};

    #[test]
    fn library_formulas_are_well_sorted() {
        for name in library_names() {
            let lib = formula_library(name).unwrap();
            assert_eq!(lib.name, *name);
        }
        assert!(formula_library("no_such").is_err());
    }

    #[test]
    fn dialects() {
        assert_eq!(formula_library("eq_3_col_vertex").unwrap().dialect, Dialect::Fo);
        assert_eq!(formula_library("eq_3_col_edge").unwrap().dialect, Dialect::Fo);
        assert_eq!(formula_library("eq_conn").unwrap().dialect, Dialect::Mso1);
        assert_eq!(formula_library("connected_set").unwrap().dialect, Dialect::Mso1);
    }

    #[test]
    fn printer_round_trips_the_library() {
        for name in library_names() {
            let lib = formula_library(name).unwrap();
            let header: String =
                lib.free.iter().map(|tv| format!("free: {}\n", tv.name)).collect();
            let text = format!("{header}{}", lib.formula);
            let reparsed = crate::logic::parse_formula_file(&text).unwrap();
            assert_eq!(reparsed.formula, lib.formula, "{name}");
        }
    }

    #[test]
    fn eq_3_col_vertex_quantifier_budget_is_stable() {
        // golden count: mechanically derived from the constructed AST; the
        // nd solver's r (and kernel cap) depend on it
        let d = desugar_counting(&eq_3_col_vertex());
        let counts = quantifier_counts(&d);
        assert_eq!(counts.vertex_set, 0);
        assert_eq!(counts.vertex_elem, eq3col_vertex_qe());
    }

    pub(crate) fn eq3col_vertex_qe() -> u32 {
        let d = desugar_counting(&eq_3_col_vertex());
        quantifier_counts(&d).vertex_elem
    }
}
