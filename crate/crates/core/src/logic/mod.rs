//! The FO/MSO1/MSO2 dialect: AST, parser, counting-quantifier desugaring,
//! quantifier statistics, the MSO2-to-MSO1 translation over a vertex cover,
//! and the built-in formula library.

pub mod ast;
mod desugar;
mod library;
mod parser;
mod translate;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

pub use ast::{
    adj, and, and_all, eelem, eq, eset, exists, forall, iff, implies, inc, is_in, not, or, or_all,
    velem, vset, BinOp, CountKind, Formula, Quantifier, Sort, TypedVar,
};
pub use desugar::desugar_counting;
pub use library::{formula_library, library_names, LibraryFormula};
pub use parser::{parse_formula, parse_formula_file, ParsedFormula};
pub use translate::{mso2_to_mso1, Mso1Translation};

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("sort error: {message}")]
    Sort { message: String },
    #[error("unbound variable `{name}` (declare it on a `free:` line)")]
    Unbound { name: String },
    #[error("{0}")]
    Unsupported(String),
}

/// Logic dialect of a formula: `FO` has no set variables, `MSO1` quantifies
/// over vertex sets only, `MSO2` additionally uses edge elements or edge
/// sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Dialect {
    Fo,
    Mso1,
    Mso2,
}

impl std::fmt::Display for Dialect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dialect::Fo => write!(f, "FO"),
            Dialect::Mso1 => write!(f, "MSO1"),
            Dialect::Mso2 => write!(f, "MSO2"),
        }
    }
}

fn name_matches_sort(name: &str, sort: Sort) -> bool {
    let upper = name.chars().next().is_some_and(|c| c.is_ascii_uppercase());
    upper == sort.is_set()
}

/// Checks sorts and variable binding, returning the detected dialect.
///
/// Every variable occurrence must be bound or declared free; `adj` takes two
/// vertex elements, `inc` a vertex element and an edge element, `=` two
/// elements of the same sort, and `in` an element of the set's family.
pub fn sort_check(f: &Formula, free: &[TypedVar]) -> Result<Dialect, LogicError> {
    let mut env: HashMap<String, Sort> = HashMap::new();
    for tv in free {
        if env.insert(tv.name.clone(), tv.sort).is_some() {
            return Err(LogicError::Sort {
                message: format!("free variable `{}` declared twice", tv.name),
            });
        }
        if !name_matches_sort(&tv.name, tv.sort) {
            return Err(LogicError::Sort {
                message: format!(
                    "variable `{}` has the wrong case for its sort (uppercase = set)",
                    tv.name
                ),
            });
        }
    }
    let mut seen = SortUse::default();
    for tv in free {
        seen.record(tv.sort);
    }
    check_rec(f, &mut env, &mut seen)?;
    Ok(seen.dialect())
}

#[derive(Default)]
struct SortUse {
    any_set: bool,
    any_edge: bool,
}

impl SortUse {
    fn record(&mut self, sort: Sort) {
        self.any_set |= sort.is_set();
        self.any_edge |= sort.is_edge();
    }

    fn dialect(&self) -> Dialect {
        if self.any_edge {
            Dialect::Mso2
        } else if self.any_set {
            Dialect::Mso1
        } else {
            Dialect::Fo
        }
    }
}

fn lookup(env: &HashMap<String, Sort>, name: &str) -> Result<Sort, LogicError> {
    env.get(name).copied().ok_or_else(|| LogicError::Unbound { name: name.to_string() })
}

fn expect_sort(name: &str, got: Sort, want: Sort, atom: &str) -> Result<(), LogicError> {
    if got != want {
        return Err(LogicError::Sort {
            message: format!("`{atom}` expects a {want:?} argument, but `{name}` is {got:?}"),
        });
    }
    Ok(())
}

fn check_rec(
    f: &Formula,
    env: &mut HashMap<String, Sort>,
    seen: &mut SortUse,
) -> Result<(), LogicError> {
    match f {
        Formula::Const(_) => Ok(()),
        Formula::Adj(a, b) => {
            expect_sort(a, lookup(env, a)?, Sort::VertexElem, "adj")?;
            expect_sort(b, lookup(env, b)?, Sort::VertexElem, "adj")
        }
        Formula::Inc(a, b) => {
            expect_sort(a, lookup(env, a)?, Sort::VertexElem, "inc")?;
            expect_sort(b, lookup(env, b)?, Sort::EdgeElem, "inc")
        }
        Formula::Eq(a, b) => {
            let (sa, sb) = (lookup(env, a)?, lookup(env, b)?);
            if sa.is_set() || sb.is_set() || sa != sb {
                return Err(LogicError::Sort {
                    message: format!("`=` expects two elements of one sort, got {sa:?} and {sb:?}"),
                });
            }
            Ok(())
        }
        Formula::In(elem, set) => {
            let (se, ss) = (lookup(env, elem)?, lookup(env, set)?);
            if !ss.is_set() || se.is_set() || ss.element_sort() != se {
                return Err(LogicError::Sort {
                    message: format!("`in` expects an element and a matching set, got {se:?} in {ss:?}"),
                });
            }
            Ok(())
        }
        Formula::Not(inner) => check_rec(inner, env, seen),
        Formula::Bin(_, l, r) => {
            check_rec(l, env, seen)?;
            check_rec(r, env, seen)
        }
        Formula::Quant(_, tv, body) | Formula::Count(_, _, tv, body) => {
            if matches!(f, Formula::Count(..)) && tv.sort.is_set() {
                return Err(LogicError::Sort {
                    message: "counting quantifiers range over element variables".into(),
                });
            }
            if !name_matches_sort(&tv.name, tv.sort) {
                return Err(LogicError::Sort {
                    message: format!(
                        "variable `{}` has the wrong case for its sort (uppercase = set)",
                        tv.name
                    ),
                });
            }
            if tv.name.starts_with('A') || tv.name.starts_with('E') {
                return Err(LogicError::Sort {
                    message: format!("variable `{}` must not begin with `A` or `E`", tv.name),
                });
            }
            seen.record(tv.sort);
            let shadowed = env.insert(tv.name.clone(), tv.sort);
            check_rec(body, env, seen)?;
            match shadowed {
                Some(old) => env.insert(tv.name.clone(), old),
                None => env.remove(&tv.name),
            };
            Ok(())
        }
    }
}

/// Counts of bound quantifiers by sort. Free variables are not counted;
/// call after desugaring, counting nodes are not included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QuantifierCounts {
    pub vertex_elem: u32,
    pub vertex_set: u32,
    pub edge_elem: u32,
    pub edge_set: u32,
}

pub fn quantifier_counts(f: &Formula) -> QuantifierCounts {
    let mut counts = QuantifierCounts::default();
    count_rec(f, &mut counts);
    counts
}

fn count_rec(f: &Formula, counts: &mut QuantifierCounts) {
    match f {
        Formula::Not(inner) => count_rec(inner, counts),
        Formula::Bin(_, l, r) => {
            count_rec(l, counts);
            count_rec(r, counts);
        }
        Formula::Quant(_, tv, body) => {
            match tv.sort {
                Sort::VertexElem => counts.vertex_elem += 1,
                Sort::VertexSet => counts.vertex_set += 1,
                Sort::EdgeElem => counts.edge_elem += 1,
                Sort::EdgeSet => counts.edge_set += 1,
            }
            count_rec(body, counts);
        }
        Formula::Count(_, _, _, body) => count_rec(body, counts),
        _ => {}
    }
}

/// r = 2^{q_S} * q_E, clamped to at least 1 so that shape equivalence never
/// degenerates; saturates rather than overflowing (a saturated r only makes
/// the enumeration exhaustive).
pub fn compute_r(q_elem: u32, q_set: u32) -> u64 {
    let factor = 1u64.checked_shl(q_set).unwrap_or(u64::MAX / 4);
    factor.saturating_mul(q_elem as u64).clamp(1, u64::MAX / 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dialect_detection() {
        let p = parse_formula("A x. E y. adj(x,y)").unwrap();
        assert_eq!(p.dialect, Dialect::Fo);
        let counts = quantifier_counts(&p.formula);
        assert_eq!((counts.vertex_elem, counts.vertex_set), (2, 0));

        let p = parse_formula("E S. A x. (x in S)").unwrap();
        assert_eq!(p.dialect, Dialect::Mso1);
        let counts = quantifier_counts(&p.formula);
        assert_eq!((counts.vertex_elem, counts.vertex_set), (1, 1));

        let p = parse_formula("A e^E. E v. inc(v,e)").unwrap();
        assert_eq!(p.dialect, Dialect::Mso2);
    }

    #[test]
    fn glued_and_spaced_quantifiers_agree() {
        let a = parse_formula("Ax. Ey. adj(x,y)").unwrap();
        let b = parse_formula("A x. E y. adj(x,y)").unwrap();
        assert_eq!(a.formula, b.formula);
    }

    #[test]
    fn free_header_is_honored() {
        let p = parse_formula_file("free: W\nA x. x in W").unwrap();
        assert_eq!(p.free, vec![vset("W")]);
        assert_eq!(p.dialect, Dialect::Mso1);
        let p = parse_formula_file("free: F^ES\nA e^E. e in F").unwrap();
        assert_eq!(p.free, vec![eset("F")]);
        assert_eq!(p.dialect, Dialect::Mso2);
    }

    #[test]
    fn unbound_and_sort_errors() {
        assert!(matches!(
            parse_formula("A x. adj(x,y)"),
            Err(LogicError::Unbound { .. })
        ));
        assert!(matches!(
            parse_formula("A X. adj(X,X)"),
            Err(LogicError::Sort { .. })
        ));
        assert!(matches!(
            parse_formula("A x. A y. x in y"),
            Err(LogicError::Sort { .. })
        ));
        assert!(matches!(
            parse_formula("A x. inc(x,x)"),
            Err(LogicError::Sort { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_formula("A x. adj(x,,x)") {
            Err(LogicError::Syntax { line: 1, col, .. }) => assert!(col > 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counting_forms_parse() {
        let p = parse_formula("E= 2 w. A v. adj(w,v)").unwrap();
        assert!(p.formula.contains_count());
        let p = parse_formula("A v. E<= 2 w. adj(v,w)").unwrap();
        assert!(p.formula.contains_count());
    }

    #[test]
    fn compute_r_examples() {
        assert_eq!(compute_r(2, 1), 4);
        assert_eq!(compute_r(3, 0), 3);
        assert_eq!(compute_r(0, 2), 1);
    }

    #[test]
    fn printer_parses_back_to_the_same_ast() {
        let samples = [
            "A x. E y. adj(x,y)",
            "E S. A x. (x in S -> (E y. (y in S & adj(x,y))))",
            "A v. (~adj(v,v) & (true | false))",
            "E= 2 w. adj(w,w)",
            "A e^E. E F^ES. e in F",
            "(a = b -> (b = c -> a = c))",
        ];
        for text in samples {
            let free: Vec<TypedVar> = match text.contains("a = b") {
                true => vec![velem("a"), velem("b"), velem("c")],
                false => vec![],
            };
            let first = parse_formula_file(
                &(free
                    .iter()
                    .map(|tv| format!("free: {}\n", tv.name))
                    .collect::<String>()
                    + text),
            )
            .unwrap();
            let printed = first.formula.to_string();
            let second = parse_formula_file(
                &(free
                    .iter()
                    .map(|tv| format!("free: {}\n", tv.name))
                    .collect::<String>()
                    + &printed),
            )
            .unwrap();
            assert_eq!(first.formula, second.formula, "printed = {printed}");
        }
    }
}
