//! Formula AST for the FO/MSO dialect over graphs.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// Variable sorts. FO formulas contain no set sorts; MSO1 formulas contain
/// no edge sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sort {
    VertexElem,
    VertexSet,
    EdgeElem,
    EdgeSet,
}

impl Sort {
    pub fn is_set(self) -> bool {
        matches!(self, Sort::VertexSet | Sort::EdgeSet)
    }

    pub fn is_edge(self) -> bool {
        matches!(self, Sort::EdgeElem | Sort::EdgeSet)
    }

    /// The element sort ranging inside a set sort.
    pub fn element_sort(self) -> Sort {
        match self {
            Sort::VertexSet => Sort::VertexElem,
            Sort::EdgeSet => Sort::EdgeElem,
            elem => elem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedVar {
    pub name: String,
    pub sort: Sort,
}

impl TypedVar {
    pub fn new(name: impl Into<String>, sort: Sort) -> TypedVar {
        TypedVar { name: name.into(), sort }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountKind {
    Exactly,
    AtMost,
}

/// Formula tree. Atom operands are variable names; their sorts are resolved
/// against the enclosing binders and the declared free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    /// adjacency between two vertex elements
    Adj(String, String),
    /// incidence between a vertex element and an edge element
    Inc(String, String),
    /// equality of two elements of the same sort
    Eq(String, String),
    /// element membership in a set of the matching family
    In(String, String),
    Not(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quantifier, TypedVar, Box<Formula>),
    /// counting sugar over an element variable; removed by desugaring
    Count(CountKind, u32, TypedVar, Box<Formula>),
}

impl Formula {
    /// Names of all variables occurring anywhere (bound or free).
    pub fn used_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Adj(a, b) | Formula::Inc(a, b) | Formula::Eq(a, b) | Formula::In(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Not(f) => f.collect_names(out),
            Formula::Bin(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Formula::Quant(_, v, f) | Formula::Count(_, _, v, f) => {
                out.insert(v.name.clone());
                f.collect_names(out);
            }
        }
    }

    /// Names occurring free (not captured by a binder).
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut bound = Vec::new();
        let mut out = BTreeSet::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let hit = |name: &String, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            if !bound.iter().any(|b| b == name) {
                out.insert(name.clone());
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Adj(a, b) | Formula::Inc(a, b) | Formula::Eq(a, b) | Formula::In(a, b) => {
                hit(a, bound, out);
                hit(b, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Bin(_, l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Quant(_, v, f) | Formula::Count(_, _, v, f) => {
                bound.push(v.name.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Renames free occurrences of `from` to `to`. `to` must not be captured
    /// by any binder in scope; callers pass fresh names.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        let ren = |s: &String| if s == from { to.to_string() } else { s.clone() };
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Adj(a, b) => Formula::Adj(ren(a), ren(b)),
            Formula::Inc(a, b) => Formula::Inc(ren(a), ren(b)),
            Formula::Eq(a, b) => Formula::Eq(ren(a), ren(b)),
            Formula::In(a, b) => Formula::In(ren(a), ren(b)),
            Formula::Not(f) => Formula::Not(Box::new(f.rename_free(from, to))),
            Formula::Bin(op, l, r) => Formula::Bin(
                *op,
                Box::new(l.rename_free(from, to)),
                Box::new(r.rename_free(from, to)),
            ),
            Formula::Quant(q, v, f) => {
                if v.name == from {
                    Formula::Quant(*q, v.clone(), f.clone())
                } else {
                    Formula::Quant(*q, v.clone(), Box::new(f.rename_free(from, to)))
                }
            }
            Formula::Count(kind, k, v, f) => {
                if v.name == from {
                    Formula::Count(*kind, *k, v.clone(), f.clone())
                } else {
                    Formula::Count(*kind, *k, v.clone(), Box::new(f.rename_free(from, to)))
                }
            }
        }
    }

    pub fn contains_count(&self) -> bool {
        match self {
            Formula::Count(..) => true,
            Formula::Not(f) => f.contains_count(),
            Formula::Bin(_, l, r) => l.contains_count() || r.contains_count(),
            Formula::Quant(_, _, f) => f.contains_count(),
            _ => false,
        }
    }
}

// ---- constructors -------------------------------------------------------

pub fn velem(name: &str) -> TypedVar {
    TypedVar::new(name, Sort::VertexElem)
}

pub fn vset(name: &str) -> TypedVar {
    TypedVar::new(name, Sort::VertexSet)
}

pub fn eelem(name: &str) -> TypedVar {
    TypedVar::new(name, Sort::EdgeElem)
}

pub fn eset(name: &str) -> TypedVar {
    TypedVar::new(name, Sort::EdgeSet)
}

pub fn adj(a: &str, b: &str) -> Formula {
    Formula::Adj(a.into(), b.into())
}

pub fn inc(v: &str, e: &str) -> Formula {
    Formula::Inc(v.into(), e.into())
}

pub fn eq(a: &str, b: &str) -> Formula {
    Formula::Eq(a.into(), b.into())
}

pub fn is_in(elem: &str, set: &str) -> Formula {
    Formula::In(elem.into(), set.into())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(l: Formula, r: Formula) -> Formula {
    Formula::Bin(BinOp::And, Box::new(l), Box::new(r))
}

pub fn or(l: Formula, r: Formula) -> Formula {
    Formula::Bin(BinOp::Or, Box::new(l), Box::new(r))
}

pub fn implies(l: Formula, r: Formula) -> Formula {
    Formula::Bin(BinOp::Implies, Box::new(l), Box::new(r))
}

pub fn iff(l: Formula, r: Formula) -> Formula {
    Formula::Bin(BinOp::Iff, Box::new(l), Box::new(r))
}

pub fn forall(v: TypedVar, f: Formula) -> Formula {
    Formula::Quant(Quantifier::Forall, v, Box::new(f))
}

pub fn exists(v: TypedVar, f: Formula) -> Formula {
    Formula::Quant(Quantifier::Exists, v, Box::new(f))
}

/// Left fold of `&`; the empty conjunction is `true`.
pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => Formula::Const(true),
        Some(first) => it.fold(first, and),
    }
}

/// Left fold of `|`; the empty disjunction is `false`.
pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = fs.into_iter();
    match it.next() {
        None => Formula::Const(false),
        Some(first) => it.fold(first, or),
    }
}

// ---- printing -----------------------------------------------------------

fn var_with_suffix(v: &TypedVar) -> String {
    match v.sort {
        Sort::VertexElem | Sort::VertexSet => v.name.clone(),
        Sort::EdgeElem => format!("{}^E", v.name),
        Sort::EdgeSet => format!("{}^ES", v.name),
    }
}

fn fmt_child(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Bin(..) | Formula::Quant(..) | Formula::Count(..) => write!(out, "({f})"),
        _ => write!(out, "{f}"),
    }
}

impl fmt::Display for Formula {
    /// Canonical text form; parsing it back yields the same AST.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => write!(out, "true"),
            Formula::Const(false) => write!(out, "false"),
            Formula::Adj(a, b) => write!(out, "adj({a},{b})"),
            Formula::Inc(a, b) => write!(out, "inc({a},{b})"),
            Formula::Eq(a, b) => write!(out, "{a} = {b}"),
            Formula::In(a, b) => write!(out, "{a} in {b}"),
            Formula::Not(f) => {
                write!(out, "~")?;
                fmt_child(f, out)
            }
            Formula::Bin(op, l, r) => {
                fmt_child(l, out)?;
                let sym = match op {
                    BinOp::And => "&",
                    BinOp::Or => "|",
                    BinOp::Implies => "->",
                    BinOp::Iff => "<->",
                };
                write!(out, " {sym} ")?;
                fmt_child(r, out)
            }
            Formula::Quant(q, v, f) => {
                let marker = match q {
                    Quantifier::Forall => "A",
                    Quantifier::Exists => "E",
                };
                write!(out, "{marker} {}. {f}", var_with_suffix(v))
            }
            Formula::Count(kind, k, v, f) => {
                let marker = match kind {
                    CountKind::Exactly => "E=",
                    CountKind::AtMost => "E<=",
                };
                write!(out, "{marker} {k} {}. {f}", var_with_suffix(v))
            }
        }
    }
}
