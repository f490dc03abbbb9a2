//! MSO2-to-MSO1 translation over a fixed vertex cover.
//!
//! An edge set is described by one vertex set per cover position: vertex `w`
//! lies in the i-th set exactly when the edge between `w` and the i-th cover
//! vertex belongs to the edge set. The translated formula has `k` free
//! vertex-element variables for the cover and, when the input had a free
//! edge-set variable, `k` free vertex-set variables for its encoding.

use std::collections::HashMap;

use super::ast::*;
use super::desugar::FreshNames;
use super::LogicError;

/// Output of [`mso2_to_mso1`].
#[derive(Debug, Clone)]
pub struct Mso1Translation {
    pub formula: Formula,
    /// Fresh vertex-element variables; bind these to the cover vertices in
    /// cover order.
    pub cover_vars: Vec<TypedVar>,
    /// Fresh vertex-set variables encoding the free edge-set variable; bind
    /// these to the signature sets. Empty when the input had no free
    /// edge-set variable.
    pub set_vars: Vec<TypedVar>,
    /// Name of the input's free edge-set variable, if any.
    pub edge_set_var: Option<String>,
    /// Free variables of the translated formula.
    pub free: Vec<TypedVar>,
}

struct Ctx {
    env: HashMap<String, Sort>,
    edge_elems: HashMap<String, (String, String)>,
    edge_sets: HashMap<String, Vec<String>>,
    cover_names: Vec<String>,
    fresh: FreshNames,
}

/// Translates an MSO2 formula with at most one free edge-set variable into
/// an MSO1 formula over `k` cover positions. Counting quantifiers must be
/// desugared first. A formula without edge sorts is returned unchanged.
pub fn mso2_to_mso1(
    f: &Formula,
    free: &[TypedVar],
    k: usize,
) -> Result<Mso1Translation, LogicError> {
    if k == 0 {
        return Err(LogicError::Unsupported(
            "translation needs a nonempty vertex cover (k >= 1)".into(),
        ));
    }
    if f.contains_count() {
        return Err(LogicError::Unsupported(
            "desugar counting quantifiers before translating".into(),
        ));
    }
    let edge_sets: Vec<&TypedVar> = free.iter().filter(|tv| tv.sort == Sort::EdgeSet).collect();
    if edge_sets.len() > 1 {
        return Err(LogicError::Unsupported(format!(
            "at most one free edge-set variable is supported, found {}",
            edge_sets.len()
        )));
    }
    if let Some(bad) = free.iter().find(|tv| tv.sort == Sort::EdgeElem) {
        return Err(LogicError::Unsupported(format!(
            "free edge-element variable `{}` is not supported",
            bad.name
        )));
    }

    let mut fresh = FreshNames::new(f.used_names());
    let cover_vars: Vec<TypedVar> =
        (0..k).map(|_| TypedVar::new(fresh.fresh("c"), Sort::VertexElem)).collect();
    let mut set_vars = Vec::new();
    let mut ctx = Ctx {
        env: free.iter().map(|tv| (tv.name.clone(), tv.sort)).collect(),
        edge_elems: HashMap::new(),
        edge_sets: HashMap::new(),
        cover_names: cover_vars.iter().map(|tv| tv.name.clone()).collect(),
        fresh,
    };
    let mut edge_set_var = None;
    if let Some(tv) = edge_sets.first() {
        let names: Vec<String> =
            (0..k).map(|_| ctx.fresh.fresh("U")).collect();
        set_vars = names.iter().map(|n| TypedVar::new(n, Sort::VertexSet)).collect();
        ctx.edge_sets.insert(tv.name.clone(), names);
        edge_set_var = Some(tv.name.clone());
    }

    let formula = translate(f, &mut ctx)?;
    let mut out_free: Vec<TypedVar> = free
        .iter()
        .filter(|tv| Some(&tv.name) != edge_set_var.as_ref())
        .cloned()
        .collect();
    out_free.extend(cover_vars.iter().cloned());
    out_free.extend(set_vars.iter().cloned());
    Ok(Mso1Translation { formula, cover_vars, set_vars, edge_set_var, free: out_free })
}

fn translate(f: &Formula, ctx: &mut Ctx) -> Result<Formula, LogicError> {
    match f {
        Formula::Const(_) | Formula::Adj(..) => Ok(f.clone()),
        Formula::Inc(v, e) => {
            let (x, y) = endpoints(ctx, e)?;
            Ok(or(eq(v, &x), eq(v, &y)))
        }
        Formula::Eq(a, b) => {
            let edge_a = ctx.edge_elems.contains_key(a);
            let edge_b = ctx.edge_elems.contains_key(b);
            match (edge_a, edge_b) {
                (false, false) => Ok(f.clone()),
                (true, true) => {
                    let (xa, ya) = endpoints(ctx, a)?;
                    let (xb, yb) = endpoints(ctx, b)?;
                    // unordered pair equality
                    Ok(or(
                        and(eq(&xa, &xb), eq(&ya, &yb)),
                        and(eq(&xa, &yb), eq(&ya, &xb)),
                    ))
                }
                _ => Err(LogicError::Sort {
                    message: format!("`=` mixes an edge element and a vertex element ({a}, {b})"),
                }),
            }
        }
        Formula::In(elem, set) => {
            if let Some(names) = ctx.edge_sets.get(set).cloned() {
                let (x, y) = endpoints(ctx, elem)?;
                // {x,y} is in the set iff one endpoint is the i-th cover
                // vertex and the other lies in the i-th encoding set
                let cover = ctx.cover_names.clone();
                Ok(or_all((0..names.len()).map(|i| {
                    or(
                        and(eq(&x, &cover[i]), is_in(&y, &names[i])),
                        and(eq(&y, &cover[i]), is_in(&x, &names[i])),
                    )
                })))
            } else {
                Ok(f.clone())
            }
        }
        Formula::Not(inner) => Ok(not(translate(inner, ctx)?)),
        Formula::Bin(op, l, r) => Ok(Formula::Bin(
            *op,
            Box::new(translate(l, ctx)?),
            Box::new(translate(r, ctx)?),
        )),
        Formula::Quant(q, tv, body) => match tv.sort {
            Sort::VertexElem | Sort::VertexSet => {
                let shadowed = ctx.env.insert(tv.name.clone(), tv.sort);
                let body = translate(body, ctx)?;
                restore(&mut ctx.env, &tv.name, shadowed);
                Ok(Formula::Quant(*q, tv.clone(), Box::new(body)))
            }
            Sort::EdgeElem => {
                // an edge element becomes a pair of adjacent vertices
                let x = ctx.fresh.fresh(&tv.name);
                let y = ctx.fresh.fresh(&tv.name);
                ctx.edge_elems.insert(tv.name.clone(), (x.clone(), y.clone()));
                let shadowed = ctx.env.insert(tv.name.clone(), tv.sort);
                let body = translate(body, ctx)?;
                ctx.edge_elems.remove(&tv.name);
                restore(&mut ctx.env, &tv.name, shadowed);
                let inner = match q {
                    Quantifier::Exists => and(adj(&x, &y), body),
                    Quantifier::Forall => implies(adj(&x, &y), body),
                };
                let wrapped = Formula::Quant(
                    *q,
                    velem(&y),
                    Box::new(inner),
                );
                Ok(Formula::Quant(*q, velem(&x), Box::new(wrapped)))
            }
            Sort::EdgeSet => {
                let names: Vec<String> =
                    (0..ctx.cover_names.len()).map(|_| ctx.fresh.fresh(&tv.name)).collect();
                ctx.edge_sets.insert(tv.name.clone(), names.clone());
                let shadowed = ctx.env.insert(tv.name.clone(), tv.sort);
                let body = translate(body, ctx)?;
                ctx.edge_sets.remove(&tv.name);
                restore(&mut ctx.env, &tv.name, shadowed);

                let cover = ctx.cover_names.clone();
                let probe = ctx.fresh.fresh("w");
                // each encoding set holds neighbors of its cover vertex
                let subset = forall(
                    velem(&probe),
                    and_all(names.iter().enumerate().map(|(i, ui)| {
                        implies(is_in(&probe, ui), adj(&probe, &cover[i]))
                    })),
                );
                // cover-cover edges are recorded symmetrically
                let mut sym = Vec::new();
                for i in 0..names.len() {
                    for j in (i + 1)..names.len() {
                        sym.push(iff(
                            is_in(&cover[j], &names[i]),
                            is_in(&cover[i], &names[j]),
                        ));
                    }
                }
                let consistent = and(subset, and_all(sym));
                let inner = match q {
                    Quantifier::Exists => and(consistent, body),
                    Quantifier::Forall => implies(consistent, body),
                };
                let mut out = inner;
                for name in names.iter().rev() {
                    out = Formula::Quant(*q, vset(name), Box::new(out));
                }
                Ok(out)
            }
        },
        Formula::Count(..) => Err(LogicError::Unsupported(
            "desugar counting quantifiers before translating".into(),
        )),
    }
}

fn endpoints(ctx: &Ctx, e: &str) -> Result<(String, String), LogicError> {
    ctx.edge_elems
        .get(e)
        .cloned()
        .ok_or_else(|| LogicError::Sort { message: format!("`{e}` is not an edge element in scope") })
}

fn restore(env: &mut HashMap<String, Sort>, name: &str, shadowed: Option<Sort>) {
    match shadowed {
        Some(old) => env.insert(name.to_string(), old),
        None => env.remove(name),
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula_file, sort_check, Dialect};

    #[test]
    fn mso1_formula_is_unchanged() {
        let p = parse_formula_file("free: W\nA x. x in W").unwrap();
        let t = mso2_to_mso1(&p.formula, &p.free, 2).unwrap();
        assert_eq!(t.formula, p.formula);
        assert!(t.set_vars.is_empty());
        assert_eq!(t.cover_vars.len(), 2);
    }

    #[test]
    fn free_edge_set_atoms_become_memberships() {
        let p = parse_formula_file("free: F^ES\nA v. E e^E. (e in F & inc(v,e))").unwrap();
        let t = mso2_to_mso1(&p.formula, &p.free, 1).unwrap();
        assert_eq!(t.set_vars.len(), 1);
        assert_eq!(t.edge_set_var.as_deref(), Some("F"));
        let dialect = sort_check(&t.formula, &t.free).unwrap();
        assert_eq!(dialect, Dialect::Mso1);
    }

    #[test]
    fn bound_edge_set_quantifier_expands_with_consistency() {
        let p = parse_formula_file("free: F^ES\nE S^ES. A e^E. (e in S <-> e in F)").unwrap();
        let t = mso2_to_mso1(&p.formula, &p.free, 2).unwrap();
        let counts = crate::logic::quantifier_counts(&t.formula);
        assert_eq!(counts.vertex_set, 2);
        assert_eq!(counts.edge_elem + counts.edge_set, 0);
        assert!(sort_check(&t.formula, &t.free).is_ok());
    }

    #[test]
    fn rejects_two_free_edge_sets_and_free_edge_elements() {
        let p = parse_formula_file("free: F^ES, H^ES\ntrue").unwrap();
        assert!(mso2_to_mso1(&p.formula, &p.free, 1).is_err());
        let p = parse_formula_file("free: e^E\nA v. inc(v,e)").unwrap();
        assert!(mso2_to_mso1(&p.formula, &p.free, 1).is_err());
    }
}
