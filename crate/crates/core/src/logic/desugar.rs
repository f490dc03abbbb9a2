//! Expansion of the counting quantifiers `E= k` and `E<= k` into plain
//! first-order quantification.

use std::collections::BTreeSet;

use super::ast::*;

pub(crate) struct FreshNames {
    used: BTreeSet<String>,
}

impl FreshNames {
    pub(crate) fn new(used: BTreeSet<String>) -> FreshNames {
        FreshNames { used }
    }

    /// Returns `base1`, `base2`, ... skipping names already in use.
    pub(crate) fn fresh(&mut self, base: &str) -> String {
        let mut i = 1usize;
        loop {
            let candidate = format!("{base}{i}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
            i += 1;
        }
    }
}

/// Replaces every counting node by its expansion:
///
/// * `E= k w. p(w)` becomes k existential witnesses, pairwise distinctness,
///   and a universal closure forcing every further element satisfying `p`
///   to equal one of the witnesses. For k = 0 the expansion degenerates to
///   the universal part alone, `A w1. (p(w1) -> false)`.
/// * `E<= k w. p(w)` expands to the universal part alone.
///
/// The result contains only plain quantifiers. On an empty vertex domain
/// the `E<=` expansion (for k >= 1) is false although the count condition
/// holds vacuously; evaluation always happens on graphs with at least one
/// vertex or on edge domains produced by the solvers, where the two agree.
pub fn desugar_counting(f: &Formula) -> Formula {
    let mut fresh = FreshNames::new(f.used_names());
    rec(f, &mut fresh)
}

fn rec(f: &Formula, fresh: &mut FreshNames) -> Formula {
    match f {
        Formula::Not(inner) => not(rec(inner, fresh)),
        Formula::Bin(op, l, r) => Formula::Bin(*op, Box::new(rec(l, fresh)), Box::new(rec(r, fresh))),
        Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(rec(body, fresh))),
        Formula::Count(kind, k, v, body) => {
            let body = rec(body, fresh);
            expand_count(*kind, *k, v, &body, fresh)
        }
        other => other.clone(),
    }
}

fn expand_count(
    kind: CountKind,
    k: u32,
    var: &TypedVar,
    body: &Formula,
    fresh: &mut FreshNames,
) -> Formula {
    let witnesses: Vec<TypedVar> = (0..k)
        .map(|_| TypedVar::new(fresh.fresh(&var.name), var.sort))
        .collect();
    let mut parts: Vec<Formula> = Vec::new();
    if kind == CountKind::Exactly {
        for w in &witnesses {
            parts.push(body.rename_free(&var.name, &w.name));
        }
        for i in 0..witnesses.len() {
            for j in (i + 1)..witnesses.len() {
                parts.push(not(eq(&witnesses[i].name, &witnesses[j].name)));
            }
        }
    }
    let probe = TypedVar::new(fresh.fresh(&var.name), var.sort);
    let closure = forall(
        probe.clone(),
        implies(
            body.rename_free(&var.name, &probe.name),
            or_all(witnesses.iter().map(|w| eq(&probe.name, &w.name))),
        ),
    );
    parts.push(closure);
    let mut out = and_all(parts);
    for w in witnesses.into_iter().rev() {
        out = exists(w, out);
    }
    out
}
