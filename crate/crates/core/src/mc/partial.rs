//! Three-valued (Kleene) evaluation of FO sentences on a graph with a
//! partially decided deletion set.
//!
//! Vertices are alive, deleted, or undecided. Quantifiers relativize to the
//! alive part and adjacency holds only between alive endpoints, which
//! matches evaluation on the vertex-deleted graph once everything is
//! decided. `True`/`False` results are sound for every completion of the
//! undecided vertices; `Unknown` means both outcomes are still possible.

use std::collections::HashMap;

use super::compile::{Compiled, Node};
use super::{CompiledFormula, EvalError, EvalOptions};
use crate::graph::Graph;
use crate::logic::{BinOp, CountKind, Quantifier, Sort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth3 {
    True,
    False,
    Unknown,
}

impl From<bool> for Truth3 {
    fn from(b: bool) -> Truth3 {
        if b {
            Truth3::True
        } else {
            Truth3::False
        }
    }
}

fn and3(a: Truth3, b: Truth3) -> Truth3 {
    use Truth3::*;
    match (a, b) {
        (False, _) | (_, False) => False,
        (True, True) => True,
        _ => Unknown,
    }
}

fn or3(a: Truth3, b: Truth3) -> Truth3 {
    use Truth3::*;
    match (a, b) {
        (True, _) | (_, True) => True,
        (False, False) => False,
        _ => Unknown,
    }
}

fn not3(a: Truth3) -> Truth3 {
    match a {
        Truth3::True => Truth3::False,
        Truth3::False => Truth3::True,
        Truth3::Unknown => Truth3::Unknown,
    }
}

fn implies3(a: Truth3, b: Truth3) -> Truth3 {
    or3(not3(a), b)
}

fn iff3(a: Truth3, b: Truth3) -> Truth3 {
    if a == Truth3::Unknown || b == Truth3::Unknown {
        Truth3::Unknown
    } else {
        Truth3::from(a == b)
    }
}

/// Evaluates an FO sentence on `g` minus the partially decided deletion
/// set. `alive[v]` states whether `v` survives.
pub fn eval_partial_deleted(
    formula: &CompiledFormula,
    g: &Graph,
    alive: &[Truth3],
    opts: &EvalOptions,
) -> Result<Truth3, EvalError> {
    let c = &formula.inner;
    if c.uses_vertex_sets || c.uses_edge_values {
        return Err(EvalError::TooLarge(
            "three-valued evaluation supports FO sentences over vertices only".into(),
        ));
    }
    if !c.free.is_empty() {
        return Err(EvalError::TooLarge(
            "three-valued evaluation expects a sentence without free variables".into(),
        ));
    }
    assert_eq!(alive.len(), g.vertex_count());
    let mut ev = Partial {
        g,
        c,
        alive,
        env: vec![u32::MAX; c.slot_count],
        memo: vec![None; c.nodes.len()],
        steps_left: opts.budget,
        budget: opts.budget,
        memo_enabled: opts.memo,
    };
    ev.eval(c.root)
}

const MEMO_MAX_ARITY: usize = 4;

struct Partial<'a> {
    g: &'a Graph,
    c: &'a Compiled,
    alive: &'a [Truth3],
    env: Vec<u32>,
    memo: Vec<Option<HashMap<Box<[u32]>, Truth3>>>,
    steps_left: u64,
    budget: u64,
    memo_enabled: bool,
}

impl Partial<'_> {
    fn step(&mut self) -> Result<(), EvalError> {
        match self.steps_left.checked_sub(1) {
            Some(left) => {
                self.steps_left = left;
                Ok(())
            }
            None => Err(EvalError::Budget { budget: self.budget }),
        }
    }

    fn eval(&mut self, node: u32) -> Result<Truth3, EvalError> {
        self.step()?;
        let value = match self.c.nodes[node as usize].clone() {
            Node::Const(b) => Truth3::from(b),
            Node::Adj(a, b) => {
                let (u, v) = (self.env[a as usize] as usize, self.env[b as usize] as usize);
                if !self.g.adjacent(u, v) {
                    Truth3::False
                } else {
                    and3(self.alive[u], self.alive[v])
                }
            }
            Node::EqVertex(a, b) => {
                Truth3::from(self.env[a as usize] == self.env[b as usize])
            }
            Node::Not(child) => not3(self.eval(child)?),
            Node::Bin(op, l, r) => {
                let lv = self.eval(l)?;
                // short-circuit on decided annihilators
                match (op, lv) {
                    (BinOp::And, Truth3::False) => Truth3::False,
                    (BinOp::Or, Truth3::True) => Truth3::True,
                    (BinOp::Implies, Truth3::False) => Truth3::True,
                    _ => {
                        let rv = self.eval(r)?;
                        match op {
                            BinOp::And => and3(lv, rv),
                            BinOp::Or => or3(lv, rv),
                            BinOp::Implies => implies3(lv, rv),
                            BinOp::Iff => iff3(lv, rv),
                        }
                    }
                }
            }
            Node::Quant(..) | Node::Count(..) => return self.eval_binder(node),
            Node::Inc(..) | Node::EqEdge(..) | Node::InVertex(..) | Node::InEdge(..) => {
                unreachable!("edge and set nodes are rejected up front")
            }
        };
        Ok(value)
    }

    fn eval_binder(&mut self, node: u32) -> Result<Truth3, EvalError> {
        let memo_key = if self.memo_enabled {
            let slots = &self.c.free_slots[node as usize];
            if slots.len() <= MEMO_MAX_ARITY {
                let key: Box<[u32]> = slots.iter().map(|&s| self.env[s as usize]).collect();
                if let Some(table) = &self.memo[node as usize] {
                    if let Some(&hit) = table.get(&key) {
                        return Ok(hit);
                    }
                }
                Some(key)
            } else {
                None
            }
        } else {
            None
        };
        let value = match self.c.nodes[node as usize].clone() {
            Node::Quant(q, Sort::VertexElem, slot, child) => self.eval_quant(q, slot, child)?,
            Node::Count(kind, k, Sort::VertexElem, slot, child) => {
                self.eval_count(kind, k, slot, child)?
            }
            _ => unreachable!("edge and set binders are rejected up front"),
        };
        if let Some(key) = memo_key {
            self.memo[node as usize]
                .get_or_insert_with(HashMap::new)
                .insert(key, value);
        }
        Ok(value)
    }

    fn eval_quant(
        &mut self,
        q: Quantifier,
        slot: u16,
        child: u32,
    ) -> Result<Truth3, EvalError> {
        let slot = slot as usize;
        let mut acc = Truth3::from(q == Quantifier::Forall);
        for v in 0..self.g.vertex_count() {
            self.env[slot] = v as u32;
            let body = self.eval(child)?;
            acc = match q {
                // a vertex contributes only while alive
                Quantifier::Forall => and3(acc, implies3(self.alive[v], body)),
                Quantifier::Exists => or3(acc, and3(self.alive[v], body)),
            };
            let decided_early = matches!(
                (q, acc),
                (Quantifier::Forall, Truth3::False) | (Quantifier::Exists, Truth3::True)
            );
            if decided_early {
                break;
            }
        }
        self.env[slot] = u32::MAX;
        Ok(acc)
    }

    fn eval_count(
        &mut self,
        kind: CountKind,
        k: u32,
        slot: u16,
        child: u32,
    ) -> Result<Truth3, EvalError> {
        let slot = slot as usize;
        let mut sure = 0u32;
        let mut maybe = 0u32;
        for v in 0..self.g.vertex_count() {
            self.env[slot] = v as u32;
            match and3(self.alive[v], self.eval(child)?) {
                Truth3::True => sure += 1,
                Truth3::Unknown => maybe += 1,
                Truth3::False => {}
            }
            if sure > k {
                self.env[slot] = u32::MAX;
                return Ok(Truth3::False);
            }
        }
        self.env[slot] = u32::MAX;
        Ok(match kind {
            CountKind::Exactly => {
                if sure == k && maybe == 0 {
                    Truth3::True
                } else if sure + maybe < k {
                    Truth3::False
                } else {
                    Truth3::Unknown
                }
            }
            CountKind::AtMost => {
                if sure + maybe <= k {
                    Truth3::True
                } else {
                    Truth3::Unknown
                }
            }
        })
    }
}
