//! Two-valued Tarskian evaluation with short-circuiting, an explicit step
//! budget, and transparent memoization of quantified subformulas.

use std::collections::HashMap;

use super::compile::{Compiled, Node};
use super::EvalError;
use crate::graph::Graph;
use crate::logic::{BinOp, CountKind, Quantifier, Sort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Value {
    None,
    Vertex(u32),
    VSet(u128),
    Edge(u32),
    ESet(u128),
}

/// Evaluation limits. The budget counts node visits; exceeding it yields an
/// explicit error, never a wrong answer. Memoization is semantically
/// transparent and only trades memory for time.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub budget: u64,
    pub memo: bool,
}

pub const DEFAULT_EVAL_BUDGET: u64 = 200_000_000;

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { budget: DEFAULT_EVAL_BUDGET, memo: true }
    }
}

const MEMO_MAX_ARITY: usize = 4;

pub(crate) struct Evaluator<'a> {
    g: &'a Graph,
    c: &'a Compiled,
    env: Vec<Value>,
    memo: Vec<Option<HashMap<Box<[Value]>, bool>>>,
    steps_left: u64,
    budget: u64,
    memo_enabled: bool,
}

/// Iterator over all `k`-subsets of `0..n` for `k = 0, 1, ..., n`, yielding
/// bitmasks in increasing popcount order so that small witnesses are tried
/// first.
pub(crate) struct SubsetsByPopcount {
    n: usize,
    k: usize,
    idx: Vec<usize>,
    fresh_k: bool,
    done: bool,
}

impl SubsetsByPopcount {
    pub(crate) fn new(n: usize) -> SubsetsByPopcount {
        SubsetsByPopcount { n, k: 0, idx: Vec::new(), fresh_k: true, done: false }
    }
}

impl Iterator for SubsetsByPopcount {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        if self.done {
            return None;
        }
        if self.fresh_k {
            self.idx = (0..self.k).collect();
            self.fresh_k = false;
        } else {
            // advance the combination indices
            let k = self.k;
            let mut pos = k;
            loop {
                if pos == 0 {
                    self.k += 1;
                    if self.k > self.n {
                        self.done = true;
                        return None;
                    }
                    self.idx = (0..self.k).collect();
                    break;
                }
                pos -= 1;
                self.idx[pos] += 1;
                if self.idx[pos] <= self.n - (k - pos) {
                    for p in (pos + 1)..k {
                        self.idx[p] = self.idx[p - 1] + 1;
                    }
                    break;
                }
            }
        }
        let mut mask = 0u128;
        for &i in &self.idx {
            mask |= 1 << i;
        }
        Some(mask)
    }
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(
        g: &'a Graph,
        c: &'a Compiled,
        free_values: Vec<Value>,
        opts: &EvalOptions,
    ) -> Result<Evaluator<'a>, EvalError> {
        if c.uses_vertex_sets && g.vertex_count() > 127 {
            return Err(EvalError::TooLarge(format!(
                "set-valued evaluation supports at most 127 vertices, graph has {}",
                g.vertex_count()
            )));
        }
        if c.uses_edge_values && g.edge_count() > 127 {
            return Err(EvalError::TooLarge(format!(
                "edge-valued evaluation supports at most 127 edges, graph has {}",
                g.edge_count()
            )));
        }
        let mut env = vec![Value::None; c.slot_count];
        env[..free_values.len()].copy_from_slice(&free_values);
        Ok(Evaluator {
            g,
            c,
            env,
            memo: vec![None; c.nodes.len()],
            steps_left: opts.budget,
            budget: opts.budget,
            memo_enabled: opts.memo,
        })
    }

    pub(crate) fn run(&mut self) -> Result<bool, EvalError> {
        self.eval(self.c.root)
    }

    fn step(&mut self) -> Result<(), EvalError> {
        match self.steps_left.checked_sub(1) {
            Some(left) => {
                self.steps_left = left;
                Ok(())
            }
            None => Err(EvalError::Budget { budget: self.budget }),
        }
    }

    fn vertex(&self, slot: u16) -> u32 {
        match self.env[slot as usize] {
            Value::Vertex(v) => v,
            other => unreachable!("slot {slot} holds {other:?}, expected a vertex"),
        }
    }

    fn edge(&self, slot: u16) -> u32 {
        match self.env[slot as usize] {
            Value::Edge(e) => e,
            other => unreachable!("slot {slot} holds {other:?}, expected an edge"),
        }
    }

    fn eval(&mut self, node: u32) -> Result<bool, EvalError> {
        self.step()?;
        let value = match self.c.nodes[node as usize].clone() {
            Node::Const(b) => b,
            Node::Adj(a, b) => {
                let (u, v) = (self.vertex(a) as usize, self.vertex(b) as usize);
                self.g.adjacent(u, v)
            }
            Node::Inc(a, b) => {
                let v = self.vertex(a) as usize;
                let (x, y) = self.g.edges()[self.edge(b) as usize];
                v == x || v == y
            }
            Node::EqVertex(a, b) => self.vertex(a) == self.vertex(b),
            Node::EqEdge(a, b) => self.edge(a) == self.edge(b),
            Node::InVertex(e, s) => {
                let v = self.vertex(e);
                match self.env[s as usize] {
                    Value::VSet(mask) => mask >> v & 1 == 1,
                    other => unreachable!("slot {s} holds {other:?}, expected a vertex set"),
                }
            }
            Node::InEdge(e, s) => {
                let idx = self.edge(e);
                match self.env[s as usize] {
                    Value::ESet(mask) => mask >> idx & 1 == 1,
                    other => unreachable!("slot {s} holds {other:?}, expected an edge set"),
                }
            }
            Node::Not(child) => !self.eval(child)?,
            Node::Bin(op, l, r) => match op {
                BinOp::And => self.eval(l)? && self.eval(r)?,
                BinOp::Or => self.eval(l)? || self.eval(r)?,
                BinOp::Implies => !self.eval(l)? || self.eval(r)?,
                BinOp::Iff => self.eval(l)? == self.eval(r)?,
            },
            Node::Quant(..) | Node::Count(..) => return self.eval_binder(node),
        };
        Ok(value)
    }

    fn eval_binder(&mut self, node: u32) -> Result<bool, EvalError> {
        let memo_key = if self.memo_enabled {
            let slots = &self.c.free_slots[node as usize];
            if slots.len() <= MEMO_MAX_ARITY {
                let key: Box<[Value]> =
                    slots.iter().map(|&s| self.env[s as usize]).collect();
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
            Node::Quant(q, sort, slot, child) => self.eval_quant(q, sort, slot, child)?,
            Node::Count(kind, k, sort, slot, child) => {
                self.eval_count(kind, k, sort, slot, child)?
            }
            _ => unreachable!(),
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
        sort: Sort,
        slot: u16,
        child: u32,
    ) -> Result<bool, EvalError> {
        let witness_wins = q == Quantifier::Exists;
        let slot = slot as usize;
        match sort {
            Sort::VertexElem => {
                for v in 0..self.g.vertex_count() {
                    self.env[slot] = Value::Vertex(v as u32);
                    if self.eval(child)? == witness_wins {
                        self.env[slot] = Value::None;
                        return Ok(witness_wins);
                    }
                }
            }
            Sort::EdgeElem => {
                for e in 0..self.g.edge_count() {
                    self.env[slot] = Value::Edge(e as u32);
                    if self.eval(child)? == witness_wins {
                        self.env[slot] = Value::None;
                        return Ok(witness_wins);
                    }
                }
            }
            Sort::VertexSet => {
                for mask in SubsetsByPopcount::new(self.g.vertex_count()) {
                    self.env[slot] = Value::VSet(mask);
                    if self.eval(child)? == witness_wins {
                        self.env[slot] = Value::None;
                        return Ok(witness_wins);
                    }
                }
            }
            Sort::EdgeSet => {
                for mask in SubsetsByPopcount::new(self.g.edge_count()) {
                    self.env[slot] = Value::ESet(mask);
                    if self.eval(child)? == witness_wins {
                        self.env[slot] = Value::None;
                        return Ok(witness_wins);
                    }
                }
            }
        }
        self.env[slot] = Value::None;
        Ok(!witness_wins)
    }

    fn eval_count(
        &mut self,
        kind: CountKind,
        k: u32,
        sort: Sort,
        slot: u16,
        child: u32,
    ) -> Result<bool, EvalError> {
        let slot_idx = slot as usize;
        let domain = match sort {
            Sort::VertexElem => self.g.vertex_count(),
            Sort::EdgeElem => self.g.edge_count(),
            _ => unreachable!("counting ranges over elements"),
        };
        let mut hits = 0u32;
        for i in 0..domain {
            self.env[slot_idx] = match sort {
                Sort::VertexElem => Value::Vertex(i as u32),
                _ => Value::Edge(i as u32),
            };
            if self.eval(child)? {
                hits += 1;
                if hits > k {
                    self.env[slot_idx] = Value::None;
                    return Ok(false);
                }
            }
        }
        self.env[slot_idx] = Value::None;
        Ok(match kind {
            CountKind::Exactly => hits == k,
            CountKind::AtMost => hits <= k,
        })
    }
}
