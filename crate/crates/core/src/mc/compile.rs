//! Compilation of formulas into an indexed node arena with resolved
//! variable slots, for the evaluators.

use std::collections::HashMap;

use crate::logic::{
    quantifier_counts, sort_check, BinOp, CountKind, Formula, LogicError, Quantifier,
    QuantifierCounts, Sort, TypedVar,
};

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Const(bool),
    Adj(u16, u16),
    Inc(u16, u16),
    EqVertex(u16, u16),
    EqEdge(u16, u16),
    InVertex(u16, u16),
    InEdge(u16, u16),
    Not(u32),
    Bin(BinOp, u32, u32),
    Quant(Quantifier, Sort, u16, u32),
    Count(CountKind, u32, Sort, u16, u32),
}

#[derive(Debug)]
pub(crate) struct Compiled {
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: u32,
    pub(crate) free: Vec<TypedVar>,
    pub(crate) slot_count: usize,
    pub(crate) uses_vertex_sets: bool,
    pub(crate) uses_edge_values: bool,
    pub(crate) counts: QuantifierCounts,
    /// Per node, the sorted slots occurring free in its subtree; memo keys
    /// restrict the environment to these.
    pub(crate) free_slots: Vec<Vec<u16>>,
}

struct Builder<'a> {
    nodes: Vec<Node>,
    free_slots: Vec<Vec<u16>>,
    scope: Vec<(String, u16, Sort)>,
    free: &'a [TypedVar],
    next_slot: u16,
    uses_vertex_sets: bool,
    uses_edge_values: bool,
}

impl Builder<'_> {
    fn resolve(&self, name: &str) -> Result<(u16, Sort), LogicError> {
        if let Some((_, slot, sort)) = self.scope.iter().rev().find(|(n, _, _)| n == name) {
            return Ok((*slot, *sort));
        }
        if let Some(pos) = self.free.iter().position(|tv| tv.name == name) {
            return Ok((pos as u16, self.free[pos].sort));
        }
        Err(LogicError::Unbound { name: name.to_string() })
    }

    fn push(&mut self, node: Node, free_slots: Vec<u16>) -> u32 {
        self.nodes.push(node);
        self.free_slots.push(free_slots);
        (self.nodes.len() - 1) as u32
    }

    fn build(&mut self, f: &Formula) -> Result<u32, LogicError> {
        match f {
            Formula::Const(b) => Ok(self.push(Node::Const(*b), vec![])),
            Formula::Adj(a, b) => {
                let (sa, _) = self.resolve(a)?;
                let (sb, _) = self.resolve(b)?;
                Ok(self.push(Node::Adj(sa, sb), sorted_pair(sa, sb)))
            }
            Formula::Inc(a, b) => {
                let (sa, _) = self.resolve(a)?;
                let (sb, _) = self.resolve(b)?;
                self.uses_edge_values = true;
                Ok(self.push(Node::Inc(sa, sb), sorted_pair(sa, sb)))
            }
            Formula::Eq(a, b) => {
                let (sa, sort) = self.resolve(a)?;
                let (sb, _) = self.resolve(b)?;
                let node = match sort {
                    Sort::VertexElem => Node::EqVertex(sa, sb),
                    _ => {
                        self.uses_edge_values = true;
                        Node::EqEdge(sa, sb)
                    }
                };
                Ok(self.push(node, sorted_pair(sa, sb)))
            }
            Formula::In(elem, set) => {
                let (se, sort) = self.resolve(elem)?;
                let (ss, _) = self.resolve(set)?;
                let node = match sort {
                    Sort::VertexElem => {
                        self.uses_vertex_sets = true;
                        Node::InVertex(se, ss)
                    }
                    _ => {
                        self.uses_edge_values = true;
                        Node::InEdge(se, ss)
                    }
                };
                Ok(self.push(node, sorted_pair(se, ss)))
            }
            Formula::Not(inner) => {
                let child = self.build(inner)?;
                let fs = self.free_slots[child as usize].clone();
                Ok(self.push(Node::Not(child), fs))
            }
            Formula::Bin(op, l, r) => {
                let lc = self.build(l)?;
                let rc = self.build(r)?;
                let mut fs = self.free_slots[lc as usize].clone();
                for s in &self.free_slots[rc as usize] {
                    if !fs.contains(s) {
                        fs.push(*s);
                    }
                }
                fs.sort_unstable();
                Ok(self.push(Node::Bin(*op, lc, rc), fs))
            }
            Formula::Quant(q, tv, body) => {
                let slot = self.enter(tv);
                let child = self.build(body)?;
                self.scope.pop();
                let fs = self.child_free_minus(child, slot);
                Ok(self.push(Node::Quant(*q, tv.sort, slot, child), fs))
            }
            Formula::Count(kind, k, tv, body) => {
                let slot = self.enter(tv);
                let child = self.build(body)?;
                self.scope.pop();
                let fs = self.child_free_minus(child, slot);
                Ok(self.push(Node::Count(*kind, *k, tv.sort, slot, child), fs))
            }
        }
    }

    fn enter(&mut self, tv: &TypedVar) -> u16 {
        let slot = self.next_slot;
        self.next_slot += 1;
        match tv.sort {
            Sort::VertexSet => self.uses_vertex_sets = true,
            Sort::EdgeElem | Sort::EdgeSet => self.uses_edge_values = true,
            Sort::VertexElem => {}
        }
        self.scope.push((tv.name.clone(), slot, tv.sort));
        slot
    }

    fn child_free_minus(&self, child: u32, slot: u16) -> Vec<u16> {
        self.free_slots[child as usize]
            .iter()
            .copied()
            .filter(|s| *s != slot)
            .collect()
    }
}

fn sorted_pair(a: u16, b: u16) -> Vec<u16> {
    if a == b {
        vec![a]
    } else {
        vec![a.min(b), a.max(b)]
    }
}

impl Compiled {
    pub(crate) fn new(f: &Formula, free: &[TypedVar]) -> Result<Compiled, LogicError> {
        sort_check(f, free)?;
        let mut duplicate_check = HashMap::new();
        for tv in free {
            if duplicate_check.insert(tv.name.clone(), tv.sort).is_some() {
                return Err(LogicError::Sort {
                    message: format!("free variable `{}` declared twice", tv.name),
                });
            }
        }
        let mut builder = Builder {
            nodes: Vec::new(),
            free_slots: Vec::new(),
            scope: Vec::new(),
            free,
            next_slot: free.len() as u16,
            uses_vertex_sets: free.iter().any(|tv| tv.sort == Sort::VertexSet),
            uses_edge_values: free.iter().any(|tv| tv.sort.is_edge()),
        };
        let root = builder.build(f)?;
        Ok(Compiled {
            root,
            free: free.to_vec(),
            slot_count: builder.next_slot as usize,
            uses_vertex_sets: builder.uses_vertex_sets,
            uses_edge_values: builder.uses_edge_values,
            counts: quantifier_counts(f),
            free_slots: builder.free_slots,
            nodes: builder.nodes,
        })
    }
}
