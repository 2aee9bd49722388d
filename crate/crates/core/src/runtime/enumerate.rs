//! Exhaustive enumeration of small values.

use std::collections::HashMap;
use std::rc::Rc;

use crate::analysis::{GroupSchema, IndexExpr};
use crate::syntax::{Payload, Value};

/// Enumerates values by exact size with memoisation on (index, size).
pub struct Enumerator<'a> {
    schema: &'a GroupSchema,
    bases: &'a [Vec<Payload>],
    memo: HashMap<(IndexExpr, usize), Rc<Vec<Value>>>,
}

impl<'a> Enumerator<'a> {
    /// `bases[k]` is the finite universe for variable `k`.
    pub fn new(schema: &'a GroupSchema, bases: &'a [Vec<Payload>]) -> Self {
        Enumerator {
            schema,
            bases,
            memo: HashMap::new(),
        }
    }

    /// Values of exactly `size` constructor nodes, in constructor order,
    /// then by how the remaining size splits across arguments, then
    /// lexicographically by argument.
    pub fn exact(&mut self, idx: &IndexExpr, size: usize) -> Rc<Vec<Value>> {
        if let Some(hit) = self.memo.get(&(idx.clone(), size)) {
            return hit.clone();
        }
        let out = match idx {
            IndexExpr::Var(k) => {
                if size == 0 {
                    self.bases
                        .get(*k)
                        .map(|u| u.iter().cloned().map(Value::Base).collect())
                        .unwrap_or_default()
                } else {
                    Vec::new()
                }
            }
            IndexExpr::App(d, args) => {
                let mut out = Vec::new();
                if size > 0 {
                    let ctors = self.schema.decls[*d].ctors.clone();
                    for c in &ctors {
                        let sub: Vec<IndexExpr> = c.args.iter().map(|t| t.subst(args)).collect();
                        for split in compositions(size - 1, sub.len()) {
                            let parts: Vec<Rc<Vec<Value>>> =
                                sub.iter().zip(&split).map(|(i, &s)| self.exact(i, s)).collect();
                            product(&parts, &mut Vec::new(), &mut |xs| {
                                out.push(Value::Con(c.name.clone(), xs.to_vec()))
                            });
                        }
                    }
                }
                out
            }
        };
        let out = Rc::new(out);
        self.memo.insert((idx.clone(), size), out.clone());
        out
    }

    /// All values of size at most `max_size`, smallest first.
    pub fn up_to(&mut self, idx: &IndexExpr, max_size: usize) -> Vec<Value> {
        (0..=max_size)
            .flat_map(|s| self.exact(idx, s).as_ref().clone())
            .collect()
    }
}

/// Ordered ways to write `total` as `parts` non-negative summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn product(parts: &[Rc<Vec<Value>>], acc: &mut Vec<Value>, emit: &mut impl FnMut(&[Value])) {
    match parts.split_first() {
        None => emit(acc),
        Some((first, rest)) => {
            for v in first.iter() {
                acc.push(v.clone());
                product(rest, acc, emit);
                acc.pop();
            }
        }
    }
}

pub fn enumerate_values(schema: &GroupSchema, idx: &IndexExpr, bases: &[Vec<Payload>], max_size: usize) -> Vec<Value> {
    Enumerator::new(schema, bases).up_to(idx, max_size)
}

/// Every well-formed index of depth at most `max_depth`, by depth.
pub fn enumerate_indices(schema: &GroupSchema, max_depth: usize) -> Vec<IndexExpr> {
    let mut levels: Vec<Vec<IndexExpr>> = vec![(0..schema.var_count()).map(IndexExpr::Var).collect()];
    let mut all: Vec<IndexExpr> = levels[0].clone();
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for (d, (_, arity)) in schema.spec.app_ctors.iter().enumerate() {
            // At least one argument comes from the newest level.
            let newest = levels.last().expect("non-empty").clone();
            let pools: Vec<Rc<Vec<IndexExpr>>> = std::iter::repeat_n(Rc::new(all.clone()), *arity).collect();
            let mut acc = Vec::new();
            index_product(&pools, &mut acc, &mut |xs: &[IndexExpr]| {
                if xs.iter().any(|x| newest.contains(x)) || (*arity == 0 && levels.len() == 1) {
                    next.push(IndexExpr::App(d, xs.to_vec()));
                }
            });
        }
        all.extend(next.iter().cloned());
        levels.push(next);
    }
    all
}

fn index_product(parts: &[Rc<Vec<IndexExpr>>], acc: &mut Vec<IndexExpr>, emit: &mut impl FnMut(&[IndexExpr])) {
    match parts.split_first() {
        None => emit(acc),
        Some((first, rest)) => {
            for v in first.iter() {
                acc.push(v.clone());
                index_product(rest, acc, emit);
                acc.pop();
            }
        }
    }
}
