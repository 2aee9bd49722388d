//! Structural evaluation of the derived fold, induction principle and map.
//!
//! Every clause step consumes one constructor node of the value, so the
//! number of value-recursive steps equals the value's size.

use std::cell::Cell;

use super::algebra::{map_algebra, Algebra, DepAlgebra, MapFn};
use super::result::{EvalError, EvalResult, RuntimeResult};
use crate::analysis::{BaseSort, CtorSchema, GroupSchema, IndexExpr};
use crate::diag::{Diagnostic, Pos};
use crate::syntax::{Payload, Value};

pub struct Evaluator<'a> {
    schema: &'a GroupSchema,
    steps: Cell<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(schema: &'a GroupSchema) -> Self {
        Evaluator {
            schema,
            steps: Cell::new(0),
        }
    }

    /// Constructor clauses taken since creation.
    pub fn steps(&self) -> usize {
        self.steps.get()
    }

    fn clause<'v>(
        &self,
        idx: &IndexExpr,
        v: &'v Value,
    ) -> Result<(&'a CtorSchema, Vec<IndexExpr>, &'v [Value]), EvalError> {
        let IndexExpr::App(d, args) = idx else {
            unreachable!("variable indices are handled by the caller")
        };
        let decl: &'a _ = &self.schema.decls[*d];
        let mismatch = || EvalError::Mismatch {
            expected: format!("a value of `{}`", idx.display(&self.schema.spec)),
            found: v.to_string(),
        };
        let Value::Con(name, vs) = v else {
            return Err(mismatch());
        };
        let ctor = decl.ctors.iter().find(|c| &c.name == name).ok_or_else(mismatch)?;
        if ctor.args.len() != vs.len() {
            return Err(mismatch());
        }
        self.steps.set(self.steps.get() + 1);
        let sub = ctor.args.iter().map(|t| t.subst(args)).collect();
        Ok((ctor, sub, vs))
    }

    pub fn nfold(&self, alg: &Algebra, idx: &IndexExpr, v: &Value) -> EvalResult {
        match idx {
            IndexExpr::Var(k) => alg.base(*k)?(RuntimeResult::from_value(v.clone())),
            IndexExpr::App(..) => {
                let (ctor, sub, vs) = self.clause(idx, v)?;
                let method = alg.method(&ctor.name)?;
                let rs = sub
                    .iter()
                    .zip(vs)
                    .map(|(i, x)| self.nfold(alg, i, x))
                    .collect::<Result<Vec<_>, _>>()?;
                method(idx, rs)
            }
        }
    }

    pub fn ind(&self, alg: &DepAlgebra, idx: &IndexExpr, v: &Value) -> EvalResult {
        match idx {
            IndexExpr::Var(k) => {
                let base = alg.bases.get(*k).ok_or(EvalError::MissingBase {
                    algebra: alg.name.clone(),
                    var: *k,
                })?;
                base(v)
            }
            IndexExpr::App(..) => {
                let (ctor, sub, vs) = self.clause(idx, v)?;
                let method = alg.methods.get(&ctor.name).ok_or_else(|| EvalError::MissingMethod {
                    algebra: alg.name.clone(),
                    ctor: ctor.name.clone(),
                })?;
                let hyps = sub
                    .iter()
                    .zip(vs)
                    .map(|(i, x)| self.ind(alg, i, x))
                    .collect::<Result<Vec<_>, _>>()?;
                method(idx, vs, hyps)
            }
        }
    }
}

pub fn eval_nfold(schema: &GroupSchema, alg: &Algebra, idx: &IndexExpr, v: &Value) -> EvalResult {
    Evaluator::new(schema).nfold(alg, idx, v)
}

pub fn eval_ind(schema: &GroupSchema, alg: &DepAlgebra, idx: &IndexExpr, v: &Value) -> EvalResult {
    Evaluator::new(schema).ind(alg, idx, v)
}

/// The derived map: the fold with the rebuilding algebra.
pub fn eval_map(schema: &GroupSchema, fs: &[MapFn], idx: &IndexExpr, v: &Value) -> Result<Value, EvalError> {
    eval_nfold(schema, &map_algebra(schema, fs), idx, v)?.into_value()
}

/// Checks that `v` inhabits the interpretation of `idx`. Diagnostics carry
/// the path to the offending node; their position is left for the caller.
pub fn typecheck_value(schema: &GroupSchema, idx: &IndexExpr, bases: &[BaseSort], v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check(schema, idx, bases, v, &mut String::new(), &mut out);
    out
}

fn check(
    schema: &GroupSchema,
    idx: &IndexExpr,
    bases: &[BaseSort],
    v: &Value,
    path: &mut String,
    out: &mut Vec<Diagnostic>,
) {
    let at = |path: &str| {
        if path.is_empty() {
            "at the root".to_string()
        } else {
            format!("at {path}")
        }
    };
    match (idx, v) {
        (IndexExpr::Var(k), Value::Base(p)) => {
            let sort = bases.get(*k).copied().unwrap_or(BaseSort::Nat);
            let ok = matches!(
                (sort, p),
                (BaseSort::Nat, Payload::Nat(_)) | (BaseSort::Atom, Payload::Atom(_))
            );
            if !ok {
                out.push(Diagnostic::error(
                    Pos::default(),
                    format!("type mismatch {}: expected {sort:?}, found `{p}`", at(path)),
                ));
            }
        }
        (IndexExpr::Var(k), Value::Con(name, _)) => out.push(Diagnostic::error(
            Pos::default(),
            format!(
                "type mismatch {}: expected a {:?} payload, found constructor `{name}`",
                at(path),
                bases.get(*k).copied().unwrap_or(BaseSort::Nat)
            ),
        )),
        (IndexExpr::App(d, args), Value::Con(name, vs)) => {
            let decl = &schema.decls[*d];
            let Some(ctor) = decl.ctors.iter().find(|c| &c.name == name) else {
                out.push(Diagnostic::error(
                    Pos::default(),
                    format!(
                        "type mismatch {}: `{name}` is not a constructor of `{}`",
                        at(path),
                        decl.name
                    ),
                ));
                return;
            };
            if ctor.args.len() != vs.len() {
                out.push(Diagnostic::error(
                    Pos::default(),
                    format!(
                        "type mismatch {}: `{name}` takes {} argument(s), found {}",
                        at(path),
                        ctor.args.len(),
                        vs.len()
                    ),
                ));
                return;
            }
            for (j, (t, x)) in ctor.args.iter().zip(vs).enumerate() {
                let len = path.len();
                if !path.is_empty() {
                    path.push('.');
                }
                path.push_str(&format!("{name}#{}", j + 1));
                check(schema, &t.subst(args), bases, x, path, out);
                path.truncate(len);
            }
        }
        (IndexExpr::App(..), Value::Base(p)) => out.push(Diagnostic::error(
            Pos::default(),
            format!(
                "type mismatch {}: expected a value of `{}`, found `{p}`",
                at(path),
                idx.display(&schema.spec)
            ),
        )),
    }
}
