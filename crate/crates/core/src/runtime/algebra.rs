//! Algebras: one method per constructor plus one base function per index
//! variable, the runtime form of a fold's arguments.

use std::collections::BTreeMap;
use std::rc::Rc;

use super::result::{checked_add, EvalError, EvalResult, RuntimeResult};
use crate::analysis::{GroupSchema, IndexExpr, IndexTypeSpec};
use crate::syntax::{Payload, Value};

/// A method receives the full index of the node it folds (always an
/// application) and the recursive results, one per constructor argument.
pub type Method = Rc<dyn Fn(&IndexExpr, Vec<RuntimeResult>) -> EvalResult>;
pub type BaseFn = Rc<dyn Fn(RuntimeResult) -> EvalResult>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultKind {
    Naturals,
    Trees,
    Functions,
}

#[derive(Clone)]
pub struct Algebra {
    pub name: String,
    pub result_kind: ResultKind,
    pub methods: BTreeMap<String, Method>,
    pub bases: Vec<BaseFn>,
}

impl Algebra {
    pub fn method(&self, ctor: &str) -> Result<&Method, EvalError> {
        self.methods.get(ctor).ok_or_else(|| EvalError::MissingMethod {
            algebra: self.name.clone(),
            ctor: ctor.to_string(),
        })
    }

    pub fn base(&self, k: usize) -> Result<&BaseFn, EvalError> {
        self.bases.get(k).ok_or(EvalError::MissingBase {
            algebra: self.name.clone(),
            var: k,
        })
    }

    /// Methods cover every constructor and bases cover every variable.
    pub fn check_complete(&self, schema: &GroupSchema) -> Result<(), EvalError> {
        for d in &schema.decls {
            for c in &d.ctors {
                self.method(&c.name)?;
            }
        }
        for k in 0..schema.var_count() {
            self.base(k)?;
        }
        Ok(())
    }
}

/// Per-constructor methods that also see the constructor's sub-values;
/// the runtime content of the induction principle.
pub type DepMethod = Rc<dyn Fn(&IndexExpr, &[Value], Vec<RuntimeResult>) -> EvalResult>;
pub type DepBaseFn = Rc<dyn Fn(&Value) -> EvalResult>;

#[derive(Clone)]
pub struct DepAlgebra {
    pub name: String,
    pub methods: BTreeMap<String, DepMethod>,
    pub bases: Vec<DepBaseFn>,
}

impl DepAlgebra {
    /// Lifts a non-dependent algebra by ignoring the sub-values.
    pub fn from_algebra(alg: &Algebra) -> DepAlgebra {
        DepAlgebra {
            name: alg.name.clone(),
            methods: alg
                .methods
                .iter()
                .map(|(k, m)| {
                    let m = m.clone();
                    let dm: DepMethod = Rc::new(move |idx, _vals, rs| m(idx, rs));
                    (k.clone(), dm)
                })
                .collect(),
            bases: alg
                .bases
                .iter()
                .map(|b| {
                    let b = b.clone();
                    let db: DepBaseFn = Rc::new(move |v: &Value| b(RuntimeResult::from_value(v.clone())));
                    db
                })
                .collect(),
        }
    }
}

fn each_ctor(schema: &GroupSchema, mut f: impl FnMut(usize, &str, &[IndexExpr]) -> Method) -> BTreeMap<String, Method> {
    let mut out = BTreeMap::new();
    for (d, decl) in schema.decls.iter().enumerate() {
        for c in &decl.ctors {
            out.insert(c.name.clone(), f(d, &c.name, &c.args));
        }
    }
    out
}

fn nat_base(what: &'static str) -> BaseFn {
    Rc::new(move |r| match r {
        RuntimeResult::Nat(n) => Ok(RuntimeResult::Nat(n)),
        RuntimeResult::Tree(Value::Base(Payload::Atom(_))) => Ok(RuntimeResult::Nat(0)),
        other => Err(EvalError::Mismatch {
            expected: format!("a base payload for `{what}`"),
            found: other.to_string(),
        }),
    })
}

fn const_base(n: u64) -> BaseFn {
    Rc::new(move |_| Ok(RuntimeResult::Nat(n)))
}

/// Adds every natural in the value; atoms count zero.
pub fn sum(schema: &GroupSchema) -> Algebra {
    Algebra {
        name: "sum".into(),
        result_kind: ResultKind::Naturals,
        methods: each_ctor(schema, |_, _, _| {
            Rc::new(|_, rs| {
                let mut acc = 0u64;
                for r in rs {
                    acc = checked_add(acc, r.as_nat()?, "sum")?;
                }
                Ok(RuntimeResult::Nat(acc))
            })
        }),
        bases: (0..schema.var_count()).map(|_| nat_base("sum")).collect(),
    }
}

/// Counts spine constructors: one plus the results of the arguments headed
/// by the constructor's own declaration, or zero for a constructor with no
/// such argument. For `Bush` this is `leaf n = 0`, `cons n r1 r2 = succ r2`.
pub fn length(schema: &GroupSchema) -> Algebra {
    Algebra {
        name: "length".into(),
        result_kind: ResultKind::Naturals,
        methods: each_ctor(schema, |d, _, args| {
            let spine: Vec<bool> = args
                .iter()
                .map(|a| matches!(a, IndexExpr::App(h, _) if *h == d))
                .collect();
            let counts = spine.iter().any(|s| *s);
            Rc::new(move |_, rs| {
                if !counts {
                    return Ok(RuntimeResult::Nat(0));
                }
                let mut acc = 1u64;
                for (r, on_spine) in rs.iter().zip(&spine) {
                    if *on_spine {
                        acc = checked_add(acc, r.as_nat()?, "length")?;
                    }
                }
                Ok(RuntimeResult::Nat(acc))
            })
        }),
        bases: (0..schema.var_count()).map(|_| const_base(0)).collect(),
    }
}

/// Zero for nullary constructors, otherwise one plus the largest recursive
/// result.
pub fn depth(schema: &GroupSchema) -> Algebra {
    Algebra {
        name: "depth".into(),
        result_kind: ResultKind::Naturals,
        methods: each_ctor(schema, |_, _, _| {
            Rc::new(|_, rs| {
                if rs.is_empty() {
                    return Ok(RuntimeResult::Nat(0));
                }
                let mut best = 0u64;
                for r in rs {
                    best = best.max(r.as_nat()?);
                }
                Ok(RuntimeResult::Nat(checked_add(best, 1, "depth")?))
            })
        }),
        bases: (0..schema.var_count()).map(|_| const_base(0)).collect(),
    }
}

/// Records every clause taken, tagged with its index, as a tree.
pub fn trace(schema: &GroupSchema) -> Algebra {
    let spec: Rc<IndexTypeSpec> = Rc::new(schema.spec.clone());
    Algebra {
        name: "trace".into(),
        result_kind: ResultKind::Trees,
        methods: each_ctor(schema, |_, name, _| {
            let name = name.to_string();
            let spec = spec.clone();
            Rc::new(move |idx, rs| {
                let children = rs
                    .into_iter()
                    .map(RuntimeResult::into_value)
                    .collect::<Result<_, _>>()?;
                Ok(RuntimeResult::Tree(Value::Con(
                    format!("{name}@{}", idx.display(&spec)),
                    children,
                )))
            })
        }),
        bases: (0..schema.var_count())
            .map(|k| {
                let tag = format!("base{}", schema.spec.var_ctors[k].trim_start_matches("var"));
                let b: BaseFn =
                    Rc::new(move |r| Ok(RuntimeResult::Tree(Value::Con(tag.clone(), vec![r.into_value()?]))));
                b
            })
            .collect(),
    }
}

pub const CATALOGUE: [&str; 4] = ["sum", "length", "depth", "trace"];

/// The fixed algebra catalogue used by the property suite.
pub fn catalogue(schema: &GroupSchema) -> Vec<Algebra> {
    vec![sum(schema), length(schema), depth(schema), trace(schema)]
}

pub fn by_name(schema: &GroupSchema, name: &str) -> Option<Algebra> {
    catalogue(schema).into_iter().find(|a| a.name == name)
}

pub type MapFn = Rc<dyn Fn(&Value) -> Result<Value, EvalError>>;

/// The fold that rebuilds each constructor and applies `fs[k]` at
/// variable `k`.
pub fn map_algebra(schema: &GroupSchema, fs: &[MapFn]) -> Algebra {
    Algebra {
        name: "map".into(),
        result_kind: ResultKind::Trees,
        methods: each_ctor(schema, |_, name, _| {
            let name = name.to_string();
            Rc::new(move |_, rs| {
                let children = rs
                    .into_iter()
                    .map(RuntimeResult::into_value)
                    .collect::<Result<_, _>>()?;
                Ok(RuntimeResult::Tree(Value::Con(name.clone(), children)))
            })
        }),
        bases: fs
            .iter()
            .map(|f| {
                let f = f.clone();
                let b: BaseFn = Rc::new(move |r| Ok(RuntimeResult::from_value(f(&r.into_value()?)?)));
                b
            })
            .collect(),
    }
}

pub fn identity_map() -> MapFn {
    Rc::new(|v| Ok(v.clone()))
}

/// Adds one to naturals; atoms get a prime appended.
pub fn succ_map() -> MapFn {
    Rc::new(|v| match v {
        Value::Base(Payload::Nat(n)) => n.checked_add(1).map(Value::nat).ok_or(EvalError::Overflow("map")),
        Value::Base(Payload::Atom(a)) => Ok(Value::Base(Payload::Atom(format!("{a}'")))),
        other => Err(EvalError::Mismatch {
            expected: "a base payload".into(),
            found: other.to_string(),
        }),
    })
}

/// Wraps a payload in a marker constructor; distinguishes nesting depth.
pub fn tag_map(tag: &str) -> MapFn {
    let tag = tag.to_string();
    Rc::new(move |v| Ok(Value::Con(tag.clone(), vec![v.clone()])))
}
