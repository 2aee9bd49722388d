//! The literal, non-structural map and higher-order fold for `Bush`-shaped
//! declarations, used as independent oracles.
//!
//! ```text
//! hmap f leaf        = leaf
//! hmap f (cons x xs) = cons (f x) (hmap (hmap f) xs)
//! hfold a leaf        = on-leaf
//! hfold a (cons x xs) = on-cons x (hfold (b a) (hmap (hfold a) xs))
//! ```
//!
//! Values are untyped here: a node is a leaf, a cons, or an element whose
//! type depends on how deep it sits, which the polymorphic recursion
//! above needs.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::rc::Rc;

use super::algebra::{Algebra, BaseFn, Method, ResultKind};
use super::eval::eval_nfold;
use super::result::{checked_add, EvalError, EvalResult, RuntimeResult};
use crate::analysis::{BushShape, GroupSchema, IndexExpr};
use crate::syntax::Value;

#[derive(Clone, Debug)]
pub enum Node {
    Leaf,
    Cons(Box<Node>, Box<Node>),
    Elem(RuntimeResult),
}

/// Constructor names of a `Bush`-shaped declaration.
#[derive(Clone, Debug)]
pub struct BushNames {
    pub leaf: String,
    pub cons: String,
}

impl BushNames {
    pub fn of(schema: &GroupSchema) -> Result<(BushShape, BushNames), EvalError> {
        let shape = schema.bush_shape().ok_or_else(|| {
            EvalError::Shape(format!(
                "`{}` is not of the shape `leaf | cons : a -> D (D a) -> D a`",
                schema.group.module_name()
            ))
        })?;
        let ctors = &schema.decls[0].ctors;
        Ok((
            shape,
            BushNames {
                leaf: ctors[shape.leaf].name.clone(),
                cons: ctors[shape.cons].name.clone(),
            },
        ))
    }
}

impl Node {
    pub fn from_value(v: &Value, names: &BushNames) -> Node {
        match v {
            Value::Con(c, args) if *c == names.leaf && args.is_empty() => Node::Leaf,
            Value::Con(c, args) if *c == names.cons && args.len() == 2 => Node::Cons(
                Box::new(Node::from_value(&args[0], names)),
                Box::new(Node::from_value(&args[1], names)),
            ),
            other => Node::Elem(RuntimeResult::from_value(other.clone())),
        }
    }

    pub fn to_value(&self, names: &BushNames) -> Result<Value, EvalError> {
        Ok(match self {
            Node::Leaf => Value::Con(names.leaf.clone(), vec![]),
            Node::Cons(x, xs) => Value::Con(names.cons.clone(), vec![x.to_value(names)?, xs.to_value(names)?]),
            Node::Elem(r) => r.clone().into_value()?,
        })
    }

    /// An element viewed as a result; nested bushes become trees.
    pub fn into_result(self, names: &BushNames) -> EvalResult {
        match self {
            Node::Elem(r) => Ok(r),
            other => Ok(RuntimeResult::Tree(other.to_value(names)?)),
        }
    }
}

/// Recursion-depth guard for the non-structural oracles.
pub struct DepthGuard {
    limit: usize,
    depth: Cell<usize>,
}

impl DepthGuard {
    pub fn new(limit: usize) -> Self {
        DepthGuard {
            limit,
            depth: Cell::new(0),
        }
    }

    /// `10 * (size + depth) + 100`.
    pub fn for_value(v: &Value, index_depth: usize) -> Self {
        DepthGuard::new(10 * (v.size() + index_depth) + 100)
    }

    fn enter(&self) -> Result<GuardToken<'_>, EvalError> {
        let d = self.depth.get() + 1;
        if d > self.limit {
            return Err(EvalError::DepthGuard { limit: self.limit });
        }
        self.depth.set(d);
        Ok(GuardToken(self))
    }
}

struct GuardToken<'a>(&'a DepthGuard);

impl Drop for GuardToken<'_> {
    fn drop(&mut self) {
        self.0.depth.set(self.0.depth.get() - 1);
    }
}

pub fn hmap_direct(
    guard: &DepthGuard,
    f: &dyn Fn(Node) -> Result<Node, EvalError>,
    node: Node,
) -> Result<Node, EvalError> {
    let _t = guard.enter()?;
    match node {
        Node::Leaf => Ok(Node::Leaf),
        Node::Cons(x, xs) => {
            let fx = f(*x)?;
            let inner = |y: Node| hmap_direct(guard, f, y);
            let mapped = hmap_direct(guard, &inner, *xs)?;
            Ok(Node::Cons(Box::new(fx), Box::new(mapped)))
        }
        Node::Elem(r) => Err(EvalError::Mismatch {
            expected: "a bush".into(),
            found: r.to_string(),
        }),
    }
}

/// A higher-order fold algebra: the carrier is erased, so a method only
/// sees its argument results.
#[derive(Clone)]
pub struct HAlgebra {
    pub name: String,
    pub leaf: Rc<dyn Fn() -> EvalResult>,
    pub cons: Rc<dyn Fn(RuntimeResult, RuntimeResult) -> EvalResult>,
}

pub fn hfold_direct(guard: &DepthGuard, names: &BushNames, alg: &HAlgebra, node: Node) -> EvalResult {
    let _t = guard.enter()?;
    match node {
        Node::Leaf => (alg.leaf)(),
        Node::Cons(x, xs) => {
            let fold_elem = |y: Node| Ok(Node::Elem(hfold_direct(guard, names, alg, y)?));
            let mapped = hmap_direct(guard, &fold_elem, *xs)?;
            let r = hfold_direct(guard, names, alg, mapped)?;
            (alg.cons)(x.into_result(names)?, r)
        }
        Node::Elem(r) => Err(EvalError::Mismatch {
            expected: "a bush".into(),
            found: r.to_string(),
        }),
    }
}

/// Runs the literal higher-order fold on a value of `D a`.
pub fn eval_hfold_direct(schema: &GroupSchema, alg: &HAlgebra, v: &Value) -> EvalResult {
    let (_, names) = BushNames::of(schema)?;
    let guard = DepthGuard::for_value(v, 1);
    hfold_direct(&guard, &names, alg, Node::from_value(v, &names))
}

/// The literal map on `D a`, generalised to any element function.
pub fn eval_hmap_direct(
    schema: &GroupSchema,
    f: &dyn Fn(&Value) -> Result<Value, EvalError>,
    v: &Value,
) -> Result<Value, EvalError> {
    let (_, names) = BushNames::of(schema)?;
    let guard = DepthGuard::for_value(v, 1);
    let lift = |n: Node| -> Result<Node, EvalError> {
        let value = n.to_value(&names)?;
        Ok(Node::from_value(&f(&value)?, &names))
    };
    // Elements of the top level are whole sub-values, so convert them
    // before handing them to `f`.
    let node = match Node::from_value(v, &names) {
        Node::Elem(r) => {
            return Err(EvalError::Mismatch {
                expected: "a bush".into(),
                found: r.to_string(),
            })
        }
        n => n,
    };
    hmap_direct(&guard, &lift, node)?.to_value(&names)
}

/// The higher-order fold defined from the dependently typed fold: the
/// fold at the declaration's own index with identity base functions.
pub fn eval_hfold_via_nfold(schema: &GroupSchema, alg: &HAlgebra, v: &Value) -> EvalResult {
    let (_, names) = BushNames::of(schema)?;
    let mut methods: BTreeMap<String, Method> = BTreeMap::new();
    let leaf = alg.leaf.clone();
    methods.insert(names.leaf.clone(), Rc::new(move |_, _| leaf()));
    let cons = alg.cons.clone();
    methods.insert(
        names.cons.clone(),
        Rc::new(move |_, mut rs| {
            let r2 = rs.pop().expect("two results");
            let r1 = rs.pop().expect("two results");
            cons(r1, r2)
        }),
    );
    let id: BaseFn = Rc::new(Ok);
    let nfold_alg = Algebra {
        name: alg.name.clone(),
        result_kind: ResultKind::Functions,
        methods,
        bases: vec![id],
    };
    eval_nfold(schema, &nfold_alg, &IndexExpr::iterate(0, 1), v)
}

/// Continuation-passing summation with carrier `b a = (a -> Nat) -> Nat`:
/// `leaf k = 0`, `cons x xs k = k x + xs (\r -> r k)`. Apply the result to
/// the identity continuation to get the sum.
pub fn sum_aux() -> HAlgebra {
    HAlgebra {
        name: "sumAux".into(),
        leaf: Rc::new(|| Ok(RuntimeResult::fun(|_k| Ok(RuntimeResult::Nat(0))))),
        cons: Rc::new(|x, xs| {
            Ok(RuntimeResult::fun(move |k| {
                let head = k.apply(x.clone())?.as_nat()?;
                let k2 = k.clone();
                let rest = xs.apply(RuntimeResult::fun(move |r| r.apply(k2.clone())))?.as_nat()?;
                Ok(RuntimeResult::Nat(checked_add(head, rest, "sumAux")?))
            }))
        }),
    }
}

pub fn identity_continuation() -> RuntimeResult {
    RuntimeResult::fun(Ok)
}

/// First-order higher-order-fold algebras for the conformance checks.
pub fn h_catalogue() -> Vec<HAlgebra> {
    vec![
        HAlgebra {
            name: "hsum".into(),
            leaf: Rc::new(|| Ok(RuntimeResult::Nat(0))),
            cons: Rc::new(|x, r| Ok(RuntimeResult::Nat(checked_add(x.as_nat()?, r.as_nat()?, "hsum")?))),
        },
        HAlgebra {
            name: "hlength".into(),
            leaf: Rc::new(|| Ok(RuntimeResult::Nat(0))),
            cons: Rc::new(|_, r| Ok(RuntimeResult::Nat(checked_add(r.as_nat()?, 1, "hlength")?))),
        },
        HAlgebra {
            name: "htrace".into(),
            leaf: Rc::new(|| Ok(RuntimeResult::Tree(Value::con("L", vec![])))),
            cons: Rc::new(|x, r| {
                Ok(RuntimeResult::Tree(Value::con(
                    "C",
                    vec![x.into_value()?, r.into_value()?],
                )))
            }),
        },
    ]
}
