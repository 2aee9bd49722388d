//! The dependently typed fold recovered from the higher-order fold.
//!
//! ```text
//! PS p A = (n : Nat) -> (A -> p n) -> p (succ n)
//! PS-to-P p a z zero x     = z x
//! PS-to-P p a z (succ n) h = h n (PS-to-P p a z n)
//! fold-PS p l c = hfold (PS p) (\ a n tr -> l n)
//!                   (\ a x xs n tr -> c n (tr x) (xs (succ n) (\ f -> f n tr)))
//! liftNTimes zero f x     = x
//! liftNTimes (succ n) f x = f (hmap (liftNTimes n f) x)
//! nfold' p l c a z n x = PS-to-P p a z n (liftNTimes n (fold-PS p l c) x)
//! ```
//!
//! Every step here goes through the literal `hfold`/`hmap` of
//! [`super::direct`]; nothing calls the structural evaluator.

use std::rc::Rc;

use super::algebra::Algebra;
use super::direct::{hfold_direct, hmap_direct, BushNames, DepthGuard, HAlgebra, Node};
use super::result::{EvalError, EvalResult, RuntimeResult};
use crate::analysis::{GroupSchema, IndexExpr};
use crate::syntax::Value;

fn nat_arg(r: &RuntimeResult) -> Result<usize, EvalError> {
    usize::try_from(r.as_nat()?).map_err(|_| EvalError::Overflow("index"))
}

/// `fold-PS`: the higher-order fold algebra with carrier `PS p`.
fn fold_ps(alg: &Algebra, names: &BushNames) -> Result<HAlgebra, EvalError> {
    let on_leaf = alg.method(&names.leaf)?.clone();
    let on_cons = alg.method(&names.cons)?.clone();
    let leaf = move || -> EvalResult {
        let on_leaf = on_leaf.clone();
        Ok(RuntimeResult::fun(move |n| {
            let n = nat_arg(&n)?;
            let on_leaf = on_leaf.clone();
            Ok(RuntimeResult::fun(move |_tr| {
                on_leaf(&IndexExpr::iterate(0, n + 1), vec![])
            }))
        }))
    };
    let cons = move |x: RuntimeResult, xs: RuntimeResult| -> EvalResult {
        let on_cons = on_cons.clone();
        Ok(RuntimeResult::fun(move |n| {
            let n = nat_arg(&n)?;
            let (x, xs, on_cons) = (x.clone(), xs.clone(), on_cons.clone());
            Ok(RuntimeResult::fun(move |tr| {
                let head = tr.apply(x.clone())?;
                let tr2 = tr.clone();
                let k = RuntimeResult::fun(move |f| f.apply(RuntimeResult::Nat(n as u64))?.apply(tr2.clone()));
                let tail = xs.apply(RuntimeResult::Nat(n as u64 + 1))?.apply(k)?;
                on_cons(&IndexExpr::iterate(0, n + 1), vec![head, tail])
            }))
        }))
    };
    Ok(HAlgebra {
        name: format!("fold-PS {}", alg.name),
        leaf: Rc::new(leaf),
        cons: Rc::new(cons),
    })
}

/// `liftNTimes`: turns `D^n a` into `(PS p)^n a`.
fn lift(guard: &DepthGuard, names: &BushNames, fold: &HAlgebra, n: usize, x: Node) -> Result<Node, EvalError> {
    if n == 0 {
        return Ok(x);
    }
    let inner = |y: Node| lift(guard, names, fold, n - 1, y);
    let mapped = hmap_direct(guard, &inner, x)?;
    Ok(Node::Elem(hfold_direct(guard, names, fold, mapped)?))
}

/// `PS-to-P`: the canonical map `(PS p)^n a -> p n`.
fn ps_to_p(alg: Rc<Algebra>, n: usize, x: RuntimeResult) -> EvalResult {
    if n == 0 {
        return alg.base(0)?(x);
    }
    let ih = RuntimeResult::fun(move |y| ps_to_p(alg.clone(), n - 1, y));
    x.apply(RuntimeResult::Nat(n as u64 - 1))?.apply(ih)
}

/// `nfold'` at index `idx` (which must be `D^n a`).
pub fn eval_nfold_prime(schema: &GroupSchema, alg: &Algebra, idx: &IndexExpr, v: &Value) -> EvalResult {
    let (_, names) = BushNames::of(schema)?;
    let n = idx.unary_depth().ok_or_else(|| {
        EvalError::Shape(format!(
            "index `{}` is not an iterate of the declaration",
            idx.display(&schema.spec)
        ))
    })?;
    let fold = fold_ps(alg, &names)?;
    let guard = DepthGuard::for_value(v, n);
    let lifted = lift(&guard, &names, &fold, n, Node::from_value(v, &names))?;
    ps_to_p(Rc::new(alg.clone()), n, lifted.into_result(&names)?)
}
