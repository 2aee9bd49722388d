//! The exhaustive property suite.
//!
//! Every property is checked on all values up to a size bound, which is
//! the strongest statement available without proofs; a pass means "no
//! counterexample up to the bound", nothing more.

use std::fmt;
use std::rc::Rc;

use super::algebra::{
    catalogue, identity_map, succ_map, tag_map, Algebra, BaseFn, DepAlgebra, MapFn, Method, ResultKind,
};
use super::bridge::eval_nfold_prime;
use super::direct::{
    eval_hfold_direct, eval_hfold_via_nfold, eval_hmap_direct, h_catalogue, identity_continuation, sum_aux, HAlgebra,
};
use super::enumerate::{enumerate_indices, Enumerator};
use super::eval::{eval_map, Evaluator};
use super::result::{checked_add, EvalError, EvalResult, Observed, RuntimeResult};
use crate::analysis::{GroupSchema, IndexExpr};
use crate::syntax::{Payload, Value};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub max_size: usize,
    /// Universe shared by every base variable.
    pub bases: Vec<Payload>,
    pub index_depth: usize,
    /// Bound on `m + n` for map composition.
    pub map_depth: usize,
}

impl SuiteConfig {
    pub fn new(schema: &GroupSchema, max_size: usize) -> Self {
        SuiteConfig {
            max_size,
            bases: (0..3).map(Payload::Nat).collect(),
            index_depth: if schema.is_unary_singleton() { 3 } else { 1 },
            map_depth: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub value: Value,
    /// Source type the value was checked at.
    pub index: String,
    pub algebra: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "value `{}` at `{}` with `{}`: {} /= {}",
            self.value, self.index, self.algebra, self.left, self.right
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub cases: usize,
    /// Distinct values the property saw.
    pub values: usize,
    pub failure: Option<Counterexample>,
}

impl PropertyReport {
    fn new(name: &'static str) -> Self {
        PropertyReport {
            name,
            cases: 0,
            values: 0,
            failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn record(
        &mut self,
        value: &Value,
        index: String,
        algebra: &str,
        left: &Result<Observed, EvalError>,
        right: &Result<Observed, EvalError>,
    ) {
        self.cases += 1;
        let same = matches!((left, right), (Ok(a), Ok(b)) if a == b);
        if !same && self.failure.is_none() {
            self.failure = Some(Counterexample {
                value: value.clone(),
                index,
                algebra: algebra.to_string(),
                left: show(left),
                right: show(right),
            });
        }
    }
}

fn show(r: &Result<Observed, EvalError>) -> String {
    match r {
        Ok(o) => o.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn observe(r: EvalResult) -> Result<Observed, EvalError> {
    r.and_then(|r| r.observe())
}

fn tree(r: Result<Value, EvalError>) -> Result<Observed, EvalError> {
    r.map(Observed::Tree)
}

pub fn property_names(schema: &GroupSchema) -> Vec<&'static str> {
    let mut names = vec!["fold-induction agreement", "structural termination", "map identity"];
    if schema.is_unary_singleton() {
        names.push("map composition");
    }
    if schema.bush_shape().is_some() {
        names.extend([
            "nfold = nfold'",
            "hfold conformance",
            "hfold leaf equation",
            "hmap-cons equation",
        ]);
    }
    if list_shape(schema).is_some() {
        names.push("foldList agreement");
    }
    names
}

/// Runs every property that applies to the group.
pub fn run_suite(schema: &GroupSchema, cfg: &SuiteConfig) -> Vec<PropertyReport> {
    let universes: Vec<Vec<Payload>> = vec![cfg.bases.clone(); schema.var_count()];
    let mut en = Enumerator::new(schema, &universes);
    let algebras = catalogue(schema);
    let indices = enumerate_indices(schema, cfg.index_depth);

    let mut agreement = PropertyReport::new("fold-induction agreement");
    let mut termination = PropertyReport::new("structural termination");
    let mut identity = PropertyReport::new("map identity");
    let bush = schema.bush_shape().is_some();
    let mut prime = PropertyReport::new("nfold = nfold'");

    for idx in &indices {
        let shown = schema.source_type(idx);
        let values = en.up_to(idx, cfg.max_size);
        agreement.values += values.len();
        termination.values += values.len();
        identity.values += values.len();
        if bush {
            prime.values += values.len();
        }
        for v in &values {
            for alg in &algebras {
                let ev = Evaluator::new(schema);
                let folded = observe(ev.nfold(alg, idx, v));
                let steps = ev.steps();
                let ei = Evaluator::new(schema);
                let dep = DepAlgebra::from_algebra(alg);
                let induced = observe(ei.ind(&dep, idx, v));
                agreement.record(v, shown.clone(), &alg.name, &folded, &induced);
                let bound = v.size();
                termination.record(
                    v,
                    shown.clone(),
                    &alg.name,
                    &Ok(Observed::Nat((steps.max(ei.steps()) <= bound) as u64)),
                    &Ok(Observed::Nat(1)),
                );
                if termination.failure.as_ref().is_some_and(|c| c.left == "0") {
                    let c = termination.failure.as_mut().expect("just set");
                    c.left = format!("{} steps", steps.max(ei.steps()));
                    c.right = format!("size {bound}");
                }
                if bush {
                    let other = observe(eval_nfold_prime(schema, alg, idx, v));
                    prime.record(v, shown.clone(), &alg.name, &folded, &other);
                }
            }
            let ids: Vec<MapFn> = (0..schema.var_count()).map(|_| identity_map()).collect();
            identity.record(
                v,
                shown.clone(),
                "identity",
                &tree(eval_map(schema, &ids, idx, v)),
                &Ok(Observed::Tree(v.clone())),
            );
        }
    }

    let mut out = vec![agreement, termination, identity];
    if schema.is_unary_singleton() {
        out.push(map_composition(schema, &mut en, cfg));
    }
    if bush {
        out.push(prime);
        out.extend(hfold_properties(schema, &mut en, cfg));
    }
    if let Some((nil, cons)) = list_shape(schema) {
        out.push(fold_list_agreement(schema, &mut en, cfg, &nil, &cons));
    }
    out
}

fn map_composition(schema: &GroupSchema, en: &mut Enumerator<'_>, cfg: &SuiteConfig) -> PropertyReport {
    let mut report = PropertyReport::new("map composition");
    let fns: [(&str, MapFn); 2] = [("succ", succ_map()), ("tag", tag_map("T"))];
    for total in 0..=cfg.map_depth {
        let idx = IndexExpr::iterate(0, total);
        let values = en.up_to(&idx, cfg.max_size);
        report.values += values.len();
        for m in 0..=total {
            let n = total - m;
            let outer_idx = IndexExpr::iterate(0, m);
            let inner_idx = IndexExpr::iterate(0, n);
            for (fname, f) in &fns {
                let s = schema.clone();
                let (f2, inner_idx2) = (f.clone(), inner_idx.clone());
                let inner: MapFn = Rc::new(move |y| eval_map(&s, std::slice::from_ref(&f2), &inner_idx2, y));
                for v in &values {
                    let lhs = tree(eval_map(schema, std::slice::from_ref(f), &idx, v));
                    let rhs = tree(eval_map(schema, std::slice::from_ref(&inner), &outer_idx, v));
                    report.record(v, format!("m={m}, n={n}"), fname, &lhs, &rhs);
                }
            }
        }
    }
    report
}

fn hfold_properties(schema: &GroupSchema, en: &mut Enumerator<'_>, cfg: &SuiteConfig) -> Vec<PropertyReport> {
    let names = crate::runtime::direct::BushNames::of(schema).expect("bush-shaped").1;
    let idx = IndexExpr::iterate(0, 1);
    let shown = schema.source_type(&idx);
    let values = en.up_to(&idx, cfg.max_size);

    let mut conformance = PropertyReport::new("hfold conformance");
    let mut leaf_eq = PropertyReport::new("hfold leaf equation");
    let mut cons_eq = PropertyReport::new("hmap-cons equation");
    conformance.values = values.len();
    cons_eq.values = values.len();

    let mut algs: Vec<(HAlgebra, bool)> = h_catalogue().into_iter().map(|a| (a, false)).collect();
    algs.push((sum_aux(), true));
    let run = |r: EvalResult, cps: bool| -> Result<Observed, EvalError> {
        if cps {
            observe(r.and_then(|f| f.apply(identity_continuation())))
        } else {
            observe(r)
        }
    };
    for v in &values {
        for (alg, cps) in &algs {
            let direct = run(eval_hfold_direct(schema, alg, v), *cps);
            let via = run(eval_hfold_via_nfold(schema, alg, v), *cps);
            conformance.record(v, shown.clone(), &alg.name, &direct, &via);
        }
    }
    let leaf = Value::Con(names.leaf.clone(), vec![]);
    leaf_eq.values = 1;
    for (alg, cps) in &algs {
        let lhs = run(eval_hfold_via_nfold(schema, alg, &leaf), *cps);
        let rhs = run((alg.leaf)(), *cps);
        leaf_eq.record(&leaf, shown.clone(), &alg.name, &lhs, &rhs);
    }

    // hmap' f (cons x xs) == cons (f x) (hmap' (hmap' f) xs), hmap' = nmap 1,
    // plus agreement of hmap' with the literal hmap.
    let fns: [(&str, MapFn); 2] = [("succ", succ_map()), ("tag", tag_map("T"))];
    for v in &values {
        for (fname, f) in &fns {
            let lhs = tree(eval_map(schema, std::slice::from_ref(f), &idx, v));
            let literal = tree(eval_hmap_direct(schema, &|y| f(y), v));
            cons_eq.record(v, shown.clone(), &format!("{fname} (literal hmap)"), &lhs, &literal);
            let Value::Con(c, args) = v else { continue };
            if *c != names.cons {
                continue;
            }
            let s = schema.clone();
            let (f2, idx2) = (f.clone(), idx.clone());
            let inner: MapFn = Rc::new(move |y| eval_map(&s, std::slice::from_ref(&f2), &idx2, y));
            let rhs = f(&args[0]).and_then(|fx| {
                let tail = eval_map(schema, &[inner], &idx, &args[1])?;
                Ok(Value::Con(names.cons.clone(), vec![fx, tail]))
            });
            cons_eq.record(v, shown.clone(), fname, &lhs, &tree(rhs));
        }
    }
    vec![conformance, leaf_eq, cons_eq]
}

/// A unary ordinary spine: `nil | cons : a -> D a -> D a`.
pub fn list_shape(schema: &GroupSchema) -> Option<(String, String)> {
    if !schema.is_unary_singleton() {
        return None;
    }
    let (nil, cons) = schema.spine_shape(0)?;
    let ctors = &schema.decls[0].ctors;
    (ctors[cons].args == [IndexExpr::Var(0), schema.decl_index(0)])
        .then(|| (ctors[nil].name.clone(), ctors[cons].name.clone()))
}

type Step = Rc<dyn Fn(RuntimeResult, RuntimeResult) -> EvalResult>;

/// Base value and step function pairs for the list comparison.
fn list_algebras() -> Vec<(&'static str, RuntimeResult, Step)> {
    vec![
        (
            "sum",
            RuntimeResult::Nat(0),
            Rc::new(|x, r| Ok(RuntimeResult::Nat(checked_add(x.as_nat()?, r.as_nat()?, "sum")?))),
        ),
        (
            "length",
            RuntimeResult::Nat(0),
            Rc::new(|_, r| Ok(RuntimeResult::Nat(checked_add(r.as_nat()?, 1, "length")?))),
        ),
        (
            "horner",
            RuntimeResult::Nat(0),
            Rc::new(|x, r| {
                let shifted = r.as_nat()?.checked_mul(3).ok_or(EvalError::Overflow("horner"))?;
                Ok(RuntimeResult::Nat(checked_add(shifted, x.as_nat()? + 1, "horner")?))
            }),
        ),
        (
            "collect",
            RuntimeResult::Tree(Value::con("end", vec![])),
            Rc::new(|x, r| {
                Ok(RuntimeResult::Tree(Value::con(
                    "step",
                    vec![x.into_value()?, r.into_value()?],
                )))
            }),
        ),
    ]
}

/// Hand-written right fold over a list value.
pub fn fold_list(v: &Value, nil: &str, cons: &str, base: &RuntimeResult, step: &Step) -> EvalResult {
    match v {
        Value::Con(c, args) if c == nil && args.is_empty() => Ok(base.clone()),
        Value::Con(c, args) if c == cons && args.len() == 2 => {
            let rest = fold_list(&args[1], nil, cons, base, step)?;
            step(RuntimeResult::from_value(args[0].clone()), rest)
        }
        other => Err(EvalError::Mismatch {
            expected: "a list".into(),
            found: other.to_string(),
        }),
    }
}

fn fold_list_agreement(
    schema: &GroupSchema,
    en: &mut Enumerator<'_>,
    cfg: &SuiteConfig,
    nil: &str,
    cons: &str,
) -> PropertyReport {
    let mut report = PropertyReport::new("foldList agreement");
    let idx = schema.decl_index(0);
    let shown = schema.source_type(&idx);
    let values = en.up_to(&idx, cfg.max_size);
    report.values = values.len();
    for (name, base, step) in list_algebras() {
        let mut methods = std::collections::BTreeMap::new();
        let b = base.clone();
        let on_nil: Method = Rc::new(move |_, _| Ok(b.clone()));
        let s = step.clone();
        let on_cons: Method = Rc::new(move |_, mut rs| {
            let r = rs.pop().expect("two results");
            let x = rs.pop().expect("two results");
            s(x, r)
        });
        methods.insert(nil.to_string(), on_nil);
        methods.insert(cons.to_string(), on_cons);
        let id: BaseFn = Rc::new(Ok);
        let alg = Algebra {
            name: name.into(),
            result_kind: ResultKind::Naturals,
            methods,
            bases: vec![id],
        };
        for v in &values {
            let derived = observe(Evaluator::new(schema).nfold(&alg, &idx, v));
            let oracle = observe(fold_list(v, nil, cons, &base, &step));
            report.record(v, shown.clone(), name, &derived, &oracle);
        }
    }
    report
}
