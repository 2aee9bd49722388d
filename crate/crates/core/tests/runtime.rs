mod common;

use common::*;
use nestfold_core::analysis::{BaseSort, IndexExpr};
use nestfold_core::runtime::algebra::{self, catalogue};
use nestfold_core::runtime::{
    enumerate_indices, enumerate_values, eval_map, eval_nfold, typecheck_value, Evaluator, MapFn,
};
use nestfold_core::syntax::{Payload, Value};
use proptest::prelude::*;
use std::rc::Rc;

fn nats(n: u64) -> Vec<Payload> {
    (0..n).map(Payload::Nat).collect()
}

/// Independent count of Bush values of exactly `size` constructor nodes at
/// `BushC^depth varA` over `bases` payloads: leaf is one node, and
/// `cons x xs` splits the rest between depth-1 and depth+1.
fn bush_count(depth: usize, size: usize, bases: u64) -> u64 {
    if depth == 0 {
        return if size == 0 { bases } else { 0 };
    }
    if size == 0 {
        return 0;
    }
    let mut n = u64::from(size == 1);
    for a in 0..size {
        n += bush_count(depth - 1, a, bases) * bush_count(depth + 1, size - 1 - a, bases);
    }
    n
}

#[test]
fn smallest_bushes() {
    let s = schema("bush.ndt");
    let got = enumerate_values(&s, &IndexExpr::iterate(0, 1), &[vec![Payload::Atom("*".into())]], 2);
    let leaf = Value::con("leaf", vec![]);
    assert_eq!(got, [leaf.clone(), Value::con("cons", vec![Value::atom("*"), leaf])]);
    assert!(enumerate_values(&s, &IndexExpr::iterate(0, 1), &[nats(3)], 0).is_empty());
    assert_eq!(
        enumerate_values(&s, &IndexExpr::Var(0), &[nats(2)], 5),
        [Value::nat(0), Value::nat(1)]
    );
}

#[test]
fn bush_counts_match_recurrence() {
    // Frozen from bush_count: sizes 1..=8 at depth 1 and 2, bases {0,1,2}.
    const DEPTH1: [u64; 8] = [1, 3, 0, 3, 9, 3, 18, 33];
    const DEPTH2: [u64; 8] = [1, 0, 1, 3, 1, 6, 11, 15];
    for (k, (&a, &b)) in DEPTH1.iter().zip(&DEPTH2).enumerate() {
        assert_eq!(bush_count(1, k + 1, 3), a);
        assert_eq!(bush_count(2, k + 1, 3), b);
    }
    let s = schema("bush.ndt");
    for depth in 1..=3 {
        let values = enumerate_values(&s, &IndexExpr::iterate(0, depth), &[nats(3)], 8);
        for size in 1..=8 {
            let n = values.iter().filter(|v| v.size() == size).count() as u64;
            assert_eq!(n, bush_count(depth, size, 3), "depth {depth} size {size}");
        }
    }
}

#[test]
fn bushes_up_to_size_seven() {
    // 37 + 23 + 11 values at depths 1..=3.
    let s = schema("bush.ndt");
    let total: usize = (1..=3)
        .map(|d| enumerate_values(&s, &IndexExpr::iterate(0, d), &[nats(3)], 7).len())
        .sum();
    assert_eq!(total, 71);
    assert_eq!(
        (1..=3)
            .map(|d| (1..=7).map(|k| bush_count(d, k, 3)).sum::<u64>())
            .sum::<u64>(),
        71
    );
}

#[test]
fn list_counts() {
    let s = schema("list.ndt");
    let values = enumerate_values(&s, &s.decl_index(0), &[nats(3)], 7);
    assert_eq!(values.len(), (0..=6).map(|k| 3usize.pow(k)).sum::<usize>());
}

#[test]
fn index_enumeration() {
    let bush = schema("bush.ndt");
    assert_eq!(
        enumerate_indices(&bush, 3),
        (0..=3).map(|d| IndexExpr::iterate(0, d)).collect::<Vec<_>>()
    );
    let bd = schema("bobdylan.ndt");
    // varA, varB; BobC x2; DylanC x4
    assert_eq!(enumerate_indices(&bd, 1).len(), 8);
}

#[test]
fn typecheck_examples() {
    let s = schema("bush.ndt");
    let at = IndexExpr::iterate(0, 1);
    let nat = [BaseSort::Nat];
    assert!(typecheck_value(&s, &at, &nat, &bush1()).is_empty());
    let d = typecheck_value(&s, &at, &nat, &Value::nat(4));
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("mismatch"));
    assert!(!typecheck_value(&s, &IndexExpr::Var(0), &nat, &Value::con("leaf", vec![])).is_empty());
    let atoms = [BaseSort::Atom];
    assert!(!typecheck_value(&s, &at, &atoms, &bush1()).is_empty());
}

#[test]
fn map_at_depth_zero_applies_function() {
    let s = schema("bush.ndt");
    let double: MapFn = Rc::new(|v: &Value| match v {
        Value::Base(Payload::Nat(n)) => Ok(Value::nat(2 * n)),
        other => Ok(other.clone()),
    });
    assert_eq!(
        eval_map(&s, &[double], &IndexExpr::Var(0), &Value::nat(21)).unwrap(),
        Value::nat(42)
    );
}

#[test]
fn list_sum_via_nfold() {
    let s = schema("list.ndt");
    let v = Value::con(
        "cons",
        vec![
            Value::nat(2),
            Value::con("cons", vec![Value::nat(5), Value::con("nil", vec![])]),
        ],
    );
    let r = eval_nfold(&s, &algebra::sum(&s), &s.decl_index(0), &v).unwrap();
    assert_eq!(r.as_nat().unwrap(), 7);
}

proptest! {
    #[test]
    fn enumeration_is_sound_and_ordered(max in 1usize..7, depth in 1usize..4) {
        let s = schema("bush.ndt");
        let idx = IndexExpr::iterate(0, depth);
        let values = enumerate_values(&s, &idx, &[nats(2)], max);
        for w in values.windows(2) {
            prop_assert!(w[0].size() <= w[1].size());
            prop_assert!(w[0] != w[1]);
        }
        for v in &values {
            prop_assert!(v.size() <= max);
            prop_assert!(typecheck_value(&s, &idx, &[BaseSort::Nat], v).is_empty());
        }
    }

    #[test]
    fn evaluator_steps_bounded_by_size(k in 0usize..40, file in prop::sample::select(vec!["bush.ndt", "bobdylan.ndt", "list.ndt"])) {
        let s = schema(file);
        let idx = s.decl_index(0);
        let values = enumerate_values(&s, &idx, &vec![nats(2); s.var_count()], 5);
        prop_assume!(!values.is_empty());
        let v = &values[k % values.len()];
        for alg in catalogue(&s) {
            let ev = Evaluator::new(&s);
            ev.nfold(&alg, &idx, v).unwrap();
            prop_assert!(ev.steps() <= v.size());
        }
    }
}
