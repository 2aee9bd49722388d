mod common;

use common::*;
use nestfold_core::analysis::{
    classify, index_universe, type_to_index, well_formed, Classification, GroupSchema, IndexExpr,
};
use nestfold_core::syntax::{parse_program, Program, TypeExpr};
use proptest::prelude::*;

fn ty(src: &str) -> TypeExpr {
    // Parse through a throwaway constructor so the test reads like source.
    let text = format!(
        "data Bob a where\n  robert : a -> Bob a\n  probe : {src} -> Bob a\n\
         data Dylan a b where\n  duluth : Bob a -> Bob b -> Dylan a b\n  minnesota : Dylan (Bob a) (Bob b) -> Dylan a b\n"
    );
    let p = parse_program(&text, "probe").unwrap();
    p.decl("Bob").unwrap().ctor("probe").unwrap().args[0].clone()
}

fn show(p: &Program, group: &str, e: &IndexExpr) -> String {
    let g = classify(p).into_iter().find(|g| g.contains(group)).unwrap();
    e.display(&index_universe(&g)).to_string()
}

#[test]
fn classification_examples() {
    let list = classify(&load("list.ndt"));
    assert_eq!(list.len(), 1);
    assert_eq!(list[0].decls, ["List"]);
    assert_eq!(list[0].classification, Classification::Ordinary);

    let bush = classify(&load("bush.ndt"));
    assert_eq!(bush[0].decls, ["Bush"]);
    assert_eq!(bush[0].classification, Classification::Nested);

    let bd = classify(&load("bobdylan.ndt"));
    assert_eq!(bd.len(), 1);
    assert_eq!(bd[0].decls, ["Bob", "Dylan"]);
    assert_eq!(bd[0].classification, Classification::Nested);
    assert_eq!(bd[0].base_var_count, 2);
}

#[test]
fn dependencies_come_first() {
    let src = "data Rose a where\n  node : a -> List (Rose a) -> Rose a\n\
               data List a where\n  nil : List a\n  cons : a -> List a -> List a\n";
    let p = parse_program(src, "rose").unwrap();
    let names: Vec<Vec<String>> = classify(&p).into_iter().map(|g| g.decls).collect();
    assert_eq!(names, [vec!["List".to_string()], vec!["Rose".to_string()]]);
}

#[test]
fn cross_group_nesting_is_rejected() {
    let src = "data Rose a where\n  node : a -> List (Rose a) -> Rose a\n\
               data List a where\n  nil : List a\n  cons : a -> List a -> List a\n";
    let p = parse_program(src, "rose").unwrap();
    let g = classify(&p).into_iter().find(|g| g.contains("Rose")).unwrap();
    let err = GroupSchema::build(&p, &g).unwrap_err();
    assert!(
        err.to_string().contains("cross-group nesting not supported in v1"),
        "{err}"
    );
}

#[test]
fn index_universes() {
    let spec = |f: &str| index_universe(&classify(&load(f))[0]);
    let bush = spec("bush.ndt");
    assert_eq!(bush.name, "BushIndex");
    assert_eq!(bush.var_ctors, ["varA"]);
    assert_eq!(bush.app_ctors, [("BushC".to_string(), 1)]);

    let bd = spec("bobdylan.ndt");
    assert_eq!(bd.var_ctors, ["varA", "varB"]);
    assert_eq!(bd.app_ctors, [("BobC".to_string(), 1), ("DylanC".to_string(), 2)]);

    let list = spec("list.ndt");
    assert_eq!(list.var_ctors, ["varA"]);
    assert_eq!(list.app_ctors, [("ListC".to_string(), 1)]);
}

#[test]
fn type_to_index_examples() {
    let p = load("bobdylan.ndt");
    let g = &classify(&p)[0];
    let params = vec!["a".to_string()];
    let zim = type_to_index(&p, g, &params, &ty("Dylan (Bob (Dylan a (Bob a))) (Bob a)")).unwrap();
    assert_eq!(
        show(&p, "Bob", &zim),
        "DylanC (BobC (DylanC varA (BobC varA))) (BobC varA)"
    );
    let a = type_to_index(&p, g, &params, &ty("a")).unwrap();
    assert_eq!(a, IndexExpr::Var(0));

    let bush = load("bush.ndt");
    let bg = &classify(&bush)[0];
    let c = &bush.decl("Bush").unwrap().ctor("cons").unwrap().args[1];
    let e = type_to_index(&bush, bg, &params, c).unwrap();
    assert_eq!(show(&bush, "Bush", &e), "BushC (BushC varA)");
    assert_eq!(e.unary_depth(), Some(2));
}

#[test]
fn well_formed_examples() {
    assert!(well_formed(&load("bush.ndt")).is_empty());
    assert!(well_formed(&load("bobdylan.ndt")).is_empty());

    let bad_result = "data Bush a where\n  leaf : Bush (Bush a)\n";
    let d = well_formed(&parse_program(bad_result, "r").unwrap());
    assert_eq!(d.len(), 1);
    assert!(d[0]
        .message
        .starts_with("constructor result must be the declared head applied to its parameters"));
    assert_eq!(d[0].pos.line, 2);

    let unknown = "data Bush a where\n  leaf : Tree a -> Bush a\n";
    let err = parse_program(unknown, "u").unwrap_err();
    assert!(err[0].message.contains("unknown type constructor Tree"));
}

#[test]
fn well_formed_keeps_going() {
    let src = "data T a where\n  x : b -> T a\n  y : T (T a)\n  x : T a\n";
    let d = well_formed(&parse_program(src, "t").unwrap());
    assert_eq!(d.len(), 3, "{d:?}");
}

#[test]
fn classify_is_idempotent_and_order_independent() {
    let p = load("bobdylan.ndt");
    assert_eq!(classify(&p), classify(&p));
    let mut swapped = p.clone();
    swapped.decls.reverse();
    let g = &classify(&swapped)[0];
    assert_eq!(g.classification, Classification::Nested);
    assert_eq!(g.base_var_count, 2);
    let mut names = g.decls.clone();
    names.sort();
    assert_eq!(names, ["Bob", "Dylan"]);
}

fn bush_type(k: usize) -> TypeExpr {
    (0..k).fold(TypeExpr::var("a"), |acc, _| TypeExpr::app("Bush", vec![acc]))
}

fn index_expr(depth: u32) -> impl Strategy<Value = IndexExpr> {
    let leaf = (0usize..2).prop_map(IndexExpr::Var);
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| IndexExpr::App(0, vec![x])),
            (inner.clone(), inner).prop_map(|(x, y)| IndexExpr::App(1, vec![x, y])),
        ]
    })
}

fn to_type(e: &IndexExpr) -> TypeExpr {
    match e {
        IndexExpr::Var(k) => TypeExpr::var(["a", "b"][*k]),
        IndexExpr::App(d, xs) => TypeExpr::app(["Bob", "Dylan"][*d], xs.iter().map(to_type).collect()),
    }
}

proptest! {
    #[test]
    fn bush_index_is_nat(k in 0usize..40) {
        let p = load("bush.ndt");
        let g = &classify(&p)[0];
        let e = type_to_index(&p, g, &["a".to_string()], &bush_type(k)).unwrap();
        prop_assert_eq!(e.unary_depth(), Some(k));
        prop_assert_eq!(IndexExpr::iterate(0, k), e);
    }

    #[test]
    fn type_to_index_inverts_rendering(e in index_expr(4)) {
        let p = load("bobdylan.ndt");
        let g = &classify(&p)[0];
        let params = vec!["a".to_string(), "b".to_string()];
        prop_assert_eq!(type_to_index(&p, g, &params, &to_type(&e)).unwrap(), e);
    }

    #[test]
    fn type_to_index_is_injective(x in index_expr(3), y in index_expr(3)) {
        let p = load("bobdylan.ndt");
        let g = &classify(&p)[0];
        let params = vec!["a".to_string(), "b".to_string()];
        let ix = type_to_index(&p, g, &params, &to_type(&x)).unwrap();
        let iy = type_to_index(&p, g, &params, &to_type(&y)).unwrap();
        prop_assert_eq!(x == y, ix == iy);
    }
}
