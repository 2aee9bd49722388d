mod common;

use common::*;
use nestfold_core::analysis::{schema_for, value_type};
use nestfold_core::syntax::{
    parse_program, parse_value_file, parse_value_literal, pretty_program, Payload, Program, TypeExpr, Value,
};
use nestfold_core::Pos;
use proptest::prelude::*;

fn v(name: &str) -> TypeExpr {
    TypeExpr::var(name)
}

fn app(head: &str, args: Vec<TypeExpr>) -> TypeExpr {
    TypeExpr::app(head, args)
}

fn strip_ty(t: &TypeExpr) -> TypeExpr {
    match t {
        TypeExpr::Var { name, .. } => v(name),
        TypeExpr::App { head, args, .. } => app(head, args.iter().map(strip_ty).collect()),
    }
}

/// Positions differ after pretty-printing; compare everything else.
fn strip(p: &Program) -> Program {
    let mut p = p.clone();
    p.source_name.clear();
    for d in &mut p.decls {
        d.pos = Pos::default();
        for c in &mut d.ctors {
            c.pos = Pos::default();
            c.args = c.args.iter().map(strip_ty).collect();
            c.result = strip_ty(&c.result);
        }
    }
    p
}

fn args_of(p: &Program, decl: &str) -> Vec<(String, Vec<TypeExpr>)> {
    p.decl(decl)
        .unwrap()
        .ctors
        .iter()
        .map(|c| (c.name.clone(), c.args.iter().map(strip_ty).collect()))
        .collect()
}

fn literal(program: &Program, ty: &str, text: &str) -> Result<Value, nestfold_core::Diagnostic> {
    let head = ty.split_whitespace().next().unwrap();
    let schema = schema_for(program, head).unwrap().unwrap();
    let words: Vec<TypeExpr> = ty.split_whitespace().skip(1).map(|w| app(w, vec![])).collect();
    let vt = value_type(&schema, &app(head, words)).unwrap();
    parse_value_literal(text, program, &schema, &vt)
}

fn leaf() -> Value {
    Value::con("leaf", vec![])
}

fn cons(x: Value, xs: Value) -> Value {
    Value::con("cons", vec![x, xs])
}

#[test]
fn bush_declaration() {
    let p = load("bush.ndt");
    let d = p.decl("Bush").unwrap();
    assert_eq!(d.params, ["a"]);
    assert_eq!(
        args_of(&p, "Bush"),
        vec![
            ("leaf".to_string(), vec![]),
            (
                "cons".to_string(),
                vec![v("a"), app("Bush", vec![app("Bush", vec![v("a")])])]
            ),
        ]
    );
}

#[test]
fn list_declaration() {
    let p = load("list.ndt");
    assert_eq!(
        args_of(&p, "List"),
        vec![
            ("nil".to_string(), vec![]),
            ("cons".to_string(), vec![v("a"), app("List", vec![v("a")])]),
        ]
    );
}

#[test]
fn mutual_declarations_in_any_order() {
    let p = load("bobdylan.ndt");
    let names: Vec<&str> = p.decls.iter().map(|d| d.name.as_str()).collect();
    assert_eq!(names, ["Bob", "Dylan"]);
    assert_eq!(p.decl("Dylan").unwrap().params, ["a", "b"]);
}

#[test]
fn function_argument_rejected() {
    let err = parse_program("data Bad (a : Set) where\n  mk : (Bad a -> a) -> Bad a\n", "bad").unwrap_err();
    assert!(
        err[0]
            .message
            .contains("function types not permitted in constructor arguments"),
        "{err:?}"
    );
    assert_eq!(err[0].pos.line, 2);
}

#[test]
fn duplicate_and_unknown_names() {
    let dup = "data T where\n  a : T\ndata T where\n  b : T\n";
    let err = parse_program(dup, "dup").unwrap_err();
    assert!(err.iter().any(|d| d.message.contains("duplicate")), "{err:?}");

    let unknown = "data T where\n  a : Tree -> T\n";
    let err = parse_program(unknown, "unknown").unwrap_err();
    assert!(
        err.iter().any(|d| d.message.contains("unknown type constructor Tree")),
        "{err:?}"
    );
}

#[test]
fn arity_mismatch_is_positioned() {
    let text = std::fs::read_to_string(testdata("bad-arity.ndt")).unwrap();
    let diags = match parse_program(&text, "bad-arity.ndt") {
        Err(ds) => ds,
        Ok(p) => nestfold_core::well_formed(&p),
    };
    assert_eq!(diags.len(), 1);
    assert!(diags[0].message.contains("arity"));
    assert_eq!((diags[0].pos.line, diags[0].pos.col), (3, 15));
}

#[test]
fn trailing_input_is_an_error() {
    assert!(parse_program("data T where\n  a : T\n)\n", "t").is_err());
}

#[test]
fn bush1_literal() {
    let p = load("bush.ndt");
    let text = "[ 4, [ 8, [ 5 ], [ [ 3 ] ] ], [ [ 7 ], [ ], [ [ [ 7 ] ] ] ], [ [ [ ], [ [ 0 ] ] ] ] ]";
    let got = literal(&p, "Bush Nat", text).unwrap();
    assert_eq!(got, bush1());
    let n = Value::nat;
    let list = |xs: Vec<Value>| xs.into_iter().rev().fold(leaf(), |acc, x| cons(x, acc));
    let expected = list(vec![
        n(4),
        list(vec![n(8), list(vec![n(5)]), list(vec![list(vec![n(3)])])]),
        list(vec![
            list(vec![n(7)]),
            list(vec![]),
            list(vec![list(vec![list(vec![n(7)])])]),
        ]),
        list(vec![list(vec![list(vec![]), list(vec![list(vec![n(0)])])])]),
    ]);
    assert_eq!(got, expected);
}

#[test]
fn empty_brackets_and_explicit_form() {
    let p = load("bush.ndt");
    assert_eq!(literal(&p, "Bush Nat", "[ ]").unwrap(), leaf());
    assert_eq!(
        literal(&p, "Bush Nat", "cons 4 leaf").unwrap(),
        cons(Value::nat(4), leaf())
    );
    assert_eq!(
        literal(&p, "Bush Atom", "[ 'x ]").unwrap(),
        cons(Value::Base(Payload::Atom("x".into())), leaf())
    );
}

#[test]
fn sugar_needs_leaf_cons_shape() {
    let p = load("bobdylan.ndt");
    assert!(literal(&p, "Bob Nat", "[ 1 ]").is_err());
    assert!(literal(&p, "Bob Nat", "robert 1").is_ok());
}

#[test]
fn value_file_bindings() {
    let p = load("bush.ndt");
    let bs = parse_value_file("x : Bush Nat = [ 1, 2 ]\ny = [ ]\n", &p).unwrap();
    assert_eq!(bs.len(), 2);
    assert_eq!(bs[0].name.as_deref(), Some("x"));
    assert_eq!(bs[1].value, leaf());
    assert!(parse_value_file("", &p).is_err());
}

#[test]
fn explicit_display_reparses() {
    let p = load("bush.ndt");
    let b = bush1();
    assert_eq!(literal(&p, "Bush Nat", &b.to_string()).unwrap(), b);
}

/// Random well-formed programs: `n` declarations `T0..`, each with a few
/// constructors whose arguments mention earlier or later declarations.
fn program_strategy() -> impl Strategy<Value = String> {
    (1usize..4).prop_flat_map(|n| {
        let arities = prop::collection::vec(0usize..3, n);
        arities.prop_flat_map(move |ar| {
            let ar2 = ar.clone();
            let decls = ar
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let ar = ar2.clone();
                    prop::collection::vec(prop::collection::vec(ty_strategy(ar, k), 0..3), 1..3)
                        .prop_map(move |ctors| render_decl(i, k, &ctors))
                })
                .collect::<Vec<_>>();
            decls.prop_map(|ds| ds.join("\n"))
        })
    })
}

fn ty_strategy(arities: Vec<usize>, params: usize) -> impl Strategy<Value = String> {
    // With no parameters the declaration itself is a nullary leaf, so the
    // selection below is never empty.
    let leaf: BoxedStrategy<String> = if params == 0 {
        let ar = arities.clone();
        prop::sample::select((0..ar.len()).filter(|&d| ar[d] == 0).collect::<Vec<_>>())
            .prop_map(|d| format!("T{d}"))
            .boxed()
    } else {
        (0..params).prop_map(|k| ((b'a' + k as u8) as char).to_string()).boxed()
    };
    let ar = arities.clone();
    leaf.prop_recursive(3, 12, 3, move |inner| {
        let ar = ar.clone();
        (0..ar.len()).prop_flat_map(move |d| {
            prop::collection::vec(inner.clone(), ar[d]).prop_map(move |args| {
                let mut s = format!("T{d}");
                for a in args {
                    if a.contains(' ') {
                        s.push_str(&format!(" ({a})"));
                    } else {
                        s.push_str(&format!(" {a}"));
                    }
                }
                s
            })
        })
    })
}

fn render_decl(i: usize, arity: usize, ctors: &[Vec<String>]) -> String {
    let params: String = (0..arity).map(|k| format!(" {}", (b'a' + k as u8) as char)).collect();
    let mut out = format!("data T{i}{params} where\n");
    for (j, args) in ctors.iter().enumerate() {
        out.push_str(&format!("  k{i}x{j} : "));
        for a in args {
            out.push_str(&format!("{a} -> "));
        }
        out.push_str(&format!("T{i}{params}\n"));
    }
    out
}

proptest! {
    #[test]
    fn pretty_print_round_trips(src in program_strategy()) {
        let p = parse_program(&src, "gen").unwrap();
        let again = parse_program(&pretty_program(&p), "gen").unwrap();
        prop_assert_eq!(strip(&p), strip(&again));
    }

    #[test]
    fn parsing_is_total(src in "\\PC{0,80}") {
        let _ = parse_program(&src, "fuzz");
    }

    #[test]
    fn parsing_mutations_is_total(cut in 0usize..120, junk in "[ ()\\->:a-zA-Z\n'0-9\\[\\],]{0,6}") {
        let text = std::fs::read_to_string(testdata("bobdylan.ndt")).unwrap();
        let cut = cut.min(text.len());
        let cut = (0..=cut).rev().find(|&c| text.is_char_boundary(c)).unwrap();
        let mutated = format!("{}{}{}", &text[..cut], junk, &text[cut..]);
        if let Ok(p) = parse_program(&mutated, "fuzz") {
            let _ = nestfold_core::well_formed(&p);
            let _ = nestfold_core::classify(&p);
        }
    }

    #[test]
    fn value_literals_are_total(src in "[\\[\\], 0-9a-z'()]{0,40}") {
        let p = load("bush.ndt");
        let _ = parse_value_file(&src, &p);
    }

    #[test]
    fn bracket_spine_length(xs in prop::collection::vec(0u64..100, 0..12)) {
        let p = load("list.ndt");
        let body: Vec<String> = xs.iter().map(u64::to_string).collect();
        let got = literal(&p, "List Nat", &format!("[ {} ]", body.join(", "))).unwrap();
        prop_assert_eq!(spine_len(&got) as usize, xs.len());
    }
}
