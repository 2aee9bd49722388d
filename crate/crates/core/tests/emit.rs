mod common;

use std::path::PathBuf;

use common::*;
use nestfold_core::analysis::{classify, GroupSchema};
use nestfold_core::derive::{derive, DeriveError, DeriveOptions, Deriver};
use nestfold_core::emit::{agda_check, emit_agda, EmitModule};
use nestfold_core::syntax::parse_program;
use proptest::prelude::*;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../golden")
        .join(name)
}

fn emit(file: &str, nat_index: bool) -> String {
    let d = derive(&schema(file), DeriveOptions { nat_index }).unwrap();
    emit_agda(&EmitModule::from_derivation(&d, file)).unwrap()
}

#[test]
fn bush_matches_golden() {
    let want = std::fs::read_to_string(golden("Bush.agda")).unwrap();
    assert_eq!(emit("bush.ndt", true), want);
}

#[test]
fn bob_dylan_matches_golden() {
    let want = std::fs::read_to_string(golden("BobDylan.agda")).unwrap();
    let got = emit("bobdylan.ndt", false);
    assert_eq!(got, want);
    assert!(got.contains("-- Skipped: PS bridge not derivable for this shape: BobDylan is a mutual group."));
}

#[test]
fn bush_nfold_lines() {
    let text = emit("bush.ndt", true);
    for line in [
        "nfold : (p : Nat -> Set) ->",
        "nfold p l c a z zero x = z x",
        "nfold p l c a z (succ n) leaf = l n",
        "  c n (nfold p l c a z n x) (nfold p l c a z (succ (succ n)) xs)",
        "NTimes (succ n) b a = b (NTimes n b a)",
        "PS p A = (n : Nat) -> (A -> p n) -> p (succ n)",
        "liftNTimes b c m zero f a x = x",
    ] {
        assert!(text.lines().any(|l| l == line), "missing `{line}`");
    }
}

#[test]
fn emission_is_deterministic_and_ascii() {
    for (file, nat) in [
        ("bush.ndt", true),
        ("bush.ndt", false),
        ("bobdylan.ndt", false),
        ("list.ndt", false),
    ] {
        let a = emit(file, nat);
        assert_eq!(a, emit(file, nat));
        assert!(a.is_ascii());
    }
}

#[test]
fn empty_module_is_header_and_preamble() {
    let m = EmitModule {
        name: "Empty".into(),
        header: vec!["-- Derived by nestfold from empty.ndt.".into()],
        imports: vec!["{-# OPTIONS --safe #-}".into()],
        defs: vec![],
    };
    assert_eq!(
        emit_agda(&m).unwrap(),
        "-- Derived by nestfold from empty.ndt.\n{-# OPTIONS --safe #-}\n\nmodule Empty where\n"
    );
}

/// Cuts the `data <name> ...` block out of emitted text.
fn data_block(text: &str, name: &str) -> String {
    let start = text.find(&format!("data {name} ")).unwrap();
    let rest = &text[start..];
    let end = rest.find("\n\n").unwrap_or(rest.len());
    rest[..end].to_string() + "\n"
}

#[test]
fn index_declaration_round_trips() {
    for (file, index) in [
        ("bobdylan.ndt", "BobDylanIndex"),
        ("bush.ndt", "BushIndex"),
        ("list.ndt", "ListIndex"),
    ] {
        let s = schema(file);
        let block = data_block(&emit(file, false), index);
        let p = parse_program(&block, "index").unwrap_or_else(|e| panic!("{block}\n{e:?}"));
        let d = p.decl(index).unwrap();
        assert!(d.params.is_empty());
        let names: Vec<&str> = d.ctors.iter().map(|c| c.name.as_str()).collect();
        let mut expected: Vec<&str> = s.spec.var_ctors.iter().map(String::as_str).collect();
        expected.extend(s.spec.app_ctors.iter().map(|(c, _)| c.as_str()));
        assert_eq!(names, expected);
        for (c, (_, arity)) in d.ctors[s.spec.var_ctors.len()..].iter().zip(&s.spec.app_ctors) {
            assert_eq!(c.args.len(), *arity);
        }
    }
}

#[test]
fn certificate_comment_only_on_recursive_definitions() {
    let text = emit("bush.ndt", true);
    let lines: Vec<&str> = text.lines().collect();
    let certified: Vec<&str> = lines
        .windows(2)
        .filter(|w| w[0].starts_with("-- Structural recursion"))
        .map(|w| w[1].split(" :").next().unwrap())
        .collect();
    assert_eq!(certified, ["NTimes", "nfold", "ind", "PS-to-P", "liftNTimes"]);
}

#[test]
fn carrier_avoids_bound_names() {
    let src = "data Xs a where\n  nil : Xs a\n  cons : a -> Xs (Xs a) -> Xs a\n";
    let p = parse_program(src, "xs").unwrap();
    let s = GroupSchema::build(&p, &classify(&p)[0]).unwrap();
    let hfold = &Deriver::new(&s, DeriveOptions::default()).hfolds()[0];
    assert_eq!(hfold.name, "hfold");
    let text = emit_agda(&EmitModule::from_derivation(
        &derive(&s, DeriveOptions::default()).unwrap(),
        "xs",
    ))
    .unwrap();
    assert!(text.contains("hfold : (xs' : Set -> Set) ->"), "{text}");
}

/// Golden files type-check when an Agda executable is available.
#[test]
fn golden_files_typecheck_with_agda() {
    for name in ["Bush.agda", "BobDylan.agda"] {
        match agda_check(&golden(name)) {
            None => eprintln!("agda not found; skipping {name}"),
            Some(r) => assert_eq!(r, Ok(()), "{name}"),
        }
    }
}

const DECL_NAMES: &[&str] = &["T", "I", "Xs", "P", "F", "A", "BaseA", "Nat", "Bush", "Expr", "NTimes"];
const CTOR_NAMES: &[&str] = &[
    "x", "f", "p", "i", "leaf", "cons", "mk", "expr", "zero", "nil", "on", "xs", "a", "b", "l",
];

fn unary_program() -> impl Strategy<Value = String> {
    (
        prop::sample::select(DECL_NAMES),
        prop::sample::subsequence(CTOR_NAMES, 1..4),
        prop::collection::vec(0usize..4, 4),
    )
        .prop_map(|(d, ctors, shapes)| {
            let mut out = format!("data {d} a where\n");
            for (c, shape) in ctors.iter().zip(shapes) {
                let arg = match shape {
                    0 => String::new(),
                    1 => "a -> ".to_string(),
                    2 => format!("a -> {d} ({d} a) -> "),
                    _ => format!("{d} a -> "),
                };
                out.push_str(&format!("  {c} : {arg}{d} a\n"));
            }
            out
        })
}

proptest! {
    #[test]
    fn derived_modules_are_well_scoped(src in unary_program(), nat in any::<bool>()) {
        let p = parse_program(&src, "gen").unwrap();
        if !nestfold_core::well_formed(&p).is_empty() {
            return Ok(());
        }
        let s = GroupSchema::build(&p, &classify(&p)[0]).unwrap();
        match derive(&s, DeriveOptions { nat_index: nat }) {
            Ok(d) => {
                let text = emit_agda(&EmitModule::from_derivation(&d, "gen"));
                prop_assert!(text.is_ok(), "{:?}\n{}", text, src);
            }
            Err(DeriveError::NameClash { .. }) => {}
            Err(e) => prop_assert!(false, "{e}\n{src}"),
        }
    }
}
