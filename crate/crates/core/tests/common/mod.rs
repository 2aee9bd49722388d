#![allow(dead_code)]

use std::path::PathBuf;

use nestfold_core::analysis::{classify, GroupSchema};
use nestfold_core::syntax::{parse_program, parse_value_file, Payload, Program, Value};

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata")
        .join(name)
}

pub fn load(name: &str) -> Program {
    let text = std::fs::read_to_string(testdata(name)).unwrap();
    parse_program(&text, name).unwrap()
}

pub fn schema(name: &str) -> GroupSchema {
    let p = load(name);
    let g = classify(&p).into_iter().last().unwrap();
    GroupSchema::build(&p, &g).unwrap()
}

pub fn bush1() -> Value {
    let p = load("bush.ndt");
    let text = std::fs::read_to_string(testdata("bush1.ndv")).unwrap();
    parse_value_file(&text, &p).unwrap().remove(0).value
}

/// Oracle: every natural anywhere in the tree, added, ignoring shape.
pub fn flatten_sum(v: &Value) -> u64 {
    match v {
        Value::Base(Payload::Nat(n)) => *n,
        Value::Base(Payload::Atom(_)) => 0,
        Value::Con(_, args) => args.iter().map(flatten_sum).sum(),
    }
}

/// Oracle: number of `cons` nodes along the last-argument spine.
pub fn spine_len(v: &Value) -> u64 {
    match v {
        Value::Con(_, args) if !args.is_empty() => 1 + spine_len(args.last().unwrap()),
        _ => 0,
    }
}

/// Oracle: bump every natural payload, keeping the shape.
pub fn bump_all(v: &Value) -> Value {
    match v {
        Value::Base(Payload::Nat(n)) => Value::nat(n + 1),
        Value::Base(p) => Value::Base(p.clone()),
        Value::Con(c, args) => Value::Con(c.clone(), args.iter().map(bump_all).collect()),
    }
}
