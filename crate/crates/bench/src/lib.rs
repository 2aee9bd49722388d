//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use nestfold_core::analysis::{classify, GroupSchema};
use nestfold_core::syntax::{parse_program, parse_value_file, Program, Value};

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata")
        .join(name)
}

pub fn program(name: &str) -> Program {
    let text = std::fs::read_to_string(testdata(name)).expect("testdata file");
    parse_program(&text, name).expect("valid declarations")
}

/// The last group of a testdata file.
pub fn schema(name: &str) -> GroupSchema {
    let p = program(name);
    let g = classify(&p).pop().expect("one group");
    GroupSchema::build(&p, &g).expect("schema")
}

pub fn bush1() -> Value {
    let p = program("bush.ndt");
    let text = std::fs::read_to_string(testdata("bush1.ndv")).expect("bush1.ndv");
    parse_value_file(&text, &p).expect("bush1").remove(0).value
}
