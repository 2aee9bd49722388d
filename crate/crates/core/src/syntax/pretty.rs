use std::fmt::Write;

use super::ast::{Program, TypeDecl};

/// Renders a program back to the declaration DSL.
pub fn pretty_program(program: &Program) -> String {
    let mut out = String::new();
    for (i, d) in program.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        pretty_decl(&mut out, d);
    }
    out
}

pub(crate) fn pretty_decl(out: &mut String, d: &TypeDecl) {
    out.push_str("data ");
    out.push_str(&d.name);
    for p in &d.params {
        out.push(' ');
        out.push_str(p);
    }
    out.push_str(" where\n");
    for c in &d.ctors {
        let _ = write!(out, "  {} : ", c.name);
        for a in &c.args {
            // Arguments never contain arrows, so no parentheses are needed.
            let _ = write!(out, "{a} -> ");
        }
        let _ = writeln!(out, "{}", c.result);
    }
}
