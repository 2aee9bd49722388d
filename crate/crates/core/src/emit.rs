//! Agda rendering of derived definitions.
//!
//! Output is ASCII only: `\` for lambda, `forall` for the quantifier, `->`
//! for arrows. Clauses that do not fit on one line break after `=` and wrap
//! at top-level application arguments.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use thiserror::Error;

use crate::derive::{Binder, Body, DataDecl, Derivation, DerivedDef, Pattern, Term};

const CLAUSE_WIDTH: usize = 80;
const WRAP_WIDTH: usize = 72;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmitModule {
    pub name: String,
    /// Comment lines above the module header.
    pub header: Vec<String>,
    /// Fixed lines between the header and the module declaration.
    pub imports: Vec<String>,
    pub defs: Vec<DerivedDef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("`{def}` mentions unbound variable `{var}`")]
    Unscoped { def: String, var: String },
    #[error("`{def}`: layout covers {layout} binders, signature has {binders}")]
    Layout { def: String, layout: usize, binders: usize },
    #[error("`{0}` renders non-ASCII text")]
    NonAscii(String),
}

impl EmitModule {
    pub fn from_derivation(d: &Derivation, source_name: &str) -> EmitModule {
        let mut header = vec![format!("-- Derived by nestfold from {source_name}.")];
        header.extend(d.notes.iter().map(|n| format!("-- {n}")));
        header.extend(d.skipped.iter().map(|(_, why)| format!("-- Skipped: {why}.")));
        EmitModule {
            name: d.module.clone(),
            header,
            imports: vec!["{-# OPTIONS --safe #-}".to_string()],
            defs: d.defs.clone(),
        }
    }
}

pub fn emit_agda(m: &EmitModule) -> Result<String, EmitError> {
    let mut out = String::new();
    for h in &m.header {
        out.push_str(h);
        out.push('\n');
    }
    for i in &m.imports {
        out.push_str(i);
        out.push('\n');
    }
    out.push_str(&format!("\nmodule {} where\n", m.name));
    let mut k = 0;
    while k < m.defs.len() {
        let def = &m.defs[k];
        check_scope(def)?;
        match &def.body {
            Body::Data(d) if d.forward => {
                let mut run = vec![(def, d)];
                while let Some(next) = m.defs.get(k + run.len()) {
                    match &next.body {
                        Body::Data(nd) if nd.forward => run.push((next, nd)),
                        _ => break,
                    }
                }
                out.push('\n');
                for (def, d) in &run {
                    out.push_str(&data_head(&def.name, d));
                    out.push('\n');
                }
                for (def, d) in &run {
                    check_scope(def)?;
                    out.push('\n');
                    out.push_str(&data_body(&def.name, d, true));
                }
                k += run.len();
            }
            Body::Data(d) => {
                out.push('\n');
                out.push_str(&data_body(&def.name, d, false));
                k += 1;
            }
            Body::Clauses(_) => {
                out.push('\n');
                out.push_str(&function(def)?);
                k += 1;
            }
        }
    }
    if !out.is_ascii() {
        return Err(EmitError::NonAscii(m.name.clone()));
    }
    Ok(out)
}

fn params(d: &DataDecl) -> String {
    let mut out = String::new();
    let mut k = 0;
    while k < d.params.len() {
        let kind = &d.params[k].1;
        let mut names = vec![d.params[k].0.as_str()];
        while k + names.len() < d.params.len() && d.params[k + names.len()].1 == *kind {
            names.push(&d.params[k + names.len()].0);
        }
        out.push_str(&format!(" ({} : {})", names.join(" "), render(kind, Prec::Top)));
        k += names.len();
    }
    out
}

fn data_head(name: &str, d: &DataDecl) -> String {
    format!("data {name}{} : {}", params(d), render(&d.sort, Prec::Top))
}

fn data_body(name: &str, d: &DataDecl, forward: bool) -> String {
    let mut out = if forward {
        let ps: String = d.params.iter().map(|(p, _)| format!(" {p}")).collect();
        format!("data {name}{ps} where\n")
    } else {
        format!("{} where\n", data_head(name, d))
    };
    for (c, ty) in &d.ctors {
        out.push_str(&format!("  {c} : {}\n", render(ty, Prec::Top)));
    }
    if let Some(b) = &d.builtin {
        out.push_str(&format!("{{-# BUILTIN {b} {name} #-}}\n"));
    }
    out
}

fn function(def: &DerivedDef) -> Result<String, EmitError> {
    let mut out = String::new();
    if let Some(k) = def.decreasing.filter(|_| !def.recursive_calls().is_empty()) {
        let k = k + 1;
        out.push_str(&format!(
            "-- Structural recursion: each recursive call takes a strict subterm of argument {k}.\n"
        ));
    }
    out.push_str(&signature(def)?);
    for c in def.clauses() {
        let mut lhs = def.name.clone();
        for p in &c.patterns {
            lhs.push(' ');
            lhs.push_str(&pattern(p));
        }
        let rhs = render(&c.rhs, Prec::Top);
        if lhs.len() + 3 + rhs.len() <= CLAUSE_WIDTH {
            out.push_str(&format!("{lhs} = {rhs}\n"));
        } else {
            out.push_str(&format!("{lhs} =\n{}\n", wrap(&c.rhs)));
        }
    }
    Ok(out)
}

fn signature(def: &DerivedDef) -> Result<String, EmitError> {
    let (binders, result) = def.signature.spine();
    let total: usize = def.layout.iter().sum();
    if total != binders.len() {
        return Err(EmitError::Layout {
            def: def.name.clone(),
            layout: total,
            binders: binders.len(),
        });
    }
    let comps: Vec<String> = binders.iter().map(|b| binder(b)).collect();
    let indent = " ".repeat(def.name.len() + 3);
    let mut out = format!("{} : ", def.name);
    let mut at = 0;
    for (n, count) in def.layout.iter().enumerate() {
        if n > 0 {
            out.push_str(&indent);
        }
        let mut line: Vec<&str> = comps[at..at + count].iter().map(String::as_str).collect();
        at += count;
        let last = n + 1 == def.layout.len();
        let res;
        if last {
            res = render(result, Prec::Arrow);
            line.push(&res);
            out.push_str(&line.join(" -> "));
        } else {
            out.push_str(&line.join(" -> "));
            out.push_str(" ->");
        }
        out.push('\n');
    }
    if def.layout.is_empty() {
        out.push_str(&render(result, Prec::Top));
        out.push('\n');
    }
    Ok(out)
}

/// Greedy wrapping of a clause body: head and first argument on the first
/// line, further arguments while they fit.
fn wrap(rhs: &Term) -> String {
    let (head, args) = rhs.head_args();
    if args.is_empty() {
        return format!("  {}", render(rhs, Prec::Top));
    }
    let mut lines = vec![format!("  {} {}", render(head, Prec::Arg), render(&args[0], Prec::Arg))];
    for a in &args[1..] {
        let s = render(a, Prec::Arg);
        let cur = lines.last_mut().unwrap();
        if cur.len() + 1 + s.len() <= WRAP_WIDTH {
            cur.push(' ');
            cur.push_str(&s);
        } else {
            lines.push(format!("    {s}"));
        }
    }
    lines.join("\n")
}

fn pattern(p: &Pattern) -> String {
    match p {
        Pattern::Var(v) => v.clone(),
        Pattern::Implicit(v) => format!("{{{v}}}"),
        Pattern::Con(c, args) if args.is_empty() => c.clone(),
        Pattern::Con(c, args) => {
            let inner: Vec<String> = args.iter().map(pattern).collect();
            format!("({c} {})", inner.join(" "))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Arrow,
    Arg,
}

fn binder(b: &Binder) -> String {
    match b {
        Binder::Named { names, ty, implicit } => {
            let inner = format!("{} : {}", names.join(" "), render(ty, Prec::Top));
            if *implicit {
                format!("{{{inner}}}")
            } else {
                format!("({inner})")
            }
        }
        Binder::Forall { names, ty: None, .. } => format!("forall {}", names.join(" ")),
        Binder::Forall {
            names,
            ty: Some(ty),
            implicit,
        } => {
            let inner = format!("{} : {}", names.join(" "), render(ty, Prec::Top));
            if *implicit {
                format!("forall {{{inner}}}")
            } else {
                format!("forall ({inner})")
            }
        }
        Binder::Anon(ty) => render(ty, Prec::Arrow),
    }
}

fn render(t: &Term, prec: Prec) -> String {
    match t {
        Term::Var(s) | Term::Ref(s) | Term::Con(s) => s.clone(),
        Term::Set => "Set".into(),
        Term::Nat(n) => n.to_string(),
        Term::App(h, xs) => {
            let mut s = render(h, Prec::Arg);
            for x in xs {
                s.push(' ');
                s.push_str(&render(x, Prec::Arg));
            }
            if prec == Prec::Arg {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Lam(names, body) => {
            let s = format!("\\ {} -> {}", names.join(" "), render(body, Prec::Top));
            if prec >= Prec::Arrow {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Pi(..) => {
            let (bs, res) = t.spine();
            let mut parts: Vec<String> = bs.iter().map(|b| binder(b)).collect();
            parts.push(render(res, Prec::Arrow));
            let s = parts.join(" -> ");
            if prec >= Prec::Arrow {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

fn check_scope(def: &DerivedDef) -> Result<(), EmitError> {
    let unscoped = |var: &str| EmitError::Unscoped {
        def: def.name.clone(),
        var: var.to_string(),
    };
    match &def.body {
        Body::Data(d) => {
            let bound: BTreeSet<String> = d.params.iter().map(|(p, _)| p.clone()).collect();
            for (_, ty) in &d.ctors {
                if let Some(v) = ty.free_vars().difference(&bound).next() {
                    return Err(unscoped(v));
                }
            }
        }
        Body::Clauses(cs) => {
            if let Some(v) = def.signature.free_vars().into_iter().next() {
                return Err(unscoped(&v));
            }
            for c in cs {
                let mut bound = Vec::new();
                for p in &c.patterns {
                    p.binds(&mut bound);
                }
                if let Some(v) = c.rhs.free_vars().into_iter().find(|v| !bound.contains(v)) {
                    return Err(unscoped(&v));
                }
            }
        }
    }
    Ok(())
}

/// The Agda executable: `NESTFOLD_AGDA` if set, else `agda` on `PATH`.
pub fn find_agda() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("NESTFOLD_AGDA") {
        return Some(PathBuf::from(p));
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join("agda"))
        .find(|p| p.is_file())
}

/// Type-checks an emitted file when Agda is available; `None` when it is
/// not.
pub fn agda_check(file: &Path) -> Option<Result<(), String>> {
    let agda = find_agda()?;
    let dir = file.parent().unwrap_or(Path::new("."));
    let name = file.file_name()?;
    let out = Command::new(&agda).arg(name).current_dir(dir).output();
    Some(match out {
        Ok(o) if o.status.success() => Ok(()),
        Ok(o) => Err(format!(
            "{}{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )),
        Err(e) => Err(format!("cannot run {}: {e}", agda.display())),
    })
}
