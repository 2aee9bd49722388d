//! Language-neutral definitions: terms, patterns, clauses, data blocks.

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// A variable bound by a pattern, lambda or Pi binder.
    Var(String),
    /// A top-level name: a derived definition or a data type.
    Ref(String),
    /// A data constructor.
    Con(String),
    App(Box<Term>, Vec<Term>),
    Lam(Vec<String>, Box<Term>),
    Pi(Binder, Box<Term>),
    Set,
    Nat(u64),
}

/// Pi binders. `Forall` without a type renders as `forall i j`; with a type
/// it renders as `forall {a b : Set}` (implicit) or `forall (a b : Set)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binder {
    Named {
        names: Vec<String>,
        ty: Box<Term>,
        implicit: bool,
    },
    Forall {
        names: Vec<String>,
        ty: Option<Box<Term>>,
        implicit: bool,
    },
    Anon(Box<Term>),
}

impl Term {
    pub fn var(s: &str) -> Term {
        Term::Var(s.to_string())
    }

    pub fn re(s: &str) -> Term {
        Term::Ref(s.to_string())
    }

    pub fn con(s: &str) -> Term {
        Term::Con(s.to_string())
    }

    /// `head args`, flattening nested applications and dropping empty ones.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App(h, mut xs) => {
                xs.extend(args);
                Term::App(h, xs)
            }
            h => Term::App(Box::new(h), args),
        }
    }

    pub fn lam(names: &[&str], body: Term) -> Term {
        if names.is_empty() {
            return body;
        }
        Term::Lam(names.iter().map(|s| s.to_string()).collect(), Box::new(body))
    }

    pub fn arrow(from: Term, to: Term) -> Term {
        Term::Pi(Binder::Anon(Box::new(from)), Box::new(to))
    }

    pub fn pi(names: &[&str], ty: Term, body: Term) -> Term {
        Term::Pi(
            Binder::Named {
                names: names.iter().map(|s| s.to_string()).collect(),
                ty: Box::new(ty),
                implicit: false,
            },
            Box::new(body),
        )
    }

    pub fn implicit(names: &[&str], ty: Term, body: Term) -> Term {
        Term::Pi(
            Binder::Named {
                names: names.iter().map(|s| s.to_string()).collect(),
                ty: Box::new(ty),
                implicit: true,
            },
            Box::new(body),
        )
    }

    pub fn forall(names: &[&str], body: Term) -> Term {
        if names.is_empty() {
            return body;
        }
        Term::Pi(
            Binder::Forall {
                names: names.iter().map(|s| s.to_string()).collect(),
                ty: None,
                implicit: false,
            },
            Box::new(body),
        )
    }

    /// Right-nested arrows `t1 -> t2 -> ... -> result`.
    pub fn arrows(from: Vec<Term>, result: Term) -> Term {
        from.into_iter().rev().fold(result, |acc, t| Term::arrow(t, acc))
    }

    /// `Set -> Set -> ... -> Set` with `n` arguments.
    pub fn kind(n: usize) -> Term {
        Term::arrows(vec![Term::Set; n], Term::Set)
    }

    /// The binders of a Pi spine and its final codomain.
    pub fn spine(&self) -> (Vec<&Binder>, &Term) {
        let mut binders = Vec::new();
        let mut t = self;
        while let Term::Pi(b, body) = t {
            binders.push(b);
            t = body;
        }
        (binders, t)
    }

    /// Head and arguments of an application; a non-application is its own
    /// head.
    pub fn head_args(&self) -> (&Term, &[Term]) {
        match self {
            Term::App(h, xs) => (h, xs),
            t => (t, &[]),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match self {
            Term::App(h, xs) => {
                h.visit(f);
                for x in xs {
                    x.visit(f);
                }
            }
            Term::Lam(_, b) => b.visit(f),
            Term::Pi(b, body) => {
                match b {
                    Binder::Named { ty, .. } | Binder::Anon(ty) => ty.visit(f),
                    Binder::Forall { ty, .. } => {
                        if let Some(ty) = ty {
                            ty.visit(f);
                        }
                    }
                }
                body.visit(f);
            }
            Term::Var(_) | Term::Ref(_) | Term::Con(_) | Term::Set | Term::Nat(_) => {}
        }
    }

    /// Variables not bound inside the term.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(v) => {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
                Term::App(h, xs) => {
                    go(h, bound, out);
                    for x in xs {
                        go(x, bound, out);
                    }
                }
                Term::Lam(names, body) => {
                    let n = bound.len();
                    bound.extend(names.iter().cloned());
                    go(body, bound, out);
                    bound.truncate(n);
                }
                Term::Pi(b, body) => {
                    let n = bound.len();
                    match b {
                        Binder::Named { names, ty, .. } => {
                            go(ty, bound, out);
                            bound.extend(names.iter().cloned());
                        }
                        Binder::Forall { names, ty, .. } => {
                            if let Some(ty) = ty {
                                go(ty, bound, out);
                            }
                            bound.extend(names.iter().cloned());
                        }
                        Binder::Anon(ty) => go(ty, bound, out),
                    }
                    go(body, bound, out);
                    bound.truncate(n);
                }
                Term::Ref(_) | Term::Con(_) | Term::Set | Term::Nat(_) => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Var(String),
    Con(String, Vec<Pattern>),
    /// `{a}`: binds an implicit argument by position.
    Implicit(String),
}

impl Pattern {
    pub fn var(s: &str) -> Pattern {
        Pattern::Var(s.to_string())
    }

    pub fn con(c: &str, args: Vec<Pattern>) -> Pattern {
        Pattern::Con(c.to_string(), args)
    }

    pub fn binds(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Var(v) | Pattern::Implicit(v) => out.push(v.clone()),
            Pattern::Con(_, ps) => {
                for p in ps {
                    p.binds(out);
                }
            }
        }
    }

    /// Variables bound strictly below the root constructor.
    fn strict_subterms(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Pattern::Con(_, ps) = self {
            for p in ps {
                p.binds(&mut out);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub patterns: Vec<Pattern>,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataDecl {
    /// Named parameters, each with its kind.
    pub params: Vec<(String, Term)>,
    /// The sort of the declared type after its parameters.
    pub sort: Term,
    pub ctors: Vec<(String, Term)>,
    /// Emit a separate signature before the constructors, as mutual
    /// declarations need.
    pub forward: bool,
    pub builtin: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Data(DataDecl),
    Clauses(Vec<Clause>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedDef {
    pub name: String,
    /// Type of a function definition; unused for data declarations.
    pub signature: Term,
    /// How many Pi components of the signature go on each rendered line.
    pub layout: Vec<usize>,
    pub body: Body,
    /// The explicit argument position every recursive call decreases
    /// structurally, when the definition is recursive.
    pub decreasing: Option<usize>,
}

impl DerivedDef {
    pub fn clauses(&self) -> &[Clause] {
        match &self.body {
            Body::Clauses(cs) => cs,
            Body::Data(_) => &[],
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self.body, Body::Data(_))
    }

    /// Every application of the definition to itself in a clause body.
    pub fn recursive_calls(&self) -> Vec<(usize, &Term)> {
        let mut out = Vec::new();
        for (k, c) in self.clauses().iter().enumerate() {
            c.rhs.visit(&mut |t| {
                if let Term::App(h, _) = t {
                    if **h == Term::Ref(self.name.clone()) {
                        out.push((k, t));
                    }
                }
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("`{def}` calls itself without a decreasing argument")]
    Undeclared { def: String },
    #[error("`{def}`, clause {clause}: recursive call `{call}` does not take a strict subterm at argument {position}")]
    NotStructural {
        def: String,
        clause: usize,
        call: String,
        position: usize,
    },
    #[error("`{def}` refers to itself without applying itself")]
    Unapplied { def: String },
}

/// The syntactic termination check: at the declared position every
/// recursive call passes a variable bound strictly inside that clause's
/// constructor pattern. Positions count explicit patterns only.
pub fn check_certificate(def: &DerivedDef) -> Result<(), CertificateError> {
    let calls = def.recursive_calls();
    let mut bare = 0usize;
    for c in def.clauses() {
        c.rhs.visit(&mut |t| {
            if *t == Term::Ref(def.name.clone()) {
                bare += 1;
            }
        });
    }
    if bare != calls.len() {
        return Err(CertificateError::Unapplied { def: def.name.clone() });
    }
    if calls.is_empty() {
        return Ok(());
    }
    let Some(pos) = def.decreasing else {
        return Err(CertificateError::Undeclared { def: def.name.clone() });
    };
    for (k, call) in calls {
        let clause = &def.clauses()[k];
        let explicit: Vec<&Pattern> = clause
            .patterns
            .iter()
            .filter(|p| !matches!(p, Pattern::Implicit(_)))
            .collect();
        let smaller = explicit.get(pos).map(|p| p.strict_subterms()).unwrap_or_default();
        let (_, args) = call.head_args();
        let ok = matches!(args.get(pos), Some(Term::Var(v)) if smaller.contains(v));
        if !ok {
            return Err(CertificateError::NotStructural {
                def: def.name.clone(),
                clause: k + 1,
                call: format!("{call:?}"),
                position: pos + 1,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hmap_like(name: &str) -> DerivedDef {
        // f (cons x xs) = cons (g x) (f (f g) xs): the inner call takes `g`.
        DerivedDef {
            name: name.into(),
            signature: Term::Set,
            layout: vec![],
            body: Body::Clauses(vec![
                Clause {
                    patterns: vec![Pattern::var("g"), Pattern::con("leaf", vec![])],
                    rhs: Term::con("leaf"),
                },
                Clause {
                    patterns: vec![
                        Pattern::var("g"),
                        Pattern::con("cons", vec![Pattern::var("x"), Pattern::var("xs")]),
                    ],
                    rhs: Term::app(
                        Term::con("cons"),
                        vec![
                            Term::app(Term::var("g"), vec![Term::var("x")]),
                            Term::app(
                                Term::re(name),
                                vec![Term::app(Term::re(name), vec![Term::var("g")]), Term::var("xs")],
                            ),
                        ],
                    ),
                },
            ]),
            decreasing: Some(1),
        }
    }

    #[test]
    fn rejects_non_structural_map() {
        let err = check_certificate(&hmap_like("hmap")).unwrap_err();
        assert!(matches!(err, CertificateError::NotStructural { .. }), "{err}");
    }

    #[test]
    fn accepts_subterm_call() {
        let def = DerivedDef {
            name: "len".into(),
            signature: Term::Set,
            layout: vec![],
            body: Body::Clauses(vec![
                Clause {
                    patterns: vec![Pattern::con("nil", vec![])],
                    rhs: Term::Nat(0),
                },
                Clause {
                    patterns: vec![Pattern::con("cons", vec![Pattern::var("x"), Pattern::var("xs")])],
                    rhs: Term::app(
                        Term::con("succ"),
                        vec![Term::app(Term::re("len"), vec![Term::var("xs")])],
                    ),
                },
            ]),
            decreasing: Some(0),
        };
        assert_eq!(check_certificate(&def), Ok(()));
        let mut undeclared = def.clone();
        undeclared.decreasing = None;
        assert!(check_certificate(&undeclared).is_err());
    }

    #[test]
    fn free_vars_respect_binders() {
        let t = Term::lam(&["n"], Term::app(Term::var("p"), vec![Term::var("n")]));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["p".to_string()]);
        let pi = Term::pi(&["x"], Term::var("a"), Term::app(Term::var("p"), vec![Term::var("x")]));
        assert_eq!(pi.free_vars().len(), 2);
    }
}
