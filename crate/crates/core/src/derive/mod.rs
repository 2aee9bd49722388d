//! Derivation of the index type, its interpretation, the dependently typed
//! fold, induction principle, map, higher-order folds and (for the `Bush`
//! shape) the bridge recovering the fold from the higher-order fold.
//!
//! Two index renderings exist. The generic one emits the group's own index
//! type (`BobDylanIndex`, `BushIndex`) and an interpretation `I`. For a
//! single unary declaration the index universe is isomorphic to the
//! naturals (`BushC^k varA` ~ `k`), and nat-index mode emits `Nat` and
//! `NTimes` instead, with the conventional names `l`, `c`, `z`, `n`.

mod term;

pub use term::{check_certificate, Binder, Body, CertificateError, Clause, DataDecl, DerivedDef, Pattern, Term};

use thiserror::Error;

use crate::analysis::{Classification, GroupSchema, IndexExpr};
use crate::syntax::TypeExpr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Render the index of a single unary declaration as `Nat`.
    pub nat_index: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("PS bridge not derivable for this shape: {0}")]
    BridgeShape(String),
    #[error("name `{name}` clashes with {with}")]
    NameClash { name: String, with: String },
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error("erasure check failed for `{method}`: `{erased}` differs from the fold's `{expected}`")]
    Erasure {
        method: String,
        erased: String,
        expected: String,
    },
}

/// Everything derived for one group, in emission order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub module: String,
    pub nat_index: bool,
    pub defs: Vec<DerivedDef>,
    /// Remarks for the module header.
    pub notes: Vec<String>,
    /// Artifacts not derived, with the reason.
    pub skipped: Vec<(String, String)>,
}

const AGDA_KEYWORDS: &[&str] = &[
    "abstract",
    "codata",
    "coinductive",
    "constructor",
    "data",
    "do",
    "eta-equality",
    "field",
    "forall",
    "hiding",
    "import",
    "in",
    "inductive",
    "infix",
    "infixl",
    "infixr",
    "instance",
    "interleaved",
    "let",
    "macro",
    "module",
    "mutual",
    "no-eta-equality",
    "open",
    "opaque",
    "overlap",
    "pattern",
    "postulate",
    "primitive",
    "private",
    "public",
    "quote",
    "quoteTerm",
    "record",
    "renaming",
    "rewrite",
    "syntax",
    "tactic",
    "to",
    "unfolding",
    "unquote",
    "unquoteDecl",
    "unquoteDef",
    "using",
    "variable",
    "where",
    "with",
    "Set",
    "Prop",
];

/// Letters usable for base types; the rest name locals.
const BASE_LETTERS: &str = "abcdeghlmnoqrstuvwz";

fn base_name(k: usize) -> String {
    BASE_LETTERS
        .chars()
        .nth(k)
        .map(String::from)
        .unwrap_or_else(|| format!("a{k}"))
}

fn lower_first(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn vars(names: &[String]) -> Vec<Term> {
    names.iter().map(|n| Term::Var(n.clone())).collect()
}

fn strs(names: &[String]) -> Vec<&str> {
    names.iter().map(String::as_str).collect()
}

/// Names for the value arguments of a constructor: `x`, `y`, ... for
/// arguments of a bare variable type, `xs`, `ys`, ... otherwise.
fn value_names(args: &[IndexExpr]) -> Vec<String> {
    const SINGLE: [&str; 2] = ["x", "y"];
    const PLURAL: [&str; 4] = ["xs", "ys", "zs", "ws"];
    let (mut s, mut p) = (0, 0);
    args.iter()
        .map(|a| match a {
            IndexExpr::Var(_) => {
                s += 1;
                SINGLE
                    .get(s - 1)
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| format!("x{s}"))
            }
            IndexExpr::App(..) => {
                p += 1;
                PLURAL
                    .get(p - 1)
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| format!("xs{p}"))
            }
        })
        .collect()
}

fn one_line(binders: usize) -> Vec<usize> {
    vec![binders]
}

/// Builds a Pi spine from binders and a codomain.
fn sig(binders: Vec<Binder>, result: Term) -> Term {
    binders
        .into_iter()
        .rev()
        .fold(result, |acc, b| Term::Pi(b, Box::new(acc)))
}

fn named(name: &str, ty: Term) -> Binder {
    Binder::Named {
        names: vec![name.to_string()],
        ty: Box::new(ty),
        implicit: false,
    }
}

fn anon(ty: Term) -> Binder {
    Binder::Anon(Box::new(ty))
}

fn clauses(name: &str, signature: Term, layout: Vec<usize>, cs: Vec<Clause>, decreasing: Option<usize>) -> DerivedDef {
    DerivedDef {
        name: name.to_string(),
        signature,
        layout,
        body: Body::Clauses(cs),
        decreasing,
    }
}

fn clause(patterns: Vec<Pattern>, rhs: Term) -> Clause {
    Clause { patterns, rhs }
}

fn pvars(names: &[String]) -> Vec<Pattern> {
    names.iter().map(|n| Pattern::Var(n.clone())).collect()
}

/// Derives definitions for one group. Construction fixes every generated
/// name; the methods are pure.
pub struct Deriver<'a> {
    schema: &'a GroupSchema,
    nat: bool,
    index_ty: String,
    carriers: Vec<String>,
    bases: Vec<String>,
    /// Base functions of the fold; the induction principle's may differ.
    base_fns: Vec<String>,
    ind_base_fns: Vec<String>,
    methods: Vec<Vec<String>>,
    ivars: Vec<String>,
}

impl<'a> Deriver<'a> {
    pub fn new(schema: &'a GroupSchema, opts: DeriveOptions) -> Deriver<'a> {
        let nat = opts.nat_index && schema.is_unary_singleton();
        let v = schema.var_count();
        let bases: Vec<String> = (0..v).map(base_name).collect();
        let suffix = |k: usize| schema.spec.var_ctors[k].trim_start_matches("var").to_string();
        let max_arity = schema.spec.app_ctors.iter().map(|(_, n)| *n).max().unwrap_or(0);
        if nat {
            let letters: Vec<String> = schema.decls[0]
                .ctors
                .iter()
                .map(|c| c.name.chars().next().unwrap().to_ascii_lowercase().to_string())
                .collect();
            let avoid = ["p", "a", "b", "z", "n", "x", "y", "f"];
            let distinct = letters.iter().enumerate().all(|(k, l)| !letters[..k].contains(l));
            let short = distinct && letters.iter().all(|l| !avoid.contains(&l.as_str()));
            let methods = if short {
                letters
            } else {
                schema.decls[0].ctors.iter().map(|c| format!("on-{}", c.name)).collect()
            };
            let param = &schema.decls[0].params[0];
            let carrier = ["b", "d", "e", "g"]
                .into_iter()
                .find(|c| c != param && !methods.iter().any(|m| m == c))
                .unwrap();
            return Deriver {
                schema,
                nat,
                index_ty: "Nat".into(),
                carriers: vec![carrier.into()],
                bases,
                base_fns: vec!["z".into()],
                ind_base_fns: vec!["base".into()],
                methods: vec![methods],
                ivars: vec!["n".into()],
            };
        }
        let ivars: Vec<String> = (0..max_arity)
            .map(|k| match k {
                0 => "i".to_string(),
                1 => "j".to_string(),
                2 => "k".to_string(),
                _ => format!("i{k}"),
            })
            .collect();
        let base_fns: Vec<String> = (0..v).map(|k| format!("base{}", suffix(k))).collect();
        // Every other name a generated clause binds.
        let mut taken: Vec<String> = ["p", "f", "x", "y", "xs", "ys", "zs", "ws", "expr"]
            .into_iter()
            .map(String::from)
            .chain(
                bases
                    .iter()
                    .flat_map(|b| [b.clone(), format!("{b}'"), format!("f{}", b.to_uppercase())]),
            )
            .chain(ivars.iter().cloned())
            .chain(base_fns.iter().cloned())
            .chain((1..=max_arity).map(|k| format!("expr{k}")))
            .chain(schema.decls.iter().flat_map(|d| d.params.iter().cloned()))
            .collect();
        let mut carriers = Vec::new();
        for d in &schema.decls {
            let mut c = lower_first(&d.name);
            while taken.contains(&c) {
                c.push('\'');
            }
            taken.push(c.clone());
            carriers.push(c);
        }
        Deriver {
            schema,
            nat,
            index_ty: schema.spec.name.clone(),
            carriers,
            bases,
            ind_base_fns: base_fns.clone(),
            base_fns,
            methods: schema
                .decls
                .iter()
                .map(|d| d.ctors.iter().map(|c| format!("on-{}", c.name)).collect())
                .collect(),
            ivars,
        }
    }

    pub fn nat_index(&self) -> bool {
        self.nat
    }

    fn all_methods(&self) -> Vec<String> {
        self.methods.iter().flatten().cloned().collect()
    }

    fn arity(&self, d: usize) -> usize {
        self.schema.decls[d].params.len()
    }

    fn decl_vars(&self, d: usize) -> Vec<String> {
        self.ivars[..self.arity(d)].to_vec()
    }

    fn hfold_name(&self, d: usize) -> String {
        if self.schema.decls.len() == 1 {
            "hfold".into()
        } else {
            format!("hfold-{}", self.carriers[d])
        }
    }

    fn index_type(&self) -> Term {
        Term::Ref(self.index_ty.clone())
    }

    /// An index template with its variables replaced by `vars`.
    fn idx(&self, e: &IndexExpr, vars: &[Term]) -> Term {
        match e {
            IndexExpr::Var(k) => vars[*k].clone(),
            IndexExpr::App(d, xs) => {
                let args: Vec<Term> = xs.iter().map(|x| self.idx(x, vars)).collect();
                if self.nat {
                    Term::app(Term::con("succ"), args)
                } else {
                    Term::app(Term::Con(self.schema.spec.app_ctors[*d].0.clone()), args)
                }
            }
        }
    }

    /// A closed index: variables are the index type's own constructors.
    fn closed(&self, e: &IndexExpr) -> Term {
        if self.nat {
            return match e.unary_depth() {
                Some(0) | None => Term::con("zero"),
                Some(k) => Term::Nat(k as u64),
            };
        }
        let vs: Vec<Term> = self
            .schema
            .spec
            .var_ctors
            .iter()
            .map(|v| Term::Con(v.clone()))
            .collect();
        self.idx(e, &vs)
    }

    fn var_index(&self, k: usize) -> Term {
        self.closed(&IndexExpr::Var(k))
    }

    fn succ_pattern(&self, d: usize, vars: &[String]) -> Pattern {
        if self.nat {
            Pattern::con("succ", pvars(vars))
        } else {
            Pattern::Con(self.schema.spec.app_ctors[d].0.clone(), pvars(vars))
        }
    }

    fn var_pattern(&self, k: usize) -> Pattern {
        if self.nat {
            Pattern::con("zero", vec![])
        } else {
            Pattern::Con(self.schema.spec.var_ctors[k].clone(), vec![])
        }
    }

    /// The interpretation of index `i` with the given carriers and bases.
    fn interp(&self, carriers: Vec<Term>, bases: Vec<Term>, i: Term) -> Term {
        if self.nat {
            let mut args = vec![i];
            args.extend(carriers);
            args.extend(bases);
            Term::app(Term::re("NTimes"), args)
        } else {
            let mut args = carriers;
            args.extend(bases);
            args.push(i);
            Term::app(Term::re("I"), args)
        }
    }

    fn source_carriers(&self) -> Vec<Term> {
        self.schema.decls.iter().map(|d| Term::Ref(d.name.clone())).collect()
    }

    fn local_carriers(&self) -> Vec<Term> {
        vars(&self.carriers)
    }

    fn p(&self, args: Vec<Term>) -> Term {
        Term::app(Term::var("p"), args)
    }

    /// Index binders in front of a method type: `(n : Nat)` or `forall i j`.
    fn index_binders(&self, names: &[String], body: Term) -> Term {
        if self.nat {
            Term::pi(&strs(names), Term::re("Nat"), body)
        } else {
            Term::forall(&strs(names), body)
        }
    }

    /// Type-parameter binders: `(a : Set)` in nat-index mode, `forall a`
    /// otherwise.
    fn param_binders(&self, names: &[String], body: Term) -> Term {
        if names.is_empty() {
            return body;
        }
        if self.nat {
            Term::pi(&strs(names), Term::Set, body)
        } else {
            Term::forall(&strs(names), body)
        }
    }

    fn param_binder(&self, names: &[String]) -> Binder {
        if self.nat {
            Binder::Named {
                names: names.to_vec(),
                ty: Box::new(Term::Set),
                implicit: false,
            }
        } else {
            Binder::Forall {
                names: names.to_vec(),
                ty: None,
                implicit: false,
            }
        }
    }

    /// `p` applied to the declaration's own index, over fresh index vars.
    fn own_index(&self, d: usize, vs: &[String]) -> Term {
        self.idx(&self.schema.decl_index(d), &vars(vs))
    }

    /// Method type of the fold for constructor `c` of declaration `d`.
    pub fn nfold_method_type(&self, d: usize, c: usize) -> Term {
        let vs = self.decl_vars(d);
        let ctor = &self.schema.decls[d].ctors[c];
        let args = ctor
            .args
            .iter()
            .map(|t| self.p(vec![self.idx(t, &vars(&vs))]))
            .collect();
        let res = self.p(vec![self.own_index(d, &vs)]);
        self.index_binders(&vs, Term::arrows(args, res))
    }

    /// Method type of the induction principle for constructor `c` of `d`.
    pub fn ind_method_type(&self, d: usize, c: usize) -> Term {
        let vs = self.decl_vars(d);
        let ctor = &self.schema.decls[d].ctors[c];
        let names = value_names(&ctor.args);
        let bases = vars(&self.bases);
        let mut binders: Vec<Binder> = ctor
            .args
            .iter()
            .zip(&names)
            .map(|(t, v)| {
                named(
                    v,
                    self.interp(self.source_carriers(), bases.clone(), self.idx(t, &vars(&vs))),
                )
            })
            .collect();
        binders.extend(
            ctor.args
                .iter()
                .zip(&names)
                .map(|(t, v)| anon(self.p(vec![self.idx(t, &vars(&vs)), Term::Var(v.clone())]))),
        );
        let value = Term::app(Term::Con(ctor.name.clone()), vars(&names));
        let res = self.p(vec![self.own_index(d, &vs), value]);
        self.index_binders(&vs, sig(binders, res))
    }

    fn base_fn_type(&self, k: usize) -> Term {
        Term::arrow(Term::Var(self.bases[k].clone()), self.p(vec![self.var_index(k)]))
    }

    fn ind_base_fn_type(&self, k: usize) -> Term {
        Term::pi(
            &["x"],
            Term::Var(self.bases[k].clone()),
            self.p(vec![self.var_index(k), Term::var("x")]),
        )
    }

    fn method_binders(&self, ty: impl Fn(usize, usize) -> Term) -> Vec<Binder> {
        let mut out = Vec::new();
        for (d, ms) in self.methods.iter().enumerate() {
            for (c, m) in ms.iter().enumerate() {
                out.push(named(m, ty(d, c)));
            }
        }
        out
    }

    /// The index data type; `Nat` in nat-index mode.
    pub fn index_decl(&self) -> DerivedDef {
        let (name, ctors, builtin) = if self.nat {
            (
                "Nat".to_string(),
                vec![
                    ("zero".to_string(), Term::re("Nat")),
                    ("succ".to_string(), Term::arrow(Term::re("Nat"), Term::re("Nat"))),
                ],
                Some("NATURAL".to_string()),
            )
        } else {
            let spec = &self.schema.spec;
            let ty = self.index_type();
            let mut ctors: Vec<(String, Term)> = spec.var_ctors.iter().map(|v| (v.clone(), ty.clone())).collect();
            for (c, n) in &spec.app_ctors {
                ctors.push((c.clone(), Term::arrows(vec![ty.clone(); *n], ty.clone())));
            }
            (spec.name.clone(), ctors, None)
        };
        DerivedDef {
            name,
            signature: Term::Set,
            layout: vec![],
            body: Body::Data(DataDecl {
                params: vec![],
                sort: Term::Set,
                ctors,
                forward: false,
                builtin,
            }),
            decreasing: None,
        }
    }

    /// The group's own declarations, as they appear in the source.
    pub fn source_decls(&self) -> Vec<DerivedDef> {
        let forward = self.schema.decls.len() > 1;
        self.schema
            .decls
            .iter()
            .map(|d| {
                let result = Term::app(
                    Term::Ref(d.name.clone()),
                    d.params.iter().map(|p| Term::var(p)).collect(),
                );
                let ctors = d
                    .ctors
                    .iter()
                    .map(|c| {
                        let args = c.arg_types.iter().map(|t| type_term(t, &|h| Term::re(h))).collect();
                        (c.name.clone(), Term::arrows(args, result.clone()))
                    })
                    .collect();
                DerivedDef {
                    name: d.name.clone(),
                    signature: Term::Set,
                    layout: vec![],
                    body: Body::Data(DataDecl {
                        params: d.params.iter().map(|p| (p.clone(), Term::Set)).collect(),
                        sort: Term::Set,
                        ctors,
                        forward,
                        builtin: None,
                    }),
                    decreasing: None,
                }
            })
            .collect()
    }

    /// `NTimes` in nat-index mode, `I` otherwise.
    pub fn interp_def(&self) -> DerivedDef {
        if self.nat {
            let signature = sig(
                vec![named("n", Term::re("Nat")), named("b", Term::kind(1)), anon(Term::Set)],
                Term::Set,
            );
            let cs = vec![
                clause(
                    vec![Pattern::con("zero", vec![]), Pattern::var("b"), Pattern::var("a")],
                    Term::var("a"),
                ),
                clause(
                    vec![
                        Pattern::con("succ", vec![Pattern::var("n")]),
                        Pattern::var("b"),
                        Pattern::var("a"),
                    ],
                    Term::app(
                        Term::var("b"),
                        vec![Term::app(
                            Term::re("NTimes"),
                            vec![Term::var("n"), Term::var("b"), Term::var("a")],
                        )],
                    ),
                ),
            ];
            return clauses("NTimes", signature, one_line(3), cs, Some(0));
        }
        let mut binders: Vec<Binder> = self
            .schema
            .decls
            .iter()
            .map(|d| anon(Term::kind(d.params.len())))
            .collect();
        binders.extend(self.bases.iter().map(|_| anon(Term::Set)));
        binders.push(anon(self.index_type()));
        let n = binders.len();
        let signature = sig(binders, Term::Set);
        let fixed: Vec<String> = self.carriers.iter().chain(&self.bases).cloned().collect();
        let recur = |e: &str| Term::app(Term::re("I"), vars(&fixed).into_iter().chain([Term::var(e)]).collect());
        let mut cs = Vec::new();
        for (k, b) in self.bases.iter().enumerate() {
            let mut ps = pvars(&fixed);
            ps.push(self.var_pattern(k));
            cs.push(clause(ps, Term::Var(b.clone())));
        }
        for (d, carrier) in self.carriers.iter().enumerate() {
            let arity = self.arity(d);
            let es: Vec<String> = if arity == 1 {
                vec!["expr".into()]
            } else {
                (1..=arity).map(|k| format!("expr{k}")).collect()
            };
            let mut ps = pvars(&fixed);
            ps.push(Pattern::Con(self.schema.spec.app_ctors[d].0.clone(), pvars(&es)));
            cs.push(clause(
                ps,
                Term::app(Term::Var(carrier.clone()), es.iter().map(|e| recur(e)).collect()),
            ));
        }
        clauses("I", signature, one_line(n), cs, Some(fixed.len()))
    }

    fn nfold_signature(&self) -> (Term, Vec<usize>) {
        let mut binders = vec![named("p", Term::arrow(self.index_type(), Term::Set))];
        let mut layout = vec![1];
        let ms = self.method_binders(|d, c| self.nfold_method_type(d, c));
        layout.extend(ms.iter().map(|_| 1));
        binders.extend(ms);
        let base_set = Binder::Named {
            names: self.bases.clone(),
            ty: Box::new(Term::Set),
            implicit: false,
        };
        let fns: Vec<Binder> = (0..self.bases.len())
            .map(|k| named(&self.base_fns[k], self.base_fn_type(k)))
            .collect();
        if self.bases.len() == 1 {
            layout.push(2);
        } else if !self.bases.is_empty() {
            layout.push(1);
            layout.extend(fns.iter().map(|_| 1));
        }
        if !self.bases.is_empty() {
            binders.push(base_set);
            binders.extend(fns);
        }
        let i = self.ivars.first().cloned().unwrap_or_else(|| "i".into());
        binders.push(named(&i, self.index_type()));
        binders.push(anon(self.interp(
            self.source_carriers(),
            vars(&self.bases),
            Term::Var(i.clone()),
        )));
        layout.push(2);
        (sig(binders, self.p(vec![Term::Var(i)])), layout)
    }

    /// The arguments every call to the fold passes unchanged.
    fn nfold_fixed(&self) -> Vec<String> {
        let mut out = vec!["p".to_string()];
        out.extend(self.all_methods());
        out.extend(self.bases.iter().cloned());
        out.extend(self.base_fns.iter().cloned());
        out
    }

    /// One clause per base variable plus one per constructor; recursive
    /// calls follow the constructor's argument templates.
    fn fold_clauses(
        &self,
        name: &str,
        fixed: &[String],
        value_var: &str,
        base_fns: &[String],
        dependent: bool,
    ) -> Vec<Clause> {
        let call = |i: Term, v: &str| {
            let mut args = vars(fixed);
            args.push(i);
            args.push(Term::var(v));
            Term::app(Term::re(name), args)
        };
        let mut cs = Vec::new();
        for (k, f) in base_fns.iter().enumerate() {
            let mut ps = pvars(fixed);
            ps.push(self.var_pattern(k));
            ps.push(Pattern::var(value_var));
            cs.push(clause(ps, Term::app(Term::Var(f.clone()), vec![Term::var(value_var)])));
        }
        for (d, decl) in self.schema.decls.iter().enumerate() {
            let vs = self.decl_vars(d);
            for (c, ctor) in decl.ctors.iter().enumerate() {
                let names = value_names(&ctor.args);
                let mut ps = pvars(fixed);
                ps.push(self.succ_pattern(d, &vs));
                ps.push(Pattern::Con(ctor.name.clone(), pvars(&names)));
                let mut args = vars(&vs);
                if dependent {
                    args.extend(vars(&names));
                }
                for (t, v) in ctor.args.iter().zip(&names) {
                    args.push(call(self.idx(t, &vars(&vs)), v));
                }
                cs.push(clause(ps, Term::app(Term::Var(self.methods[d][c].clone()), args)));
            }
        }
        cs
    }

    pub fn nfold(&self) -> DerivedDef {
        let (signature, layout) = self.nfold_signature();
        let fixed = self.nfold_fixed();
        let cs = self.fold_clauses("nfold", &fixed, "x", &self.base_fns, false);
        clauses("nfold", signature, layout, cs, Some(fixed.len() + 1))
    }

    pub fn ind(&self) -> DerivedDef {
        let bases = vars(&self.bases);
        let i = self.ivars.first().cloned().unwrap_or_else(|| "i".into());
        let p_ty = sig(
            vec![
                named(&i, self.index_type()),
                anon(self.interp(self.source_carriers(), bases.clone(), Term::Var(i.clone()))),
            ],
            Term::Set,
        );
        let mut binders = Vec::new();
        let mut layout = Vec::new();
        if self.bases.is_empty() {
            layout.push(1);
        } else {
            binders.push(Binder::Forall {
                names: self.bases.clone(),
                ty: Some(Box::new(Term::Set)),
                implicit: true,
            });
            layout.push(2);
        }
        binders.push(Binder::Named {
            names: vec!["p".into()],
            ty: Box::new(p_ty),
            implicit: true,
        });
        for k in 0..self.bases.len() {
            binders.push(named(&self.ind_base_fns[k], self.ind_base_fn_type(k)));
            layout.push(1);
        }
        let ms = self.method_binders(|d, c| self.ind_method_type(d, c));
        layout.extend(ms.iter().map(|_| 1));
        binders.extend(ms);
        binders.push(named(&i, self.index_type()));
        binders.push(named(
            "xs",
            self.interp(self.source_carriers(), bases, Term::Var(i.clone())),
        ));
        layout.push(2);
        let signature = sig(binders, self.p(vec![Term::Var(i), Term::var("xs")]));
        let mut fixed = self.ind_base_fns.clone();
        fixed.extend(self.all_methods());
        let cs = self.fold_clauses("ind", &fixed, "xs", &self.ind_base_fns, true);
        clauses("ind", signature, layout, cs, Some(fixed.len() + 1))
    }

    fn map_targets(&self) -> Vec<String> {
        if self.bases.len() == 1 {
            vec!["b".into()]
        } else {
            self.bases.iter().map(|b| format!("{b}'")).collect()
        }
    }

    fn map_fns(&self) -> Vec<String> {
        if self.bases.len() == 1 {
            vec!["f".into()]
        } else {
            (0..self.bases.len())
                .map(|k| format!("f{}", self.schema.spec.var_ctors[k].trim_start_matches("var")))
                .collect()
        }
    }

    /// The map, as the fold whose carrier is the group itself at the
    /// target bases and whose methods are the constructors.
    pub fn map(&self) -> DerivedDef {
        let targets = self.map_targets();
        let fns = self.map_fns();
        let i = self.ivars.first().cloned().unwrap_or_else(|| "i".into());
        let mut all = self.bases.clone();
        all.extend(targets.iter().cloned());
        let mut binders = Vec::new();
        if !all.is_empty() {
            binders.push(Binder::Forall {
                names: all.clone(),
                ty: Some(Box::new(Term::Set)),
                implicit: true,
            });
        }
        binders.push(named(&i, self.index_type()));
        for (a, b) in self.bases.iter().zip(&targets) {
            binders.push(anon(Term::arrow(Term::Var(a.clone()), Term::Var(b.clone()))));
        }
        let first_line = binders.len();
        binders.push(anon(self.interp(
            self.source_carriers(),
            vars(&self.bases),
            Term::Var(i.clone()),
        )));
        let signature = sig(
            binders,
            self.interp(self.source_carriers(), vars(&targets), Term::Var(i.clone())),
        );
        let mut ps: Vec<Pattern> = all.iter().map(|a| Pattern::Implicit(a.clone())).collect();
        ps.push(Pattern::Var(i.clone()));
        ps.extend(pvars(&fns));
        ps.push(Pattern::var("x"));
        let mut args = vec![Term::lam(
            &[i.as_str()],
            self.interp(self.source_carriers(), vars(&targets), Term::Var(i.clone())),
        )];
        for (d, decl) in self.schema.decls.iter().enumerate() {
            let vs = self.decl_vars(d);
            for ctor in &decl.ctors {
                args.push(Term::lam(&strs(&vs), Term::Con(ctor.name.clone())));
            }
        }
        args.extend(vars(&self.bases));
        args.extend(vars(&fns));
        args.push(Term::Var(i));
        args.push(Term::var("x"));
        let cs = vec![clause(ps, Term::app(Term::re("nfold"), args))];
        clauses("nmap", signature, vec![first_line, 1], cs, None)
    }

    /// Method type of the higher-order fold, read off the declaration with
    /// each declaration replaced by its carrier.
    pub fn hfold_method_type(&self, d: usize, c: usize) -> Term {
        let decl = &self.schema.decls[d];
        let ctor = &decl.ctors[c];
        let carrier = |h: &str| {
            let k = self.schema.decls.iter().position(|x| x.name == h).unwrap();
            Term::Var(self.carriers[k].clone())
        };
        let args = ctor.arg_types.iter().map(|t| type_term(t, &carrier)).collect();
        let res = Term::app(
            Term::Var(self.carriers[d].clone()),
            decl.params.iter().map(|p| Term::var(p)).collect(),
        );
        self.param_binders(&decl.params, Term::arrows(args, res))
    }

    fn hfold_signature(&self, d: usize) -> (Term, Vec<usize>) {
        let decl = &self.schema.decls[d];
        let mut binders: Vec<Binder> = self
            .carriers
            .iter()
            .zip(&self.schema.decls)
            .map(|(c, x)| named(c, Term::kind(x.params.len())))
            .collect();
        binders.extend(self.method_binders(|d, c| self.hfold_method_type(d, c)));
        let mut layout = vec![1; binders.len()];
        let mut last = 1;
        if !decl.params.is_empty() {
            binders.push(self.param_binder(&decl.params));
            last += 1;
        }
        let params: Vec<Term> = decl.params.iter().map(|p| Term::var(p)).collect();
        binders.push(anon(Term::app(Term::Ref(decl.name.clone()), params.clone())));
        layout.push(last);
        let res = Term::app(Term::Var(self.carriers[d].clone()), params);
        (sig(binders, res), layout)
    }

    /// One higher-order fold per declaration, each the fold at the
    /// declaration's own index with the carriers interpreted.
    pub fn hfolds(&self) -> Vec<DerivedDef> {
        (0..self.schema.decls.len()).map(|d| self.hfold(d)).collect()
    }

    fn hfold(&self, d: usize) -> DerivedDef {
        let decl = &self.schema.decls[d];
        let (signature, layout) = self.hfold_signature(d);
        // Base slots beyond the declaration's arity are never reached from
        // its own index; fill them with its first parameter.
        let slots: Vec<Term> = (0..self.bases.len())
            .map(|k| Term::var(decl.params.get(k).or(decl.params.first()).unwrap()))
            .collect();
        let at = |i: &str| self.interp(self.local_carriers(), slots.clone(), Term::var(i));
        let i = self.ivars.first().cloned().unwrap_or_else(|| "i".into());
        let mut args = vec![Term::lam(&[i.as_str()], at(&i))];
        for (e, ms) in self.methods.iter().enumerate() {
            let vs = self.decl_vars(e);
            for m in ms {
                let applied = Term::app(Term::Var(m.clone()), vs.iter().map(|v| at(v)).collect());
                args.push(Term::lam(&strs(&vs), applied));
            }
        }
        args.extend(slots.iter().cloned());
        args.extend(slots.iter().map(|_| Term::lam(&["x"], Term::var("x"))));
        args.push(self.closed(&self.schema.decl_index(d)));
        args.push(Term::var("x"));
        let mut ps = pvars(&self.carriers);
        ps.extend(pvars(&self.all_methods()));
        ps.extend(pvars(&decl.params));
        ps.push(Pattern::var("x"));
        let cs = vec![clause(ps, Term::app(Term::re("nfold"), args))];
        clauses(&self.hfold_name(d), signature, layout, cs, None)
    }

    /// `PS`, `PS-to-P`, `fold-PS`, `liftNTimes` and `nfold'`; only for a
    /// single unary declaration with one nullary constructor and one of
    /// type `a -> D (D a) -> D a`.
    pub fn ps_bridge(&self) -> Result<Vec<DerivedDef>, DeriveError> {
        let Some(shape) = self.schema.bush_shape() else {
            let why = if self.schema.decls.len() > 1 {
                format!("{} is a mutual group", self.schema.group.module_name())
            } else if self.schema.group.classification == Classification::Ordinary {
                format!("{} is an ordinary data type", self.schema.decls[0].name)
            } else {
                format!(
                    "{} is not of the form `leaf : D a`, `cons : a -> D (D a) -> D a`",
                    self.schema.decls[0].name
                )
            };
            return Err(DeriveError::BridgeShape(why));
        };
        let n = self.ivars[0].clone();
        let nv = Term::var(&n);
        let succ = |t: Term| self.idx(&IndexExpr::App(0, vec![IndexExpr::Var(0)]), &[t]);
        let ps_p = Term::app(Term::re("PS"), vec![Term::var("p")]);
        let p_binder = || named("p", Term::arrow(self.index_type(), Term::Set));
        let src = Term::Ref(self.schema.decls[0].name.clone());
        let ml = self.methods[0][shape.leaf].clone();
        let mc = self.methods[0][shape.cons].clone();
        let z = self.base_fns[0].clone();

        let ps = clauses(
            "PS",
            sig(vec![p_binder(), anon(Term::Set)], Term::Set),
            one_line(2),
            vec![clause(
                vec![Pattern::var("p"), Pattern::var("A")],
                Term::pi(
                    &[n.as_str()],
                    self.index_type(),
                    Term::arrow(
                        Term::arrow(Term::var("A"), self.p(vec![nv.clone()])),
                        self.p(vec![succ(nv.clone())]),
                    ),
                ),
            )],
            None,
        );

        let fixed = vec!["p".to_string(), "a".to_string(), z.clone()];
        let mut zero_ps = pvars(&fixed);
        zero_ps.extend([self.var_pattern(0), Pattern::var("x")]);
        let mut succ_ps = pvars(&fixed);
        succ_ps.extend([self.succ_pattern(0, std::slice::from_ref(&n)), Pattern::var("hyp")]);
        let mut ih = vars(&fixed);
        ih.push(nv.clone());
        let ps_to_p = clauses(
            "PS-to-P",
            sig(
                vec![
                    p_binder(),
                    named("a", Term::Set),
                    named(&z, self.base_fn_type(0)),
                    named(&n, self.index_type()),
                    anon(self.interp(vec![ps_p.clone()], vec![Term::var("a")], nv.clone())),
                ],
                self.p(vec![nv.clone()]),
            ),
            vec![3, 2],
            vec![
                clause(zero_ps, Term::app(Term::var(&z), vec![Term::var("x")])),
                clause(
                    succ_ps,
                    Term::app(Term::var("hyp"), vec![nv.clone(), Term::app(Term::re("PS-to-P"), ih)]),
                ),
            ],
            Some(3),
        );

        let a = self.schema.decls[0].params[0].clone();
        let mut fold_binders = vec![p_binder()];
        let mut fold_layout = vec![1];
        for (k, m) in self.methods[0].iter().enumerate() {
            fold_binders.push(named(m, self.nfold_method_type(0, k)));
            fold_layout.push(1);
        }
        fold_binders.push(self.param_binder(std::slice::from_ref(&a)));
        fold_binders.push(anon(Term::app(src.clone(), vec![Term::var(&a)])));
        fold_layout.push(2);
        let leaf_alg = Term::lam(&["a", n.as_str(), "tr"], Term::app(Term::var(&ml), vec![nv.clone()]));
        let cons_alg = Term::lam(
            &["a", "x", "xs", n.as_str(), "tr"],
            Term::app(
                Term::var(&mc),
                vec![
                    nv.clone(),
                    Term::app(Term::var("tr"), vec![Term::var("x")]),
                    Term::app(
                        Term::var("xs"),
                        vec![
                            succ(nv.clone()),
                            Term::lam(&["f"], Term::app(Term::var("f"), vec![nv.clone(), Term::var("tr")])),
                        ],
                    ),
                ],
            ),
        );
        let mut algs = vec![leaf_alg, cons_alg];
        if shape.leaf != 0 {
            algs.reverse();
        }
        let mut fold_ps_pats = vec![Pattern::var("p")];
        fold_ps_pats.extend(pvars(&self.methods[0]));
        let fold_ps = clauses(
            "fold-PS",
            sig(fold_binders, Term::app(ps_p.clone(), vec![Term::var(&a)])),
            fold_layout,
            vec![clause(
                fold_ps_pats,
                Term::app(Term::re("hfold"), std::iter::once(ps_p.clone()).chain(algs).collect()),
            )],
            None,
        );

        let at = |c: &str, i: Term| self.interp(vec![Term::var(c)], vec![Term::var("a")], i);
        let lift_fixed = ["b", "c", "m"].map(String::from).to_vec();
        let mut lz = pvars(&lift_fixed);
        lz.extend([
            self.var_pattern(0),
            Pattern::var("f"),
            Pattern::var("a"),
            Pattern::var("x"),
        ]);
        let mut ls = pvars(&lift_fixed);
        ls.extend([
            self.succ_pattern(0, std::slice::from_ref(&n)),
            Pattern::var("f"),
            Pattern::var("a"),
            Pattern::var("x"),
        ]);
        let mut rec = vars(&lift_fixed);
        rec.extend([nv.clone(), Term::var("f"), Term::var("a")]);
        let lift = clauses(
            "liftNTimes",
            sig(
                vec![
                    Binder::Named {
                        names: vec!["b".into(), "c".into()],
                        ty: Box::new(Term::kind(1)),
                        implicit: false,
                    },
                    anon(Term::forall(
                        &["x", "y"],
                        Term::arrows(
                            vec![
                                Term::arrow(Term::var("x"), Term::var("y")),
                                Term::app(Term::var("b"), vec![Term::var("x")]),
                            ],
                            Term::app(Term::var("b"), vec![Term::var("y")]),
                        ),
                    )),
                    named(&n, self.index_type()),
                    anon(Term::forall(
                        &["a"],
                        Term::arrow(
                            Term::app(Term::var("b"), vec![Term::var("a")]),
                            Term::app(Term::var("c"), vec![Term::var("a")]),
                        ),
                    )),
                    named("a", Term::Set),
                    anon(at("b", nv.clone())),
                ],
                at("c", nv.clone()),
            ),
            vec![1, 1, 2, 2],
            vec![
                clause(lz, Term::var("x")),
                clause(
                    ls,
                    Term::app(
                        Term::var("f"),
                        vec![
                            at("c", nv.clone()),
                            Term::app(
                                Term::var("m"),
                                vec![
                                    at("b", nv.clone()),
                                    at("c", nv.clone()),
                                    Term::app(Term::re("liftNTimes"), rec),
                                    Term::var("x"),
                                ],
                            ),
                        ],
                    ),
                ),
            ],
            Some(3),
        );

        let (signature, layout) = self.nfold_signature();
        let fixed = self.nfold_fixed();
        let mut pats = pvars(&fixed);
        pats.extend([Pattern::var(&n), Pattern::var("x")]);
        let mut fold_args = vec![Term::var("p")];
        fold_args.extend(vars(&self.methods[0]));
        let one = self.closed(&IndexExpr::iterate(0, 1));
        let lifted = Term::app(
            Term::re("liftNTimes"),
            vec![
                src,
                ps_p,
                Term::lam(&["a", "b"], Term::app(Term::re("nmap"), vec![one])),
                nv.clone(),
                Term::app(Term::re("fold-PS"), fold_args),
                Term::var("a"),
                Term::var("x"),
            ],
        );
        let nfold_prime = clauses(
            "nfold'",
            signature,
            layout,
            vec![clause(
                pats,
                Term::app(
                    Term::re("PS-to-P"),
                    vec![Term::var("p"), Term::var("a"), Term::var(&z), nv, lifted],
                ),
            )],
            None,
        );
        Ok(vec![ps, ps_to_p, fold_ps, lift, nfold_prime])
    }

    /// Erasing the value from the induction principle's motive must give
    /// back the fold's method and base-function types exactly.
    pub fn erasure_check(&self) -> Result<(), DeriveError> {
        let mut pairs = Vec::new();
        for k in 0..self.bases.len() {
            pairs.push((
                self.ind_base_fns[k].clone(),
                self.ind_base_fn_type(k),
                self.base_fn_type(k),
            ));
        }
        for (d, ms) in self.methods.iter().enumerate() {
            for (c, m) in ms.iter().enumerate() {
                pairs.push((m.clone(), self.ind_method_type(d, c), self.nfold_method_type(d, c)));
            }
        }
        for (name, ind, fold) in pairs {
            let erased = erase(&ind);
            if erased != fold {
                return Err(DeriveError::Erasure {
                    method: name,
                    erased: format!("{erased:?}"),
                    expected: format!("{fold:?}"),
                });
            }
        }
        Ok(())
    }

    /// Everything for the group, checked, in emission order.
    pub fn derive(&self) -> Result<Derivation, DeriveError> {
        let mut defs = Vec::new();
        if self.nat {
            defs.push(self.index_decl());
            defs.extend(self.source_decls());
        } else {
            defs.extend(self.source_decls());
            defs.push(self.index_decl());
        }
        defs.push(self.interp_def());
        defs.push(self.nfold());
        defs.push(self.map());
        defs.push(self.ind());
        defs.extend(self.hfolds());
        let mut skipped = Vec::new();
        match self.ps_bridge() {
            Ok(bridge) => defs.extend(bridge),
            Err(e @ DeriveError::BridgeShape(_)) => skipped.push(("PS bridge".to_string(), e.to_string())),
            Err(e) => return Err(e),
        }
        self.erasure_check()?;
        for d in &defs {
            check_certificate(d)?;
        }
        check_names(self.schema, &defs)?;
        let mut notes = Vec::new();
        if self.nat {
            notes.push(format!(
                "Index type Nat: `{}^n varA` is rendered as `n`.",
                self.schema.spec.app_ctors[0].0
            ));
        }
        Ok(Derivation {
            module: self.schema.group.module_name(),
            nat_index: self.nat,
            defs,
            notes,
            skipped,
        })
    }
}

/// Derives the whole module for a group.
pub fn derive(schema: &GroupSchema, opts: DeriveOptions) -> Result<Derivation, DeriveError> {
    Deriver::new(schema, opts).derive()
}

/// A source type expression with declaration heads mapped by `head`.
fn type_term(t: &TypeExpr, head: &dyn Fn(&str) -> Term) -> Term {
    match t {
        TypeExpr::Var { name, .. } => Term::Var(name.clone()),
        TypeExpr::App { head: h, args, .. } => Term::app(head(h), args.iter().map(|a| type_term(a, head)).collect()),
    }
}

/// Drops value binders of interpretation type, turns other value binders
/// anonymous, and removes the value argument of every `p`.
fn erase(t: &Term) -> Term {
    match t {
        Term::Pi(
            Binder::Named {
                names,
                ty,
                implicit: false,
            },
            body,
        ) if names.len() == 1 && mentions_as_value(body, &names[0]) => {
            let is_interp = matches!(ty.head_args().0, Term::Ref(r) if r == "I" || r == "NTimes");
            if is_interp {
                erase(body)
            } else {
                Term::Pi(Binder::Anon(Box::new(erase(ty))), Box::new(erase(body)))
            }
        }
        Term::Pi(b, body) => {
            let b = match b {
                Binder::Anon(ty) => Binder::Anon(Box::new(erase(ty))),
                Binder::Named { names, ty, implicit } => Binder::Named {
                    names: names.clone(),
                    ty: Box::new(erase(ty)),
                    implicit: *implicit,
                },
                other => other.clone(),
            };
            Term::Pi(b, Box::new(erase(body)))
        }
        Term::App(h, args) if **h == Term::var("p") && args.len() == 2 => {
            Term::app(Term::var("p"), vec![args[0].clone()])
        }
        other => other.clone(),
    }
}

fn mentions_as_value(t: &Term, v: &str) -> bool {
    match t {
        Term::App(h, args) if **h == Term::var("p") => args.len() == 2 && args[1].free_vars().contains(v),
        Term::App(h, args) => mentions_as_value(h, v) || args.iter().any(|a| mentions_as_value(a, v)),
        Term::Pi(b, body) => {
            let in_ty = match b {
                Binder::Named { ty, .. } | Binder::Anon(ty) => mentions_as_value(ty, v),
                Binder::Forall { ty, .. } => ty.as_ref().is_some_and(|t| mentions_as_value(t, v)),
            };
            in_ty || mentions_as_value(body, v)
        }
        Term::Lam(_, b) => mentions_as_value(b, v),
        _ => false,
    }
}

fn bound_names(def: &DerivedDef, out: &mut Vec<String>) {
    fn in_term(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::App(h, xs) => {
                in_term(h, out);
                xs.iter().for_each(|x| in_term(x, out));
            }
            Term::Lam(ns, b) => {
                out.extend(ns.iter().cloned());
                in_term(b, out);
            }
            Term::Pi(b, body) => {
                match b {
                    Binder::Named { names, ty, .. } => {
                        out.extend(names.iter().cloned());
                        in_term(ty, out);
                    }
                    Binder::Forall { names, ty, .. } => {
                        out.extend(names.iter().cloned());
                        if let Some(ty) = ty {
                            in_term(ty, out);
                        }
                    }
                    Binder::Anon(ty) => in_term(ty, out),
                }
                in_term(body, out);
            }
            _ => {}
        }
    }
    in_term(&def.signature, out);
    match &def.body {
        Body::Clauses(cs) => {
            for c in cs {
                c.patterns.iter().for_each(|p| p.binds(out));
                in_term(&c.rhs, out);
            }
        }
        Body::Data(d) => {
            out.extend(d.params.iter().map(|(p, _)| p.clone()));
        }
    }
}

/// Source names must survive emission: no Agda keywords, no clash with a
/// generated definition, and no constructor a generated clause would read
/// as a constructor pattern.
fn check_names(schema: &GroupSchema, defs: &[DerivedDef]) -> Result<(), DeriveError> {
    let source: Vec<&str> = schema.decls.iter().map(|d| d.name.as_str()).collect();
    let mut ctors: Vec<&str> = Vec::new();
    let mut params: Vec<&str> = Vec::new();
    for d in &schema.decls {
        ctors.extend(d.ctors.iter().map(|c| c.name.as_str()));
        params.extend(d.params.iter().map(String::as_str));
    }
    for name in source.iter().chain(&ctors).chain(&params) {
        if AGDA_KEYWORDS.contains(name) {
            return Err(DeriveError::NameClash {
                name: name.to_string(),
                with: "an Agda keyword".into(),
            });
        }
    }
    let is_source = |d: &DerivedDef| d.is_data() && source.contains(&d.name.as_str());
    let mut generated: Vec<&str> = Vec::new();
    for d in defs.iter().filter(|d| !is_source(d)) {
        generated.push(&d.name);
        if let Body::Data(data) = &d.body {
            generated.extend(data.ctors.iter().map(|(c, _)| c.as_str()));
        }
    }
    for name in source.iter().chain(&ctors) {
        if generated.contains(name) {
            return Err(DeriveError::NameClash {
                name: name.to_string(),
                with: "a generated definition".into(),
            });
        }
    }
    for d in defs.iter().filter(|d| !is_source(d)) {
        let mut bound = Vec::new();
        bound_names(d, &mut bound);
        if let Some(c) = ctors.iter().find(|c| bound.iter().any(|b| b == *c)) {
            return Err(DeriveError::NameClash {
                name: c.to_string(),
                with: format!("a variable of `{}`", d.name),
            });
        }
    }
    Ok(())
}
