//! Validation, mutual-group classification and index universes.
//!
//! Every mutual group of declarations gets an index universe: the free
//! term algebra over one variable per base type and one application
//! constructor per declaration in the group. For a single unary type such
//! as `Bush` that universe is isomorphic to the naturals, where `k` stands
//! for `Bush` iterated `k` times over the base type.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::diag::{Diagnostic, Pos};
use crate::syntax::{resolve, Program, TypeDecl, TypeExpr};

/// Names reserved for base types in value contexts.
pub const BASE_TYPE_NAMES: [&str; 2] = ["Nat", "Atom"];

const MAX_BASE_VARS: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Ordinary,
    Nested,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Ordinary => "ordinary",
            Classification::Nested => "nested",
        })
    }
}

/// A strongly connected component of the type-reference graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutualGroup {
    /// Member names in declaration order.
    pub decls: Vec<String>,
    /// Parameter count of each member, aligned with `decls`.
    pub arities: Vec<usize>,
    pub base_var_count: usize,
    pub classification: Classification,
}

impl MutualGroup {
    pub fn contains(&self, name: &str) -> bool {
        self.decls.iter().any(|d| d == name)
    }

    pub fn module_name(&self) -> String {
        self.decls.concat()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTypeSpec {
    pub name: String,
    pub var_ctors: Vec<String>,
    pub app_ctors: Vec<(String, usize)>,
}

/// Element of an index universe. `App(d, ..)` refers to the `d`-th
/// declaration of the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexExpr {
    Var(usize),
    App(usize, Vec<IndexExpr>),
}

impl IndexExpr {
    /// `app` applied `depth` times to variable 0; the image of `depth` under
    /// the naturals isomorphism for unary single-declaration groups.
    pub fn iterate(app: usize, depth: usize) -> IndexExpr {
        (0..depth).fold(IndexExpr::Var(0), |acc, _| IndexExpr::App(app, vec![acc]))
    }

    /// Inverse of [`IndexExpr::iterate`].
    pub fn unary_depth(&self) -> Option<usize> {
        match self {
            IndexExpr::Var(0) => Some(0),
            IndexExpr::App(_, args) if args.len() == 1 => args[0].unary_depth().map(|d| d + 1),
            _ => None,
        }
    }

    /// Replaces `Var(k)` by `args[k]`.
    pub fn subst(&self, args: &[IndexExpr]) -> IndexExpr {
        match self {
            IndexExpr::Var(k) => args[*k].clone(),
            IndexExpr::App(d, xs) => IndexExpr::App(*d, xs.iter().map(|x| x.subst(args)).collect()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            IndexExpr::Var(_) => 0,
            IndexExpr::App(_, xs) => 1 + xs.iter().map(IndexExpr::depth).max().unwrap_or(0),
        }
    }

    pub fn display<'a>(&'a self, spec: &'a IndexTypeSpec) -> IndexDisplay<'a> {
        IndexDisplay { expr: self, spec }
    }

    pub fn is_well_formed(&self, spec: &IndexTypeSpec) -> bool {
        match self {
            IndexExpr::Var(k) => *k < spec.var_ctors.len(),
            IndexExpr::App(d, xs) => spec
                .app_ctors
                .get(*d)
                .is_some_and(|(_, n)| *n == xs.len() && xs.iter().all(|x| x.is_well_formed(spec))),
        }
    }
}

pub struct IndexDisplay<'a> {
    expr: &'a IndexExpr,
    spec: &'a IndexTypeSpec,
}

impl fmt::Display for IndexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            IndexExpr::Var(k) => f.write_str(&self.spec.var_ctors[*k]),
            IndexExpr::App(d, xs) => {
                f.write_str(&self.spec.app_ctors[*d].0)?;
                for x in xs {
                    match x {
                        IndexExpr::App(..) => write!(f, " ({})", x.display(self.spec))?,
                        IndexExpr::Var(_) => write!(f, " {}", x.display(self.spec))?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("cross-group nesting not supported in v1: `{found}` is not a member of group {group}")]
    CrossGroup { found: String, group: String },
    #[error("type variable `{0}` is not a parameter of the enclosing declaration")]
    UnboundVar(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("arity mismatch: `{name}` expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("value type must be a declared type applied to base types, found `{0}`")]
    NotADataType(String),
    #[error("a value type may use at most {max} distinct base types, found {found}")]
    TooManyBaseTypes { max: usize, found: usize },
}

/// Checks every structural rule; keeps going past the first error.
pub fn well_formed(program: &Program) -> Vec<Diagnostic> {
    let mut diags = resolve(program);
    let mut seen_ctors: HashMap<&str, &str> = HashMap::new();
    for d in &program.decls {
        if BASE_TYPE_NAMES.contains(&d.name.as_str()) || d.name == "Set" {
            diags.push(Diagnostic::error(
                d.pos,
                format!("`{}` is reserved and cannot be declared", d.name),
            ));
        }
        for (i, p) in d.params.iter().enumerate() {
            if d.params[..i].contains(p) {
                diags.push(Diagnostic::error(
                    d.pos,
                    format!("duplicate type parameter `{p}` in `{}`", d.name),
                ));
            }
        }
        if d.params.len() > MAX_BASE_VARS {
            diags.push(Diagnostic::error(
                d.pos,
                format!("`{}` has more than {MAX_BASE_VARS} parameters", d.name),
            ));
        }
        for c in &d.ctors {
            if let Some(other) = seen_ctors.insert(&c.name, &d.name) {
                diags.push(Diagnostic::error(
                    c.pos,
                    format!("constructor `{}` already declared in `{other}`", c.name),
                ));
            }
            let ok_result = c.result.head() == Some(d.name.as_str())
                && c.result_params()
                    .is_some_and(|ps| ps.len() == d.params.len() && ps.iter().zip(&d.params).all(|(a, b)| a == b));
            if !ok_result {
                diags.push(Diagnostic::error(
                    c.result.pos(),
                    format!(
                        "constructor result must be the declared head applied to its parameters (`{}`), found `{}`",
                        applied(d),
                        c.result
                    ),
                ));
            }
            for a in &c.args {
                unbound_vars(a, d, &mut diags);
            }
        }
    }
    diags
}

fn applied(d: &TypeDecl) -> String {
    TypeExpr::app(&d.name, d.params.iter().map(|p| TypeExpr::var(p)).collect()).to_string()
}

fn unbound_vars(t: &TypeExpr, d: &TypeDecl, diags: &mut Vec<Diagnostic>) {
    match t {
        TypeExpr::Var { name, pos } => {
            if !d.params.contains(name) {
                diags.push(Diagnostic::error(
                    *pos,
                    format!("type variable `{name}` is not a parameter of `{}`", d.name),
                ));
            }
        }
        TypeExpr::App { args, .. } => args.iter().for_each(|a| unbound_vars(a, d, diags)),
    }
}

/// Groups declarations into mutual-recursion components, dependencies
/// first. Within a group, members keep source order.
pub fn classify(program: &Program) -> Vec<MutualGroup> {
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..program.decls.len()).map(|i| graph.add_node(i)).collect();
    for (i, d) in program.decls.iter().enumerate() {
        let mut targets = HashSet::new();
        for c in &d.ctors {
            for a in &c.args {
                a.visit_apps(&mut |head, _, _| {
                    if let Some(j) = program.decl_index(head) {
                        targets.insert(j);
                    }
                });
            }
        }
        let mut targets: Vec<_> = targets.into_iter().collect();
        targets.sort_unstable();
        for j in targets {
            graph.add_edge(nodes[i], nodes[j], ());
        }
    }
    // Tarjan emits components in reverse topological order of the
    // condensation, i.e. referenced groups before their referrers.
    let mut groups: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|n| graph[n]).collect();
            members.sort_unstable();
            members
        })
        .collect();
    stable_topological(&mut groups, program);
    groups
        .into_iter()
        .map(|members| {
            let decls: Vec<String> = members.iter().map(|&i| program.decls[i].name.clone()).collect();
            let base_var_count = members.iter().map(|&i| program.decls[i].arity()).max().unwrap_or(0);
            let nested = members.iter().any(|&i| {
                program.decls[i].ctors.iter().any(|c| {
                    c.args.iter().any(|a| {
                        let mut irregular = false;
                        a.visit_apps(&mut |head, args, _| {
                            if let Some(member) = program.decl(head).filter(|_| decls.iter().any(|n| n == head)) {
                                let regular = args.len() == member.params.len()
                                    && args
                                        .iter()
                                        .zip(&member.params)
                                        .all(|(a, p)| matches!(a, TypeExpr::Var { name, .. } if name == p));
                                irregular |= !regular;
                            }
                        });
                        irregular
                    })
                })
            });
            MutualGroup {
                arities: members.iter().map(|&i| program.decls[i].arity()).collect(),
                decls,
                base_var_count,
                classification: if nested {
                    Classification::Nested
                } else {
                    Classification::Ordinary
                },
            }
        })
        .collect()
}

/// Makes the group order independent of petgraph's traversal: repeatedly
/// pick the group with the smallest first member whose dependencies have
/// all been emitted.
fn stable_topological(groups: &mut Vec<Vec<usize>>, program: &Program) {
    let group_of: BTreeMap<usize, usize> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, ms)| ms.iter().map(move |&m| (m, g)))
        .collect();
    let deps: Vec<HashSet<usize>> = groups
        .iter()
        .enumerate()
        .map(|(g, ms)| {
            let mut out = HashSet::new();
            for &m in ms {
                for c in &program.decls[m].ctors {
                    for a in &c.args {
                        a.visit_apps(&mut |head, _, _| {
                            if let Some(j) = program.decl_index(head) {
                                if group_of[&j] != g {
                                    out.insert(group_of[&j]);
                                }
                            }
                        });
                    }
                }
            }
            out
        })
        .collect();
    let mut done = vec![false; groups.len()];
    let mut order = Vec::with_capacity(groups.len());
    while order.len() < groups.len() {
        let next = (0..groups.len())
            .filter(|&g| !done[g] && deps[g].iter().all(|&d| done[d]))
            .min_by_key(|&g| groups[g][0])
            .expect("condensation is acyclic");
        done[next] = true;
        order.push(next);
    }
    let old = std::mem::take(groups);
    let mut old: Vec<Option<Vec<usize>>> = old.into_iter().map(Some).collect();
    *groups = order.into_iter().map(|g| old[g].take().unwrap()).collect();
}

fn var_ctor_name(k: usize) -> String {
    format!("var{}", (b'A' + k as u8) as char)
}

pub fn index_universe(group: &MutualGroup) -> IndexTypeSpec {
    IndexTypeSpec {
        name: format!("{}Index", group.module_name()),
        var_ctors: (0..group.base_var_count.min(MAX_BASE_VARS))
            .map(var_ctor_name)
            .collect(),
        app_ctors: group
            .decls
            .iter()
            .zip(&group.arities)
            .map(|(d, &n)| (format!("{d}C"), n))
            .collect(),
    }
}

/// Translates a constructor argument type of a group member into an index
/// template: parameters map positionally to `Var(k)`.
pub fn type_to_index(
    program: &Program,
    group: &MutualGroup,
    params: &[String],
    t: &TypeExpr,
) -> Result<IndexExpr, AnalysisError> {
    match t {
        TypeExpr::Var { name, .. } => params
            .iter()
            .position(|p| p == name)
            .map(IndexExpr::Var)
            .ok_or_else(|| AnalysisError::UnboundVar(name.clone())),
        TypeExpr::App { head, args, .. } => {
            let Some(d) = group.decls.iter().position(|n| n == head) else {
                return Err(if program.decl(head).is_some() {
                    AnalysisError::CrossGroup {
                        found: head.clone(),
                        group: group.module_name(),
                    }
                } else {
                    AnalysisError::UnknownType(head.clone())
                });
            };
            let expected = program.decl(head).map_or(0, TypeDecl::arity);
            if expected != args.len() {
                return Err(AnalysisError::Arity {
                    name: head.clone(),
                    expected,
                    found: args.len(),
                });
            }
            let args = args
                .iter()
                .map(|a| type_to_index(program, group, params, a))
                .collect::<Result<_, _>>()?;
            Ok(IndexExpr::App(d, args))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorSchema {
    pub name: String,
    /// Argument index templates over the declaration's parameters.
    pub args: Vec<IndexExpr>,
    /// Source argument types, kept for signatures read off the declaration.
    pub arg_types: Vec<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeclSchema {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<CtorSchema>,
}

/// Everything derivation and evaluation need to know about one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSchema {
    pub group: MutualGroup,
    pub spec: IndexTypeSpec,
    pub decls: Vec<DeclSchema>,
}

impl GroupSchema {
    pub fn build(program: &Program, group: &MutualGroup) -> Result<GroupSchema, AnalysisError> {
        let spec = index_universe(group);
        let decls = group
            .decls
            .iter()
            .map(|name| {
                let d = program
                    .decl(name)
                    .ok_or_else(|| AnalysisError::UnknownType(name.clone()))?;
                let ctors = d
                    .ctors
                    .iter()
                    .map(|c| {
                        Ok(CtorSchema {
                            name: c.name.clone(),
                            args: c
                                .args
                                .iter()
                                .map(|a| type_to_index(program, group, &d.params, a))
                                .collect::<Result<_, _>>()?,
                            arg_types: c.args.clone(),
                        })
                    })
                    .collect::<Result<_, AnalysisError>>()?;
                Ok(DeclSchema {
                    name: d.name.clone(),
                    params: d.params.clone(),
                    ctors,
                })
            })
            .collect::<Result<_, AnalysisError>>()?;
        Ok(GroupSchema {
            group: group.clone(),
            spec,
            decls,
        })
    }

    /// Source type of an index with every base variable at `Nat`, as written
    /// in a value file.
    pub fn source_type(&self, idx: &IndexExpr) -> String {
        match idx {
            IndexExpr::Var(_) => "Nat".to_string(),
            IndexExpr::App(d, xs) => {
                let mut s = self.decls[*d].name.clone();
                for x in xs {
                    match x {
                        IndexExpr::App(_, ys) if !ys.is_empty() => s.push_str(&format!(" ({})", self.source_type(x))),
                        _ => s.push_str(&format!(" {}", self.source_type(x))),
                    }
                }
                s
            }
        }
    }

    /// Locates constructor `name` as (declaration ordinal, constructor).
    pub fn ctor(&self, name: &str) -> Option<(usize, &CtorSchema)> {
        self.decls
            .iter()
            .enumerate()
            .find_map(|(d, ds)| ds.ctors.iter().find(|c| c.name == name).map(|c| (d, c)))
    }

    pub fn var_count(&self) -> usize {
        self.spec.var_ctors.len()
    }

    /// The index of a declaration applied to the first `arity` variables.
    pub fn decl_index(&self, d: usize) -> IndexExpr {
        IndexExpr::App(d, (0..self.spec.app_ctors[d].1).map(IndexExpr::Var).collect())
    }

    /// Singleton group of one unary declaration, where indices are naturals.
    pub fn is_unary_singleton(&self) -> bool {
        self.decls.len() == 1 && self.decls[0].params.len() == 1
    }

    /// For the `leaf | cons : a -> D (D a) -> D a` shape, the ordinals of
    /// the nullary and the binary constructor.
    pub fn bush_shape(&self) -> Option<BushShape> {
        if !self.is_unary_singleton() || self.decls[0].ctors.len() != 2 {
            return None;
        }
        let ctors = &self.decls[0].ctors;
        let nested = IndexExpr::App(0, vec![IndexExpr::App(0, vec![IndexExpr::Var(0)])]);
        let leaf = ctors.iter().position(|c| c.args.is_empty())?;
        let cons = 1 - leaf;
        (ctors[cons].args == [IndexExpr::Var(0), nested]).then_some(BushShape { leaf, cons })
    }

    /// For bracket sugar: a nullary constructor and a binary constructor
    /// whose second argument is headed by the same declaration.
    pub fn spine_shape(&self, d: usize) -> Option<(usize, usize)> {
        let ctors = &self.decls[d].ctors;
        if ctors.len() != 2 {
            return None;
        }
        let nil = ctors.iter().position(|c| c.args.is_empty())?;
        let cons = 1 - nil;
        let ok = ctors[cons].args.len() == 2 && matches!(ctors[cons].args[1], IndexExpr::App(h, _) if h == d);
        ok.then_some((nil, cons))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BushShape {
    pub leaf: usize,
    pub cons: usize,
}

/// Sorts of base payloads a value type can mention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseSort {
    Nat,
    Atom,
}

/// A concrete value type: an index plus the base sort of each variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueType {
    pub index: IndexExpr,
    pub bases: Vec<BaseSort>,
}

/// Reads a type such as `Bush (Bush Nat)` or `Dylan Nat Atom` as an index
/// over the given group. Distinct base types take variables in order of
/// first appearance.
pub fn value_type(schema: &GroupSchema, t: &TypeExpr) -> Result<ValueType, AnalysisError> {
    fn go(schema: &GroupSchema, t: &TypeExpr, bases: &mut Vec<BaseSort>) -> Result<IndexExpr, AnalysisError> {
        match t {
            TypeExpr::Var { name, .. } => Err(AnalysisError::NotADataType(name.clone())),
            TypeExpr::App { head, args, .. } => {
                let sort = match head.as_str() {
                    "Nat" => Some(BaseSort::Nat),
                    "Atom" => Some(BaseSort::Atom),
                    _ => None,
                };
                if let Some(sort) = sort {
                    if !args.is_empty() {
                        return Err(AnalysisError::Arity {
                            name: head.clone(),
                            expected: 0,
                            found: args.len(),
                        });
                    }
                    let k = match bases.iter().position(|b| *b == sort) {
                        Some(k) => k,
                        None => {
                            bases.push(sort);
                            bases.len() - 1
                        }
                    };
                    return Ok(IndexExpr::Var(k));
                }
                let Some(d) = schema.decls.iter().position(|d| &d.name == head) else {
                    return Err(AnalysisError::CrossGroup {
                        found: head.clone(),
                        group: schema.group.module_name(),
                    });
                };
                let expected = schema.decls[d].params.len();
                if expected != args.len() {
                    return Err(AnalysisError::Arity {
                        name: head.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| go(schema, a, bases)).collect::<Result<_, _>>()?;
                Ok(IndexExpr::App(d, args))
            }
        }
    }
    let mut bases = Vec::new();
    let index = go(schema, t, &mut bases)?;
    if bases.len() > schema.var_count() {
        return Err(AnalysisError::TooManyBaseTypes {
            max: schema.var_count(),
            found: bases.len(),
        });
    }
    while bases.len() < schema.var_count() {
        bases.push(BaseSort::Nat);
    }
    Ok(ValueType { index, bases })
}

/// Finds the group containing `name` and builds its schema.
pub fn schema_for(program: &Program, name: &str) -> Option<Result<GroupSchema, AnalysisError>> {
    classify(program)
        .into_iter()
        .find(|g| g.contains(name))
        .map(|g| GroupSchema::build(program, &g))
}

/// Position of a declaration, for diagnostics about a whole group.
pub fn group_pos(program: &Program, group: &MutualGroup) -> Pos {
    program.decl(&group.decls[0]).map(|d| d.pos).unwrap_or_default()
}
