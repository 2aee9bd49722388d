use std::fmt;

use crate::diag::Pos;

/// A parsed `.ndt` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub source_name: String,
    pub decls: Vec<TypeDecl>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&TypeDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn decl_index(&self, name: &str) -> Option<usize> {
        self.decls.iter().position(|d| d.name == name)
    }

    /// Finds the declaration owning constructor `name`.
    pub fn ctor(&self, name: &str) -> Option<(&TypeDecl, &Constructor)> {
        self.decls.iter().find_map(|d| d.ctor(name).map(|c| (d, c)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<Constructor>,
    pub pos: Pos,
}

impl TypeDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn ctor(&self, name: &str) -> Option<&Constructor> {
        self.ctors.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub args: Vec<TypeExpr>,
    /// The declared result type. Well-formed programs have the enclosing
    /// declaration applied to its own parameters here.
    pub result: TypeExpr,
    pub pos: Pos,
}

impl Constructor {
    /// Parameter names of the result type, when it is a head applied to
    /// plain variables.
    pub fn result_params(&self) -> Option<Vec<&str>> {
        match &self.result {
            TypeExpr::App { args, .. } => args
                .iter()
                .map(|a| match a {
                    TypeExpr::Var { name, .. } => Some(name.as_str()),
                    TypeExpr::App { .. } => None,
                })
                .collect(),
            TypeExpr::Var { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Var {
        name: String,
        pos: Pos,
    },
    App {
        head: String,
        args: Vec<TypeExpr>,
        pos: Pos,
    },
}

impl TypeExpr {
    pub fn var(name: &str) -> Self {
        TypeExpr::Var {
            name: name.to_string(),
            pos: Pos::default(),
        }
    }

    pub fn app(head: &str, args: Vec<TypeExpr>) -> Self {
        TypeExpr::App {
            head: head.to_string(),
            args,
            pos: Pos::default(),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            TypeExpr::Var { pos, .. } | TypeExpr::App { pos, .. } => *pos,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            TypeExpr::App { head, .. } => Some(head),
            TypeExpr::Var { .. } => None,
        }
    }

    /// Calls `f` on every application node, outermost first.
    pub fn visit_apps<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [TypeExpr], Pos)) {
        if let TypeExpr::App { head, args, pos } = self {
            f(head, args, *pos);
            for a in args {
                a.visit_apps(f);
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Var { name, .. } => f.write_str(name),
            TypeExpr::App { head, args, .. } => {
                f.write_str(head)?;
                for a in args {
                    match a {
                        TypeExpr::App { args: inner, .. } if !inner.is_empty() => write!(f, " ({a})")?,
                        _ => write!(f, " {a}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Payload of a base-type leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Nat(u64),
    Atom(String),
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Nat(n) => write!(f, "{n}"),
            Payload::Atom(a) => write!(f, "'{a}"),
        }
    }
}

/// A runtime data value: constructor applications over base payloads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Base(Payload),
    Con(String, Vec<Value>),
}

impl Value {
    pub fn nat(n: u64) -> Self {
        Value::Base(Payload::Nat(n))
    }

    pub fn atom(a: &str) -> Self {
        Value::Base(Payload::Atom(a.to_string()))
    }

    pub fn con(name: &str, args: Vec<Value>) -> Self {
        Value::Con(name.to_string(), args)
    }

    /// Number of constructor nodes; base leaves count zero.
    pub fn size(&self) -> usize {
        match self {
            Value::Base(_) => 0,
            Value::Con(_, args) => 1 + args.iter().map(Value::size).sum::<usize>(),
        }
    }
}

/// Explicit constructor-application syntax; always re-parseable.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Base(p) => write!(f, "{p}"),
            Value::Con(name, args) => {
                f.write_str(name)?;
                for a in args {
                    match a {
                        Value::Con(_, inner) if !inner.is_empty() => write!(f, " ({a})")?,
                        _ => write!(f, " {a}")?,
                    }
                }
                Ok(())
            }
        }
    }
}
