use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Payload, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("type mismatch: expected {expected}, found `{found}`")]
    Mismatch { expected: String, found: String },
    #[error("natural number overflow in {0}")]
    Overflow(&'static str),
    #[error("algebra `{algebra}` has no method for constructor `{ctor}`")]
    MissingMethod { algebra: String, ctor: String },
    #[error("algebra `{algebra}` has no base function for variable {var}")]
    MissingBase { algebra: String, var: usize },
    #[error("expected a {expected} result, found {found}")]
    ResultKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("function-valued results can only be observed after application")]
    FunctionObserved,
    #[error("recursion depth guard of {limit} exceeded")]
    DepthGuard { limit: usize },
    #[error("{0}")]
    Shape(String),
}

pub type EvalResult = Result<RuntimeResult, EvalError>;

/// An opaque function value.
#[derive(Clone)]
pub struct Func(Rc<dyn Fn(RuntimeResult) -> EvalResult>);

impl Func {
    pub fn new(f: impl Fn(RuntimeResult) -> EvalResult + 'static) -> Self {
        Func(Rc::new(f))
    }

    pub fn call(&self, arg: RuntimeResult) -> EvalResult {
        (self.0)(arg)
    }
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<function>")
    }
}

/// What an instance of the result family evaluates to.
#[derive(Clone, Debug)]
pub enum RuntimeResult {
    Nat(u64),
    Tree(Value),
    Fun(Func),
}

impl RuntimeResult {
    pub fn fun(f: impl Fn(RuntimeResult) -> EvalResult + 'static) -> Self {
        RuntimeResult::Fun(Func::new(f))
    }

    /// Natural payloads become `Nat`; everything else stays a tree.
    pub fn from_value(v: Value) -> Self {
        match v {
            Value::Base(Payload::Nat(n)) => RuntimeResult::Nat(n),
            other => RuntimeResult::Tree(other),
        }
    }

    pub fn into_value(self) -> Result<Value, EvalError> {
        match self {
            RuntimeResult::Nat(n) => Ok(Value::nat(n)),
            RuntimeResult::Tree(v) => Ok(v),
            RuntimeResult::Fun(_) => Err(EvalError::ResultKind {
                expected: "first-order",
                found: "function",
            }),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RuntimeResult::Nat(_) => "natural",
            RuntimeResult::Tree(_) => "tree",
            RuntimeResult::Fun(_) => "function",
        }
    }

    pub fn as_nat(&self) -> Result<u64, EvalError> {
        match self {
            RuntimeResult::Nat(n) => Ok(*n),
            other => Err(EvalError::ResultKind {
                expected: "natural",
                found: other.kind(),
            }),
        }
    }

    pub fn apply(&self, arg: RuntimeResult) -> EvalResult {
        match self {
            RuntimeResult::Fun(f) => f.call(arg),
            other => Err(EvalError::ResultKind {
                expected: "function",
                found: other.kind(),
            }),
        }
    }

    /// First-order view used for equality checks.
    pub fn observe(&self) -> Result<Observed, EvalError> {
        match self {
            RuntimeResult::Nat(n) => Ok(Observed::Nat(*n)),
            RuntimeResult::Tree(v) => Ok(Observed::Tree(v.clone())),
            RuntimeResult::Fun(_) => Err(EvalError::FunctionObserved),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observed {
    Nat(u64),
    Tree(Value),
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Nat(n) => write!(f, "{n}"),
            Observed::Tree(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for RuntimeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuntimeResult::Nat(n) => write!(f, "{n}"),
            RuntimeResult::Tree(v) => write!(f, "{v}"),
            RuntimeResult::Fun(_) => f.write_str("<function>"),
        }
    }
}

pub(crate) fn checked_add(a: u64, b: u64, what: &'static str) -> Result<u64, EvalError> {
    a.checked_add(b).ok_or(EvalError::Overflow(what))
}
