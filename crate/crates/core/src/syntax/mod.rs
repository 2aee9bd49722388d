//! Surface syntax: the declaration DSL and value literals.
//!
//! ```text
//! program ::= decl+
//! decl    ::= "data" UIdent param* [":" kind] "where" NEWLINE ctor+
//! param   ::= LIdent | "(" LIdent+ ":" kind ")"
//! ctor    ::= ident ":" ctype           -- one per line
//! ctype   ::= app ("->" app)*
//! app     ::= UIdent arg* | arg
//! arg     ::= UIdent | LIdent | "(" app ")"
//! ```
//!
//! Arrows only separate constructor arguments; a parenthesised arrow is
//! rejected, so no argument can hold a function type.

mod ast;
mod lexer;
mod literal;
mod parser;
mod pretty;

pub use ast::{Constructor, Payload, Program, TypeDecl, TypeExpr, Value};
pub use literal::{default_value_type, parse_value_file, parse_value_literal, ValueBinding};
pub use parser::{parse_declarations, parse_program, resolve};
pub use pretty::pretty_program;
