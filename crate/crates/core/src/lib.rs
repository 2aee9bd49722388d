//! Folds, induction principles and maps for nested data types.
//!
//! Given declarations such as
//!
//! ```text
//! data Bush a where
//!   leaf : Bush a
//!   cons : a -> Bush (Bush a) -> Bush a
//! ```
//!
//! the crate derives an index universe for each mutual group, a fold
//! defined simultaneously over every iterated instantiation of the group
//! (structurally recursive, unlike the higher-order fold), its induction
//! principle, a map and the higher-order folds, and renders them as Agda.
//! The [`runtime`] module executes the same folds on concrete values so
//! that the equations relating them can be checked exhaustively on small
//! inputs.

pub mod analysis;
pub mod derive;
pub mod diag;
pub mod emit;
pub mod runtime;
pub mod syntax;

pub use analysis::{
    classify, index_universe, type_to_index, well_formed, BaseSort, Classification, GroupSchema, IndexExpr,
    IndexTypeSpec, MutualGroup, ValueType,
};
pub use diag::{Diagnostic, Pos, Severity};
pub use syntax::{parse_program, parse_value_file, parse_value_literal, Program, TypeExpr, Value};
