//! Executing derived folds on concrete values.

pub mod algebra;
pub mod bridge;
pub mod direct;
pub mod enumerate;
pub mod eval;
pub mod result;
pub mod suite;

pub use algebra::{Algebra, DepAlgebra, MapFn, ResultKind};
pub use bridge::eval_nfold_prime;
pub use direct::{eval_hfold_direct, eval_hfold_via_nfold, eval_hmap_direct, HAlgebra};
pub use enumerate::{enumerate_indices, enumerate_values};
pub use eval::{eval_ind, eval_map, eval_nfold, typecheck_value, Evaluator};
pub use result::{EvalError, EvalResult, Observed, RuntimeResult};
pub use suite::{run_suite, PropertyReport, SuiteConfig};
