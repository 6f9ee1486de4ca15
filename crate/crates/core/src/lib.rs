//! Strongest postconditions and arithmetized semantics for while-programs
//! over the natural numbers.
//!
//! The crate parses programs and first-order assertions of arithmetic,
//! executes programs, builds the formula `α_S` defining a program's
//! input/output function and the formula `SP(p, S)` defining its strongest
//! postcondition, evaluates formulas over ℕ with a sound three-valued
//! bounded evaluator, and checks Hoare-logic derivations.

pub mod arith_sem;
pub mod coding;
pub mod eval;
pub mod hoare;
pub mod interp;
pub mod nonstd_order;
pub mod sp;
pub mod syntax;
