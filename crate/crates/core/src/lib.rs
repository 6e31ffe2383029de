//! Ellipsis resolution by higher-order unification.

pub mod ellipsis;
pub mod report;
pub mod scope;
pub mod syntax;
pub mod term;
pub mod types;
pub mod unify;

pub use term::{Env, Term, TermError, Var};
pub use types::Type;
