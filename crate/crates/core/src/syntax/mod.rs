//! Concrete syntax: the s-expression problem language and canonical reading text.

mod problem;
mod readable;
mod render;
pub mod sexpr;

pub use problem::{default_frame, parse_problem, parse_type_sexp, Elaborator, Expectation, Expected, ParseError, ProblemFile};
pub use readable::{parse_readable, parse_type, ReadableError};
pub use render::{render, to_sexpr, type_sexpr};
