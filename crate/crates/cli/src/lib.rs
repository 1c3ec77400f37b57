//! Parser, evaluator and brute-force oracle behind the `oag` binary.

pub mod expr;
pub mod oracle;
pub mod run;
pub mod text;

pub use expr::{parse, SetExpr, SyntaxError};
pub use run::{run, Options, Outcome, RunError};
