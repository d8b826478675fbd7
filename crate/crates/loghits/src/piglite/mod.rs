//! Interpreter for a small Pig Latin subset.
//!
//! Supported statements: `LOAD ... USING PigStorage(..) AS (..)`,
//! `UNION`, `FILTER ... BY (col MATCHES 'pattern')`,
//! `FOREACH ... GENERATE` (projection, or `group, SUM(rel.col)` over a
//! grouped relation), `GROUP ... BY col`, and
//! `STORE ... USING PigStorage(..[, '-schema'])`. Keywords are
//! case-insensitive; statements bind relation names in order.

pub mod ast;
pub mod exec;
pub mod lexer;
pub mod parser;
pub mod pattern;
pub mod relation;
pub mod storage;

use std::path::Path;

use thiserror::Error;

pub use ast::{Script, Statement};
pub use exec::{execute, Bound, ExecError, ExecOutcome};
pub use lexer::{lex, LexError, Token};
pub use parser::{parse, ParseError};
pub use pattern::{BadPattern, Pattern};
pub use relation::{
    aggregate_sum, filter_matches, group_by, project, union, Column, ColumnType, GroupedRelation,
    OpError, Relation, Schema, Tuple, Value,
};
pub use storage::{load, store, SCHEMA_SIDECAR, STORE_DATA_FILE};

/// Any failure between script text and stored output.
#[derive(Debug, Error)]
pub enum PigError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Lexes, parses, and executes a script in one call.
pub fn run_script(source: &str, working_dir: &Path) -> Result<ExecOutcome, PigError> {
    let tokens = lex(source)?;
    let script = parse(&tokens)?;
    Ok(execute(&script, working_dir)?)
}
