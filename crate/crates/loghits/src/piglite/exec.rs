//! Script evaluation: statements run in order against an environment of
//! named relations; rebinding a name replaces the prior value.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ast::{Script, Statement};
use super::relation::{
    aggregate_sum, filter_matches, group_by, project, union, GroupedRelation, OpError, Relation,
};
use super::storage;

/// A name is bound either to a plain relation or to the result of GROUP.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Relation(Relation),
    Grouped(GroupedRelation),
}

#[derive(Debug)]
pub struct ExecOutcome {
    /// Final bindings after the last statement.
    pub env: HashMap<String, Bound>,
    /// Files written by STORE statements, in execution order.
    pub stored: Vec<PathBuf>,
}

#[derive(Debug, Error)]
#[error("statement {index} ({kind}) failed")]
pub struct ExecError {
    /// 1-based statement position in the script.
    pub index: usize,
    pub kind: &'static str,
    #[source]
    pub source: ExecErrorKind,
}

#[derive(Debug, Error)]
pub enum ExecErrorKind {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("relation '{0}' is not bound")]
    Unbound(String),
    #[error("relation '{0}' is grouped; {1} needs a plain relation")]
    NotARelation(String, &'static str),
    #[error("relation '{0}' is not grouped; GENERATE group, SUM(...) needs a GROUP result")]
    NotGrouped(String),
}

struct Env {
    bindings: HashMap<String, Bound>,
}

impl Env {
    fn relation(&self, name: &str, op: &'static str) -> Result<&Relation, ExecErrorKind> {
        match self.bindings.get(name) {
            Some(Bound::Relation(relation)) => Ok(relation),
            Some(Bound::Grouped(_)) => Err(ExecErrorKind::NotARelation(name.to_string(), op)),
            None => Err(ExecErrorKind::Unbound(name.to_string())),
        }
    }

    fn grouped(&self, name: &str) -> Result<&GroupedRelation, ExecErrorKind> {
        match self.bindings.get(name) {
            Some(Bound::Grouped(grouped)) => Ok(grouped),
            Some(Bound::Relation(_)) => Err(ExecErrorKind::NotGrouped(name.to_string())),
            None => Err(ExecErrorKind::Unbound(name.to_string())),
        }
    }
}

fn resolve(path: &str, working_dir: &Path) -> PathBuf {
    let path = Path::new(path);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        working_dir.join(path)
    }
}

/// Runs the script; relative LOAD/STORE paths resolve against
/// `working_dir`.
pub fn execute(script: &Script, working_dir: &Path) -> Result<ExecOutcome, ExecError> {
    let mut env = Env {
        bindings: HashMap::new(),
    };
    let mut stored = Vec::new();

    for (position, statement) in script.statements.iter().enumerate() {
        let fail = |source: ExecErrorKind| ExecError {
            index: position + 1,
            kind: statement.kind_name(),
            source,
        };
        let result: Result<(), ExecErrorKind> = (|| {
            match statement {
                Statement::Load {
                    target,
                    path,
                    delimiter,
                    schema,
                } => {
                    let relation =
                        storage::load(&resolve(path, working_dir), delimiter, schema)?;
                    env.bindings
                        .insert(target.clone(), Bound::Relation(relation));
                }
                Statement::Union { target, inputs } => {
                    let mut merged = env.relation(&inputs[0], "UNION")?.clone();
                    for name in &inputs[1..] {
                        merged = union(&merged, env.relation(name, "UNION")?)?;
                    }
                    env.bindings.insert(target.clone(), Bound::Relation(merged));
                }
                Statement::Filter {
                    target,
                    source,
                    column,
                    pattern,
                } => {
                    let filtered =
                        filter_matches(env.relation(source, "FILTER")?, column, pattern)?;
                    env.bindings
                        .insert(target.clone(), Bound::Relation(filtered));
                }
                Statement::ForEachProject {
                    target,
                    source,
                    columns,
                } => {
                    let projected = project(env.relation(source, "FOREACH")?, columns)?;
                    env.bindings
                        .insert(target.clone(), Bound::Relation(projected));
                }
                Statement::ForEachSum {
                    target,
                    source,
                    bag: _,
                    column,
                } => {
                    // The bag qualifier names the grouped source relation;
                    // the column resolves against its tuple schema.
                    let summed = aggregate_sum(env.grouped(source)?, column)?;
                    env.bindings.insert(target.clone(), Bound::Relation(summed));
                }
                Statement::GroupBy {
                    target,
                    source,
                    column,
                } => {
                    let grouped = group_by(env.relation(source, "GROUP")?, column)?;
                    env.bindings.insert(target.clone(), Bound::Grouped(grouped));
                }
                Statement::Store {
                    source,
                    path,
                    delimiter,
                    write_schema,
                } => {
                    let written = storage::store(
                        env.relation(source, "STORE")?,
                        &resolve(path, working_dir),
                        delimiter,
                        *write_schema,
                    )?;
                    stored.extend(written);
                }
            }
            Ok(())
        })();
        result.map_err(fail)?;
    }

    Ok(ExecOutcome {
        env: env.bindings,
        stored,
    })
}
