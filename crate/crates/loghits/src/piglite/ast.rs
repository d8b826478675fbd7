//! Script AST and its canonical text form.

use std::fmt;

use super::relation::{ColumnType, Schema};

/// One statement; all but `Store` bind (or rebind) a relation name.
#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Load {
        target: String,
        path: String,
        delimiter: String,
        schema: Schema,
    },
    /// `X = UNION A, B, ...;` with at least two inputs.
    Union { target: String, inputs: Vec<String> },
    Filter {
        target: String,
        source: String,
        column: String,
        pattern: String,
    },
    /// `X = FOREACH S GENERATE col, ...;`
    ForEachProject {
        target: String,
        source: String,
        columns: Vec<String>,
    },
    /// `X = FOREACH S GENERATE group, SUM(rel.col);` over a grouped
    /// relation; `rel` names the grouped source whose bag holds `col`.
    ForEachSum {
        target: String,
        source: String,
        bag: String,
        column: String,
    },
    GroupBy {
        target: String,
        source: String,
        column: String,
    },
    Store {
        source: String,
        path: String,
        delimiter: String,
        write_schema: bool,
    },
}

impl Statement {
    /// The relation name this statement binds, if any.
    pub fn target(&self) -> Option<&str> {
        match self {
            Statement::Load { target, .. }
            | Statement::Union { target, .. }
            | Statement::Filter { target, .. }
            | Statement::ForEachProject { target, .. }
            | Statement::ForEachSum { target, .. }
            | Statement::GroupBy { target, .. } => Some(target),
            Statement::Store { .. } => None,
        }
    }

    /// Short keyword for error messages.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Statement::Load { .. } => "LOAD",
            Statement::Union { .. } => "UNION",
            Statement::Filter { .. } => "FILTER",
            Statement::ForEachProject { .. } | Statement::ForEachSum { .. } => "FOREACH",
            Statement::GroupBy { .. } => "GROUP",
            Statement::Store { .. } => "STORE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Script {
    pub statements: Vec<Statement>,
}

/// Re-applies the lexer's string escapes.
fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('\'');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('\'');
    out
}

fn schema_text(schema: &Schema) -> String {
    schema
        .columns()
        .iter()
        .map(|c| {
            format!(
                "{}:{}",
                c.name,
                match c.ty {
                    ColumnType::Chararray => "chararray",
                    ColumnType::Int => "int",
                }
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Load {
                target,
                path,
                delimiter,
                schema,
            } => write!(
                f,
                "{target} = LOAD {} USING PigStorage({}) AS ({});",
                quote(path),
                quote(delimiter),
                schema_text(schema)
            ),
            Statement::Union { target, inputs } => {
                write!(f, "{target} = UNION {};", inputs.join(", "))
            }
            Statement::Filter {
                target,
                source,
                column,
                pattern,
            } => write!(
                f,
                "{target} = FILTER {source} BY ({column} MATCHES {});",
                quote(pattern)
            ),
            Statement::ForEachProject {
                target,
                source,
                columns,
            } => write!(
                f,
                "{target} = FOREACH {source} GENERATE {};",
                columns.join(", ")
            ),
            Statement::ForEachSum {
                target,
                source,
                bag,
                column,
            } => write!(
                f,
                "{target} = FOREACH {source} GENERATE group, SUM({bag}.{column});"
            ),
            Statement::GroupBy {
                target,
                source,
                column,
            } => write!(f, "{target} = GROUP {source} BY {column};"),
            Statement::Store {
                source,
                path,
                delimiter,
                write_schema,
            } => {
                write!(f, "STORE {source} INTO {} USING PigStorage({}", quote(path), quote(delimiter))?;
                if *write_schema {
                    write!(f, ", '-schema'")?;
                }
                f.write_str(");")
            }
        }
    }
}

impl fmt::Display for Script {
    /// Canonical text: one statement per line, uppercase keywords. Parsing
    /// this text yields a structurally equal script.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for statement in &self.statements {
            writeln!(f, "{statement}")?;
        }
        Ok(())
    }
}
