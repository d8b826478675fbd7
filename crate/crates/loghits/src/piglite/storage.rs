//! PigStorage-style delimiter-separated I/O.
//!
//! `store` treats its path as an output directory holding the data file
//! `part-00000` and, with the schema flag, a `.schema` sidecar of one
//! `name:type` line per column. `load` reads a single file, or every
//! `part-*` file of a directory in name order, so a stored relation and a
//! MapReduce output directory load the same way.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::relation::{ColumnType, OpError, Relation, Schema, Tuple, Value};

/// Name of the data file written inside a store directory.
pub const STORE_DATA_FILE: &str = "part-00000";
/// Name of the schema sidecar written inside a store directory.
pub const SCHEMA_SIDECAR: &str = ".schema";

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OpError + '_ {
    move |source| OpError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn data_files(path: &Path) -> Result<Vec<PathBuf>, OpError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(io_err(path))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(path))?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("part-"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Splits each line on the delimiter and coerces fields per the schema.
/// Tuple order follows file order (and `part-*` name order for
/// directories).
pub fn load(path: &Path, delimiter: &str, schema: &Schema) -> Result<Relation, OpError> {
    if delimiter.is_empty() {
        return Err(OpError::EmptyDelimiter);
    }
    let mut tuples = Vec::new();
    let mut line_number = 0usize;
    for file in data_files(path)? {
        let text = fs::read_to_string(&file).map_err(io_err(&file))?;
        for line in text.lines() {
            line_number += 1;
            let fields: Vec<&str> = line.split(delimiter).collect();
            if fields.len() != schema.arity() {
                return Err(OpError::Arity {
                    line: line_number,
                    expected: schema.arity(),
                    found: fields.len(),
                });
            }
            let values = fields
                .iter()
                .zip(schema.columns())
                .map(|(field, column)| match column.ty {
                    ColumnType::Chararray => Ok(Value::Chararray(field.to_string())),
                    ColumnType::Int => field
                        .parse::<i64>()
                        .map(Value::Int)
                        .map_err(|_| OpError::Type {
                            line: line_number,
                            column: column.name.clone(),
                            value: field.to_string(),
                        }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            tuples.push(Tuple::new(values));
        }
    }
    Relation::new(schema.clone(), tuples)
}

/// Writes the relation under the directory `path`; returns the written
/// file paths (data file first).
pub fn store(
    relation: &Relation,
    path: &Path,
    delimiter: &str,
    write_schema: bool,
) -> Result<Vec<PathBuf>, OpError> {
    if delimiter.is_empty() {
        return Err(OpError::EmptyDelimiter);
    }
    fs::create_dir_all(path).map_err(io_err(path))?;

    let mut data = String::new();
    for tuple in relation.tuples() {
        let line = tuple
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(delimiter);
        data.push_str(&line);
        data.push('\n');
    }
    let data_path = path.join(STORE_DATA_FILE);
    fs::write(&data_path, data).map_err(io_err(&data_path))?;
    let mut written = vec![data_path];

    if write_schema {
        let mut sidecar = String::new();
        for column in relation.schema().columns() {
            sidecar.push_str(&format!("{}:{}\n", column.name, column.ty));
        }
        let sidecar_path = path.join(SCHEMA_SIDECAR);
        fs::write(&sidecar_path, sidecar).map_err(io_err(&sidecar_path))?;
        written.push(sidecar_path);
    }
    Ok(written)
}
