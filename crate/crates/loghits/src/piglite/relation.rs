//! Relations: ordered bags of typed tuples under a named schema, and the
//! transformations the interpreter evaluates.

use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

use super::pattern::{BadPattern, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Chararray,
    Int,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Chararray => "chararray",
            ColumnType::Int => "int",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

/// An ordered list of uniquely named, typed columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<Column>,
}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Result<Schema, String> {
        if columns.is_empty() {
            return Err("schema needs at least one column".to_string());
        }
        for (i, column) in columns.iter().enumerate() {
            if column.name.is_empty() {
                return Err("column names must be non-empty".to_string());
            }
            if columns[..i].iter().any(|c| c.name == column.name) {
                return Err(format!("duplicate column name '{}'", column.name));
            }
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Chararray(String),
    Int(i64),
}

impl Value {
    pub fn type_of(&self) -> ColumnType {
        match self {
            Value::Chararray(_) => ColumnType::Chararray,
            Value::Int(_) => ColumnType::Int,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Chararray(text) => Some(text),
            Value::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Chararray(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Chararray(text) => f.write_str(text),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    values: Vec<Value>,
}

impl Tuple {
    pub fn new(values: Vec<Value>) -> Self {
        Tuple { values }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn get(&self, index: usize) -> &Value {
        &self.values[index]
    }
}

/// An ordered bag of tuples conforming to a schema; duplicates are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    schema: Schema,
    tuples: Vec<Tuple>,
}

#[derive(Debug, Error)]
pub enum OpError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column '{column}': cannot parse '{value}' as int")]
    Type {
        line: usize,
        column: String,
        value: String,
    },
    #[error("schema mismatch: ({left}) vs ({right})")]
    SchemaMismatch { left: String, right: String },
    #[error("no such column '{0}'")]
    NoSuchColumn(String),
    #[error("column '{column}' is {found}, expected {expected}")]
    ColumnType {
        column: String,
        expected: ColumnType,
        found: ColumnType,
    },
    #[error(transparent)]
    BadPattern(#[from] BadPattern),
    #[error("integer overflow summing column '{0}'")]
    Overflow(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("empty delimiter")]
    EmptyDelimiter,
    #[error("I/O error at {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn describe(schema: &Schema) -> String {
    schema
        .columns()
        .iter()
        .map(|c| format!("{}:{}", c.name, c.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Relation {
    /// Builds a relation, checking every tuple against the schema.
    pub fn new(schema: Schema, tuples: Vec<Tuple>) -> Result<Relation, OpError> {
        for (i, tuple) in tuples.iter().enumerate() {
            if tuple.values().len() != schema.arity() {
                return Err(OpError::Arity {
                    line: i + 1,
                    expected: schema.arity(),
                    found: tuple.values().len(),
                });
            }
            for (value, column) in tuple.values().iter().zip(schema.columns()) {
                if value.type_of() != column.ty {
                    return Err(OpError::ColumnType {
                        column: column.name.clone(),
                        expected: column.ty,
                        found: value.type_of(),
                    });
                }
            }
        }
        Ok(Relation { schema, tuples })
    }

    pub fn empty(schema: Schema) -> Relation {
        Relation {
            schema,
            tuples: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    fn column_index(&self, column: &str) -> Result<usize, OpError> {
        self.schema
            .index_of(column)
            .ok_or_else(|| OpError::NoSuchColumn(column.to_string()))
    }
}

/// One tuple bag per distinct key, in order of first occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedRelation {
    key_column: Column,
    source_schema: Schema,
    groups: Vec<(Value, Vec<Tuple>)>,
}

impl GroupedRelation {
    pub fn key_column(&self) -> &Column {
        &self.key_column
    }

    pub fn source_schema(&self) -> &Schema {
        &self.source_schema
    }

    pub fn groups(&self) -> &[(Value, Vec<Tuple>)] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Bag concatenation: `a`'s tuples first, duplicates kept. Schemas must
/// match exactly (names and types).
pub fn union(a: &Relation, b: &Relation) -> Result<Relation, OpError> {
    if a.schema != b.schema {
        return Err(OpError::SchemaMismatch {
            left: describe(&a.schema),
            right: describe(&b.schema),
        });
    }
    let mut tuples = a.tuples.clone();
    tuples.extend(b.tuples.iter().cloned());
    Ok(Relation {
        schema: a.schema.clone(),
        tuples,
    })
}

/// Keeps tuples whose chararray `column` matches `pattern` in whole.
pub fn filter_matches(
    relation: &Relation,
    column: &str,
    pattern: &str,
) -> Result<Relation, OpError> {
    let index = relation.column_index(column)?;
    let col = &relation.schema.columns()[index];
    if col.ty != ColumnType::Chararray {
        return Err(OpError::ColumnType {
            column: column.to_string(),
            expected: ColumnType::Chararray,
            found: col.ty,
        });
    }
    let compiled = Pattern::compile(pattern)?;
    let tuples = relation
        .tuples
        .iter()
        .filter(|tuple| {
            tuple
                .get(index)
                .as_str()
                .is_some_and(|text| compiled.matches(text))
        })
        .cloned()
        .collect();
    Ok(Relation {
        schema: relation.schema.clone(),
        tuples,
    })
}

/// Groups by one column; groups are ordered by first occurrence and each
/// bag preserves source order.
pub fn group_by(relation: &Relation, column: &str) -> Result<GroupedRelation, OpError> {
    let index = relation.column_index(column)?;
    let key_column = relation.schema.columns()[index].clone();
    let mut groups: Vec<(Value, Vec<Tuple>)> = Vec::new();
    for tuple in &relation.tuples {
        let key = tuple.get(index);
        match groups.iter_mut().find(|(k, _)| k == key) {
            Some((_, bag)) => bag.push(tuple.clone()),
            None => groups.push((key.clone(), vec![tuple.clone()])),
        }
    }
    Ok(GroupedRelation {
        key_column,
        source_schema: relation.schema.clone(),
        groups,
    })
}

/// Projection: narrows/reorders columns; duplicates in `columns` are
/// allowed only if names stay unique, which the schema check enforces.
pub fn project(relation: &Relation, columns: &[String]) -> Result<Relation, OpError> {
    let indexes: Vec<usize> = columns
        .iter()
        .map(|c| relation.column_index(c))
        .collect::<Result<_, _>>()?;
    let schema = Schema::new(
        indexes
            .iter()
            .map(|&i| relation.schema.columns()[i].clone())
            .collect(),
    )
    .map_err(OpError::Schema)?;
    let tuples = relation
        .tuples
        .iter()
        .map(|tuple| Tuple::new(indexes.iter().map(|&i| tuple.get(i).clone()).collect()))
        .collect();
    Ok(Relation { schema, tuples })
}

/// `GENERATE group, SUM(bag.column)`: one `(group, sum)` tuple per group,
/// schema `(group: <key type>, sum: int)`.
pub fn aggregate_sum(grouped: &GroupedRelation, column: &str) -> Result<Relation, OpError> {
    let index = grouped
        .source_schema
        .index_of(column)
        .ok_or_else(|| OpError::NoSuchColumn(column.to_string()))?;
    let col = &grouped.source_schema.columns()[index];
    if col.ty != ColumnType::Int {
        return Err(OpError::ColumnType {
            column: column.to_string(),
            expected: ColumnType::Int,
            found: col.ty,
        });
    }
    let schema = Schema::new(vec![
        Column {
            name: "group".to_string(),
            ty: grouped.key_column.ty,
        },
        Column {
            name: "sum".to_string(),
            ty: ColumnType::Int,
        },
    ])
    .map_err(OpError::Schema)?;
    let mut tuples = Vec::with_capacity(grouped.groups.len());
    for (key, bag) in &grouped.groups {
        let mut sum: i64 = 0;
        for tuple in bag {
            let v = tuple.get(index).as_int().expect("int column");
            sum = sum
                .checked_add(v)
                .ok_or_else(|| OpError::Overflow(column.to_string()))?;
        }
        tuples.push(Tuple::new(vec![key.clone(), Value::Int(sum)]));
    }
    Ok(Relation { schema, tuples })
}
