//! Recursive-descent parser. Checks, while parsing, that every referenced
//! relation name was bound by an earlier statement.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::{Script, Statement};
use super::lexer::{Keyword, Token, TokenKind};
use super::relation::{Column, ColumnType, Schema};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at {line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: relation '{name}' is not bound by any earlier statement")]
    UnboundRelation { name: String, line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

struct Parser<'a> {
    tokens: &'a [Token],
    position: usize,
    bound: HashSet<String>,
}

pub fn parse(tokens: &[Token]) -> Result<Script, ParseError> {
    let mut parser = Parser {
        tokens,
        position: 0,
        bound: HashSet::new(),
    };
    let mut statements = Vec::new();
    while !parser.at_end() {
        statements.push(parser.statement()?);
    }
    Ok(Script { statements })
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.position >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.position)
    }

    fn last_position(&self) -> (usize, usize) {
        self.tokens
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(token) => ParseError::Syntax {
                line: token.line,
                col: token.col,
                expected: expected.into(),
                found: token.kind.to_string(),
            },
            None => {
                let (line, col) = self.last_position();
                ParseError::Syntax {
                    line,
                    col,
                    expected: expected.into(),
                    found: "end of input".to_string(),
                }
            }
        }
    }

    fn advance(&mut self) -> Option<&Token> {
        let token = self.tokens.get(self.position);
        self.position += 1;
        token
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> Result<&Token, ParseError> {
        match self.peek() {
            Some(token) if &token.kind == kind => Ok(self.advance().unwrap()),
            _ => Err(self.error(expected)),
        }
    }

    fn expect_keyword(&mut self, keyword: Keyword) -> Result<(), ParseError> {
        self.expect(&TokenKind::Keyword(keyword), keyword.as_str())?;
        Ok(())
    }

    fn ident(&mut self, expected: &str) -> Result<(String, usize), ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                line,
                ..
            }) => {
                let result = (name.clone(), *line);
                self.advance();
                Ok(result)
            }
            _ => Err(self.error(expected)),
        }
    }

    fn string(&mut self, expected: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Str(text),
                ..
            }) => {
                let text = text.clone();
                self.advance();
                Ok(text)
            }
            _ => Err(self.error(expected)),
        }
    }

    /// A relation reference; must already be bound.
    fn bound_ident(&mut self) -> Result<String, ParseError> {
        let (name, line) = self.ident("relation name")?;
        if !self.bound.contains(&name) {
            return Err(ParseError::UnboundRelation { name, line });
        }
        Ok(name)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Keyword(Keyword::Store)) => {
                self.advance();
                self.store()
            }
            Some(TokenKind::Ident(_)) => {
                let (target, _) = self.ident("relation name")?;
                self.expect(&TokenKind::Equals, "'='")?;
                let statement = match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::Keyword(Keyword::Load)) => {
                        self.advance();
                        self.load(target)?
                    }
                    Some(TokenKind::Keyword(Keyword::Union)) => {
                        self.advance();
                        self.union(target)?
                    }
                    Some(TokenKind::Keyword(Keyword::Filter)) => {
                        self.advance();
                        self.filter(target)?
                    }
                    Some(TokenKind::Keyword(Keyword::Foreach)) => {
                        self.advance();
                        self.foreach(target)?
                    }
                    Some(TokenKind::Keyword(Keyword::Group)) => {
                        self.advance();
                        self.group_by(target)?
                    }
                    _ => return Err(self.error("LOAD, UNION, FILTER, FOREACH, or GROUP")),
                };
                self.expect(&TokenKind::Semi, "';'")?;
                // Bind only after the right-hand side resolved its sources.
                if let Some(name) = statement.target() {
                    self.bound.insert(name.to_string());
                }
                Ok(statement)
            }
            _ => Err(self.error("STORE or a relation name")),
        }
    }

    /// `'path' USING PigStorage('delim') AS (name:type, ...)`
    fn load(&mut self, target: String) -> Result<Statement, ParseError> {
        let path = self.string("file path string")?;
        self.expect_keyword(Keyword::Using)?;
        let delimiter = self.pigstorage_open()?;
        self.expect(&TokenKind::RParen, "')'")?;
        self.expect_keyword(Keyword::As)?;
        self.expect(&TokenKind::LParen, "'('")?;
        let schema = self.schema()?;
        self.expect(&TokenKind::RParen, "')'")?;
        Ok(Statement::Load {
            target,
            path,
            delimiter,
            schema,
        })
    }

    /// `PigStorage('delim'` — shared prefix of LOAD and STORE; returns the
    /// delimiter and leaves the closing of the call to the caller.
    fn pigstorage_open(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                ..
            }) if name == "PigStorage" => {
                self.advance();
            }
            _ => return Err(self.error("PigStorage")),
        }
        self.expect(&TokenKind::LParen, "'('")?;
        self.string("delimiter string")
    }

    fn schema(&mut self) -> Result<Schema, ParseError> {
        let mut columns = Vec::new();
        loop {
            let (name, line) = self.ident("column name")?;
            self.expect(&TokenKind::Colon, "':'")?;
            let (type_name, type_line) = self.ident("column type (chararray or int)")?;
            let ty = if type_name.eq_ignore_ascii_case("chararray") {
                ColumnType::Chararray
            } else if type_name.eq_ignore_ascii_case("int") {
                ColumnType::Int
            } else {
                return Err(ParseError::Invalid {
                    line: type_line,
                    message: format!("unknown column type '{type_name}'"),
                });
            };
            columns.push(Column { name, ty });
            if self.peek().map(|t| &t.kind) == Some(&TokenKind::Comma) {
                self.advance();
                continue;
            }
            return Schema::new(columns).map_err(|message| ParseError::Invalid { line, message });
        }
    }

    /// `A, B [, C ...]` — at least two relations.
    fn union(&mut self, target: String) -> Result<Statement, ParseError> {
        let mut inputs = vec![self.bound_ident()?];
        if self.peek().map(|t| &t.kind) != Some(&TokenKind::Comma) {
            return Err(self.error("',' (UNION takes at least two relations)"));
        }
        while self.peek().map(|t| &t.kind) == Some(&TokenKind::Comma) {
            self.advance();
            inputs.push(self.bound_ident()?);
        }
        Ok(Statement::Union { target, inputs })
    }

    /// `S BY (col MATCHES 'pattern')` — parentheses optional.
    fn filter(&mut self, target: String) -> Result<Statement, ParseError> {
        let source = self.bound_ident()?;
        self.expect_keyword(Keyword::By)?;
        let open = self.peek().map(|t| &t.kind) == Some(&TokenKind::LParen);
        if open {
            self.advance();
        }
        let (column, _) = self.ident("column name")?;
        self.expect_keyword(Keyword::Matches)?;
        let pattern = self.string("pattern string")?;
        if open {
            self.expect(&TokenKind::RParen, "')'")?;
        }
        Ok(Statement::Filter {
            target,
            source,
            column,
            pattern,
        })
    }

    /// `S GENERATE group, SUM(rel.col)` or `S GENERATE col [, col ...]`.
    fn foreach(&mut self, target: String) -> Result<Statement, ParseError> {
        let source = self.bound_ident()?;
        self.expect_keyword(Keyword::Generate)?;
        if self.peek().map(|t| &t.kind) == Some(&TokenKind::Keyword(Keyword::Group)) {
            self.advance();
            self.expect(&TokenKind::Comma, "','")?;
            self.expect_keyword(Keyword::Sum)?;
            self.expect(&TokenKind::LParen, "'('")?;
            let bag = self.bound_ident()?;
            self.expect(&TokenKind::Dot, "'.'")?;
            let (column, _) = self.ident("column name")?;
            self.expect(&TokenKind::RParen, "')'")?;
            Ok(Statement::ForEachSum {
                target,
                source,
                bag,
                column,
            })
        } else {
            let mut columns = vec![self.ident("column name")?.0];
            while self.peek().map(|t| &t.kind) == Some(&TokenKind::Comma) {
                self.advance();
                columns.push(self.ident("column name")?.0);
            }
            Ok(Statement::ForEachProject {
                target,
                source,
                columns,
            })
        }
    }

    /// `S BY col`
    fn group_by(&mut self, target: String) -> Result<Statement, ParseError> {
        let source = self.bound_ident()?;
        self.expect_keyword(Keyword::By)?;
        let (column, _) = self.ident("column name")?;
        Ok(Statement::GroupBy {
            target,
            source,
            column,
        })
    }

    /// `S INTO 'path' USING PigStorage('delim'[, '-schema'])`
    fn store(&mut self) -> Result<Statement, ParseError> {
        let source = self.bound_ident()?;
        self.expect_keyword(Keyword::Into)?;
        let path = self.string("output path string")?;
        self.expect_keyword(Keyword::Using)?;
        let delimiter = self.pigstorage_open()?;
        let write_schema = if self.peek().map(|t| &t.kind) == Some(&TokenKind::Comma) {
            self.advance();
            let option = self.string("'-schema'")?;
            if option != "-schema" {
                let (line, col) = self.last_position();
                return Err(ParseError::Syntax {
                    line,
                    col,
                    expected: "'-schema'".to_string(),
                    found: format!("string '{option}'"),
                });
            }
            true
        } else {
            false
        };
        self.expect(&TokenKind::RParen, "')'")?;
        self.expect(&TokenKind::Semi, "';'")?;
        Ok(Statement::Store {
            source,
            path,
            delimiter,
            write_schema,
        })
    }
}
