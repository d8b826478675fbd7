//! Tokenizer for the Pig Latin subset.
//!
//! Keywords are case-insensitive; identifiers keep their spelling.
//! Strings are single-quoted with exactly two escapes, `\t` and `\\`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Load,
    Using,
    As,
    Union,
    Filter,
    By,
    Matches,
    Foreach,
    Generate,
    Group,
    Store,
    Into,
    Sum,
}

impl Keyword {
    fn from_ident(text: &str) -> Option<Keyword> {
        const TABLE: [(&str, Keyword); 13] = [
            ("load", Keyword::Load),
            ("using", Keyword::Using),
            ("as", Keyword::As),
            ("union", Keyword::Union),
            ("filter", Keyword::Filter),
            ("by", Keyword::By),
            ("matches", Keyword::Matches),
            ("foreach", Keyword::Foreach),
            ("generate", Keyword::Generate),
            ("group", Keyword::Group),
            ("store", Keyword::Store),
            ("into", Keyword::Into),
            ("sum", Keyword::Sum),
        ];
        TABLE
            .iter()
            .find(|(name, _)| text.eq_ignore_ascii_case(name))
            .map(|&(_, kw)| kw)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Load => "LOAD",
            Keyword::Using => "USING",
            Keyword::As => "AS",
            Keyword::Union => "UNION",
            Keyword::Filter => "FILTER",
            Keyword::By => "BY",
            Keyword::Matches => "MATCHES",
            Keyword::Foreach => "FOREACH",
            Keyword::Generate => "GENERATE",
            Keyword::Group => "GROUP",
            Keyword::Store => "STORE",
            Keyword::Into => "INTO",
            Keyword::Sum => "SUM",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Str(String),
    Equals,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(name) => write!(f, "identifier '{name}'"),
            TokenKind::Keyword(kw) => write!(f, "{}", kw.as_str()),
            TokenKind::Str(text) => write!(f, "string '{text}'"),
            TokenKind::Equals => f.write_str("'='"),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Semi => f.write_str("';'"),
            TokenKind::Colon => f.write_str("':'"),
            TokenKind::Dot => f.write_str("'.'"),
        }
    }
}

/// A token with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("lex error at {line}:{col}: {found}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub found: String,
}

pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! advance {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (token_line, token_col) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        let kind = match c {
            '=' => {
                advance!();
                TokenKind::Equals
            }
            '(' => {
                advance!();
                TokenKind::LParen
            }
            ')' => {
                advance!();
                TokenKind::RParen
            }
            ',' => {
                advance!();
                TokenKind::Comma
            }
            ';' => {
                advance!();
                TokenKind::Semi
            }
            ':' => {
                advance!();
                TokenKind::Colon
            }
            '.' => {
                advance!();
                TokenKind::Dot
            }
            '\'' => {
                advance!();
                let mut text = String::new();
                loop {
                    match advance!() {
                        Some('\'') => break,
                        Some('\\') => match advance!() {
                            Some('t') => text.push('\t'),
                            Some('\\') => text.push('\\'),
                            Some(other) => {
                                return Err(LexError {
                                    line,
                                    col: col.saturating_sub(1),
                                    found: format!("unknown escape '\\{other}'"),
                                })
                            }
                            None => {
                                return Err(LexError {
                                    line,
                                    col,
                                    found: "unterminated string".to_string(),
                                })
                            }
                        },
                        Some('\n') | None => {
                            return Err(LexError {
                                line: token_line,
                                col: token_col,
                                found: "unterminated string".to_string(),
                            })
                        }
                        Some(other) => text.push(other),
                    }
                }
                TokenKind::Str(text)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        advance!();
                    } else {
                        break;
                    }
                }
                match Keyword::from_ident(&name) {
                    Some(kw) => TokenKind::Keyword(kw),
                    None => TokenKind::Ident(name),
                }
            }
            other => {
                return Err(LexError {
                    line: token_line,
                    col: token_col,
                    found: format!("unexpected character '{other}'"),
                })
            }
        };
        tokens.push(Token {
            kind,
            line: token_line,
            col: token_col,
        });
    }
    Ok(tokens)
}
