//! Whole-string pattern matching for `FILTER ... BY (col MATCHES '...')`.
//!
//! The entire value must match, so `HitsPage` does not match
//! `HitsPage-x` and the conventional `^...$` anchors are redundant.
//! Supported constructs: literal characters, `.`, the quantifiers `*`,
//! `+`, `?`, character classes `[a-z]` / `[^abc]`, the anchors `^` and
//! `$`, and backslash-escaped metacharacters.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad pattern at byte {position}: {reason}")]
pub struct BadPattern {
    pub position: usize,
    pub reason: String,
}

fn bad(position: usize, reason: impl Into<String>) -> BadPattern {
    BadPattern {
        position,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Literal(char),
    Any,
    Class { negated: bool, ranges: Vec<(char, char)> },
    Start,
    End,
}

impl Atom {
    fn is_anchor(&self) -> bool {
        matches!(self, Atom::Start | Atom::End)
    }

    /// Whether the atom matches the single character `c`.
    fn matches_char(&self, c: char) -> bool {
        match self {
            Atom::Literal(l) => *l == c,
            Atom::Any => true,
            Atom::Class { negated, ranges } => {
                let inside = ranges.iter().any(|&(lo, hi)| lo <= c && c <= hi);
                inside != *negated
            }
            Atom::Start | Atom::End => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quant {
    One,
    ZeroOrOne,
    ZeroOrMore,
    OneOrMore,
}

#[derive(Debug, Clone, PartialEq)]
struct Item {
    atom: Atom,
    quant: Quant,
}

/// A compiled pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    items: Vec<Item>,
}

impl Pattern {
    pub fn compile(source: &str) -> Result<Pattern, BadPattern> {
        let mut items: Vec<Item> = Vec::new();
        let mut chars = source.char_indices().peekable();
        while let Some((pos, c)) = chars.next() {
            match c {
                '.' => items.push(Item { atom: Atom::Any, quant: Quant::One }),
                '^' => items.push(Item { atom: Atom::Start, quant: Quant::One }),
                '$' => items.push(Item { atom: Atom::End, quant: Quant::One }),
                '\\' => {
                    let (_, escaped) = chars
                        .next()
                        .ok_or_else(|| bad(pos, "trailing backslash"))?;
                    items.push(Item { atom: Atom::Literal(escaped), quant: Quant::One });
                }
                '[' => {
                    let atom = parse_class(pos, &mut chars)?;
                    items.push(Item { atom, quant: Quant::One });
                }
                '*' | '+' | '?' => {
                    let quant = match c {
                        '*' => Quant::ZeroOrMore,
                        '+' => Quant::OneOrMore,
                        _ => Quant::ZeroOrOne,
                    };
                    let last = items
                        .last_mut()
                        .ok_or_else(|| bad(pos, format!("nothing to repeat before '{c}'")))?;
                    if last.quant != Quant::One || last.atom.is_anchor() {
                        return Err(bad(pos, format!("cannot apply '{c}' here")));
                    }
                    last.quant = quant;
                }
                ']' => return Err(bad(pos, "unmatched ']'")),
                _ => items.push(Item { atom: Atom::Literal(c), quant: Quant::One }),
            }
        }
        Ok(Pattern { items })
    }

    /// Whole-string semantics: the pattern must consume the entire input.
    pub fn matches(&self, input: &str) -> bool {
        let chars: Vec<char> = input.chars().collect();
        match_items(&self.items, &chars, 0)
    }
}

fn parse_class(
    open_pos: usize,
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
) -> Result<Atom, BadPattern> {
    let negated = matches!(chars.peek(), Some((_, '^')));
    if negated {
        chars.next();
    }
    let mut ranges: Vec<(char, char)> = Vec::new();
    loop {
        let (pos, c) = chars
            .next()
            .ok_or_else(|| bad(open_pos, "unterminated character class"))?;
        let lo = match c {
            ']' if !ranges.is_empty() => break,
            ']' => return Err(bad(open_pos, "empty character class")),
            '\\' => {
                chars
                    .next()
                    .ok_or_else(|| bad(pos, "trailing backslash in class"))?
                    .1
            }
            _ => c,
        };
        // A '-' between two characters forms a range; elsewhere it is
        // literal.
        if matches!(chars.peek(), Some((_, '-'))) {
            let dash = chars.next().unwrap();
            match chars.peek() {
                Some((_, ']')) | None => {
                    ranges.push((lo, lo));
                    ranges.push(('-', '-'));
                }
                Some(_) => {
                    let (hi_pos, hi) = chars.next().unwrap();
                    let hi = if hi == '\\' {
                        chars
                            .next()
                            .ok_or_else(|| bad(hi_pos, "trailing backslash in class"))?
                            .1
                    } else {
                        hi
                    };
                    if lo > hi {
                        return Err(bad(dash.0, format!("invalid range {lo}-{hi}")));
                    }
                    ranges.push((lo, hi));
                }
            }
        } else {
            ranges.push((lo, lo));
        }
    }
    Ok(Atom::Class { negated, ranges })
}

/// Backtracking matcher; `pos` indexes into `chars`. Succeeds iff the
/// remaining items consume exactly the remaining input.
fn match_items(items: &[Item], chars: &[char], pos: usize) -> bool {
    let Some((item, rest)) = items.split_first() else {
        return pos == chars.len();
    };
    match item.atom {
        Atom::Start => item.quant == Quant::One && pos == 0 && match_items(rest, chars, pos),
        Atom::End => {
            item.quant == Quant::One && pos == chars.len() && match_items(rest, chars, pos)
        }
        _ => {
            let one = |p: usize| p < chars.len() && item.atom.matches_char(chars[p]);
            match item.quant {
                Quant::One => one(pos) && match_items(rest, chars, pos + 1),
                Quant::ZeroOrOne => {
                    (one(pos) && match_items(rest, chars, pos + 1))
                        || match_items(rest, chars, pos)
                }
                Quant::ZeroOrMore | Quant::OneOrMore => {
                    let mut end = pos;
                    while one(end) {
                        end += 1;
                    }
                    let min = if item.quant == Quant::OneOrMore {
                        pos + 1
                    } else {
                        pos
                    };
                    // Greedy: try the longest repetition first.
                    let mut candidate = end;
                    loop {
                        if candidate < min {
                            return false;
                        }
                        if match_items(rest, chars, candidate) {
                            return true;
                        }
                        if candidate == 0 {
                            return false;
                        }
                        candidate -= 1;
                    }
                }
            }
        }
    }
}
