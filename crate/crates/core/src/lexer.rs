//! Tokenizer for QGAME program text.
//!
//! Whitespace separates tokens, parentheses are always single-character
//! tokens and `;` starts a comment that runs to the end of the line. Symbols
//! are case-insensitive and are stored upper-cased.

use std::fmt;

use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Open,
    Close,
    Symbol,
    Number,
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text; upper-cased for symbols.
    pub text: String,
    pub pos: Position,
}

impl Token {
    pub fn is_open(&self) -> bool {
        self.kind == TokenKind::Open
    }

    pub fn is_close(&self) -> bool {
        self.kind == TokenKind::Close
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')' || c == ';'
}

/// `-?digits(.digits)?([eE]-?digits)?`
fn is_number_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if b.first() == Some(&b'-') {
        i += 1;
    }
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if !digits(&mut i) {
        return false;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        if !digits(&mut i) {
            return false;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && b[i] == b'-' {
            i += 1;
        }
        if !digits(&mut i) {
            return false;
        }
    }
    i == b.len()
}

/// A word that starts like a number must be a well-formed number.
fn looks_numeric(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() => true,
        Some('-') => matches!(chars.next(), Some(c) if c.is_ascii_digit() || c == '.'),
        _ => false,
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&(start, c)) = chars.peek() {
        let pos = Position { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == ';' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
        } else if c == '(' || c == ')' {
            chars.next();
            column += 1;
            let kind = if c == '(' { TokenKind::Open } else { TokenKind::Close };
            tokens.push(Token {
                kind,
                text: c.to_string(),
                pos,
            });
        } else {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if is_delimiter(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
                column += 1;
            }
            let word = &text[start..end];
            let token = if looks_numeric(word) {
                if !is_number_literal(word) {
                    return Err(ParseError::new(
                        ParseErrorKind::Lexical,
                        pos,
                        format!("malformed number literal `{word}`"),
                    ));
                }
                Token {
                    kind: TokenKind::Number,
                    text: word.to_string(),
                    pos,
                }
            } else {
                Token {
                    kind: TokenKind::Symbol,
                    text: word.to_uppercase(),
                    pos,
                }
            };
            tokens.push(token);
        }
    }
    Ok(tokens)
}
