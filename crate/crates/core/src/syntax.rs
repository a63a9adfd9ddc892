//! Tokenizer shared by the instance and program parsers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    Integer(String),
    Str(String),
    Directive(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Implies,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Integer(s) => format!("integer `{s}`"),
            TokenKind::Str(s) => format!("string {s:?}"),
            TokenKind::Directive(s) => format!("directive `@{s}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Implies => "`:-`".into(),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Integers in canonical form: no leading zeros except for `0` itself.
pub(crate) fn is_canonical_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

pub(crate) fn canonical_integer(digits: &str) -> String {
    let trimmed = digits.trim_start_matches('0');
    if trimmed.is_empty() {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_column) = (line, column);
        let push = |tokens: &mut Vec<Token>, kind| {
            tokens.push(Token {
                kind,
                line: start_line,
                column: start_column,
            })
        };
        match c {
            c if c.is_whitespace() => advance!(),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance!();
                }
            }
            '(' => {
                push(&mut tokens, TokenKind::LParen);
                advance!();
            }
            ')' => {
                push(&mut tokens, TokenKind::RParen);
                advance!();
            }
            ',' => {
                push(&mut tokens, TokenKind::Comma);
                advance!();
            }
            '.' => {
                push(&mut tokens, TokenKind::Dot);
                advance!();
            }
            ':' => {
                advance!();
                if i < chars.len() && chars[i] == '-' {
                    advance!();
                    push(&mut tokens, TokenKind::Implies);
                } else {
                    return Err(Error::syntax(start_line, start_column, "expected `:-`"));
                }
            }
            '@' => {
                advance!();
                let mut word = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    word.push(chars[i]);
                    advance!();
                }
                if word.is_empty() {
                    return Err(Error::syntax(
                        start_line,
                        start_column,
                        "expected a section name after `@`",
                    ));
                }
                push(&mut tokens, TokenKind::Directive(word));
            }
            '"' => {
                advance!();
                let mut value = String::new();
                loop {
                    if i >= chars.len() {
                        return Err(Error::syntax(start_line, start_column, "unterminated string"));
                    }
                    match chars[i] {
                        '"' => {
                            advance!();
                            break;
                        }
                        '\\' => {
                            let (esc_line, esc_column) = (line, column);
                            advance!();
                            let escaped = match chars.get(i) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                _ => {
                                    return Err(Error::syntax(
                                        esc_line,
                                        esc_column,
                                        "invalid escape sequence",
                                    ))
                                }
                            };
                            value.push(escaped);
                            advance!();
                        }
                        other => {
                            value.push(other);
                            advance!();
                        }
                    }
                }
                push(&mut tokens, TokenKind::Str(value));
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    digits.push(chars[i]);
                    advance!();
                }
                if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                    return Err(Error::syntax(line, column, "identifiers may not start with a digit"));
                }
                push(&mut tokens, TokenKind::Integer(canonical_integer(&digits)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    word.push(chars[i]);
                    advance!();
                }
                push(&mut tokens, TokenKind::Ident(word));
            }
            other => {
                return Err(Error::syntax(
                    start_line,
                    start_column,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(tokens)
}

/// Cursor over a token stream with end-of-input position tracking for errors.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let last_line = text.lines().count().max(1);
        let last_column = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        Ok(Cursor {
            tokens,
            pos: 0,
            end: (last_line, last_column),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    pub fn previous(&self) -> Option<&Token> {
        self.pos.checked_sub(1).and_then(|p| self.tokens.get(p))
    }

    pub fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn error_here(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .peek()
            .map_or(self.end, |t| (t.line, t.column));
        Error::syntax(line, column, message)
    }

    pub fn expect(&mut self, kind: &TokenKind) -> Result<Token> {
        match self.peek() {
            Some(t) if &t.kind == kind => Ok(self.next().unwrap()),
            Some(t) => Err(self.error_here(format!(
                "expected {}, found {}",
                kind.describe(),
                t.kind.describe()
            ))),
            None => Err(self.error_here(format!("expected {}, found end of input", kind.describe()))),
        }
    }

    pub fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}
