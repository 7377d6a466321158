//! Tokenizer for query text.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Unsigned integer literal, kept as text so the parser can apply a sign.
    Int(String),
    Decimal(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    DotDot,
    Dash,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Semicolon,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(s) | TokenKind::Decimal(s) => write!(f, "number `{s}`"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::DotDot => f.write_str("`..`"),
            TokenKind::Dash => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Ne => f.write_str("`<>`"),
            TokenKind::Lt => f.write_str("`<`"),
            TokenKind::Le => f.write_str("`<=`"),
            TokenKind::Gt => f.write_str("`>`"),
            TokenKind::Ge => f.write_str("`>=`"),
            TokenKind::Semicolon => f.write_str("`;`"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        // `//` line comments
        if cur.peek() == Some('/') && cur.peek2() == Some('/') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let (line, column) = (cur.line, cur.column);
        let err = |message: String| LexError {
            line,
            column,
            message,
        };
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                line,
                column,
            });
            return Ok(tokens);
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while cur
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                s.push(cur.bump().unwrap());
            }
            TokenKind::Ident(s)
        } else if c.is_ascii_digit() {
            lex_number(&mut cur).map_err(err)?
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    None => return Err(err("unterminated string literal".into())),
                    Some('"') => break,
                    Some('\\') => match cur.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some(other) => {
                            return Err(err(format!("unknown escape `\\{other}`")));
                        }
                        None => return Err(err("unterminated string literal".into())),
                    },
                    Some(ch) => s.push(ch),
                }
            }
            TokenKind::Str(s)
        } else {
            cur.bump();
            match c {
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ':' => TokenKind::Colon,
                ',' => TokenKind::Comma,
                ';' => TokenKind::Semicolon,
                '-' => TokenKind::Dash,
                '*' => TokenKind::Star,
                '=' => TokenKind::Eq,
                '.' => {
                    if cur.peek() == Some('.') {
                        cur.bump();
                        TokenKind::DotDot
                    } else {
                        TokenKind::Dot
                    }
                }
                '<' => match cur.peek() {
                    Some('>') => {
                        cur.bump();
                        TokenKind::Ne
                    }
                    Some('=') => {
                        cur.bump();
                        TokenKind::Le
                    }
                    _ => TokenKind::Lt,
                },
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        TokenKind::Ge
                    } else {
                        TokenKind::Gt
                    }
                }
                '!' if cur.peek() == Some('=') => {
                    cur.bump();
                    TokenKind::Ne
                }
                other => return Err(err(format!("unexpected character `{other}`"))),
            }
        };
        tokens.push(Token { kind, line, column });
    }
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<TokenKind, String> {
    let mut s = String::new();
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        s.push(cur.bump().unwrap());
    }
    let mut decimal = false;
    // `1..2` is a range, not a decimal
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        decimal = true;
        s.push(cur.bump().unwrap());
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            s.push(cur.bump().unwrap());
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut look = cur.chars.clone();
        look.next();
        let mut next = look.next();
        if matches!(next, Some('+' | '-')) {
            next = look.next();
        }
        if next.is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            s.push(cur.bump().unwrap());
            if matches!(cur.peek(), Some('+' | '-')) {
                s.push(cur.bump().unwrap());
            }
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(cur.bump().unwrap());
            }
        }
    }
    if cur
        .peek()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
    {
        return Err(format!("malformed number `{s}{}`", cur.peek().unwrap()));
    }
    Ok(if decimal {
        TokenKind::Decimal(s)
    } else {
        TokenKind::Int(s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text)
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn range_is_not_a_decimal() {
        assert_eq!(
            kinds("1..2 0.1"),
            vec![
                TokenKind::Int("1".into()),
                TokenKind::DotDot,
                TokenKind::Int("2".into()),
                TokenKind::Decimal("0.1".into()),
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn relationship_punctuation() {
        assert_eq!(
            kinds("-[*<2]-"),
            vec![
                TokenKind::Dash,
                TokenKind::LBracket,
                TokenKind::Star,
                TokenKind::Lt,
                TokenKind::Int("2".into()),
                TokenKind::RBracket,
                TokenKind::Dash,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn string_escapes_and_positions() {
        let toks = tokenize("WHERE\n  p.city = \"R\\\"ome\"").unwrap();
        assert_eq!(toks[5].kind, TokenKind::Str("R\"ome".into()));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }

    #[test]
    fn bad_character_reports_location() {
        let e = tokenize("MINE\n  @").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(tokenize("\"open").is_err());
    }
}
