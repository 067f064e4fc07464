use super::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    /// `:-`
    Implied,
    Amp,
    /// `<->`
    Iff,
    Lt,
    Eq,
    Gt,
    /// `?-`
    Query,
    Ident(String),
    Number(f64),
    Eof,
}

impl TokenKind {
    /// How the token is named in "expected ..." lists.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Implied => "`:-`".into(),
            TokenKind::Amp => "`&`".into(),
            TokenKind::Iff => "`<->`".into(),
            TokenKind::Lt => "`<`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Gt => "`>`".into(),
            TokenKind::Query => "`?-`".into(),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Number(_) => "number".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.text[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        text,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        cur.eat_while(char::is_whitespace);
        if cur.peek() == Some('%') {
            cur.eat_while(|c| c != '\n');
            continue;
        }
        let mut span = cur.here();
        let Some(c) = cur.bump() else {
            out.push(Token {
                kind: TokenKind::Eof,
                span,
            });
            return Ok(out);
        };
        let kind = match c {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ',' => TokenKind::Comma,
            '&' => TokenKind::Amp,
            '=' => TokenKind::Eq,
            '>' => TokenKind::Gt,
            ':' if cur.peek() == Some('-') => {
                cur.bump();
                TokenKind::Implied
            }
            ':' => TokenKind::Colon,
            '?' if cur.peek() == Some('-') => {
                cur.bump();
                TokenKind::Query
            }
            '<' if cur.peek() == Some('-') && cur.peek2() == Some('>') => {
                cur.bump();
                cur.bump();
                TokenKind::Iff
            }
            '<' => TokenKind::Lt,
            c if c.is_ascii_digit() || c == '.' => lex_number(&mut cur, span)?,
            c if ident_char(c) => {
                // inner hyphens are allowed: `one-of`, `x-axis`
                loop {
                    cur.eat_while(ident_char);
                    if cur.peek() == Some('-') && cur.peek2().is_some_and(ident_char) {
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(text[span.start..cur.pos].to_string())
            }
            other => {
                return Err(Diagnostic::error(span, format!("unexpected character `{other}`")));
            }
        };
        span.end = cur.pos;
        out.push(Token { kind, span });
    }
}

fn lex_number(cur: &mut Cursor, span: Span) -> Result<TokenKind, Diagnostic> {
    let start = span.start;
    cur.eat_while(|c| c.is_ascii_digit() || c == '.');
    let numerator = &cur.text[start..cur.pos];
    let bad = |cur: &Cursor| {
        let mut s = span;
        s.end = cur.pos;
        Diagnostic::error(s, format!("malformed number `{}`", &cur.text[start..cur.pos]))
    };
    let mut value: f64 = numerator.parse().map_err(|_| bad(cur))?;
    if cur.peek() == Some('/') {
        cur.bump();
        let d_start = cur.pos;
        cur.eat_while(|c| c.is_ascii_digit() || c == '.');
        let denominator: f64 = cur.text[d_start..cur.pos].parse().map_err(|_| bad(cur))?;
        if denominator == 0.0 {
            let mut s = span;
            s.end = cur.pos;
            return Err(Diagnostic::error(s, "division by zero in fraction"));
        }
        value /= denominator;
    }
    if cur.peek().is_some_and(ident_char) {
        cur.eat_while(ident_char);
        return Err(bad(cur));
    }
    Ok(TokenKind::Number(value))
}
