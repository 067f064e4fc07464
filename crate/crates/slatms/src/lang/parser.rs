use std::collections::BTreeMap;

use super::lexer::{lex, Token, TokenKind};
use super::{Comparison, Diagnostic, Directive, Pair, Program, Prop, Span, Statement, Stmt};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let mut d = Diagnostic::error(
            self.span(),
            format!("unexpected {}", self.peek().describe()),
        );
        d.expected = expected.iter().map(|s| s.to_string()).collect();
        d
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if *self.peek() == kind {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&[&kind.describe()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn prop(&mut self) -> PResult<Prop> {
        self.expect(TokenKind::LParen)?;
        let first = self.ident()?;
        let cmp = match self.peek() {
            TokenKind::Lt => Some(Comparison::Less),
            TokenKind::Eq => Some(Comparison::Equal),
            TokenKind::Gt => Some(Comparison::Greater),
            _ => None,
        };
        if let Some(cmp) = cmp {
            self.advance();
            let second = self.ident()?;
            self.expect(TokenKind::RParen)?;
            return Ok(Prop::Compare(first, cmp, second));
        }
        let mut words = vec![first];
        loop {
            match self.peek().clone() {
                TokenKind::Ident(s) => {
                    self.advance();
                    words.push(s);
                }
                TokenKind::RParen => {
                    self.advance();
                    return Ok(Prop::Atom(words));
                }
                _ => {
                    let mut expected = vec!["identifier", "`)`"];
                    if words.len() == 1 {
                        expected.extend(["`<`", "`=`", "`>`"]);
                    }
                    return Err(self.unexpected(&expected));
                }
            }
        }
    }

    fn number(&mut self) -> PResult<(f64, Span)> {
        match *self.peek() {
            TokenKind::Number(v) => {
                let span = self.advance().span;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Diagnostic::error(
                        span,
                        format!("support value {v} is outside [0, 1]"),
                    ));
                }
                Ok((v, span))
            }
            _ => Err(self.unexpected(&["number"])),
        }
    }

    fn pair(&mut self) -> PResult<Pair> {
        let open = self.expect(TokenKind::LBracket)?;
        let (lower, _) = self.number()?;
        self.expect(TokenKind::Comma)?;
        let (upper, _) = self.number()?;
        self.expect(TokenKind::RBracket)?;
        if lower > upper {
            return Err(Diagnostic::error(
                open,
                format!("lower support {lower} exceeds upper support {upper}"),
            ));
        }
        Ok(Pair { lower, upper })
    }

    fn conj_tail(&mut self, first: Prop) -> PResult<Vec<Prop>> {
        let mut body = vec![first];
        while *self.peek() == TokenKind::Amp {
            self.advance();
            body.push(self.prop()?);
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Statement> {
        match self.peek() {
            TokenKind::Query => {
                self.advance();
                if let TokenKind::Ident(s) = self.peek() {
                    if s == "solve" {
                        self.advance();
                        return Ok(Statement::Directive(Directive::Solve));
                    }
                }
                if *self.peek() != TokenKind::LParen {
                    return Err(self.unexpected(&["`(`", "`solve`"]));
                }
                Ok(Statement::Directive(Directive::Query(self.prop()?)))
            }
            TokenKind::LParen
                if matches!(self.peek_at(1), TokenKind::Ident(s) if s == "one-of") =>
            {
                self.advance();
                self.advance();
                let mut members = Vec::new();
                while *self.peek() == TokenKind::LParen {
                    members.push(self.prop()?);
                }
                if *self.peek() != TokenKind::RParen {
                    return Err(self.unexpected(&["`(`", "`)`"]));
                }
                self.advance();
                Ok(Statement::OneOf(members))
            }
            TokenKind::LParen => {
                let first = self.prop()?;
                match self.peek() {
                    TokenKind::Colon => {
                        self.advance();
                        Ok(Statement::Evidence(first, self.pair()?))
                    }
                    TokenKind::Implied => {
                        self.advance();
                        let p = self.prop()?;
                        let body = self.conj_tail(p)?;
                        if *self.peek() != TokenKind::Colon {
                            return Err(self.unexpected(&["`&`", "`:`"]));
                        }
                        self.advance();
                        let pair = self.pair()?;
                        Ok(Statement::Rule {
                            head: first,
                            body,
                            pair,
                        })
                    }
                    TokenKind::Amp | TokenKind::Iff => {
                        let body = self.conj_tail(first)?;
                        if *self.peek() != TokenKind::Iff {
                            return Err(self.unexpected(&["`&`", "`<->`"]));
                        }
                        self.advance();
                        let head = self.prop()?;
                        Ok(Statement::Biconditional { body, head })
                    }
                    _ => Err(self.unexpected(&["`:`", "`:-`", "`&`", "`<->`"])),
                }
            }
            _ => Err(self.unexpected(&["`(`", "`?-`"])),
        }
    }
}

/// Parses a whole program, stopping at the first error.
pub fn parse(text: &str) -> Result<Program, Diagnostic> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let mut program = Program::default();
    let mut membership: BTreeMap<Prop, Span> = BTreeMap::new();
    while *p.peek() != TokenKind::Eof {
        let start = p.span();
        let statement = p.statement()?;
        let end = p.tokens[p.pos.saturating_sub(1)].span.end;
        let span = Span { end, ..start };
        if let Statement::OneOf(members) = &statement {
            if members.len() < 2 {
                return Err(Diagnostic::error(span, "a one-of needs at least two members"));
            }
            for m in members {
                if let Some(prev) = membership.insert(m.clone(), span) {
                    return Err(Diagnostic::error(
                        span,
                        format!(
                            "{m} is already a one-of member (declared at {}:{})",
                            prev.line, prev.col
                        ),
                    ));
                }
            }
        }
        program.statements.push(Stmt { statement, span });
    }
    Ok(program)
}

/// Parses a single proposition, e.g. a command-line argument.
pub fn parse_prop(text: &str) -> Result<Prop, Diagnostic> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let prop = p.prop()?;
    if *p.peek() != TokenKind::Eof {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(prop)
}
