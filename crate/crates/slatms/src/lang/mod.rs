//! The `.slp` problem language.
//!
//! ```text
//! program    := stmt*
//! stmt       := oneof | evidence | rule | bicond | directive
//! oneof      := "(" "one-of" prop prop+ ")"
//! evidence   := prop ":" pair
//! rule       := prop ":-" conj ":" pair
//! bicond     := conj "<->" prop
//! directive  := "?-" ( prop | "solve" )
//! conj       := prop ( "&" prop )*
//! prop       := "(" ident+ ")" | "(" ident ( "<" | "=" | ">" ) ident ")"
//! pair       := "[" num "," num "]"
//! num        := 0.5 | .5 | 1/4
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use lexer::{lex, Token, TokenKind};
pub use parser::{parse, parse_prop};

/// Byte range plus 1-based line and column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    /// Token descriptions that would have been accepted here.
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(span, message)
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {kind}: {}", self.span.line, self.span.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Less => "<",
            Comparison::Equal => "=",
            Comparison::Greater => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prop {
    Atom(Vec<String>),
    Compare(String, Comparison, String),
}

impl Prop {
    /// Canonical node datum, e.g. `(x on)` or `(Q1 > Q2)`.
    pub fn datum(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Atom(words) => write!(f, "({})", words.join(" ")),
            Prop::Compare(a, c, b) => write!(f, "({a} {} {b})", c.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub lower: f64,
    pub upper: f64,
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Query(Prop),
    Solve,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    OneOf(Vec<Prop>),
    Evidence(Prop, Pair),
    Rule {
        head: Prop,
        body: Vec<Prop>,
        pair: Pair,
    },
    Biconditional {
        body: Vec<Prop>,
        head: Prop,
    },
    Directive(Directive),
}

fn write_conj(f: &mut fmt::Formatter<'_>, body: &[Prop]) -> fmt::Result {
    for (i, p) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::OneOf(members) => {
                f.write_str("(one-of")?;
                for m in members {
                    write!(f, " {m}")?;
                }
                f.write_str(")")
            }
            Statement::Evidence(p, pair) => write!(f, "{p}: {pair}"),
            Statement::Rule { head, body, pair } => {
                write!(f, "{head} :- ")?;
                write_conj(f, body)?;
                write!(f, " : {pair}")
            }
            Statement::Biconditional { body, head } => {
                write_conj(f, body)?;
                write!(f, " <-> {head}")
            }
            Statement::Directive(Directive::Query(p)) => write!(f, "?- {p}"),
            Statement::Directive(Directive::Solve) => f.write_str("?- solve"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub statement: Statement,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

impl Program {
    /// The statements without their source spans.
    pub fn structure(&self) -> Vec<&Statement> {
        self.statements.iter().map(|s| &s.statement).collect()
    }

    /// Rule and biconditional body propositions that belong to no one-of,
    /// have no evidence and are not derived by any statement.
    pub fn warnings(&self) -> Vec<Diagnostic> {
        let mut grounded = BTreeSet::new();
        for s in &self.statements {
            match &s.statement {
                Statement::OneOf(m) => grounded.extend(m.iter().cloned()),
                Statement::Evidence(p, _) => {
                    grounded.insert(p.clone());
                }
                Statement::Rule { head, .. } | Statement::Biconditional { head, .. } => {
                    grounded.insert(head.clone());
                }
                Statement::Directive(_) => {}
            }
        }
        let mut out = Vec::new();
        let mut reported = BTreeSet::new();
        for s in &self.statements {
            let body = match &s.statement {
                Statement::Rule { body, .. } | Statement::Biconditional { body, .. } => body,
                _ => continue,
            };
            for p in body {
                if !grounded.contains(p) && reported.insert(p.clone()) {
                    out.push(Diagnostic::warning(
                        s.span,
                        format!("{p} has no evidence and belongs to no one-of; it can never hold"),
                    ));
                }
            }
        }
        out
    }
}

/// One statement per line, in source order.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.statement)?;
        }
        Ok(())
    }
}
