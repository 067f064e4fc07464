//! AST to [`Reasoner`].
//!
//! One-of members become plain hypothesis assumptions (mass 1) before any
//! other statement is processed, so statements may mention a one-of member
//! ahead of its declaration. Everything else is compiled in source order.

use std::collections::{BTreeMap, BTreeSet};

use slatms_core::{DisjunctionId, NodeId, Origin, Reasoner, SupportPair};

use crate::lang::{Diagnostic, Directive, Program, Prop, Span, Statement};

const CERTAIN: SupportPair = SupportPair::CERTAIN;

#[derive(Debug, Clone)]
pub struct Compiled {
    pub reasoner: Reasoner,
    /// Solve scope when none is given: the one-ofs of biconditional heads,
    /// or every one-of if the program has no biconditionals.
    pub default_scope: Vec<DisjunctionId>,
    pub directives: Vec<Directive>,
    pub warnings: Vec<Diagnostic>,
}

struct OneOf {
    id: DisjunctionId,
    members: Vec<Prop>,
}

fn core_error(span: Span, e: slatms_core::Error) -> Diagnostic {
    Diagnostic::error(span, e.to_string())
}

fn pair(span: Span, p: crate::lang::Pair) -> Result<SupportPair, Diagnostic> {
    SupportPair::new(p.lower, p.upper).map_err(|e| core_error(span, e))
}

pub fn compile(program: &Program) -> Result<Compiled, Diagnostic> {
    let mut r = Reasoner::new();
    let mut one_ofs: Vec<OneOf> = Vec::new();
    let mut member_of: BTreeMap<Prop, usize> = BTreeMap::new();

    for s in &program.statements {
        if let Statement::OneOf(members) = &s.statement {
            let mut nodes = Vec::new();
            for m in members {
                let a = r
                    .atms_mut()
                    .create_assumption(1.0, Origin::Plain, &m.datum())
                    .map_err(|e| core_error(s.span, e))?;
                nodes.push(r.atms().assumption(a).map_err(|e| core_error(s.span, e))?.node);
                member_of.insert(m.clone(), one_ofs.len());
            }
            let id = r
                .atms_mut()
                .declare_one_of(&nodes)
                .map_err(|e| core_error(s.span, e))?;
            one_ofs.push(OneOf {
                id,
                members: members.clone(),
            });
        }
    }

    let node = |r: &mut Reasoner, p: &Prop| -> NodeId { r.atms_mut().create_node(&p.datum()) };
    let mut directives = Vec::new();
    let mut head_scopes = BTreeSet::new();
    let mut installed: BTreeSet<(Prop, Prop)> = BTreeSet::new();
    let mut saw_biconditional = false;

    for s in &program.statements {
        let span = s.span;
        match &s.statement {
            Statement::OneOf(_) => {}
            Statement::Evidence(p, sp) => {
                let n = node(&mut r, p);
                r.assert_evidence(n, pair(span, *sp)?)
                    .map_err(|e| core_error(span, e))?;
            }
            Statement::Rule { head, body, pair: sp } => {
                let ants: Vec<NodeId> = body.iter().map(|p| node(&mut r, p)).collect();
                let h = node(&mut r, head);
                r.compile_rule(&ants, h, pair(span, *sp)?)
                    .map_err(|e| core_error(span, e))?;
            }
            Statement::Biconditional { body, head } => {
                saw_biconditional = true;
                let statement = s.statement.to_string();
                let head_group = member_of
                    .get(head)
                    .map(|&i| &one_ofs[i])
                    .filter(|g| g.members.len() == 2)
                    .ok_or_else(|| {
                        Diagnostic::error(
                            span,
                            format!("in `{statement}`: {head} must belong to a two-member one-of"),
                        )
                    })?;
                let opposite = head_group
                    .members
                    .iter()
                    .find(|m| *m != head)
                    .cloned()
                    .expect("two distinct members");
                head_scopes.insert(head_group.id);
                for c in body {
                    if !member_of.contains_key(c) {
                        return Err(Diagnostic::error(
                            span,
                            format!("in `{statement}`: {c} belongs to no one-of"),
                        ));
                    }
                }

                let ants: Vec<NodeId> = body.iter().map(|p| node(&mut r, p)).collect();
                let h = node(&mut r, head);
                r.compile_rule(&ants, h, CERTAIN)
                    .map_err(|e| core_error(span, e))?;
                let o = node(&mut r, &opposite);
                for c in body {
                    for m in &one_ofs[member_of[c]].members {
                        if m == c || !installed.insert((m.clone(), opposite.clone())) {
                            continue;
                        }
                        let mn = node(&mut r, m);
                        r.compile_rule(&[mn], o, CERTAIN)
                            .map_err(|e| core_error(span, e))?;
                    }
                }
            }
            Statement::Directive(d) => directives.push(d.clone()),
        }
    }

    let default_scope = if saw_biconditional {
        head_scopes.into_iter().collect()
    } else {
        one_ofs.iter().map(|g| g.id).collect()
    };
    Ok(Compiled {
        reasoner: r,
        default_scope,
        directives,
        warnings: program.warnings(),
    })
}
