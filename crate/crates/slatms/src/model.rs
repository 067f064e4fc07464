//! Brute-force Dempster-Shafer reading of a whole program.
//!
//! Every one-of is a frame over its members and every other proposition a
//! `{T, F}` frame. A rule with strength other than `[1, 1]` gets its own
//! frame `{fires+, fires-, idle}`: under `fires+` the body forces the head,
//! under `fires-` it forces the head false, under `idle` it says nothing.
//! Evidence becomes [`pair_to_mass`] on its frame, certain rules and
//! biconditionals become hard constraints, and the combined product mass is
//! conditioned on the worlds that satisfy all constraints.
//!
//! Nothing here touches the ATMS.

use std::collections::{BTreeMap, BTreeSet};

use slatms_core::oracle::{pair_to_mass, product_frame, Frame, MassFunction, WorldSet};
use slatms_core::SupportPair;

use crate::lang::{Program, Prop, Statement};

#[derive(Debug, Clone, Copy)]
enum Var {
    /// Member `index` of frame `frame`.
    Member { frame: usize, index: usize },
    /// World 0 (`T`) of a binary frame.
    Binary { frame: usize },
}

#[derive(Debug, Clone)]
enum Constraint {
    Implies(Vec<Var>, Var),
    /// Body forces head under world 0 and forbids it under world 1 of `frame`.
    Uncertain { body: Vec<Var>, head: Var, frame: usize },
    Iff(Vec<Var>, Var),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSupport {
    pub belief: f64,
    pub plausibility: f64,
}

#[derive(Debug, Clone)]
pub struct OracleModel {
    frames: Vec<Frame>,
    vars: BTreeMap<Prop, Var>,
    /// Conditioned mass over the product frame.
    mass: MassFunction,
    /// Mass discarded by conditioning on the constraints.
    pub conflict: f64,
    pub worlds: usize,
}

fn holds(v: Var, digits: &[usize]) -> bool {
    match v {
        Var::Member { frame, index } => digits[frame] == index,
        Var::Binary { frame } => digits[frame] == 0,
    }
}

impl OracleModel {
    pub fn build(program: &Program) -> slatms_core::Result<Self> {
        let mut frames: Vec<Frame> = Vec::new();
        let mut vars: BTreeMap<Prop, Var> = BTreeMap::new();
        for s in &program.statements {
            if let Statement::OneOf(members) = &s.statement {
                let frame = frames.len();
                frames.push(Frame::new(members.iter().map(Prop::datum))?);
                for (index, m) in members.iter().enumerate() {
                    vars.insert(m.clone(), Var::Member { frame, index });
                }
            }
        }
        let mut var = |p: &Prop, frames: &mut Vec<Frame>| -> slatms_core::Result<Var> {
            if let Some(&v) = vars.get(p) {
                return Ok(v);
            }
            let v = Var::Binary {
                frame: frames.len(),
            };
            frames.push(Frame::new(["T", "F"])?);
            vars.insert(p.clone(), v);
            Ok(v)
        };

        let mut evidence: Vec<(Var, SupportPair)> = Vec::new();
        let mut constraints = Vec::new();
        let mut rule_masses: Vec<(usize, SupportPair)> = Vec::new();
        for s in &program.statements {
            match &s.statement {
                Statement::OneOf(_) => {}
                Statement::Evidence(p, pair) => {
                    let v = var(p, &mut frames)?;
                    evidence.push((v, SupportPair::new(pair.lower, pair.upper)?));
                }
                Statement::Rule { head, body, pair } => {
                    let body = body
                        .iter()
                        .map(|p| var(p, &mut frames))
                        .collect::<slatms_core::Result<Vec<_>>>()?;
                    let head = var(head, &mut frames)?;
                    let strength = SupportPair::new(pair.lower, pair.upper)?;
                    if strength == SupportPair::CERTAIN {
                        constraints.push(Constraint::Implies(body, head));
                    } else {
                        let frame = frames.len();
                        frames.push(Frame::new(["fires+", "fires-", "idle"])?);
                        rule_masses.push((frame, strength));
                        constraints.push(Constraint::Uncertain { body, head, frame });
                    }
                }
                Statement::Biconditional { body, head } => {
                    let body = body
                        .iter()
                        .map(|p| var(p, &mut frames))
                        .collect::<slatms_core::Result<Vec<_>>>()?;
                    constraints.push(Constraint::Iff(body, var(head, &mut frames)?));
                }
                Statement::Directive(_) => {}
            }
        }

        let mut masses: Vec<Vec<MassFunction>> = frames
            .iter()
            .map(|f| vec![MassFunction::vacuous(f.len())])
            .collect();
        for (v, pair) in evidence {
            let (frame, world) = match v {
                Var::Member { frame, index } => (frame, index),
                Var::Binary { frame } => (frame, 0),
            };
            masses[frame].push(pair_to_mass(pair, world, &frames[frame])?);
        }
        for (frame, s) in rule_masses {
            let m = MassFunction::new(
                3,
                [
                    (WorldSet::singleton(3, 0), s.lower()),
                    (WorldSet::singleton(3, 1), s.against()),
                    (WorldSet::full(3), s.upper() - s.lower()),
                ],
            )?;
            masses[frame].push(m);
        }

        let (product, joint) = product_frame(&frames, &masses)?;
        let sizes: Vec<usize> = frames.iter().map(Frame::len).collect();
        let mut allowed = WorldSet::empty(product.len());
        let mut digits = vec![0; sizes.len()];
        for w in 0..product.len() {
            decode(w, &sizes, &mut digits);
            if constraints.iter().all(|c| satisfied(c, &digits)) {
                allowed.insert(w);
            }
        }
        let (mass, conflict) = joint.condition(&allowed)?;
        Ok(OracleModel {
            frames,
            vars,
            mass,
            conflict,
            worlds: product.len(),
        })
    }

    /// Belief and plausibility of `prop`; `None` if the program never
    /// mentions it.
    pub fn support(&self, prop: &Prop) -> Option<OracleSupport> {
        let v = *self.vars.get(prop)?;
        let sizes: Vec<usize> = self.frames.iter().map(Frame::len).collect();
        let mut region = WorldSet::empty(self.worlds);
        let mut digits = vec![0; sizes.len()];
        for w in 0..self.worlds {
            decode(w, &sizes, &mut digits);
            if holds(v, &digits) {
                region.insert(w);
            }
        }
        Some(OracleSupport {
            belief: self.mass.belief(&region),
            plausibility: self.mass.plausibility(&region),
        })
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.vars.keys()
    }
}

/// Mixed-radix digits of product world `w`, first frame most significant.
fn decode(mut w: usize, sizes: &[usize], digits: &mut [usize]) {
    for i in (0..sizes.len()).rev() {
        digits[i] = w % sizes[i];
        w /= sizes[i];
    }
}

fn satisfied(c: &Constraint, digits: &[usize]) -> bool {
    let all = |body: &[Var]| body.iter().all(|&v| holds(v, digits));
    match c {
        Constraint::Implies(body, head) => !all(body) || holds(*head, digits),
        Constraint::Uncertain { body, head, frame } => match digits[*frame] {
            0 => !all(body) || holds(*head, digits),
            1 => !all(body) || !holds(*head, digits),
            _ => true,
        },
        Constraint::Iff(body, head) => all(body) == holds(*head, digits),
    }
}

/// Why evidence evaluation and the oracle may legitimately disagree on
/// `program`, or `None` if they must agree.
///
/// The dynamic conditions (no conflict, no partially independent
/// combination) are checked by the caller.
pub fn static_regime_violation(program: &Program) -> Option<String> {
    let mut evidence: BTreeMap<&Prop, usize> = BTreeMap::new();
    let mut negative: BTreeSet<&Prop> = BTreeSet::new();
    let mut heads: BTreeSet<&Prop> = BTreeSet::new();
    for s in &program.statements {
        match &s.statement {
            Statement::OneOf(_) => return Some("program declares one-ofs".into()),
            Statement::Biconditional { .. } => {
                return Some("program has biconditionals".into())
            }
            Statement::Rule { head, pair, .. } => {
                if pair.lower != 1.0 || pair.upper != 1.0 {
                    return Some(format!("rule for {head} is not certain"));
                }
                heads.insert(head);
            }
            Statement::Evidence(p, pair) => {
                *evidence.entry(p).or_default() += 1;
                if pair.upper < 1.0 {
                    negative.insert(p);
                }
            }
            Statement::Directive(_) => {}
        }
    }
    if let Some((p, _)) = evidence.iter().find(|(_, &n)| n > 1) {
        return Some(format!("{p} has more than one evidence assertion"));
    }
    if let Some(p) = negative.iter().find(|p| heads.contains(*p)) {
        return Some(format!("{p} has evidence against it and also heads a rule"));
    }
    None
}
