//! Support-logic evidence on top of the ATMS.
//!
//! Every evidence assertion `P : [l, u]` becomes a positive assumption of
//! mass `l` justifying `P` and, when `u < 1`, a negative assumption of mass
//! `1 - u` justifying `(not P)`. A rule `B :- A : [l, u]` becomes two
//! justifications whose antecedents include a rule-strength assumption, so
//! every numeric factor ends up inside the labels and chained inference is
//! plain multiplication. [`Reasoner::evaluate`] reduces the labels of a node
//! and its negation back to a support pair.

mod eval;
mod rank;

use alloc::format;
use alloc::vec::Vec;

pub use eval::{
    CombinationPlan, EnvStatus, EnvTerm, EvalOptions, Evaluation, Group, Side, Step, StepRule,
    Warning,
};
pub use rank::Solution;

use crate::atms::{
    AssumptionId, Database, EvidenceId, JustificationId, NodeId, Origin, RuleId,
};
use crate::error::{check_unit, Error, Result};

/// Normalisers at or below this count as total conflict.
pub const CONFLICT_EPSILON: f64 = 1e-12;

/// A `[lower, upper]` belief interval with `0 <= lower <= upper <= 1`.
///
/// `lower` is the support for the proposition, `1 - upper` the support for
/// its negation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPair {
    lower: f64,
    upper: f64,
}

impl SupportPair {
    /// `[0, 1]`: no evidence either way.
    pub const VACUOUS: SupportPair = SupportPair {
        lower: 0.0,
        upper: 1.0,
    };

    /// `[1, 1]`: certain support.
    pub const CERTAIN: SupportPair = SupportPair {
        lower: 1.0,
        upper: 1.0,
    };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        check_unit("lower support", lower)?;
        check_unit("upper support", upper)?;
        if lower > upper {
            return Err(Error::InvertedPair { lower, upper });
        }
        Ok(SupportPair { lower, upper })
    }

    /// Simple support `[s, 1]`.
    pub fn simple(support: f64) -> Result<Self> {
        Self::new(support, 1.0)
    }

    /// Builds a pair from computed values, absorbing rounding noise.
    pub(crate) fn computed(lower: f64, upper: f64) -> Self {
        let lower = lower.clamp(0.0, 1.0);
        let upper = upper.clamp(lower, 1.0);
        SupportPair { lower, upper }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Support for the negation, `1 - upper`.
    pub fn against(&self) -> f64 {
        1.0 - self.upper
    }
}

/// Propagates support across `P :- Q : rule` given `Q : antecedent`.
pub fn slp_propagate(rule: SupportPair, antecedent: SupportPair) -> SupportPair {
    SupportPair::computed(
        rule.lower * antecedent.lower,
        1.0 - (1.0 - rule.upper) * antecedent.lower,
    )
}

/// Combines two independent support pairs for the same proposition.
///
/// This is Dempster's rule on the frame `{P, not P}` with normaliser
/// `K = 1 - S1(1-U2) - S2(1-U1)`.
pub fn slp_combine(a: SupportPair, b: SupportPair) -> Result<SupportPair> {
    let (s1, u1, s2, u2) = (a.lower, a.upper, b.lower, b.upper);
    let k = 1.0 - s1 * (1.0 - u2) - s2 * (1.0 - u1);
    if k <= CONFLICT_EPSILON {
        return Err(Error::TotalConflict);
    }
    let s = (s1 * u2 + s2 * u1 - s1 * s2) / k;
    let u = 1.0 - ((1.0 - u1) * (1.0 - s2) + (1.0 - u2) * (u1 - s1)) / k;
    Ok(SupportPair::computed(s, u))
}

#[derive(Debug, Clone)]
pub struct EvidenceAssertion {
    pub id: EvidenceId,
    pub hypothesis: NodeId,
    pub pair: SupportPair,
    /// Mass `pair.lower`, supports `hypothesis`.
    pub positive: AssumptionId,
    /// Mass `1 - pair.upper`, supports the negation; absent when `upper == 1`.
    pub negative: Option<AssumptionId>,
}

#[derive(Debug, Clone)]
pub struct CompiledRule {
    pub id: RuleId,
    pub antecedents: Vec<NodeId>,
    pub consequent: NodeId,
    pub strength: SupportPair,
    /// Absent for certain rules, which compile to a bare justification.
    pub positive: Option<AssumptionId>,
    pub negative: Option<AssumptionId>,
    pub justifications: Vec<JustificationId>,
}

/// An ATMS together with the evidence and rules compiled into it.
#[derive(Debug, Clone, Default)]
pub struct Reasoner {
    db: Database,
    evidence: Vec<EvidenceAssertion>,
    rules: Vec<CompiledRule>,
}

impl Reasoner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atms(&self) -> &Database {
        &self.db
    }

    /// Direct access for structural declarations (one-ofs, extra
    /// justifications, hypothesis assumptions).
    pub fn atms_mut(&mut self) -> &mut Database {
        &mut self.db
    }

    pub fn evidence(&self) -> &[EvidenceAssertion] {
        &self.evidence
    }

    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    /// Records `hypothesis : pair` as an independent evidence source.
    pub fn assert_evidence(&mut self, hypothesis: NodeId, pair: SupportPair) -> Result<EvidenceId> {
        let datum = self.db.node(hypothesis)?.datum.clone();
        if hypothesis == self.db.false_node() {
            return Err(Error::FalseAntecedent);
        }
        let id = EvidenceId(self.evidence.len() as u32);
        let negation = self.db.ensure_negation(hypothesis)?;

        let name = format!("e{}+", id.0);
        let positive = self
            .db
            .create_assumption(pair.lower, Origin::EvidencePositive(id), &name)?;
        let node = self.db.assumption(positive)?.node;
        self.db
            .add_justification(&[node], hypothesis, &format!("evidence e{} for {datum}", id.0))?;

        let negative = if pair.upper < 1.0 {
            let name = format!("e{}-", id.0);
            let a = self
                .db
                .create_assumption(1.0 - pair.upper, Origin::EvidenceNegative(id), &name)?;
            let node = self.db.assumption(a)?.node;
            self.db.add_justification(
                &[node],
                negation,
                &format!("evidence e{} against {datum}", id.0),
            )?;
            Some(a)
        } else {
            None
        };
        self.evidence.push(EvidenceAssertion {
            id,
            hypothesis,
            pair,
            positive,
            negative,
        });
        Ok(id)
    }

    /// Installs `consequent :- antecedents : strength` as one justification
    /// to the consequent and, when `strength.upper < 1`, one to its negation.
    /// A strength of `[1, 1]` adds no assumption.
    pub fn compile_rule(
        &mut self,
        antecedents: &[NodeId],
        consequent: NodeId,
        strength: SupportPair,
    ) -> Result<RuleId> {
        if antecedents.is_empty() {
            return Err(Error::EmptyAntecedents);
        }
        self.db.node(consequent)?;
        for &a in antecedents {
            self.db.node(a)?;
            if a == consequent {
                return Err(Error::SelfJustification(self.db.node(a)?.datum.clone()));
            }
        }
        let id = RuleId(self.rules.len() as u32);
        let mut body = antecedents.to_vec();
        let positive = if strength.lower < 1.0 {
            let a = self.db.create_assumption(
                strength.lower,
                Origin::RuleStrength {
                    rule: id,
                    negative: false,
                },
                &format!("r{}+", id.0),
            )?;
            body.push(self.db.assumption(a)?.node);
            Some(a)
        } else {
            None
        };
        let informant = format!("rule r{}", id.0);
        let mut justifications = alloc::vec![self.db.add_justification(&body, consequent, &informant)?];

        let negative = if strength.upper < 1.0 {
            let negation = self.db.ensure_negation(consequent)?;
            let a = self.db.create_assumption(
                1.0 - strength.upper,
                Origin::RuleStrength {
                    rule: id,
                    negative: true,
                },
                &format!("r{}-", id.0),
            )?;
            if positive.is_some() {
                body.pop();
            }
            body.push(self.db.assumption(a)?.node);
            justifications.push(self.db.add_justification(&body, negation, &informant)?);
            Some(a)
        } else {
            None
        };
        self.rules.push(CompiledRule {
            id,
            antecedents: antecedents.to_vec(),
            consequent,
            strength,
            positive,
            negative,
            justifications,
        });
        Ok(id)
    }

    pub(crate) fn mass_of(&self, a: AssumptionId, opts: &EvalOptions) -> f64 {
        opts.overrides
            .get(&a)
            .copied()
            .unwrap_or_else(|| self.db.assumptions()[a.index()].mass)
    }

    pub(crate) fn validate(&self, opts: &EvalOptions) -> Result<()> {
        for (&a, &v) in &opts.overrides {
            self.db.assumption(a)?;
            check_unit("clamp value", v)?;
        }
        if let Some(kernel) = &opts.kernel {
            for &a in kernel {
                self.db.assumption(a)?;
            }
            if !self.db.consistent_set(kernel) {
                return Err(Error::InconsistentKernel);
            }
        }
        Ok(())
    }
}
