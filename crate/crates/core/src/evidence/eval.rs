//! Label-to-support-pair reduction.
//!
//! 1. Each environment is worth the product of its assumption masses.
//! 2. Environments are partitioned greedily into exclusivity groups: an
//!    environment joins the first group all of whose members it excludes.
//!    Within a group the values are masses of disjoint events and add up.
//! 3. Each group is a piece of evidence `[p, 1 - n]` (`p` from the node's
//!    label, `n` from the negation's label); pieces are folded together with
//!    [`slp_combine`], i.e. treated as independent.
//!
//! Ordering is deterministic: positive environments before negative ones,
//! each side in ascending member order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{slp_combine, Reasoner, SupportPair};
use crate::atms::{
    canonical, minimize, union, AssumptionId, DisjunctionId, EvidenceId, NodeId, Origin, RuleId,
    Support,
};
use crate::error::Result;

/// What-if knobs for an evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalOptions {
    /// Only environments consistent with this set take part.
    pub kernel: Option<Vec<AssumptionId>>,
    /// Replacement masses; the database is left untouched.
    pub overrides: BTreeMap<AssumptionId, f64>,
}

impl EvalOptions {
    pub fn with_kernel(kernel: &[AssumptionId]) -> Self {
        EvalOptions {
            kernel: Some(canonical(kernel)),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_overrides(overrides: BTreeMap<AssumptionId, f64>) -> Self {
        EvalOptions {
            kernel: None,
            overrides,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// From the node's own label.
    Positive,
    /// From the negation node's label.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvStatus {
    Included,
    /// Depends on a plain assumption, which carries no evidential mass.
    Hypothetical,
    /// Inconsistent with the kernel.
    OutsideKernel,
    /// Product of masses is zero; contributes nothing.
    Zero,
}

/// One label environment as seen by the reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvTerm {
    pub members: Vec<AssumptionId>,
    pub side: Side,
    pub value: f64,
    pub status: EnvStatus,
    pub support: Option<Support>,
}

/// Mutually exclusive environments whose values were summed.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Indices into [`CombinationPlan::terms`].
    pub terms: Vec<usize>,
    pub positive: f64,
    pub negative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// First group; nothing to combine with yet.
    Start,
    /// Group shares no uncertain source with what came before.
    Independent,
    /// Group shares an uncertain source with an earlier group but is
    /// combined as if independent. The result is an approximation.
    PartiallyIndependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub group: usize,
    pub rule: StepRule,
    pub operand: SupportPair,
    pub result: SupportPair,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A group's summed masses exceeded 1 and were clamped.
    GroupClamped {
        group: usize,
        positive: f64,
        negative: f64,
    },
}

/// Full record of how a label was reduced to a support pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CombinationPlan {
    pub terms: Vec<EnvTerm>,
    pub groups: Vec<Group>,
    pub steps: Vec<Step>,
    pub warnings: Vec<Warning>,
}

impl CombinationPlan {
    /// True if any step combined partially dependent evidence.
    pub fn approximated(&self) -> bool {
        self.steps
            .iter()
            .any(|s| s.rule == StepRule::PartiallyIndependent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub pair: SupportPair,
    pub plan: CombinationPlan,
}

/// The body of evidence an assumption's mass belongs to. Two different
/// assumptions with the same source are mutually exclusive outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Source {
    Evidence(EvidenceId),
    Rule(RuleId),
    Disjunction(DisjunctionId),
    Own(AssumptionId),
}

impl Reasoner {
    pub fn evaluate(&self, node: NodeId) -> Result<Evaluation> {
        self.evaluate_with(node, &EvalOptions::default())
    }

    /// Evaluation restricted to environments consistent with `kernel`.
    pub fn evaluate_with_kernel(&self, node: NodeId, kernel: &[AssumptionId]) -> Result<Evaluation> {
        self.evaluate_with(node, &EvalOptions::with_kernel(kernel))
    }

    /// Evaluation with some assumption masses replaced.
    pub fn evaluate_with_clamp(
        &self,
        node: NodeId,
        overrides: &BTreeMap<AssumptionId, f64>,
    ) -> Result<Evaluation> {
        self.evaluate_with(node, &EvalOptions::with_overrides(overrides.clone()))
    }

    pub fn evaluate_with(&self, node: NodeId, opts: &EvalOptions) -> Result<Evaluation> {
        self.validate(opts)?;
        let db = self.atms();
        let n = db.node(node)?;
        let mut labelled = Vec::new();
        for e in n.label() {
            labelled.push((db.env_members(e.env).to_vec(), Side::Positive, Some(e.support)));
        }
        if let Some(neg) = n.negation() {
            for e in db.node(neg)?.label() {
                labelled.push((db.env_members(e.env).to_vec(), Side::Negative, Some(e.support)));
            }
        }
        self.reduce(labelled, opts)
    }

    /// Evaluates the conjunction of `nodes` without installing a node for
    /// it: its label is the minimal consistent cross product of the member
    /// labels. Conjunctions have no negation.
    pub fn evaluate_conjunction(&self, nodes: &[NodeId], opts: &EvalOptions) -> Result<Evaluation> {
        self.validate(opts)?;
        let labelled = self
            .conjunction_label(nodes)?
            .into_iter()
            .map(|m| (m, Side::Positive, None))
            .collect();
        self.reduce(labelled, opts)
    }

    /// Evaluates choosing `nodes` from their one-ofs. The positive side is
    /// the conjunction label; the negative side collects the labels of every
    /// unchosen sibling and of each node's negation, since a one-of is
    /// exhaustive.
    pub fn evaluate_choice(&self, nodes: &[NodeId], opts: &EvalOptions) -> Result<Evaluation> {
        self.validate(opts)?;
        let db = self.atms();
        let mut labelled: Vec<_> = self
            .conjunction_label(nodes)?
            .into_iter()
            .map(|m| (m, Side::Positive, None))
            .collect();
        let mut against: Vec<Vec<AssumptionId>> = Vec::new();
        for &n in nodes {
            let node = db.node(n)?;
            if let Some(neg) = node.negation() {
                against.extend(db.label_sets(neg).into_iter().map(<[_]>::to_vec));
            }
            let Some(a) = node.assumption() else { continue };
            let Some(d) = db.assumption(a)?.disjunction else { continue };
            for &m in &db.disjunction(d)?.members {
                if m != a {
                    let sibling = db.assumption(m)?.node;
                    against.extend(db.label_sets(sibling).into_iter().map(<[_]>::to_vec));
                }
            }
        }
        labelled.extend(minimize(against).into_iter().map(|m| (m, Side::Negative, None)));
        self.reduce(labelled, opts)
    }

    pub fn conjunction_label(&self, nodes: &[NodeId]) -> Result<Vec<Vec<AssumptionId>>> {
        let db = self.atms();
        let mut partial: Vec<Vec<AssumptionId>> = alloc::vec![Vec::new()];
        for &n in nodes {
            db.node(n)?;
            let label = db.label_sets(n);
            let mut next = Vec::new();
            for p in &partial {
                for e in &label {
                    let u = union(p, e);
                    if db.consistent_set(&u) {
                        next.push(u);
                    }
                }
            }
            partial = minimize(next);
            if partial.is_empty() {
                break;
            }
        }
        if nodes.is_empty() {
            partial.clear();
        }
        Ok(partial)
    }

    fn source(&self, a: AssumptionId) -> Source {
        let asm = &self.atms().assumptions()[a.index()];
        if let Some(d) = asm.disjunction {
            return Source::Disjunction(d);
        }
        match asm.origin {
            Origin::EvidencePositive(e) | Origin::EvidenceNegative(e) => Source::Evidence(e),
            Origin::RuleStrength { rule, .. } => Source::Rule(rule),
            Origin::Plain => Source::Own(a),
        }
    }

    /// Two distinct assumptions drawn from the same source.
    fn clash(&self, a: &[AssumptionId], b: &[AssumptionId]) -> bool {
        a.iter().any(|&x| {
            b.iter()
                .any(|&y| x != y && self.source(x) == self.source(y))
        })
    }

    fn exclusive(&self, a: &EnvTerm, b: &EnvTerm) -> bool {
        if self.clash(&a.members, &b.members) {
            return true;
        }
        // every positive/negative union is nogood through {P, not P}, so
        // only same-side pairs are informative here
        a.side == b.side && !self.atms().consistent_set(&union(&a.members, &b.members))
    }

    fn reduce(
        &self,
        mut labelled: Vec<(Vec<AssumptionId>, Side, Option<Support>)>,
        opts: &EvalOptions,
    ) -> Result<Evaluation> {
        let db = self.atms();
        labelled.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

        let mut plan = CombinationPlan::default();
        for (members, side, support) in labelled {
            let outside = opts
                .kernel
                .as_ref()
                .is_some_and(|k| !db.consistent_set(&union(&members, k)));
            let hypothetical = members
                .iter()
                .any(|a| db.assumptions()[a.index()].origin == Origin::Plain);
            let value: f64 = members.iter().map(|&a| self.mass_of(a, opts)).product();
            let status = if outside {
                EnvStatus::OutsideKernel
            } else if hypothetical {
                EnvStatus::Hypothetical
            } else if value == 0.0 {
                EnvStatus::Zero
            } else {
                EnvStatus::Included
            };
            plan.terms.push(EnvTerm {
                members,
                side,
                value,
                status,
                support,
            });
        }

        for (i, term) in plan.terms.iter().enumerate() {
            if term.status != EnvStatus::Included {
                continue;
            }
            let slot = plan.groups.iter().position(|g| {
                g.terms
                    .iter()
                    .all(|&j| self.exclusive(term, &plan.terms[j]))
            });
            let g = match slot {
                Some(g) => g,
                None => {
                    plan.groups.push(Group {
                        terms: Vec::new(),
                        positive: 0.0,
                        negative: 0.0,
                    });
                    plan.groups.len() - 1
                }
            };
            let group = &mut plan.groups[g];
            group.terms.push(i);
            match term.side {
                Side::Positive => group.positive += term.value,
                Side::Negative => group.negative += term.value,
            }
        }

        let mut acc = SupportPair::VACUOUS;
        let mut seen: BTreeSet<Source> = BTreeSet::new();
        for (gi, group) in plan.groups.iter_mut().enumerate() {
            let (raw_p, raw_n) = (group.positive, group.negative);
            if raw_p > 1.0 || raw_p + raw_n > 1.0 + super::CONFLICT_EPSILON {
                plan.warnings.push(Warning::GroupClamped {
                    group: gi,
                    positive: raw_p,
                    negative: raw_n,
                });
                group.positive = raw_p.min(1.0);
                group.negative = raw_n.min(1.0 - group.positive);
            }
            let operand = SupportPair::computed(group.positive, 1.0 - group.negative);

            let mut sources = BTreeSet::new();
            for &t in &group.terms {
                for &a in &plan.terms[t].members {
                    if self.mass_of(a, opts) < 1.0 {
                        sources.insert(self.source(a));
                    }
                }
            }
            let rule = if gi == 0 {
                StepRule::Start
            } else if sources.iter().any(|s| seen.contains(s)) {
                StepRule::PartiallyIndependent
            } else {
                StepRule::Independent
            };
            seen.extend(sources);
            acc = slp_combine(acc, operand)?;
            plan.steps.push(Step {
                group: gi,
                rule,
                operand,
                result: acc,
            });
        }
        Ok(Evaluation { pair: acc, plan })
    }
}
