use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{EvalOptions, Evaluation, Reasoner};
use crate::atms::{DisjunctionId, Interpretation, NodeId};
use crate::error::Result;

/// A ranked interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub interpretation: Interpretation,
    /// Hypothesis nodes of the chosen members, in scope order.
    pub nodes: Vec<NodeId>,
    /// Space-separated data of `nodes`.
    pub datum: String,
    pub evaluation: Evaluation,
}

impl Reasoner {
    /// Evaluates every interpretation of `scope` and sorts by descending
    /// lower support, then descending upper support, then datum.
    ///
    /// Interpretations are built over all declared disjunctions and projected
    /// onto `scope`, so a choice only counts if the remaining one-ofs can be
    /// completed consistently. Each is scored by [`Reasoner::evaluate_choice`].
    pub fn rank_solutions(&self, scope: &[DisjunctionId]) -> Result<Vec<Solution>> {
        self.rank_solutions_with(scope, &EvalOptions::default())
    }

    pub fn rank_solutions_with(
        &self,
        scope: &[DisjunctionId],
        opts: &EvalOptions,
    ) -> Result<Vec<Solution>> {
        if scope.is_empty() {
            return Ok(Vec::new());
        }
        let db = self.atms();
        let all: Vec<DisjunctionId> = db.disjunctions().iter().map(|d| d.id).collect();
        let mut out = Vec::new();
        for interpretation in db.projected_interpretations(&all, scope)? {
            let mut nodes = Vec::with_capacity(interpretation.choices.len());
            let mut datum = String::new();
            for &(_, a) in &interpretation.choices {
                let node = db.assumption(a)?.node;
                if !datum.is_empty() {
                    datum.push(' ');
                }
                datum.push_str(&db.node(node)?.datum);
                nodes.push(node);
            }
            let evaluation = self.evaluate_choice(&nodes, opts)?;
            out.push(Solution {
                interpretation,
                nodes,
                datum,
                evaluation,
            });
        }
        out.sort_by(|a, b| {
            let (pa, pb) = (a.evaluation.pair, b.evaluation.pair);
            pb.lower()
                .partial_cmp(&pa.lower())
                .unwrap_or(Ordering::Equal)
                .then(pb.upper().partial_cmp(&pa.upper()).unwrap_or(Ordering::Equal))
                .then_with(|| a.datum.cmp(&b.datum))
        });
        Ok(out)
    }
}
