//! Interpretation construction over one-of disjunctions.

use alloc::vec::Vec;

use super::env::union;
use super::{AssumptionId, Database, DisjunctionId};
use crate::error::Result;

/// One consistent choice of exactly one member per disjunction in scope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpretation {
    /// `(disjunction, chosen member)` in scope order.
    pub choices: Vec<(DisjunctionId, AssumptionId)>,
    /// Sorted union of the chosen members.
    pub environment: Vec<AssumptionId>,
}

impl Database {
    /// Every consistent assignment choosing one member per scoped
    /// disjunction, ordered lexicographically by chosen assumption ids.
    /// Partial assignments are pruned as soon as they hit a nogood.
    pub fn interpretations(&self, scope: &[DisjunctionId]) -> Result<Vec<Interpretation>> {
        let mut domains = Vec::with_capacity(scope.len());
        for &d in scope {
            let mut members = self.disjunction(d)?.members.clone();
            members.sort_unstable();
            domains.push((d, members));
        }
        let mut out = Vec::new();
        if domains.is_empty() {
            return Ok(out);
        }
        let mut chosen = Vec::with_capacity(domains.len());
        self.extend(&domains, &mut chosen, &[], &mut out);
        out.sort_by(|a, b| {
            let ka = a.choices.iter().map(|c| c.1);
            let kb = b.choices.iter().map(|c| c.1);
            ka.cmp(kb)
        });
        Ok(out)
    }

    fn extend(
        &self,
        domains: &[(DisjunctionId, Vec<AssumptionId>)],
        chosen: &mut Vec<(DisjunctionId, AssumptionId)>,
        env: &[AssumptionId],
        out: &mut Vec<Interpretation>,
    ) {
        let depth = chosen.len();
        if depth == domains.len() {
            out.push(Interpretation {
                choices: chosen.clone(),
                environment: env.to_vec(),
            });
            return;
        }
        let (d, members) = &domains[depth];
        for &m in members {
            let next = union(env, &[m]);
            if !self.consistent_set(&next) {
                continue;
            }
            chosen.push((*d, m));
            self.extend(domains, chosen, &next, out);
            chosen.pop();
        }
    }

    /// Interpretations over `full` restricted to `projection`, deduplicated.
    /// A projected choice appears only if it extends to a consistent
    /// interpretation of every disjunction in `full`.
    pub fn projected_interpretations(
        &self,
        full: &[DisjunctionId],
        projection: &[DisjunctionId],
    ) -> Result<Vec<Interpretation>> {
        for &d in projection {
            self.disjunction(d)?;
        }
        let mut out: Vec<Interpretation> = Vec::new();
        for i in self.interpretations(full)? {
            let choices: Vec<_> = projection
                .iter()
                .filter_map(|d| i.choices.iter().find(|c| c.0 == *d).copied())
                .collect();
            if choices.len() != projection.len() {
                continue;
            }
            let mut environment: Vec<_> = choices.iter().map(|c| c.1).collect();
            environment.sort_unstable();
            let p = Interpretation {
                choices,
                environment,
            };
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out.sort_by(|a, b| {
            let ka = a.choices.iter().map(|c| c.1);
            let kb = b.choices.iter().map(|c| c.1);
            ka.cmp(kb)
        });
        Ok(out)
    }
}
