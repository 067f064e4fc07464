//! Interned assumption sets and the minimal-nogood store.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{AssumptionId, EnvId};

/// `a ⊆ b` for strictly ascending slices.
pub fn is_subset(a: &[AssumptionId], b: &[AssumptionId]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut rest = b.iter();
    'outer: for x in a {
        for y in rest.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Sorted union of two strictly ascending slices.
pub fn union(a: &[AssumptionId], b: &[AssumptionId]) -> Vec<AssumptionId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts and deduplicates an arbitrary member list into canonical form.
pub fn canonical(members: &[AssumptionId]) -> Vec<AssumptionId> {
    let mut v = members.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Keeps only the subset-minimal sets (duplicates collapse to one).
pub fn minimize(mut sets: Vec<Vec<AssumptionId>>) -> Vec<Vec<AssumptionId>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Vec<AssumptionId>> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| is_subset(k, &s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

#[derive(Debug, Clone)]
struct Entry {
    members: Vec<AssumptionId>,
    nogood: bool,
}

/// Hash-consing table: equal member sets always map to the same [`EnvId`].
#[derive(Debug, Clone, Default)]
pub(crate) struct EnvTable {
    entries: Vec<Entry>,
    index: BTreeMap<Vec<AssumptionId>, EnvId>,
    /// Minimal nogoods only; no element is a superset of another.
    nogoods: Vec<EnvId>,
}

impl EnvTable {
    pub fn intern(&mut self, members: Vec<AssumptionId>) -> EnvId {
        if let Some(&id) = self.index.get(&members) {
            return id;
        }
        let id = EnvId(self.entries.len() as u32);
        let nogood = self.violates(&members);
        self.index.insert(members.clone(), id);
        self.entries.push(Entry { members, nogood });
        id
    }

    pub fn lookup(&self, members: &[AssumptionId]) -> Option<EnvId> {
        self.index.get(members).copied()
    }

    pub fn members(&self, id: EnvId) -> &[AssumptionId] {
        &self.entries[id.0 as usize].members
    }

    pub fn is_nogood(&self, id: EnvId) -> bool {
        self.entries[id.0 as usize].nogood
    }

    /// True iff `members` is a superset of (or equal to) a stored nogood.
    pub fn violates(&self, members: &[AssumptionId]) -> bool {
        self.nogoods
            .iter()
            .any(|&n| is_subset(&self.entries[n.0 as usize].members, members))
    }

    pub fn nogoods(&self) -> &[EnvId] {
        &self.nogoods
    }

    /// Records `id` as a minimal nogood and flags every interned superset.
    /// Returns false if it was already implied by a stored nogood.
    pub fn add_nogood(&mut self, id: EnvId) -> bool {
        if self.is_nogood(id) {
            return false;
        }
        let members = self.entries[id.0 as usize].members.clone();
        let entries = &self.entries;
        self.nogoods
            .retain(|&n| !is_subset(&members, &entries[n.0 as usize].members));
        self.nogoods.push(id);
        self.nogoods.sort_unstable();
        for e in &mut self.entries {
            if !e.nogood && is_subset(&members, &e.members) {
                e.nogood = true;
            }
        }
        true
    }
}
