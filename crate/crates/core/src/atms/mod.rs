//! Assumption-based truth maintenance.
//!
//! A [`Database`] holds assumptions, nodes and justifications. Every node
//! carries a label: the set of minimal consistent environments (assumption
//! sets) under which it holds. Labels are kept sound, consistent and minimal
//! after every mutating call; propagation is a worklist fixpoint, so cyclic
//! justification graphs are fine.
//!
//! The database is monotone: nothing is ever retracted.

mod env;
mod interp;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use env::{canonical, is_subset, minimize, union};
pub use interp::Interpretation;

use crate::error::{check_unit, Error, Result};
use env::EnvTable;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Dense assumption identifier, never reused.
    AssumptionId
);
id_type!(NodeId);
id_type!(
    /// Canonical (interned) environment identifier.
    EnvId
);
id_type!(JustificationId);
id_type!(DisjunctionId);
id_type!(
    /// Reference to the evidence assertion owning an assumption.
    EvidenceId
);
id_type!(
    /// Reference to the compiled rule owning an assumption.
    RuleId
);

/// Where an assumption's mass comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// A bare truth variable with no evidential content.
    Plain,
    EvidencePositive(EvidenceId),
    EvidenceNegative(EvidenceId),
    RuleStrength { rule: RuleId, negative: bool },
}

#[derive(Debug, Clone)]
pub struct Assumption {
    pub id: AssumptionId,
    pub mass: f64,
    pub origin: Origin,
    pub name: String,
    /// The node whose label is seeded with `{self}`.
    pub node: NodeId,
    pub disjunction: Option<DisjunctionId>,
}

/// How a label environment got there; kept for explanations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Assumed(AssumptionId),
    Justified(JustificationId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelEntry {
    pub env: EnvId,
    pub support: Support,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub datum: String,
    label: Vec<LabelEntry>,
    negation: Option<NodeId>,
    consumers: Vec<JustificationId>,
    assumption: Option<AssumptionId>,
}

impl Node {
    pub fn label(&self) -> &[LabelEntry] {
        &self.label
    }

    pub fn negation(&self) -> Option<NodeId> {
        self.negation
    }

    /// The assumption this node is the hypothesis node of, if any.
    pub fn assumption(&self) -> Option<AssumptionId> {
        self.assumption
    }
}

#[derive(Debug, Clone)]
pub struct Justification {
    pub id: JustificationId,
    pub antecedents: Vec<NodeId>,
    pub consequent: NodeId,
    pub informant: String,
}

#[derive(Debug, Clone)]
pub struct Disjunction {
    pub id: DisjunctionId,
    pub members: Vec<AssumptionId>,
}

const FALSE_NODE: NodeId = NodeId(0);

/// The assumption/justification database.
#[derive(Debug, Clone)]
pub struct Database {
    assumptions: Vec<Assumption>,
    nodes: Vec<Node>,
    by_datum: BTreeMap<String, NodeId>,
    justifications: Vec<Justification>,
    /// Environments already delivered through each justification.
    delivered: Vec<BTreeSet<EnvId>>,
    disjunctions: Vec<Disjunction>,
    envs: EnvTable,
}

impl Default for Database {
    fn default() -> Self {
        Self::new()
    }
}

impl Database {
    pub fn new() -> Self {
        let falsity = Node {
            id: FALSE_NODE,
            datum: String::from("⊥"),
            label: Vec::new(),
            negation: None,
            consumers: Vec::new(),
            assumption: None,
        };
        Database {
            assumptions: Vec::new(),
            nodes: alloc::vec![falsity],
            by_datum: BTreeMap::new(),
            justifications: Vec::new(),
            delivered: Vec::new(),
            disjunctions: Vec::new(),
            envs: EnvTable::default(),
        }
    }

    /// The distinguished contradiction node. It never carries a label:
    /// whatever reaches it becomes a nogood.
    pub fn false_node(&self) -> NodeId {
        FALSE_NODE
    }

    // ---- accessors -------------------------------------------------------

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.index()).ok_or(Error::UnknownNode(id.0))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().skip(1)
    }

    pub fn node_by_datum(&self, datum: &str) -> Option<NodeId> {
        self.by_datum.get(datum).copied()
    }

    pub fn assumption(&self, id: AssumptionId) -> Result<&Assumption> {
        self.assumptions
            .get(id.index())
            .ok_or(Error::UnknownAssumption(id.0))
    }

    pub fn assumptions(&self) -> &[Assumption] {
        &self.assumptions
    }

    pub fn assumption_by_name(&self, name: &str) -> Option<AssumptionId> {
        self.node_by_datum(name)
            .and_then(|n| self.nodes[n.index()].assumption)
            .filter(|a| self.assumptions[a.index()].name == name)
    }

    pub fn justification(&self, id: JustificationId) -> &Justification {
        &self.justifications[id.index()]
    }

    pub fn justifications(&self) -> &[Justification] {
        &self.justifications
    }

    pub fn disjunction(&self, id: DisjunctionId) -> Result<&Disjunction> {
        self.disjunctions
            .get(id.index())
            .ok_or(Error::UnknownDisjunction(id.0))
    }

    pub fn disjunctions(&self) -> &[Disjunction] {
        &self.disjunctions
    }

    pub fn env_members(&self, id: EnvId) -> &[AssumptionId] {
        self.envs.members(id)
    }

    /// Interns an assumption set, returning its canonical id.
    pub fn environment(&mut self, members: &[AssumptionId]) -> EnvId {
        self.envs.intern(canonical(members))
    }

    /// Canonical id of an already interned set, without mutating.
    pub fn lookup_environment(&self, members: &[AssumptionId]) -> Option<EnvId> {
        self.envs.lookup(&canonical(members))
    }

    /// Label environments of `node` as member slices.
    pub fn label_sets(&self, node: NodeId) -> Vec<&[AssumptionId]> {
        self.nodes[node.index()]
            .label
            .iter()
            .map(|e| self.envs.members(e.env))
            .collect()
    }

    /// Stored minimal nogoods.
    pub fn nogoods(&self) -> Vec<&[AssumptionId]> {
        self.envs
            .nogoods()
            .iter()
            .map(|&n| self.envs.members(n))
            .collect()
    }

    /// Name list for an environment, for display.
    pub fn env_names(&self, members: &[AssumptionId]) -> Vec<&str> {
        members
            .iter()
            .map(|a| self.assumptions[a.index()].name.as_str())
            .collect()
    }

    // ---- queries ---------------------------------------------------------

    /// True iff `env` is not a superset of any stored nogood.
    pub fn consistent(&self, env: EnvId) -> bool {
        !self.envs.is_nogood(env)
    }

    /// [`Database::consistent`] for a raw (not necessarily interned) set.
    pub fn consistent_set(&self, members: &[AssumptionId]) -> bool {
        !self.envs.violates(&canonical(members))
    }

    /// True iff some label environment of `node` is contained in `env`.
    pub fn holds(&self, node: NodeId, env: &[AssumptionId]) -> bool {
        let env = canonical(env);
        self.nodes[node.index()]
            .label
            .iter()
            .any(|e| is_subset(self.envs.members(e.env), &env))
    }

    // ---- mutation --------------------------------------------------------

    /// Returns the node for `datum`, creating it with an empty label.
    pub fn create_node(&mut self, datum: &str) -> NodeId {
        if let Some(&id) = self.by_datum.get(datum) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            datum: String::from(datum),
            label: Vec::new(),
            negation: None,
            consumers: Vec::new(),
            assumption: None,
        });
        self.by_datum.insert(String::from(datum), id);
        id
    }

    /// Creates an assumption and makes the node named `name` its
    /// hypothesis node, whose label then contains `{assumption}`.
    pub fn create_assumption(
        &mut self,
        mass: f64,
        origin: Origin,
        name: &str,
    ) -> Result<AssumptionId> {
        check_unit("assumption mass", mass)?;
        let node = self.create_node(name);
        if self.nodes[node.index()].assumption.is_some() {
            return Err(Error::DuplicateAssumption(String::from(name)));
        }
        let id = AssumptionId(self.assumptions.len() as u32);
        self.assumptions.push(Assumption {
            id,
            mass,
            origin,
            name: String::from(name),
            node,
            disjunction: None,
        });
        self.nodes[node.index()].assumption = Some(id);
        let env = self.envs.intern(alloc::vec![id]);
        let mut queue = VecDeque::new();
        if self.weave(node, env, Support::Assumed(id)) {
            queue.push_back((node, env));
        }
        self.run(queue)?;
        Ok(id)
    }

    /// Installs `antecedents → consequent` and propagates to fixpoint.
    pub fn add_justification(
        &mut self,
        antecedents: &[NodeId],
        consequent: NodeId,
        informant: &str,
    ) -> Result<JustificationId> {
        if antecedents.is_empty() {
            return Err(Error::EmptyAntecedents);
        }
        self.node(consequent)?;
        let mut ants: Vec<NodeId> = Vec::with_capacity(antecedents.len());
        for &a in antecedents {
            self.node(a)?;
            if a == FALSE_NODE {
                return Err(Error::FalseAntecedent);
            }
            if a == consequent {
                return Err(Error::SelfJustification(self.nodes[a.index()].datum.clone()));
            }
            if !ants.contains(&a) {
                ants.push(a);
            }
        }
        let id = JustificationId(self.justifications.len() as u32);
        for &a in &ants {
            self.nodes[a.index()].consumers.push(id);
        }
        self.justifications.push(Justification {
            id,
            antecedents: ants,
            consequent,
            informant: String::from(informant),
        });
        self.delivered.push(BTreeSet::new());

        let mut queue = VecDeque::new();
        for env in self.cross_product(id, None) {
            self.deliver(id, env, &mut queue)?;
        }
        self.run(queue)?;
        Ok(id)
    }

    /// Records `members` as inconsistent and purges it and its supersets
    /// from every label.
    pub fn mark_nogood(&mut self, members: &[AssumptionId]) -> Result<EnvId> {
        for a in members {
            self.assumption(*a)?;
        }
        let env = self.environment(members);
        self.nogood(env)?;
        Ok(env)
    }

    /// Links `node` with a negation node `(not datum)` and installs
    /// `{node, negation} → ⊥`. Idempotent.
    pub fn ensure_negation(&mut self, node: NodeId) -> Result<NodeId> {
        self.node(node)?;
        if node == FALSE_NODE {
            return Err(Error::FalseAntecedent);
        }
        if let Some(n) = self.nodes[node.index()].negation {
            return Ok(n);
        }
        let datum = format!("(not {})", self.nodes[node.index()].datum);
        let neg = self.create_node(&datum);
        if self.nodes[neg.index()].negation.is_some() {
            return Err(Error::SelfJustification(datum));
        }
        self.nodes[node.index()].negation = Some(neg);
        self.nodes[neg.index()].negation = Some(node);
        self.add_justification(&[node, neg], FALSE_NODE, "negation")?;
        Ok(neg)
    }

    /// Declares the hypothesis nodes pairwise exclusive and records them as
    /// one disjunction for interpretation construction. Exhaustiveness is
    /// never turned into justifications.
    pub fn declare_one_of(&mut self, hypotheses: &[NodeId]) -> Result<DisjunctionId> {
        if hypotheses.len() < 2 {
            return Err(Error::OneOf(String::from("needs at least two members")));
        }
        let mut members = Vec::with_capacity(hypotheses.len());
        for &h in hypotheses {
            let node = self.node(h)?;
            let a = node.assumption.ok_or_else(|| {
                Error::OneOf(format!("{} is not an assumption's hypothesis node", node.datum))
            })?;
            if self.assumptions[a.index()].disjunction.is_some() {
                return Err(Error::OneOf(format!(
                    "{} already belongs to a disjunction",
                    node.datum
                )));
            }
            if members.contains(&a) {
                return Err(Error::OneOf(format!("{} listed twice", node.datum)));
            }
            members.push(a);
        }
        let id = DisjunctionId(self.disjunctions.len() as u32);
        for &a in &members {
            self.assumptions[a.index()].disjunction = Some(id);
        }
        self.disjunctions.push(Disjunction {
            id,
            members: members.clone(),
        });
        for i in 0..hypotheses.len() {
            for j in i + 1..hypotheses.len() {
                self.add_justification(&[hypotheses[i], hypotheses[j]], FALSE_NODE, "one-of")?;
            }
        }
        Ok(id)
    }

    // ---- propagation -----------------------------------------------------

    /// Adds `env` to `node`'s label unless it is nogood or subsumed; removes
    /// label supersets of `env`. A true return obliges the caller to
    /// propagate `env` downstream.
    fn weave(&mut self, node: NodeId, env: EnvId, support: Support) -> bool {
        if self.envs.is_nogood(env) {
            return false;
        }
        let members = self.envs.members(env);
        let label = &self.nodes[node.index()].label;
        if label
            .iter()
            .any(|e| is_subset(self.envs.members(e.env), members))
        {
            return false;
        }
        let envs = &self.envs;
        self.nodes[node.index()]
            .label
            .retain(|e| !is_subset(members, envs.members(e.env)));
        self.nodes[node.index()].label.push(LabelEntry { env, support });
        true
    }

    fn deliver(
        &mut self,
        just: JustificationId,
        env: EnvId,
        queue: &mut VecDeque<(NodeId, EnvId)>,
    ) -> Result<()> {
        if !self.delivered[just.index()].insert(env) {
            return Ok(());
        }
        let consequent = self.justifications[just.index()].consequent;
        if consequent == FALSE_NODE {
            self.nogood(env)
        } else {
            if self.weave(consequent, env, Support::Justified(just)) {
                queue.push_back((consequent, env));
            }
            Ok(())
        }
    }

    fn run(&mut self, mut queue: VecDeque<(NodeId, EnvId)>) -> Result<()> {
        while let Some((node, env)) = queue.pop_front() {
            if !self.nodes[node.index()].label.iter().any(|e| e.env == env) {
                continue;
            }
            let consumers = self.nodes[node.index()].consumers.clone();
            for just in consumers {
                for out in self.cross_product(just, Some((node, env))) {
                    self.deliver(just, out, &mut queue)?;
                }
            }
        }
        Ok(())
    }

    /// Consistent minimal unions of one label environment per antecedent,
    /// with `seed` pinning one antecedent to a single environment.
    fn cross_product(&mut self, just: JustificationId, seed: Option<(NodeId, EnvId)>) -> Vec<EnvId> {
        let mut partial: Vec<Vec<AssumptionId>> = alloc::vec![Vec::new()];
        for &ant in &self.justifications[just.index()].antecedents {
            let choices: Vec<EnvId> = match seed {
                Some((n, e)) if n == ant => alloc::vec![e],
                _ => self.nodes[ant.index()].label.iter().map(|e| e.env).collect(),
            };
            let mut next = Vec::new();
            for p in &partial {
                for &c in &choices {
                    let u = union(p, self.envs.members(c));
                    if !self.envs.violates(&u) {
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                return Vec::new();
            }
            partial = minimize(next);
        }
        partial.into_iter().map(|m| self.envs.intern(m)).collect()
    }

    fn nogood(&mut self, env: EnvId) -> Result<()> {
        if self.envs.members(env).is_empty() {
            return Err(Error::EmptyNogood);
        }
        if !self.envs.add_nogood(env) {
            return Ok(());
        }
        let envs = &self.envs;
        for node in &mut self.nodes {
            node.label.retain(|e| !envs.is_nogood(e.env));
        }
        Ok(())
    }

    // ---- checking --------------------------------------------------------

    /// Describes every violated label/nogood invariant; empty when sound.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for node in self.nodes() {
            for (i, a) in node.label.iter().enumerate() {
                let am = self.envs.members(a.env);
                if self.envs.violates(am) {
                    out.push(format!("{}: label holds nogood {:?}", node.datum, am));
                }
                for b in &node.label[i + 1..] {
                    let bm = self.envs.members(b.env);
                    if is_subset(am, bm) || is_subset(bm, am) {
                        out.push(format!("{}: non-minimal {:?} / {:?}", node.datum, am, bm));
                    }
                }
            }
        }
        let goods = self.envs.nogoods();
        for (i, &a) in goods.iter().enumerate() {
            for &b in &goods[i + 1..] {
                let (am, bm) = (self.envs.members(a), self.envs.members(b));
                if is_subset(am, bm) || is_subset(bm, am) {
                    out.push(format!("non-minimal nogoods {:?} / {:?}", am, bm));
                }
            }
        }
        for n in self.nodes() {
            if let Some(neg) = n.negation {
                if self.nodes[neg.index()].negation != Some(n.id) {
                    out.push(format!("{}: asymmetric negation link", n.datum));
                }
            }
        }
        out
    }
}
