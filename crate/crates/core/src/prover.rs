//! Terminating proof search on cross-sequents, proof-tree construction,
//! countermodel extraction from saturated leaves, and proof checking.
//!
//! The search applies rules in a fixed priority order: axioms first, then
//! disjunctions, conjunctions, diamonds, boxes. Ties within one priority are
//! broken by component label (ascending), then formula order; a diamond
//! picks the most recently created unsaturated cluster member as its target.
//! Because no rule removes formulas and cluster sizes are bounded, the
//! search always terminates, and a leaf is either an axiom or saturated.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

use crate::cross_sequent::{
    Component, CrossSequent, Label, LabelAllocator, Side, StructureError,
};
use crate::semantics::{Interpretation, KripkeModel, WorldId};
use crate::syntax::{Agent, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleName {
    Id,
    TopAxiom,
    Or,
    And,
    BoxIn,
    BoxUp,
    BoxFresh,
    DiaIn,
    DiaUp,
    DiaT,
    DiaDown,
}

impl RuleName {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleName::Id => "id",
            RuleName::TopAxiom => "top",
            RuleName::Or => "or",
            RuleName::And => "and",
            RuleName::BoxIn => "box_in",
            RuleName::BoxUp => "box_up",
            RuleName::BoxFresh => "box_fresh",
            RuleName::DiaIn => "dia_in",
            RuleName::DiaUp => "dia_up",
            RuleName::DiaT => "dia_t",
            RuleName::DiaDown => "dia_down",
        }
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self, RuleName::Id | RuleName::TopAxiom)
    }

    pub fn is_box(&self) -> bool {
        matches!(self, RuleName::BoxIn | RuleName::BoxUp | RuleName::BoxFresh)
    }

    pub fn is_dia(&self) -> bool {
        matches!(
            self,
            RuleName::DiaIn | RuleName::DiaUp | RuleName::DiaT | RuleName::DiaDown
        )
    }
}

/// Split shape of an axiom: sides of the two clashing literals (or of the
/// closing constant for the truth axiom).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomShape {
    /// `p` and `~p` both on the left.
    Ll,
    /// `p` on the left, `~p` on the right.
    Lr,
    /// `~p` on the left, `p` on the right.
    Rl,
    /// `p` and `~p` both on the right.
    Rr,
    /// `true` on the left.
    LTop,
    /// `true` on the right.
    RTop,
}

impl AxiomShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxiomShape::Ll => "LL",
            AxiomShape::Lr => "LR",
            AxiomShape::Rl => "RL",
            AxiomShape::Rr => "RR",
            AxiomShape::LTop => "L",
            AxiomShape::RTop => "R",
        }
    }
}

/// One rule application. `component` is the component holding the principal
/// formula (the source label `k` of modal rules); `target` is the freshly
/// created component for box rules and the existing target component for
/// diamond rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance {
    pub name: RuleName,
    pub side: Side,
    pub shape: Option<AxiomShape>,
    pub component: Label,
    pub principal: Formula,
    pub agent: Option<Agent>,
    pub target: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStep {
    Axiom(RuleInstance),
    Rule(RuleInstance, Vec<ProofTree>),
    Saturated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub sequent: CrossSequent,
    pub step: ProofStep,
}

impl ProofTree {
    /// All rule instances in the tree, in depth-first order.
    pub fn rule_instances(&self) -> Vec<&RuleInstance> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a ProofTree, out: &mut Vec<&'a RuleInstance>) {
            match &t.step {
                ProofStep::Axiom(r) => out.push(r),
                ProofStep::Rule(r, children) => {
                    out.push(r);
                    for c in children {
                        walk(c, out);
                    }
                }
                ProofStep::Saturated => {}
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        match &self.step {
            ProofStep::Axiom(_) => true,
            ProofStep::Rule(_, children) => children.iter().all(|c| c.is_closed()),
            ProofStep::Saturated => false,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rule = match &self.step {
            ProofStep::Saturated => serde_json::Value::Null,
            ProofStep::Axiom(r) | ProofStep::Rule(r, _) => rule_to_json(r, &self.sequent),
        };
        let children: Vec<serde_json::Value> = match &self.step {
            ProofStep::Rule(_, children) => children.iter().map(|c| c.to_json()).collect(),
            _ => vec![],
        };
        json!({
            "sequent": self.sequent.to_string(),
            "rule": rule,
            "children": children,
        })
    }
}

fn rule_to_json(r: &RuleInstance, s: &CrossSequent) -> serde_json::Value {
    let hole = s.path_to(r.component).ok().map(|h| {
        json!({
            "path": h.path.iter().map(|(a, i)| json!({"agent": a.0, "index": i})).collect::<Vec<_>>(),
            "label": h.target.0,
        })
    });
    let mut obj = serde_json::Map::new();
    obj.insert("name".into(), json!(r.name.as_str()));
    obj.insert("side".into(), json!(r.side.tag()));
    if let Some(shape) = r.shape {
        obj.insert("shape".into(), json!(shape.as_str()));
    }
    if let Some(a) = &r.agent {
        obj.insert("agent".into(), json!(a.0));
    }
    obj.insert("principal".into(), json!(r.principal.to_string()));
    if let Some(h) = hole {
        obj.insert("hole".into(), h);
    }
    obj.insert("k".into(), json!(r.component.0));
    if let Some(t) = r.target {
        obj.insert("l".into(), json!(t.0));
    }
    serde_json::Value::Object(obj)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofResult {
    Proved(ProofTree),
    Refuted {
        tree: ProofTree,
        leaf: CrossSequent,
        model: KripkeModel,
        interp: Interpretation,
    },
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("formula does not occur in component {0}")]
    OccurrenceNotFound(Label),
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error("leaf is not saturated")]
    NotSaturated,
}

/// Saturation of one formula occurrence in component `l`, per the
/// type-dependent conditions. Reads the union of both split sides.
pub fn is_saturated_occurrence(
    s: &CrossSequent,
    l: Label,
    f: &Formula,
) -> Result<bool, ProverError> {
    let c = s.component(l)?;
    if !c.contains(f) {
        return Err(ProverError::OccurrenceNotFound(l));
    }
    Ok(match f {
        Formula::Top => false,
        Formula::Bottom => true,
        Formula::Lit { atom, positive } => {
            let opposite = Formula::Lit {
                atom: atom.clone(),
                positive: !positive,
            };
            !c.contains(&opposite)
        }
        Formula::Or(a, b) => c.contains(a) && c.contains(b),
        Formula::And(a, b) => c.contains(a) || c.contains(b),
        Formula::Box(a, body) => s
            .cluster(l, a)?
            .iter()
            .any(|&m| s.component(m).map(|c| c.contains(body)).unwrap_or(false)),
        Formula::Dia(a, body) => s
            .cluster(l, a)?
            .iter()
            .all(|&m| s.component(m).map(|c| c.contains(body)).unwrap_or(false)),
    })
}

/// True iff every formula occurrence in `s` is saturated.
pub fn is_saturated(s: &CrossSequent) -> bool {
    let mut alloc = LabelAllocator::after(s);
    applicable_rule(s, &mut alloc).is_none()
}

const SIDES: [Side; 2] = [Side::Left, Side::Right];

/// The highest-priority applicable rule instance under the deterministic
/// strategy, or `None` when `s` is saturated. Component-creating rules take
/// a fresh label from `alloc`.
pub fn applicable_rule(s: &CrossSequent, alloc: &mut LabelAllocator) -> Option<RuleInstance> {
    let comps = s.components();

    // 1. a truth constant closes the branch
    for c in &comps {
        for side in SIDES {
            if c.side(side).contains(&Formula::Top) {
                return Some(RuleInstance {
                    name: RuleName::TopAxiom,
                    side,
                    shape: Some(match side {
                        Side::Left => AxiomShape::LTop,
                        Side::Right => AxiomShape::RTop,
                    }),
                    component: c.label,
                    principal: Formula::Top,
                    agent: None,
                    target: None,
                });
            }
        }
    }

    // 2. clashing literals close the branch; the positive literal is principal
    for c in &comps {
        for f in c.formulas() {
            let Formula::Lit { atom, positive: true } = &f else {
                continue;
            };
            let neg = Formula::Lit {
                atom: atom.clone(),
                positive: false,
            };
            if !c.contains(&neg) {
                continue;
            }
            let (p_l, p_r) = (c.left.contains(&f), c.right.contains(&f));
            let (n_l, n_r) = (c.left.contains(&neg), c.right.contains(&neg));
            let (shape, side) = if p_r && n_r {
                (AxiomShape::Rr, Side::Right)
            } else if p_l && n_l {
                (AxiomShape::Ll, Side::Left)
            } else if n_l && p_r {
                (AxiomShape::Rl, Side::Right)
            } else {
                (AxiomShape::Lr, Side::Left)
            };
            return Some(RuleInstance {
                name: RuleName::Id,
                side,
                shape: Some(shape),
                component: c.label,
                principal: f,
                agent: None,
                target: None,
            });
        }
    }

    // 3. unsaturated disjunction
    for c in &comps {
        for side in SIDES {
            for f in c.side(side) {
                if let Formula::Or(a, b) = f {
                    if !(c.contains(a) && c.contains(b)) {
                        return Some(RuleInstance {
                            name: RuleName::Or,
                            side,
                            shape: None,
                            component: c.label,
                            principal: f.clone(),
                            agent: None,
                            target: None,
                        });
                    }
                }
            }
        }
    }

    // 4. unsaturated conjunction
    for c in &comps {
        for side in SIDES {
            for f in c.side(side) {
                if let Formula::And(a, b) = f {
                    if !(c.contains(a) || c.contains(b)) {
                        return Some(RuleInstance {
                            name: RuleName::And,
                            side,
                            shape: None,
                            component: c.label,
                            principal: f.clone(),
                            agent: None,
                            target: None,
                        });
                    }
                }
            }
        }
    }

    // 5. unsaturated box: create the missing cluster member. Boxes go
    // before diamonds so that a diamond sees the cluster its box siblings
    // are about to grow, matching the reference derivations.
    for c in &comps {
        for side in SIDES {
            for f in c.side(side) {
                let Formula::Box(a, body) = f else { continue };
                let cluster = s.cluster(c.label, a).expect("own label");
                let saturated = cluster
                    .iter()
                    .any(|&m| s.component(m).expect("cluster label").contains(body));
                if saturated {
                    continue;
                }
                let in_a_bracket = matches!(
                    s.parent_of(c.label).expect("own label"),
                    Some((_, ref pa)) if pa == a
                );
                let name = if in_a_bracket {
                    RuleName::BoxIn
                } else if c.brackets.contains_key(a) {
                    RuleName::BoxUp
                } else {
                    RuleName::BoxFresh
                };
                return Some(RuleInstance {
                    name,
                    side,
                    shape: None,
                    component: c.label,
                    principal: f.clone(),
                    agent: Some(a.clone()),
                    target: Some(alloc.fresh()),
                });
            }
        }
    }

    // 6. unsaturated diamond: feed the newest cluster member still missing
    // the body
    for c in &comps {
        for side in SIDES {
            for f in c.side(side) {
                let Formula::Dia(a, body) = f else { continue };
                let cluster = s.cluster(c.label, a).expect("own label");
                let target = cluster
                    .iter()
                    .rev()
                    .copied()
                    .find(|&m| !s.component(m).expect("cluster label").contains(body));
                let Some(target) = target else { continue };
                let parent = s.cluster_parent(c.label, a).expect("own label");
                let name = if target == c.label {
                    RuleName::DiaT
                } else if parent == Some(target) {
                    RuleName::DiaDown
                } else if parent == Some(c.label) {
                    RuleName::DiaUp
                } else {
                    RuleName::DiaIn
                };
                return Some(RuleInstance {
                    name,
                    side,
                    shape: None,
                    component: c.label,
                    principal: f.clone(),
                    agent: Some(a.clone()),
                    target: Some(target),
                });
            }
        }
    }

    None
}

/// Applies a rule instance, producing the premises (bottom-up). Axioms have
/// no premises. The active formulas land on the same side as the principal.
pub fn apply_rule(s: &CrossSequent, r: &RuleInstance) -> Result<Vec<CrossSequent>, ProverError> {
    let c = s.component(r.component)?;
    if !c.side(r.side).contains(&r.principal) {
        return Err(ProverError::NotApplicable(format!(
            "principal {} not on side {} of component {}",
            r.principal,
            r.side.tag(),
            r.component
        )));
    }
    match (&r.name, &r.principal) {
        (RuleName::TopAxiom, _) | (RuleName::Id, _) => Ok(vec![]),
        (RuleName::Or, Formula::Or(a, b)) => {
            let mut p = s.clone();
            let side = p.component_mut(r.component)?.side_mut(r.side);
            side.insert((**a).clone());
            side.insert((**b).clone());
            finish(vec![p])
        }
        (RuleName::And, Formula::And(a, b)) => {
            let mut p1 = s.clone();
            p1.component_mut(r.component)?
                .side_mut(r.side)
                .insert((**a).clone());
            let mut p2 = s.clone();
            p2.component_mut(r.component)?
                .side_mut(r.side)
                .insert((**b).clone());
            finish(vec![p1, p2])
        }
        (name, Formula::Dia(a, body)) if name.is_dia() => {
            let agent = r.agent.as_ref().filter(|ra| *ra == a).ok_or_else(|| {
                ProverError::NotApplicable("diamond rule agent mismatch".into())
            })?;
            let target = r
                .target
                .ok_or_else(|| ProverError::NotApplicable("diamond rule needs a target".into()))?;
            let cluster = s.cluster(r.component, agent)?;
            if !cluster.contains(&target) {
                return Err(ProverError::NotApplicable(
                    "diamond target outside the cluster".into(),
                ));
            }
            let parent = s.cluster_parent(r.component, agent)?;
            let expected = if target == r.component {
                RuleName::DiaT
            } else if parent == Some(target) {
                RuleName::DiaDown
            } else if parent == Some(r.component) {
                RuleName::DiaUp
            } else {
                RuleName::DiaIn
            };
            if *name != expected {
                return Err(ProverError::NotApplicable(format!(
                    "diamond variant {} does not match target position ({})",
                    name.as_str(),
                    expected.as_str()
                )));
            }
            let mut p = s.clone();
            p.component_mut(target)?
                .side_mut(r.side)
                .insert((**body).clone());
            finish(vec![p])
        }
        (name, Formula::Box(a, body)) if name.is_box() => {
            let agent = r.agent.as_ref().filter(|ra| *ra == a).ok_or_else(|| {
                ProverError::NotApplicable("box rule agent mismatch".into())
            })?;
            let target = r
                .target
                .ok_or_else(|| ProverError::NotApplicable("box rule needs a fresh label".into()))?;
            if s.labels().contains(&target) {
                return Err(ProverError::NotApplicable(format!(
                    "box rule target {target} is not fresh"
                )));
            }
            let mut fresh = Component::new(target);
            fresh.side_mut(r.side).insert((**body).clone());
            let in_a_bracket = matches!(
                s.parent_of(r.component)?,
                Some((_, ref pa)) if pa == agent
            );
            let mut p = s.clone();
            match name {
                RuleName::BoxIn => {
                    let Some((parent, _)) = s.parent_of(r.component)? else {
                        return Err(ProverError::NotApplicable(
                            "box_in needs the principal inside a bracket".into(),
                        ));
                    };
                    if !in_a_bracket {
                        return Err(ProverError::NotApplicable(
                            "box_in bracket agent mismatch".into(),
                        ));
                    }
                    p.component_mut(parent)?
                        .brackets
                        .get_mut(agent)
                        .expect("parent bracket")
                        .push(fresh);
                }
                RuleName::BoxUp => {
                    if in_a_bracket || !c.brackets.contains_key(agent) {
                        return Err(ProverError::NotApplicable(
                            "box_up needs an existing child bracket".into(),
                        ));
                    }
                    p.component_mut(r.component)?
                        .brackets
                        .get_mut(agent)
                        .expect("own bracket")
                        .push(fresh);
                }
                RuleName::BoxFresh => {
                    if in_a_bracket || c.brackets.contains_key(agent) {
                        return Err(ProverError::NotApplicable(
                            "box_fresh applies only to a trivial cluster".into(),
                        ));
                    }
                    p.component_mut(r.component)?
                        .brackets
                        .insert(agent.clone(), vec![fresh]);
                }
                _ => unreachable!(),
            }
            finish(vec![p])
        }
        _ => Err(ProverError::NotApplicable(format!(
            "rule {} does not fit principal {}",
            r.name.as_str(),
            r.principal
        ))),
    }
}

fn finish(premises: Vec<CrossSequent>) -> Result<Vec<CrossSequent>, ProverError> {
    for p in &premises {
        assert!(p.is_proper(), "rule application broke properness: {p}");
    }
    Ok(premises)
}

/// Termination bounds from the endsequent, asserted at every node visited
/// during proof search.
struct Bounds {
    max_cluster: usize,
    max_chain: usize,
    agents: BTreeSet<Agent>,
}

impl Bounds {
    fn of(s: &CrossSequent) -> Self {
        Bounds {
            max_cluster: s.subformulas().len() + 1,
            max_chain: s.depth() + s.modal_depth(),
            agents: s.all_agents(),
        }
    }

    fn check(&self, s: &CrossSequent) {
        assert!(
            s.depth() <= self.max_chain,
            "component chain exceeds depth bound {}",
            self.max_chain
        );
        for c in s.components() {
            assert!(
                c.brackets.keys().all(|a| self.agents.contains(a)),
                "bracket agent outside the problem's agent set"
            );
            for a in c.brackets.keys() {
                let cluster = s.cluster(c.label, a).expect("own label");
                assert!(
                    cluster.len() <= self.max_cluster,
                    "{a}-cluster of {} exceeds size bound {}",
                    c.label,
                    self.max_cluster
                );
            }
        }
    }
}

enum SearchOutcome {
    Closed(ProofTree),
    Open { tree: ProofTree, leaf: CrossSequent },
}

fn search(s: &CrossSequent, alloc: &mut LabelAllocator, bounds: &Bounds) -> SearchOutcome {
    bounds.check(s);
    let Some(rule) = applicable_rule(s, alloc) else {
        let tree = ProofTree {
            sequent: s.clone(),
            step: ProofStep::Saturated,
        };
        return SearchOutcome::Open {
            tree,
            leaf: s.clone(),
        };
    };
    if rule.name.is_axiom() {
        return SearchOutcome::Closed(ProofTree {
            sequent: s.clone(),
            step: ProofStep::Axiom(rule),
        });
    }
    let premises = apply_rule(s, &rule).expect("applicable rule must apply");
    let mut children = Vec::with_capacity(premises.len());
    for p in &premises {
        match search(p, alloc, bounds) {
            SearchOutcome::Closed(t) => children.push(t),
            SearchOutcome::Open { tree, leaf } => {
                children.push(tree);
                return SearchOutcome::Open {
                    tree: ProofTree {
                        sequent: s.clone(),
                        step: ProofStep::Rule(rule, children),
                    },
                    leaf,
                };
            }
        }
    }
    SearchOutcome::Closed(ProofTree {
        sequent: s.clone(),
        step: ProofStep::Rule(rule, children),
    })
}

/// Decides a proper split cross-sequent. Returns a closed proof tree, or the
/// first saturated leaf in search order together with its extracted
/// countermodel and the identity interpretation restricted to the root
/// sequent's labels.
pub fn prove(s: &CrossSequent) -> ProofResult {
    let violations = s.validate();
    assert!(violations.is_empty(), "malformed goal: {violations:?}");
    let mut alloc = LabelAllocator::after(s);
    let bounds = Bounds::of(s);
    match search(s, &mut alloc, &bounds) {
        SearchOutcome::Closed(tree) => ProofResult::Proved(tree),
        SearchOutcome::Open { tree, leaf } => {
            let (model, _) = extract_countermodel(&leaf).expect("open leaf is saturated");
            let interp: Interpretation = s
                .labels()
                .into_iter()
                .map(|l| (l, l.0 as WorldId))
                .collect();
            ProofResult::Refuted {
                tree,
                leaf,
                model,
                interp,
            }
        }
    }
}

/// Validity query for a formula: proves the single-component sequent
/// `;^0 f`. A refutation's model falsifies `f` at the world assigned to the
/// root label.
pub fn prove_formula(f: &Formula) -> ProofResult {
    prove(&CrossSequent::goal(f.clone()))
}

/// Builds the countermodel of a saturated leaf: worlds are the component
/// labels, each agent's blocks are its clusters, and an atom is true exactly
/// at the components it does not occur in positively. The leaf is falsified
/// under the identity interpretation.
pub fn extract_countermodel(
    leaf: &CrossSequent,
) -> Result<(KripkeModel, Interpretation), ProverError> {
    if !is_saturated(leaf) {
        return Err(ProverError::NotSaturated);
    }
    let labels = leaf.labels();
    let worlds: Vec<WorldId> = labels.iter().map(|l| l.0 as WorldId).collect();
    let mut relations = BTreeMap::new();
    for a in leaf.all_agents() {
        let mut blocks: BTreeSet<BTreeSet<Label>> = BTreeSet::new();
        for &l in &labels {
            blocks.insert(leaf.cluster(l, &a).expect("own label"));
        }
        relations.insert(
            a,
            blocks
                .into_iter()
                .map(|b| b.into_iter().map(|l| l.0 as WorldId).collect())
                .collect(),
        );
    }
    let mut valuation = BTreeMap::new();
    for atom in leaf.all_atoms() {
        let pos = Formula::Lit {
            atom: atom.clone(),
            positive: true,
        };
        let mut ws = BTreeSet::new();
        for &l in &labels {
            if !leaf.component(l).expect("own label").contains(&pos) {
                ws.insert(l.0 as WorldId);
            }
        }
        valuation.insert(atom, ws);
    }
    let model = KripkeModel {
        worlds,
        relations,
        valuation,
    };
    let interp: Interpretation = labels.into_iter().map(|l| (l, l.0 as WorldId)).collect();
    Ok((model, interp))
}

/// Replays every rule instance of a proof tree against its schema and checks
/// the label coherency conditions. Returns the list of violations.
pub fn check_proof(t: &ProofTree) -> Vec<String> {
    let mut violations = Vec::new();
    let root_labels = t.sequent.labels();
    let mut created: BTreeSet<Label> = BTreeSet::new();

    fn walk(
        t: &ProofTree,
        violations: &mut Vec<String>,
        created: &mut BTreeSet<Label>,
        root_labels: &BTreeSet<Label>,
    ) {
        for v in t.sequent.validate() {
            violations.push(format!("node `{}`: {v}", t.sequent));
        }
        match &t.step {
            ProofStep::Saturated => {
                if !is_saturated(&t.sequent) {
                    violations.push(format!("leaf `{}` marked saturated but is not", t.sequent));
                }
            }
            ProofStep::Axiom(r) => {
                if !r.name.is_axiom() {
                    violations.push(format!("non-axiom rule {} at a leaf", r.name.as_str()));
                    return;
                }
                if let Err(e) = check_axiom(&t.sequent, r) {
                    violations.push(e);
                }
            }
            ProofStep::Rule(r, children) => {
                if let Some(target) = r.target.filter(|_| r.name.is_box()) {
                    if root_labels.contains(&target) || !created.insert(target) {
                        violations.push(format!("label {target} reused for a new component"));
                    }
                }
                match apply_rule(&t.sequent, r) {
                    Err(e) => violations.push(format!("node `{}`: {e}", t.sequent)),
                    Ok(premises) => {
                        if premises.len() != children.len() {
                            violations.push(format!(
                                "node `{}`: {} premises but {} children",
                                t.sequent,
                                premises.len(),
                                children.len()
                            ));
                        } else {
                            for (p, c) in premises.iter().zip(children) {
                                if *p != c.sequent {
                                    violations.push(format!(
                                        "premise mismatch: expected `{p}`, got `{}`",
                                        c.sequent
                                    ));
                                }
                            }
                        }
                    }
                }
                for c in children {
                    walk(c, violations, created, root_labels);
                }
            }
        }
    }

    walk(t, &mut violations, &mut created, &root_labels);
    violations
}

fn check_axiom(s: &CrossSequent, r: &RuleInstance) -> Result<(), String> {
    let c = s
        .component(r.component)
        .map_err(|e| format!("axiom: {e}"))?;
    let fail = |msg: &str| Err(format!("axiom shape violation at {}: {msg}", r.component));
    match (r.name, r.shape) {
        (RuleName::TopAxiom, Some(AxiomShape::LTop)) => {
            if c.left.contains(&Formula::Top) {
                Ok(())
            } else {
                fail("no `true` on the left")
            }
        }
        (RuleName::TopAxiom, Some(AxiomShape::RTop)) => {
            if c.right.contains(&Formula::Top) {
                Ok(())
            } else {
                fail("no `true` on the right")
            }
        }
        (RuleName::Id, Some(shape)) => {
            let Formula::Lit { atom, positive: true } = &r.principal else {
                return fail("id principal must be a positive literal");
            };
            let pos = r.principal.clone();
            let neg = Formula::Lit {
                atom: atom.clone(),
                positive: false,
            };
            let ok = match shape {
                AxiomShape::Ll => c.left.contains(&pos) && c.left.contains(&neg),
                AxiomShape::Lr => c.left.contains(&pos) && c.right.contains(&neg),
                AxiomShape::Rl => c.left.contains(&neg) && c.right.contains(&pos),
                AxiomShape::Rr => c.right.contains(&pos) && c.right.contains(&neg),
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                fail("clashing literals not on the recorded sides")
            }
        }
        _ => fail("axiom without a shape"),
    }
}

/// Checks the growth and saturation-persistence invariants along every
/// branch: no formula is ever removed from a component, and a saturated
/// occurrence stays saturated except for the two cases where the calculus
/// genuinely re-opens it — a literal clash appearing at an axiom-closed
/// leaf, and a diamond whose cluster was just extended by a box rule for
/// the same agent.
pub fn check_monotonicity(t: &ProofTree) -> Vec<String> {
    let mut violations = Vec::new();
    fn walk(t: &ProofTree, violations: &mut Vec<String>) {
        let ProofStep::Rule(rule, children) = &t.step else {
            return;
        };
        for child in children {
            for parent_comp in t.sequent.components() {
                let l = parent_comp.label;
                let Ok(child_comp) = child.sequent.component(l) else {
                    violations.push(format!("component {l} vanished"));
                    continue;
                };
                if !parent_comp.left.is_subset(&child_comp.left)
                    || !parent_comp.right.is_subset(&child_comp.right)
                {
                    violations.push(format!("formulas removed from component {l}"));
                }
                for f in parent_comp.formulas() {
                    let was = is_saturated_occurrence(&t.sequent, l, &f).expect("occurs");
                    if !was {
                        continue;
                    }
                    let still = is_saturated_occurrence(&child.sequent, l, &f).expect("occurs");
                    if still {
                        continue;
                    }
                    let exempt = match &f {
                        Formula::Lit { .. } => matches!(child.step, ProofStep::Axiom(_)),
                        Formula::Dia(a, _) => {
                            rule.name.is_box()
                                && rule.agent.as_ref() == Some(a)
                                && rule.target.is_some_and(|new| {
                                    child
                                        .sequent
                                        .cluster(l, a)
                                        .map(|cl| cl.contains(&new))
                                        .unwrap_or(false)
                                })
                        }
                        _ => false,
                    };
                    if !exempt {
                        violations.push(format!(
                            "occurrence {f} in component {l} lost saturation"
                        ));
                    }
                }
            }
            walk(child, violations);
        }
    }
    walk(t, &mut violations);
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_cross_sequent, find_countermodel_bruteforce};
    use crate::syntax::{negate, parse_nnf};

    fn nnf(text: &str) -> Formula {
        parse_nnf(text).unwrap()
    }

    #[test]
    fn saturation_examples() {
        let s = CrossSequent::split_goal(vec![], vec![nnf("p"), nnf("~p")]);
        assert!(!is_saturated_occurrence(&s, Label(0), &nnf("p")).unwrap());

        // trivial cluster with the body present: diamond saturated
        let s = CrossSequent::split_goal(vec![], vec![nnf("<a>q"), nnf("q")]);
        assert!(is_saturated_occurrence(&s, Label(0), &nnf("<a>q")).unwrap());

        // box saturated via an a-child
        let mut root = Component::new(Label(0));
        root.right.insert(nnf("[a]q"));
        let mut child = Component::new(Label(1));
        child.right.insert(nnf("q"));
        root.brackets.insert(Agent::new("a"), vec![child]);
        let s = CrossSequent { root };
        assert!(is_saturated_occurrence(&s, Label(0), &nnf("[a]q")).unwrap());

        assert!(matches!(
            is_saturated_occurrence(&s, Label(0), &nnf("r")),
            Err(ProverError::OccurrenceNotFound(_))
        ));
    }

    #[test]
    fn applicable_rule_priorities() {
        let s = CrossSequent::split_goal(vec![], vec![Formula::Top, nnf("p")]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        assert_eq!(r.name, RuleName::TopAxiom);
        assert_eq!(r.shape, Some(AxiomShape::RTop));

        let s = CrossSequent::split_goal(vec![nnf("[a]p")], vec![]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        assert_eq!(r.name, RuleName::BoxFresh);
        assert_eq!(r.side, Side::Left);
        assert_eq!(r.target, Some(Label(1)));

        // saturated sequent: one literal, nothing to do
        let s = CrossSequent::split_goal(vec![], vec![nnf("p")]);
        let mut alloc = LabelAllocator::after(&s);
        assert!(applicable_rule(&s, &mut alloc).is_none());
    }

    #[test]
    fn apply_rule_examples() {
        // R-or adds both disjuncts on the right
        let s = CrossSequent::split_goal(vec![], vec![nnf("p | q")]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        assert_eq!(r.name, RuleName::Or);
        let premises = apply_rule(&s, &r).unwrap();
        assert_eq!(premises.len(), 1);
        let c = premises[0].component(Label(0)).unwrap();
        assert!(c.right.contains(&nnf("p")) && c.right.contains(&nnf("q")));
        assert!(c.right.contains(&nnf("p | q")));

        // L box_fresh creates the first a-child on the left
        let s = CrossSequent::split_goal(vec![nnf("[a]p")], vec![]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        let premises = apply_rule(&s, &r).unwrap();
        let child = premises[0].component(Label(1)).unwrap();
        assert!(child.left.contains(&nnf("p")));
        assert!(child.right.is_empty());

        // R dia_t adds the body to the principal's own component
        let s = CrossSequent::split_goal(vec![], vec![nnf("<a>p"), nnf("q")]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        assert_eq!(r.name, RuleName::DiaT);
        let premises = apply_rule(&s, &r).unwrap();
        assert!(premises[0].component(Label(0)).unwrap().right.contains(&nnf("p")));

        // and has exactly two premises
        let s = CrossSequent::split_goal(vec![], vec![nnf("p & q")]);
        let mut alloc = LabelAllocator::after(&s);
        let r = applicable_rule(&s, &mut alloc).unwrap();
        assert_eq!(apply_rule(&s, &r).unwrap().len(), 2);
    }

    #[test]
    fn proves_example_derivation_exactly() {
        // ;^0 [a]p, <a>~p closes in three steps
        let s = CrossSequent::split_goal(vec![], vec![nnf("[a]p"), nnf("<a>~p")]);
        let ProofResult::Proved(tree) = prove(&s) else {
            panic!("expected a proof");
        };
        let names: Vec<&str> = tree
            .rule_instances()
            .iter()
            .map(|r| r.name.as_str())
            .collect();
        assert_eq!(names, vec!["box_fresh", "dia_up", "id"]);
        assert!(check_proof(&tree).is_empty());
    }

    #[test]
    fn proves_axioms() {
        for text in [
            "[a]p -> p",
            "<a>p -> [a]<a>p",
            "[a]p -> [a][a]p",
            "[a](p -> q) -> ([a]p -> [a]q)",
            "~p | p",
        ] {
            assert!(prove_formula(&nnf(text)).is_proved(), "{text} should be valid");
        }
    }

    #[test]
    fn refutes_with_verified_countermodels() {
        let f = nnf("~p | [a]p");
        let ProofResult::Refuted { model, interp, leaf, .. } = prove_formula(&f) else {
            panic!("expected a refutation");
        };
        assert!(model.verify().is_empty());
        assert_eq!(model.worlds.len(), 2);
        assert!(!model.eval(interp[&Label(0)], &f).unwrap());
        // the leaf itself is falsified under the identity interpretation
        let (m2, full) = extract_countermodel(&leaf).unwrap();
        assert!(!eval_cross_sequent(&m2, &full, &leaf).unwrap());

        let f = nnf("(<a>~p | [b]p) & p");
        // box_a p -> box_b p in NNF
        let g = Formula::or(nnf("<a>~p"), nnf("[b]p"));
        let ProofResult::Refuted { model, interp, .. } = prove_formula(&g) else {
            panic!("expected a refutation");
        };
        assert!(!model.eval(interp[&Label(0)], &g).unwrap());
        drop(f);
    }

    #[test]
    fn extract_countermodel_examples() {
        let leaf = CrossSequent::split_goal(vec![nnf("p")], vec![]);
        let (m, i) = extract_countermodel(&leaf).unwrap();
        assert_eq!(m.worlds, vec![0]);
        assert!(m.valuation[&crate::syntax::Atom::new("p")].is_empty());
        assert!(!eval_cross_sequent(&m, &i, &leaf).unwrap());

        let leaf = CrossSequent::split_goal(vec![nnf("~p")], vec![]);
        let (m, _) = extract_countermodel(&leaf).unwrap();
        assert_eq!(m.valuation[&crate::syntax::Atom::new("p")], [0].into());

        let unsaturated = CrossSequent::split_goal(vec![], vec![nnf("p | q")]);
        assert!(matches!(
            extract_countermodel(&unsaturated),
            Err(ProverError::NotSaturated)
        ));
    }

    #[test]
    fn soundness_spot_check() {
        for text in ["[a]p -> p", "<a>p -> [a]<a>p", "p -> <a>p"] {
            let f = nnf(text);
            if prove_formula(&f).is_proved() {
                assert_eq!(find_countermodel_bruteforce(&f, 3).unwrap(), None, "{text}");
            }
        }
    }

    #[test]
    fn check_proof_catches_tampering() {
        let s = CrossSequent::split_goal(vec![], vec![nnf("p | ~p")]);
        let ProofResult::Proved(mut tree) = prove(&s) else {
            panic!("expected a proof");
        };
        assert!(check_proof(&tree).is_empty());

        // remove the active formulas from the premise
        if let ProofStep::Rule(_, children) = &mut tree.step {
            children[0]
                .sequent
                .component_mut(Label(0))
                .unwrap()
                .right
                .remove(&nnf("p"));
        }
        assert!(!check_proof(&tree).is_empty());
    }

    #[test]
    fn monotonicity_and_weakening() {
        for text in ["[a]p -> p", "[a](p & q) -> [a]q", "<b><a>p | [a][b]~p"] {
            let f = nnf(text);
            let result = prove_formula(&f);
            let tree = match &result {
                ProofResult::Proved(t) => t,
                ProofResult::Refuted { tree, .. } => tree,
            };
            assert!(check_monotonicity(tree).is_empty(), "{text}");

            // admissible weakening: adding a formula preserves provability
            if result.is_proved() {
                for g in [nnf("r"), nnf("[b]r"), negate(&f)] {
                    let weakened =
                        CrossSequent::split_goal(vec![], vec![f.clone(), g]);
                    assert!(prove(&weakened).is_proved(), "{text} weakened");
                }
            }
        }
    }
}
