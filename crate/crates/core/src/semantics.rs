//! Kripke models for multi-agent S5, truth evaluation, evaluation of
//! cross-sequents and multiformulas under interpretations, and a bounded
//! brute-force countermodel search used as an independent testing oracle.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cross_sequent::{CrossSequent, Label};
use crate::interpolation::Multiformula;
use crate::syntax::{agents, all_vars, Agent, Atom, Formula};

pub type WorldId = u64;

/// Maps cross-sequent labels to worlds.
pub type Interpretation = BTreeMap<Label, WorldId>;

/// Model cap for the enumeration oracle: refuse searches that would visit
/// more models than this.
pub const DEFAULT_MODEL_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown world {0}")]
    UnknownWorld(WorldId),
    #[error("label {0} missing from interpretation")]
    MissingLabel(Label),
    #[error("interpretation violates cluster accessibility for agent {0}")]
    ClusterViolation(Agent),
    #[error("enumeration budget exceeded: {0} models requested")]
    BudgetExceeded(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// An epistemic Kripke model. Each agent's accessibility relation is stored
/// as a partition of the worlds into blocks, so reflexivity, symmetry, and
/// transitivity hold by construction. Agents absent from `relations` get the
/// discrete partition (singleton blocks); atoms absent from `valuation` are
/// false everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    pub worlds: Vec<WorldId>,
    pub relations: BTreeMap<Agent, Vec<Vec<WorldId>>>,
    pub valuation: BTreeMap<Atom, BTreeSet<WorldId>>,
}

impl KripkeModel {
    /// The `a`-block of `w`: every world the agent considers possible at `w`.
    pub fn block(&self, a: &Agent, w: WorldId) -> Vec<WorldId> {
        if let Some(blocks) = self.relations.get(a) {
            for b in blocks {
                if b.contains(&w) {
                    return b.clone();
                }
            }
        }
        vec![w]
    }

    pub fn related(&self, a: &Agent, v: WorldId, w: WorldId) -> bool {
        self.block(a, v).contains(&w)
    }

    /// Confirms the model invariants; returns the list of violations.
    pub fn verify(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.worlds.is_empty() {
            violations.push("empty set of worlds".to_string());
        }
        let world_set: BTreeSet<WorldId> = self.worlds.iter().copied().collect();
        if world_set.len() != self.worlds.len() {
            violations.push("duplicate world ids".to_string());
        }
        for (a, blocks) in &self.relations {
            let mut covered = BTreeSet::new();
            for block in blocks {
                for w in block {
                    if !world_set.contains(w) {
                        violations.push(format!("agent {a}: block mentions unknown world {w}"));
                    }
                    if !covered.insert(*w) {
                        violations.push(format!("agent {a}: blocks overlap at world {w}"));
                    }
                }
            }
            if covered != world_set {
                violations.push(format!("agent {a}: blocks do not cover all worlds"));
            }
        }
        for (p, ws) in &self.valuation {
            for w in ws {
                if !world_set.contains(w) {
                    violations.push(format!("valuation of {p} mentions unknown world {w}"));
                }
            }
        }
        violations
    }

    /// Truth of `f` at world `w`.
    pub fn eval(&self, w: WorldId, f: &Formula) -> Result<bool, SemanticsError> {
        if !self.worlds.contains(&w) {
            return Err(SemanticsError::UnknownWorld(w));
        }
        Ok(self.eval_unchecked(w, f))
    }

    fn eval_unchecked(&self, w: WorldId, f: &Formula) -> bool {
        match f {
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Lit { atom, positive } => {
                let holds = self
                    .valuation
                    .get(atom)
                    .is_some_and(|ws| ws.contains(&w));
                holds == *positive
            }
            Formula::And(l, r) => self.eval_unchecked(w, l) && self.eval_unchecked(w, r),
            Formula::Or(l, r) => self.eval_unchecked(w, l) || self.eval_unchecked(w, r),
            Formula::Box(a, b) => self
                .block(a, w)
                .iter()
                .all(|&v| self.eval_unchecked(v, b)),
            Formula::Dia(a, b) => self
                .block(a, w)
                .iter()
                .any(|&v| self.eval_unchecked(v, b)),
        }
    }
}

/// Checks that `i` covers all labels of `s` and maps every cluster into a
/// single block of the corresponding agent.
pub fn check_interpretation(
    m: &KripkeModel,
    i: &Interpretation,
    s: &CrossSequent,
) -> Result<(), SemanticsError> {
    let labels = s.labels();
    for &l in &labels {
        if !i.contains_key(&l) {
            return Err(SemanticsError::MissingLabel(l));
        }
    }
    for a in s.all_agents() {
        for &l in &labels {
            let cluster = s.cluster(l, &a).expect("label from own sequent");
            let w = i[&l];
            for &m2 in &cluster {
                if !m.related(&a, w, i[&m2]) {
                    return Err(SemanticsError::ClusterViolation(a));
                }
            }
        }
    }
    Ok(())
}

/// Truth of a cross-sequent under an interpretation: some formula of some
/// component is true at that component's assigned world.
pub fn eval_cross_sequent(
    m: &KripkeModel,
    i: &Interpretation,
    s: &CrossSequent,
) -> Result<bool, SemanticsError> {
    check_interpretation(m, i, s)?;
    let mut found = false;
    let mut err = None;
    s.for_each(&mut |c| {
        if found || err.is_some() {
            return;
        }
        let w = i[&c.label];
        for f in c.left.iter().chain(c.right.iter()) {
            match m.eval(w, f) {
                Ok(true) => {
                    found = true;
                    return;
                }
                Ok(false) => {}
                Err(e) => {
                    err = Some(e);
                    return;
                }
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// Truth of a multiformula: a labeled atom evaluates its body at the
/// assigned world; structural conjunction and disjunction are evaluated
/// accordingly.
pub fn eval_multiformula(
    m: &KripkeModel,
    i: &Interpretation,
    u: &Multiformula,
) -> Result<bool, SemanticsError> {
    match u {
        Multiformula::Lab(l, f) => {
            let w = i.get(l).ok_or(SemanticsError::MissingLabel(*l))?;
            m.eval(*w, f)
        }
        Multiformula::Conj(l, r) => {
            Ok(eval_multiformula(m, i, l)? && eval_multiformula(m, i, r)?)
        }
        Multiformula::Disj(l, r) => {
            Ok(eval_multiformula(m, i, l)? || eval_multiformula(m, i, r)?)
        }
    }
}

/// All set partitions of `0..n` in deterministic (restricted-growth) order.
fn set_partitions(n: usize) -> Vec<Vec<Vec<WorldId>>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn rec(i: usize, max_used: usize, assignment: &mut Vec<usize>, out: &mut Vec<Vec<Vec<WorldId>>>) {
        let n = assignment.len();
        if i == n {
            let blocks = max_used + 1;
            let mut partition: Vec<Vec<WorldId>> = vec![Vec::new(); blocks];
            for (w, &b) in assignment.iter().enumerate() {
                partition[b].push(w as WorldId);
            }
            out.push(partition);
            return;
        }
        for b in 0..=max_used + 1 {
            assignment[i] = b;
            rec(i + 1, max_used.max(b), assignment, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    // world 0 always starts block 0
    rec(1, 0, &mut assignment, &mut out);
    out
}

fn count_models(num_atoms: usize, num_agents: usize, max_worlds: usize) -> usize {
    // Bell numbers for partitions per agent.
    let bell = [1usize, 1, 2, 5, 15, 52, 203, 877];
    let mut total = 0usize;
    for k in 1..=max_worlds {
        let parts = bell.get(k).copied().unwrap_or(usize::MAX / 4);
        let per_agent = parts.checked_pow(num_agents as u32).unwrap_or(usize::MAX / 4);
        let vals = 1usize
            .checked_shl((k * num_atoms) as u32)
            .unwrap_or(usize::MAX / 4);
        total = total.saturating_add(per_agent.saturating_mul(vals));
    }
    total
}

/// Enumerates every model with `1..=max_worlds` worlds over exactly the
/// given atoms and agents, in a fixed deterministic order, invoking `f` on
/// each. `f` returning `true` stops the enumeration early.
pub fn for_each_model(
    atoms: &BTreeSet<Atom>,
    agent_set: &BTreeSet<Agent>,
    max_worlds: usize,
    budget: usize,
    f: &mut dyn FnMut(&KripkeModel) -> bool,
) -> Result<(), SemanticsError> {
    let n_models = count_models(atoms.len(), agent_set.len(), max_worlds);
    if n_models > budget {
        return Err(SemanticsError::BudgetExceeded(n_models));
    }
    for k in 1..=max_worlds {
        let worlds: Vec<WorldId> = (0..k as WorldId).collect();
        let partitions = set_partitions(k);
        // agent relation choices: one partition index per agent
        let agent_vec: Vec<&Agent> = agent_set.iter().collect();
        let atom_vec: Vec<&Atom> = atoms.iter().collect();
        let n_choices = partitions.len().pow(agent_vec.len() as u32);
        let n_vals: u64 = 1u64 << (k * atom_vec.len());
        for choice in 0..n_choices {
            let mut relations = BTreeMap::new();
            let mut rest = choice;
            for a in &agent_vec {
                relations.insert((*a).clone(), partitions[rest % partitions.len()].clone());
                rest /= partitions.len();
            }
            for val_bits in 0..n_vals {
                let mut valuation = BTreeMap::new();
                for (ai, atom) in atom_vec.iter().enumerate() {
                    let mut ws = BTreeSet::new();
                    for w in 0..k {
                        if val_bits >> (ai * k + w) & 1 == 1 {
                            ws.insert(w as WorldId);
                        }
                    }
                    valuation.insert((*atom).clone(), ws);
                }
                let model = KripkeModel {
                    worlds: worlds.clone(),
                    relations: relations.clone(),
                    valuation,
                };
                if f(&model) {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// Bounded brute-force countermodel search: the first model (in enumeration
/// order) with at most `max_worlds` worlds over exactly the atoms and agents
/// of `f` that falsifies `f` at some world, together with that world.
pub fn find_countermodel_bruteforce(
    f: &Formula,
    max_worlds: usize,
) -> Result<Option<(KripkeModel, WorldId)>, SemanticsError> {
    find_countermodel_bruteforce_budgeted(f, max_worlds, DEFAULT_MODEL_BUDGET)
}

pub fn find_countermodel_bruteforce_budgeted(
    f: &Formula,
    max_worlds: usize,
    budget: usize,
) -> Result<Option<(KripkeModel, WorldId)>, SemanticsError> {
    let atoms = all_vars(f);
    let agent_set = agents(f);
    let mut found = None;
    for_each_model(&atoms, &agent_set, max_worlds, budget, &mut |m| {
        for &w in &m.worlds {
            if !m.eval_unchecked(w, f) {
                found = Some((m.clone(), w));
                return true;
            }
        }
        false
    })?;
    Ok(found)
}

/// All interpretations of the labels of `s` into `m` that respect the
/// cluster-accessibility invariant, in deterministic order.
pub fn enumerate_interpretations(m: &KripkeModel, s: &CrossSequent) -> Vec<Interpretation> {
    let labels: Vec<Label> = s.labels().into_iter().collect();
    let mut out = Vec::new();
    let mut current: Interpretation = BTreeMap::new();
    fn rec(
        m: &KripkeModel,
        s: &CrossSequent,
        labels: &[Label],
        idx: usize,
        current: &mut Interpretation,
        out: &mut Vec<Interpretation>,
    ) {
        if idx == labels.len() {
            if check_interpretation(m, current, s).is_ok() {
                out.push(current.clone());
            }
            return;
        }
        for &w in &m.worlds {
            current.insert(labels[idx], w);
            rec(m, s, labels, idx + 1, current, out);
        }
        current.remove(&labels[idx]);
    }
    rec(m, s, &labels, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_sequent::Component;
    use crate::syntax::{negate, simplify_constants};

    fn agent(n: &str) -> Agent {
        Agent::new(n)
    }

    fn single_world_model(p_true: bool) -> KripkeModel {
        let mut valuation = BTreeMap::new();
        let mut ws = BTreeSet::new();
        if p_true {
            ws.insert(0);
        }
        valuation.insert(Atom::new("p"), ws);
        KripkeModel {
            worlds: vec![0],
            relations: BTreeMap::new(),
            valuation,
        }
    }

    fn two_world_one_block(p_worlds: &[WorldId]) -> KripkeModel {
        KripkeModel {
            worlds: vec![0, 1],
            relations: [(agent("a"), vec![vec![0, 1]])].into(),
            valuation: [(Atom::new("p"), p_worlds.iter().copied().collect())].into(),
        }
    }

    #[test]
    fn eval_examples() {
        let m = single_world_model(true);
        assert!(m.eval(0, &Formula::boxed("a", Formula::atom("p"))).unwrap());
        assert!(!m.eval(0, &Formula::Bottom).unwrap());
        assert!(m.eval(7, &Formula::Top).is_err());

        let m = two_world_one_block(&[0]);
        assert!(m.eval(1, &Formula::dia("a", Formula::atom("p"))).unwrap());
        assert!(!m.eval(1, &Formula::boxed("a", Formula::atom("p"))).unwrap());
    }

    #[test]
    fn eval_cross_sequent_examples() {
        let m = single_world_model(true);
        let i: Interpretation = [(Label(0), 0)].into();

        let empty = CrossSequent::split_goal(vec![], vec![]);
        assert!(!eval_cross_sequent(&m, &i, &empty).unwrap());

        let top = CrossSequent::goal(Formula::Top);
        assert!(eval_cross_sequent(&m, &i, &top).unwrap());

        // root {p} with an a-child {~p}, both labels at the only world
        let mut root = Component::new(Label(0));
        root.right.insert(Formula::atom("p"));
        let mut child = Component::new(Label(1));
        child.right.insert(Formula::natom("p"));
        root.brackets.insert(agent("a"), vec![child]);
        let s = CrossSequent { root };
        let i2: Interpretation = [(Label(0), 0), (Label(1), 0)].into();
        assert!(eval_cross_sequent(&m, &i2, &s).unwrap());

        // missing label
        assert!(matches!(
            eval_cross_sequent(&m, &i, &s),
            Err(SemanticsError::MissingLabel(_))
        ));

        // cluster violation: labels 0 and 1 are a-connected but mapped to
        // worlds in different a-blocks
        let m2 = KripkeModel {
            worlds: vec![0, 1],
            relations: [(agent("a"), vec![vec![0], vec![1]])].into(),
            valuation: BTreeMap::new(),
        };
        let i3: Interpretation = [(Label(0), 0), (Label(1), 1)].into();
        assert!(matches!(
            eval_cross_sequent(&m2, &i3, &s),
            Err(SemanticsError::ClusterViolation(_))
        ));
    }

    #[test]
    fn eval_multiformula_examples() {
        let m = single_world_model(false);
        let i: Interpretation = [(Label(0), 0), (Label(1), 0)].into();
        let p = Formula::atom("p");

        let u = Multiformula::disj(
            Multiformula::lab(Label(0), p.clone()),
            Multiformula::lab(Label(0), negate(&p)),
        );
        assert!(eval_multiformula(&m, &i, &u).unwrap());

        let u = Multiformula::lab(Label(0), Formula::Bottom);
        assert!(!eval_multiformula(&m, &i, &u).unwrap());

        let m2 = two_world_one_block(&[0]);
        let i2: Interpretation = [(Label(0), 0), (Label(1), 1)].into();
        let u = Multiformula::conj(
            Multiformula::lab(Label(0), p.clone()),
            Multiformula::lab(Label(1), p.clone()),
        );
        assert!(!eval_multiformula(&m2, &i2, &u).unwrap());

        let u = Multiformula::lab(Label(9), p);
        assert!(eval_multiformula(&m, &i, &u).is_err());
    }

    #[test]
    fn verify_model_examples() {
        let ok = KripkeModel {
            worlds: vec![1, 2],
            relations: [(agent("a"), vec![vec![1], vec![2]])].into(),
            valuation: BTreeMap::new(),
        };
        assert!(ok.verify().is_empty());

        let overlap = KripkeModel {
            worlds: vec![1, 2],
            relations: [(agent("a"), vec![vec![1, 2], vec![2]])].into(),
            valuation: BTreeMap::new(),
        };
        assert!(overlap.verify().iter().any(|v| v.contains("overlap")));

        let bad_val = KripkeModel {
            worlds: vec![1, 2],
            relations: BTreeMap::new(),
            valuation: [(Atom::new("p"), [3].into())].into(),
        };
        assert!(!bad_val.verify().is_empty());
    }

    #[test]
    fn bruteforce_examples() {
        let p = Formula::atom("p");
        let taut = Formula::or(p.clone(), Formula::natom("p"));
        assert_eq!(find_countermodel_bruteforce(&taut, 3).unwrap(), None);

        // box_a p -> box_b p fails on two worlds sharing a b-block only
        let f = Formula::implies(
            Formula::boxed("a", p.clone()),
            Formula::boxed("b", p.clone()),
        );
        let (m, w) = find_countermodel_bruteforce(&f, 2).unwrap().unwrap();
        assert!(m.verify().is_empty());
        assert!(!m.eval(w, &f).unwrap());
        assert_eq!(m.worlds.len(), 2);

        // p -> box_a p fails on two worlds in one a-block
        let f = Formula::implies(p.clone(), Formula::boxed("a", p.clone()));
        let (m, w) = find_countermodel_bruteforce(&f, 2).unwrap().unwrap();
        assert!(!m.eval(w, &f).unwrap());
        assert!(m.valuation[&Atom::new("p")].contains(&w));
    }

    #[test]
    fn bruteforce_budget_is_enforced() {
        let f = Formula::atom("p");
        assert!(matches!(
            find_countermodel_bruteforce_budgeted(&f, 3, 1),
            Err(SemanticsError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn model_json_round_trip() {
        let m = two_world_one_block(&[0]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"worlds":[0,1],"relations":{"a":[[0,1]]},"valuation":{"p":[0]}}"#
        );
        let back: KripkeModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn negation_is_semantic_on_enumerated_models() {
        let f = Formula::and(
            Formula::boxed("a", Formula::atom("p")),
            Formula::or(Formula::natom("q"), Formula::dia("b", Formula::atom("q"))),
        );
        let neg = negate(&f);
        for_each_model(
            &all_vars(&f),
            &agents(&f),
            2,
            DEFAULT_MODEL_BUDGET,
            &mut |m| {
                for &w in &m.worlds {
                    assert_ne!(m.eval(w, &f).unwrap(), m.eval(w, &neg).unwrap());
                }
                false
            },
        )
        .unwrap();
    }

    #[test]
    fn simplify_constants_is_equivalence() {
        // representative formulas with constants in awkward positions
        let cases = [
            Formula::boxed("a", Formula::or(Formula::atom("p"), Formula::Top)),
            Formula::dia("a", Formula::and(Formula::atom("p"), Formula::Bottom)),
            Formula::and(
                Formula::or(Formula::atom("p"), Formula::Bottom),
                Formula::boxed("a", Formula::Top),
            ),
            Formula::or(
                Formula::dia("a", Formula::dia("a", Formula::Bottom)),
                Formula::natom("p"),
            ),
        ];
        for f in &cases {
            let s = simplify_constants(f);
            for_each_model(&all_vars(f), &agents(f), 3, DEFAULT_MODEL_BUDGET, &mut |m| {
                for &w in &m.worlds {
                    assert_eq!(
                        m.eval(w, f).unwrap(),
                        m.eval(w, &s).unwrap(),
                        "simplification changed meaning of {f}"
                    );
                }
                false
            })
            .unwrap();
        }
    }

    #[test]
    fn multiformula_merge_laws() {
        // l:f1 (+) l:f2 is equivalent to l:(f1 op f2) on enumerated models
        let f1 = Formula::atom("p");
        let f2 = Formula::boxed("a", Formula::atom("q"));
        let s = CrossSequent::goal(Formula::and(f1.clone(), f2.clone()));
        let atoms = s.all_atoms();
        let ags = s.all_agents();
        for_each_model(&atoms, &ags, 2, DEFAULT_MODEL_BUDGET, &mut |m| {
            for i in enumerate_interpretations(m, &s) {
                let merged_or = Multiformula::lab(Label(0), Formula::or(f1.clone(), f2.clone()));
                let split_or = Multiformula::disj(
                    Multiformula::lab(Label(0), f1.clone()),
                    Multiformula::lab(Label(0), f2.clone()),
                );
                assert_eq!(
                    eval_multiformula(m, &i, &merged_or).unwrap(),
                    eval_multiformula(m, &i, &split_or).unwrap()
                );
                let merged_and = Multiformula::lab(Label(0), Formula::and(f1.clone(), f2.clone()));
                let split_and = Multiformula::conj(
                    Multiformula::lab(Label(0), f1.clone()),
                    Multiformula::lab(Label(0), f2.clone()),
                );
                assert_eq!(
                    eval_multiformula(m, &i, &merged_and).unwrap(),
                    eval_multiformula(m, &i, &split_and).unwrap()
                );
            }
            false
        })
        .unwrap();
    }
}
