//! Multiformulas and interpolant synthesis from split proofs.
//!
//! A closed proof of the split endsequent `{~phi ;^0 psi}` is folded
//! bottom-up into a multiformula interpolant: axioms contribute labeled
//! units, conjunctive/disjunctive steps combine structurally, and modal
//! steps pass through a box/diamond normal form that eliminates the fresh
//! label. The repair pass then collapses literal-free modal bodies to
//! constants, which keeps the final interpolant inside the common agent
//! vocabulary of the two input formulas.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

use crate::cross_sequent::{CrossSequent, Label, Side};
use crate::prover::{
    prove, prove_formula, AxiomShape, ProofResult, ProofStep, ProofTree, RuleInstance, RuleName,
};
use crate::semantics::{
    enumerate_interpretations, eval_cross_sequent, eval_multiformula, for_each_model,
    KripkeModel, SemanticsError, WorldId, DEFAULT_MODEL_BUDGET,
};
use crate::syntax::{agents, negate, simplify_constants, vars, Agent, Atom, Formula, Polarity};

/// Labeled formulas combined by structural conjunction and disjunction;
/// the carrier of interpolants across components of a cross-sequent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multiformula {
    Lab(Label, Formula),
    Conj(Box<Multiformula>, Box<Multiformula>),
    Disj(Box<Multiformula>, Box<Multiformula>),
}

impl Multiformula {
    pub fn lab(l: Label, f: Formula) -> Self {
        Multiformula::Lab(l, f)
    }

    pub fn conj(a: Multiformula, b: Multiformula) -> Self {
        Multiformula::Conj(Box::new(a), Box::new(b))
    }

    pub fn disj(a: Multiformula, b: Multiformula) -> Self {
        Multiformula::Disj(Box::new(a), Box::new(b))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |l, _| {
            out.insert(l);
        });
        out
    }

    pub fn vars(&self, polarity: Polarity) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, f| out.extend(vars(f, polarity)));
        out
    }

    pub fn all_atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.vars(Polarity::Pos);
        out.extend(self.vars(Polarity::Neg));
        out
    }

    pub fn agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, f| out.extend(agents(f)));
        out
    }

    fn visit_atoms(&self, f: &mut impl FnMut(Label, &Formula)) {
        match self {
            Multiformula::Lab(l, body) => f(*l, body),
            Multiformula::Conj(a, b) | Multiformula::Disj(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Rewrites every labeled body.
    fn map_atoms(&self, f: &impl Fn(Label, &Formula) -> (Label, Formula)) -> Multiformula {
        match self {
            Multiformula::Lab(l, body) => {
                let (l2, b2) = f(*l, body);
                Multiformula::Lab(l2, b2)
            }
            Multiformula::Conj(a, b) => Multiformula::conj(a.map_atoms(f), b.map_atoms(f)),
            Multiformula::Disj(a, b) => Multiformula::disj(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Label-forgetting projection to a plain formula. Defined only when
    /// the multiformula mentions a single label.
    pub fn project(&self) -> Result<Formula, InterpolationError> {
        let labels = self.labels();
        if labels.len() != 1 {
            return Err(InterpolationError::MultipleLabels(labels.len()));
        }
        fn go(u: &Multiformula) -> Formula {
            match u {
                Multiformula::Lab(_, f) => f.clone(),
                Multiformula::Conj(a, b) => Formula::and(go(a), go(b)),
                Multiformula::Disj(a, b) => Formula::or(go(a), go(b)),
            }
        }
        Ok(go(self))
    }
}

impl std::fmt::Display for Multiformula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Multiformula::Lab(l, body) => {
                if matches!(body, Formula::And(..) | Formula::Or(..)) {
                    write!(f, "{l}:({body})")
                } else {
                    write!(f, "{l}:{body}")
                }
            }
            Multiformula::Conj(a, b) => write!(f, "({a} && {b})"),
            Multiformula::Disj(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum InterpolationError {
    #[error("proof tree has a saturated leaf; interpolants exist only for closed proofs")]
    NotClosed,
    #[error("axiom instance cannot be classified as a logical rule")]
    AxiomClassified,
    #[error("axiom mismatch: {0}")]
    AxiomMismatch(String),
    #[error("combine arity mismatch: {kind} expects {expected} parts, got {got}")]
    ArityMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("label {0} survived a modal transformation")]
    LabelLeak(Label),
    #[error("projection needs exactly one label, found {0}")]
    MultipleLabels(usize),
    #[error("the implication is not a theorem; a countermodel falsifies it at world {world}")]
    NotValid { model: KripkeModel, world: WorldId },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// How a rule instance threads interpolants from premises to conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleClass {
    Local,
    Conjunctive,
    Disjunctive,
    BoxLike(Label, Label, Agent),
    DiamondLike(Label, Label, Agent),
}

impl RuleClass {
    fn arity(&self) -> usize {
        match self {
            RuleClass::Conjunctive | RuleClass::Disjunctive => 2,
            _ => 1,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            RuleClass::Local => "local",
            RuleClass::Conjunctive => "conjunctive",
            RuleClass::Disjunctive => "disjunctive",
            RuleClass::BoxLike(..) => "box-like",
            RuleClass::DiamondLike(..) => "diamond-like",
        }
    }
}

/// Classifies a non-axiom split rule instance. Disjunction and all diamond
/// rules are local on both sides; conjunction splits by side; box rules are
/// box-like on the right and diamond-like on the left, recording the source
/// component `k`, the fresh component `l`, and the agent.
pub fn classify_rule(r: &RuleInstance) -> Result<RuleClass, InterpolationError> {
    match r.name {
        RuleName::Id | RuleName::TopAxiom => Err(InterpolationError::AxiomClassified),
        RuleName::Or
        | RuleName::DiaIn
        | RuleName::DiaUp
        | RuleName::DiaT
        | RuleName::DiaDown => Ok(RuleClass::Local),
        RuleName::And => Ok(match r.side {
            Side::Right => RuleClass::Conjunctive,
            Side::Left => RuleClass::Disjunctive,
        }),
        RuleName::BoxIn | RuleName::BoxUp | RuleName::BoxFresh => {
            let l = r.target.ok_or_else(|| {
                InterpolationError::AxiomMismatch("box rule without a fresh label".into())
            })?;
            let a = r.agent.clone().ok_or_else(|| {
                InterpolationError::AxiomMismatch("box rule without an agent".into())
            })?;
            Ok(match r.side {
                Side::Right => RuleClass::BoxLike(r.component, l, a),
                Side::Left => RuleClass::DiamondLike(r.component, l, a),
            })
        }
    }
}

/// Interpolant of a leaf closed by an axiom at component `l`: the right
/// shapes contribute `l:true` / `l:false`, the mixed id shapes contribute
/// the clashing literal on its right-hand polarity.
pub fn interpolate_axiom(
    leaf: &CrossSequent,
    r: &RuleInstance,
) -> Result<Multiformula, InterpolationError> {
    let l = r.component;
    let c = leaf
        .component(l)
        .map_err(|e| InterpolationError::AxiomMismatch(e.to_string()))?;
    let check = |ok: bool, msg: &str| {
        if ok {
            Ok(())
        } else {
            Err(InterpolationError::AxiomMismatch(format!("{msg} at {l}")))
        }
    };
    match (r.name, r.shape) {
        (RuleName::TopAxiom, Some(AxiomShape::RTop)) => {
            check(c.right.contains(&Formula::Top), "no true on the right")?;
            Ok(Multiformula::lab(l, Formula::Top))
        }
        (RuleName::TopAxiom, Some(AxiomShape::LTop)) => {
            check(c.left.contains(&Formula::Top), "no true on the left")?;
            Ok(Multiformula::lab(l, Formula::Bottom))
        }
        (RuleName::Id, Some(shape)) => {
            let pos = r.principal.clone();
            check(
                matches!(pos, Formula::Lit { positive: true, .. }),
                "id principal must be a positive literal",
            )?;
            let neg = negate(&pos);
            match shape {
                AxiomShape::Rr => {
                    check(c.right.contains(&pos) && c.right.contains(&neg), "RR-id")?;
                    Ok(Multiformula::lab(l, Formula::Top))
                }
                AxiomShape::Ll => {
                    check(c.left.contains(&pos) && c.left.contains(&neg), "LL-id")?;
                    Ok(Multiformula::lab(l, Formula::Bottom))
                }
                AxiomShape::Rl => {
                    check(c.left.contains(&neg) && c.right.contains(&pos), "RL-id")?;
                    Ok(Multiformula::lab(l, pos))
                }
                AxiomShape::Lr => {
                    check(c.left.contains(&pos) && c.right.contains(&neg), "LR-id")?;
                    Ok(Multiformula::lab(l, neg))
                }
                _ => Err(InterpolationError::AxiomMismatch(
                    "truth shape on an id axiom".into(),
                )),
            }
        }
        _ => Err(InterpolationError::AxiomMismatch(
            "not an axiom instance".into(),
        )),
    }
}

/// A clause of the multiformula CNF/DNF: same-label atoms are merged, so a
/// label occurs at most once per clause.
type Clause = BTreeMap<Label, Formula>;

fn merge_clause(mut a: Clause, b: &Clause, merge: fn(Formula, Formula) -> Formula) -> Clause {
    for (l, f) in b {
        match a.remove(l) {
            Some(g) => {
                a.insert(*l, merge(g, f.clone()));
            }
            None => {
                a.insert(*l, f.clone());
            }
        }
    }
    a
}

/// Conjunction of clauses, each a merged disjunction of labeled atoms.
fn cnf(u: &Multiformula) -> Vec<Clause> {
    match u {
        Multiformula::Lab(l, f) => vec![Clause::from([(*l, f.clone())])],
        Multiformula::Conj(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Multiformula::Disj(a, b) => {
            let (ca, cb) = (cnf(a), cnf(b));
            let mut out = Vec::with_capacity(ca.len() * cb.len());
            for x in &ca {
                for y in &cb {
                    out.push(merge_clause(x.clone(), y, Formula::or));
                }
            }
            out
        }
    }
}

/// Disjunction of clauses, each a merged conjunction of labeled atoms.
fn dnf(u: &Multiformula) -> Vec<Clause> {
    match u {
        Multiformula::Lab(l, f) => vec![Clause::from([(*l, f.clone())])],
        Multiformula::Disj(a, b) => {
            let mut out = dnf(a);
            out.extend(dnf(b));
            out
        }
        Multiformula::Conj(a, b) => {
            let (da, db) = (dnf(a), dnf(b));
            let mut out = Vec::with_capacity(da.len() * db.len());
            for x in &da {
                for y in &db {
                    out.push(merge_clause(x.clone(), y, Formula::and));
                }
            }
            out
        }
    }
}

fn fold_clause(
    mut clause: Clause,
    l: Label,
    fallback: Label,
    unit: Formula,
    inner: fn(Multiformula, Multiformula) -> Multiformula,
) -> Multiformula {
    let l_part = clause.remove(&l).unwrap_or_else(|| unit.clone());
    let rest = clause
        .into_iter()
        .map(|(lbl, f)| Multiformula::lab(lbl, f))
        .reduce(inner)
        .unwrap_or_else(|| Multiformula::lab(fallback, unit.clone()));
    inner(Multiformula::lab(l, l_part), rest)
}

/// Equivalent reshaping of `u` into `(l:f_1 (+) U_1) (*) ... (*) (l:f_n (+) U_n)`
/// with `l` absent from every `U_i`: CNF at the multiformula level, merging
/// same-label atoms per clause; clauses without an `l`-atom get the unit
/// `l:false`, and pure-`l` clauses get `fallback:false`.
pub fn to_box_form(u: &Multiformula, l: Label, fallback: Label) -> Multiformula {
    assert_ne!(l, fallback, "fallback must differ from the eliminated label");
    cnf(u)
        .into_iter()
        .map(|c| fold_clause(c, l, fallback, Formula::Bottom, Multiformula::disj))
        .reduce(Multiformula::conj)
        .expect("cnf is never empty")
}

/// Dual of [`to_box_form`]: DNF with `l:true` / `fallback:true` units.
pub fn to_diamond_form(u: &Multiformula, l: Label, fallback: Label) -> Multiformula {
    assert_ne!(l, fallback, "fallback must differ from the eliminated label");
    dnf(u)
        .into_iter()
        .map(|c| fold_clause(c, l, fallback, Formula::Top, Multiformula::conj))
        .reduce(Multiformula::disj)
        .expect("dnf is never empty")
}

/// Removes structural units: a `true` atom absorbs a disjunction and drops
/// from a conjunction, dually for `false`. Bodies are left untouched.
pub fn unit_fold(u: &Multiformula) -> Multiformula {
    match u {
        Multiformula::Lab(..) => u.clone(),
        Multiformula::Conj(a, b) => {
            let (a, b) = (unit_fold(a), unit_fold(b));
            match (&a, &b) {
                (Multiformula::Lab(_, Formula::Bottom), _) => a,
                (_, Multiformula::Lab(_, Formula::Bottom)) => b,
                (Multiformula::Lab(_, Formula::Top), _) => b,
                (_, Multiformula::Lab(_, Formula::Top)) => a,
                _ => Multiformula::conj(a, b),
            }
        }
        Multiformula::Disj(a, b) => {
            let (a, b) = (unit_fold(a), unit_fold(b));
            match (&a, &b) {
                (Multiformula::Lab(_, Formula::Top), _) => a,
                (_, Multiformula::Lab(_, Formula::Top)) => b,
                (Multiformula::Lab(_, Formula::Bottom), _) => b,
                (_, Multiformula::Lab(_, Formula::Bottom)) => a,
                _ => Multiformula::disj(a, b),
            }
        }
    }
}

/// Combines premise interpolants through one rule application. Box-like and
/// diamond-like steps first normalize so that the fresh label `l` only
/// occurs in designated atoms, then replace each `l:f` by `k:[a]f` /
/// `k:<a>f`.
pub fn combine(
    kind: &RuleClass,
    mut parts: Vec<Multiformula>,
) -> Result<Multiformula, InterpolationError> {
    if parts.len() != kind.arity() {
        return Err(InterpolationError::ArityMismatch {
            kind: kind.name(),
            expected: kind.arity(),
            got: parts.len(),
        });
    }
    Ok(match kind {
        RuleClass::Local => parts.pop().expect("arity checked"),
        RuleClass::Conjunctive => {
            let b = parts.pop().expect("arity checked");
            let a = parts.pop().expect("arity checked");
            unit_fold(&Multiformula::conj(a, b))
        }
        RuleClass::Disjunctive => {
            let b = parts.pop().expect("arity checked");
            let a = parts.pop().expect("arity checked");
            unit_fold(&Multiformula::disj(a, b))
        }
        RuleClass::BoxLike(k, l, a) | RuleClass::DiamondLike(k, l, a) => {
            let boxlike = matches!(kind, RuleClass::BoxLike(..));
            let u = parts.pop().expect("arity checked");
            let normal = if boxlike {
                to_box_form(&u, *l, *k)
            } else {
                to_diamond_form(&u, *l, *k)
            };
            let replaced = normal.map_atoms(&|lbl, f| {
                if lbl == *l {
                    let body = Box::new(f.clone());
                    let modal = if boxlike {
                        Formula::Box(a.clone(), body)
                    } else {
                        Formula::Dia(a.clone(), body)
                    };
                    (*k, modal)
                } else {
                    (lbl, f.clone())
                }
            });
            if replaced.labels().contains(l) {
                return Err(InterpolationError::LabelLeak(*l));
            }
            unit_fold(&replaced)
        }
    })
}

/// Collapses every modal atom whose body contains no literal: such a body
/// is built from constants only, so the whole modality constant-evaluates
/// to `true` or `false`, after which structural units are folded away.
/// Modal atoms whose bodies mention a literal are kept — their agent then
/// occurs on both sides of the split.
pub fn alip_repair(u: &Multiformula) -> Multiformula {
    let repaired = u.map_atoms(&|l, f| match f {
        Formula::Box(_, body) | Formula::Dia(_, body) if !body.contains_literal() => {
            let collapsed = simplify_constants(f);
            debug_assert!(
                matches!(collapsed, Formula::Top | Formula::Bottom),
                "literal-free modality must collapse to a constant"
            );
            (l, collapsed)
        }
        _ => (l, f.clone()),
    });
    unit_fold(&repaired)
}

fn fold_tree(
    t: &ProofTree,
    repair: bool,
    trace: &mut Vec<(CrossSequent, Multiformula)>,
) -> Result<Multiformula, InterpolationError> {
    let u = match &t.step {
        ProofStep::Saturated => return Err(InterpolationError::NotClosed),
        ProofStep::Axiom(r) => interpolate_axiom(&t.sequent, r)?,
        ProofStep::Rule(r, children) => {
            let mut parts = Vec::with_capacity(children.len());
            for c in children {
                parts.push(fold_tree(c, repair, trace)?);
            }
            let kind = classify_rule(r)?;
            let combined = combine(&kind, parts)?;
            if repair {
                let simplified = combined.map_atoms(&|l, f| (l, simplify_constants(f)));
                match kind {
                    RuleClass::BoxLike(..) | RuleClass::DiamondLike(..) => {
                        alip_repair(&simplified)
                    }
                    _ => unit_fold(&simplified),
                }
            } else {
                combined
            }
        }
    };
    trace.push((t.sequent.clone(), u.clone()));
    Ok(u)
}

/// Folds a closed split proof into its repaired interpolant.
pub fn interpolate_proof(t: &ProofTree) -> Result<Multiformula, InterpolationError> {
    Ok(annotate_interpolants(t, true)?
        .pop()
        .expect("fold visits the root last")
        .1)
}

/// The bottom-up fold with the running interpolant recorded at every node
/// (leaves first, root last). With `repair` disabled, modal bodies are left
/// exactly as the transformations produce them.
pub fn annotate_interpolants(
    t: &ProofTree,
    repair: bool,
) -> Result<Vec<(CrossSequent, Multiformula)>, InterpolationError> {
    let mut trace = Vec::new();
    fold_tree(t, repair, &mut trace)?;
    Ok(trace)
}

/// Outcome of checking the sequent interpolation conditions for one
/// multiformula against one split cross-sequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlipReport {
    /// Condition 0: labels of the multiformula occur in the sequent.
    pub labels_ok: bool,
    /// Condition 1: wherever the multiformula is false, the left projection
    /// holds.
    pub left_ok: bool,
    /// Condition 2: wherever the multiformula is true, the right projection
    /// holds.
    pub right_ok: bool,
    /// Condition 3: polarized variables lie in the common vocabulary.
    pub vars_ok: bool,
    /// Condition 4: agents lie in the common agent vocabulary.
    pub agents_ok: bool,
}

impl SlipReport {
    pub fn slip_ok(&self) -> bool {
        self.labels_ok && self.left_ok && self.right_ok && self.vars_ok
    }

    pub fn salip_ok(&self) -> bool {
        self.slip_ok() && self.agents_ok
    }
}

fn side_vars(s: &CrossSequent, side: Side, polarity: Polarity) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    s.for_each(&mut |c| {
        for f in c.side(side) {
            out.extend(vars(f, polarity));
        }
    });
    out
}

fn side_agents(s: &CrossSequent, side: Side) -> BTreeSet<Agent> {
    let mut out = BTreeSet::new();
    s.for_each(&mut |c| {
        for f in c.side(side) {
            out.extend(agents(f));
        }
        // brackets belong to both projections; their translation mentions
        // the bracket agent
        out.extend(c.brackets.keys().cloned());
    });
    out
}

/// Checks the sequent interpolation conditions: labels, vocabulary, and
/// agents syntactically; the two semantic conditions by enumerating every
/// model with at most `max_worlds` worlds together with every
/// cluster-respecting interpretation of the sequent.
pub fn check_slip_conditions(
    u: &Multiformula,
    s: &CrossSequent,
    max_worlds: usize,
) -> Result<SlipReport, SemanticsError> {
    let labels_ok = u.labels().is_subset(&s.labels());

    let left_neg = side_vars(s, Side::Left, Polarity::Neg);
    let left_pos = side_vars(s, Side::Left, Polarity::Pos);
    let right_pos = side_vars(s, Side::Right, Polarity::Pos);
    let right_neg = side_vars(s, Side::Right, Polarity::Neg);
    let vars_ok = u
        .vars(Polarity::Pos)
        .iter()
        .all(|p| left_neg.contains(p) && right_pos.contains(p))
        && u.vars(Polarity::Neg)
            .iter()
            .all(|p| left_pos.contains(p) && right_neg.contains(p));

    let la = side_agents(s, Side::Left);
    let ra = side_agents(s, Side::Right);
    let agents_ok = u.agents().iter().all(|a| la.contains(a) && ra.contains(a));

    if !labels_ok {
        return Ok(SlipReport {
            labels_ok,
            left_ok: false,
            right_ok: false,
            vars_ok,
            agents_ok,
        });
    }

    let mut atoms = s.all_atoms();
    atoms.extend(u.all_atoms());
    let mut agent_set = s.all_agents();
    agent_set.extend(u.agents());
    let left_proj = s.projection(Side::Left);
    let right_proj = s.projection(Side::Right);

    let mut left_ok = true;
    let mut right_ok = true;
    for_each_model(&atoms, &agent_set, max_worlds, DEFAULT_MODEL_BUDGET, &mut |m| {
        for i in enumerate_interpretations(m, s) {
            let u_val = eval_multiformula(m, &i, u).expect("labels covered");
            if !u_val && !eval_cross_sequent(m, &i, &left_proj).expect("labels covered") {
                left_ok = false;
            }
            if u_val && !eval_cross_sequent(m, &i, &right_proj).expect("labels covered") {
                right_ok = false;
            }
            if !left_ok && !right_ok {
                return true;
            }
        }
        false
    })?;

    Ok(SlipReport {
        labels_ok,
        left_ok,
        right_ok,
        vars_ok,
        agents_ok,
    })
}

/// Interpolates a proved depth-0 split cross-sequent, returning the raw
/// (pre-repair) and repaired interpolants. Fails with a countermodel when
/// the sequent is refutable.
pub fn interpolate_split(
    s: &CrossSequent,
) -> Result<(Multiformula, Multiformula), InterpolationError> {
    assert_eq!(s.depth(), 0, "interpolation is defined for depth-0 endsequents");
    match prove(s) {
        ProofResult::Refuted { model, interp, .. } => Err(InterpolationError::NotValid {
            world: interp[&s.root.label],
            model,
        }),
        ProofResult::Proved(tree) => {
            let pre = annotate_interpolants(&tree, false)?
                .pop()
                .expect("fold visits the root last")
                .1;
            let repaired = interpolate_proof(&tree)?;
            Ok((pre, repaired))
        }
    }
}

/// End-to-end interpolation result with its verification flags; all flags
/// hold whenever the input implication is a theorem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationReport {
    pub interpolant: Formula,
    pub pre_repair_interpolant: Formula,
    pub left_implication_proved: bool,
    pub right_implication_proved: bool,
    pub var_plus_ok: bool,
    pub var_minus_ok: bool,
    pub agents_ok: bool,
}

impl InterpolationReport {
    pub fn all_ok(&self) -> bool {
        self.left_implication_proved
            && self.right_implication_proved
            && self.var_plus_ok
            && self.var_minus_ok
            && self.agents_ok
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "interpolant": self.interpolant.to_string(),
            "preRepair": self.pre_repair_interpolant.to_string(),
            "checks": {
                "leftImp": self.left_implication_proved,
                "rightImp": self.right_implication_proved,
                "varPlus": self.var_plus_ok,
                "varMinus": self.var_minus_ok,
                "agents": self.agents_ok,
            },
        })
    }
}

/// Computes an interpolant for the valid implication `phi -> psi` (both in
/// NNF) and re-verifies every interpolation condition from scratch: both
/// implications are re-proved and the vocabulary inclusions re-checked.
pub fn interpolate(phi: &Formula, psi: &Formula) -> Result<InterpolationReport, InterpolationError> {
    let s = CrossSequent::split_goal(vec![negate(phi)], vec![psi.clone()]);
    let (pre_mf, final_mf) = interpolate_split(&s)?;
    let pre_repair_interpolant = pre_mf.project()?;
    let interpolant = simplify_constants(&final_mf.project()?);

    let subset = |a: &BTreeSet<Atom>, b: &BTreeSet<Atom>, c: &BTreeSet<Atom>| {
        a.iter().all(|x| b.contains(x) && c.contains(x))
    };
    let phi_agents = agents(phi);
    let psi_agents = agents(psi);
    Ok(InterpolationReport {
        left_implication_proved: prove_formula(&Formula::implies(phi.clone(), interpolant.clone()))
            .is_proved(),
        right_implication_proved: prove_formula(&Formula::implies(interpolant.clone(), psi.clone()))
            .is_proved(),
        var_plus_ok: subset(
            &vars(&interpolant, Polarity::Pos),
            &vars(phi, Polarity::Pos),
            &vars(psi, Polarity::Pos),
        ),
        var_minus_ok: subset(
            &vars(&interpolant, Polarity::Neg),
            &vars(phi, Polarity::Neg),
            &vars(psi, Polarity::Neg),
        ),
        agents_ok: agents(&interpolant)
            .iter()
            .all(|a| phi_agents.contains(a) && psi_agents.contains(a)),
        interpolant,
        pre_repair_interpolant,
    })
}

/// Falsifying world of a refuted implication, paired with its model. Used
/// by callers that want to report the countermodel behind a `NotValid`.
pub fn countermodel_of(err: &InterpolationError) -> Option<(&KripkeModel, WorldId)> {
    match err {
        InterpolationError::NotValid { model, world } => Some((model, *world)),
        _ => None,
    }
}
