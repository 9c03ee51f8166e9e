//! Cross-sequents: trees of hypersequents whose sequent components are
//! connected by agent-indexed brackets.
//!
//! Every component carries a Maehara split into a left and a right formula
//! set; an unsplit sequent is the special case where the left sides are
//! empty. Structural notions (properness, depth, clusters, the formula
//! interpretation) always read the union of both sides.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::syntax::{Agent, Formula};

/// Component label, unique within one cross-sequent. The root is labeled 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u64);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the split a formula occurrence sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

/// Issues strictly increasing labels, never reused within one proof search.
#[derive(Debug, Default)]
pub struct LabelAllocator {
    next: u64,
}

impl LabelAllocator {
    /// Allocator whose first label follows everything already in `s`.
    pub fn after(s: &CrossSequent) -> Self {
        let next = s.labels().iter().map(|l| l.0 + 1).max().unwrap_or(0);
        LabelAllocator { next }
    }

    pub fn fresh(&mut self) -> Label {
        let l = Label(self.next);
        self.next += 1;
        l
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("dangling hole path at step {0}")]
    DanglingPath(usize),
}

/// A sequent component: a split set of formulas plus the agent-indexed
/// child brackets hanging off it. Storing brackets as an agent-keyed map
/// makes consolidation condition (a) structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub label: Label,
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
    /// Each entry is a hypersequent: the sibling subtrees of one bracket.
    pub brackets: BTreeMap<Agent, Vec<Component>>,
}

impl Component {
    pub fn new(label: Label) -> Self {
        Component {
            label,
            left: BTreeSet::new(),
            right: BTreeSet::new(),
            brackets: BTreeMap::new(),
        }
    }

    /// Union view of both sides.
    pub fn formulas(&self) -> BTreeSet<Formula> {
        self.left.union(&self.right).cloned().collect()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.left.contains(f) || self.right.contains(f)
    }

    pub fn side(&self, side: Side) -> &BTreeSet<Formula> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut BTreeSet<Formula> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// Addresses one component: agent/index steps from the root plus the label
/// the path must end at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hole {
    pub path: Vec<(Agent, usize)>,
    pub target: Label,
}

/// A proper labeled cross-sequent: a tree of components rooted at `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossSequent {
    pub root: Component,
}

impl CrossSequent {
    /// Single-component validity goal `;^0 f`.
    pub fn goal(f: Formula) -> Self {
        Self::split_goal(vec![], vec![f])
    }

    /// Single-component split goal `left ;^0 right`.
    pub fn split_goal(left: Vec<Formula>, right: Vec<Formula>) -> Self {
        let mut root = Component::new(Label(0));
        root.left = left.into_iter().collect();
        root.right = right.into_iter().collect();
        CrossSequent { root }
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.for_each(&mut |c| {
            out.insert(c.label);
        });
        out
    }

    pub fn for_each(&self, f: &mut impl FnMut(&Component)) {
        fn walk(c: &Component, f: &mut impl FnMut(&Component)) {
            f(c);
            for members in c.brackets.values() {
                for m in members {
                    walk(m, f);
                }
            }
        }
        walk(&self.root, f);
    }

    /// All components in ascending label order.
    pub fn components(&self) -> Vec<&Component> {
        fn walk<'a>(c: &'a Component, out: &mut Vec<&'a Component>) {
            out.push(c);
            for members in c.brackets.values() {
                for m in members {
                    walk(m, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_by_key(|c| c.label);
        out
    }

    pub fn component(&self, l: Label) -> Result<&Component, StructureError> {
        fn walk(c: &Component, l: Label) -> Option<&Component> {
            if c.label == l {
                return Some(c);
            }
            c.brackets
                .values()
                .flatten()
                .find_map(|m| walk(m, l))
        }
        walk(&self.root, l).ok_or(StructureError::UnknownLabel(l))
    }

    pub fn component_mut(&mut self, l: Label) -> Result<&mut Component, StructureError> {
        fn walk(c: &mut Component, l: Label) -> Option<&mut Component> {
            if c.label == l {
                return Some(c);
            }
            c.brackets
                .values_mut()
                .flatten()
                .find_map(|m| walk(m, l))
        }
        walk(&mut self.root, l).ok_or(StructureError::UnknownLabel(l))
    }

    /// The bracket containing `l`: its parent component's label and the
    /// bracket agent. `None` for the root.
    pub fn parent_of(&self, l: Label) -> Result<Option<(Label, Agent)>, StructureError> {
        fn walk(c: &Component, l: Label) -> Option<Option<(Label, Agent)>> {
            if c.label == l {
                return Some(None);
            }
            for (a, members) in &c.brackets {
                for m in members {
                    if m.label == l {
                        return Some(Some((c.label, a.clone())));
                    }
                    if let Some(found) = walk(m, l) {
                        return Some(found);
                    }
                }
            }
            None
        }
        walk(&self.root, l).ok_or(StructureError::UnknownLabel(l))
    }

    /// Depth: bracket nesting height of the tree.
    pub fn depth(&self) -> usize {
        fn walk(c: &Component) -> usize {
            c.brackets
                .values()
                .flatten()
                .map(|m| walk(m) + 1)
                .max()
                .unwrap_or(0)
        }
        walk(&self.root)
    }

    /// Maximal modal depth over all formulas in all components.
    pub fn modal_depth(&self) -> usize {
        let mut max = 0;
        self.for_each(&mut |c| {
            for f in c.left.iter().chain(c.right.iter()) {
                max = max.max(crate::syntax::modal_depth(f));
            }
        });
        max
    }

    /// The formula interpretation: each component is read disjunctively and
    /// each bracket member contributes a boxed disjunct to its parent. An
    /// empty component reads as `false`.
    pub fn iota(&self) -> Formula {
        fn or_all(items: Vec<Formula>) -> Formula {
            items
                .into_iter()
                .reduce(Formula::or)
                .unwrap_or(Formula::Bottom)
        }
        fn walk(c: &Component) -> Formula {
            // the formula part reads as an (empty-defaulting) disjunction
            // before any bracket disjuncts are appended
            let mut out = or_all(c.formulas().into_iter().collect());
            for (a, members) in &c.brackets {
                for m in members {
                    out = Formula::or(out, Formula::Box(a.clone(), Box::new(walk(m))));
                }
            }
            out
        }
        walk(&self.root)
    }

    /// Both consolidation conditions: at most one bracket per agent per
    /// component (structural here), and no component inside an `a`-bracket
    /// carries its own `a`-bracket.
    pub fn is_proper(&self) -> bool {
        fn walk(c: &Component, forbidden: Option<&Agent>) -> bool {
            if let Some(a) = forbidden {
                if c.brackets.contains_key(a) {
                    return false;
                }
            }
            c.brackets
                .iter()
                .all(|(a, members)| members.iter().all(|m| walk(m, Some(a))))
        }
        walk(&self.root, None)
    }

    /// Structural well-formedness beyond properness: all labels distinct,
    /// all brackets non-empty.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut seen = BTreeSet::new();
        self.for_each(&mut |c| {
            if !seen.insert(c.label) {
                violations.push(format!("duplicate label {}", c.label));
            }
            for (a, members) in &c.brackets {
                if members.is_empty() {
                    violations.push(format!("empty {a}-bracket under {}", c.label));
                }
            }
        });
        if !self.is_proper() {
            violations.push("consolidation conditions violated".into());
        }
        violations
    }

    /// The `a`-cluster of component `l`: the component together with its
    /// `a`-parent, `a`-siblings, and `a`-children. For a fixed agent these
    /// sets partition the labels.
    pub fn cluster(&self, l: Label, a: &Agent) -> Result<BTreeSet<Label>, StructureError> {
        let mut out = BTreeSet::new();
        match self.parent_of(l)? {
            Some((parent, ref pa)) if pa == a => {
                out.insert(parent);
                let pc = self.component(parent)?;
                for m in &pc.brackets[a] {
                    out.insert(m.label);
                }
            }
            _ => {
                out.insert(l);
                let c = self.component(l)?;
                if let Some(members) = c.brackets.get(a) {
                    for m in members {
                        out.insert(m.label);
                    }
                }
            }
        }
        Ok(out)
    }

    /// The `a`-parent of the non-trivial cluster containing `l`, if any.
    pub fn cluster_parent(&self, l: Label, a: &Agent) -> Result<Option<Label>, StructureError> {
        match self.parent_of(l)? {
            Some((parent, ref pa)) if pa == a => Ok(Some(parent)),
            _ => {
                let c = self.component(l)?;
                if c.brackets.contains_key(a) {
                    Ok(Some(l))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Path from the root to the component labeled `l`.
    pub fn path_to(&self, l: Label) -> Result<Hole, StructureError> {
        fn walk(c: &Component, l: Label, path: &mut Vec<(Agent, usize)>) -> bool {
            if c.label == l {
                return true;
            }
            for (a, members) in &c.brackets {
                for (i, m) in members.iter().enumerate() {
                    path.push((a.clone(), i));
                    if walk(m, l, path) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        let mut path = Vec::new();
        if walk(&self.root, l, &mut path) {
            Ok(Hole { path, target: l })
        } else {
            Err(StructureError::UnknownLabel(l))
        }
    }

    /// Resolve a hole to the component it addresses.
    pub fn resolve(&self, hole: &Hole) -> Result<&Component, StructureError> {
        let mut c = &self.root;
        for (step, (a, i)) in hole.path.iter().enumerate() {
            let members = c
                .brackets
                .get(a)
                .ok_or(StructureError::DanglingPath(step))?;
            c = members.get(*i).ok_or(StructureError::DanglingPath(step))?;
        }
        if c.label != hole.target {
            return Err(StructureError::UnknownLabel(hole.target));
        }
        Ok(c)
    }

    /// One-sided projection: same tree, keeping only the given side's
    /// formulas (placed on the right, left sides empty).
    pub fn projection(&self, side: Side) -> CrossSequent {
        fn walk(c: &Component, side: Side) -> Component {
            Component {
                label: c.label,
                left: BTreeSet::new(),
                right: c.side(side).clone(),
                brackets: c
                    .brackets
                    .iter()
                    .map(|(a, members)| {
                        (a.clone(), members.iter().map(|m| walk(m, side)).collect())
                    })
                    .collect(),
            }
        }
        CrossSequent {
            root: walk(&self.root, side),
        }
    }

    /// Agents occurring in formulas or as bracket indices.
    pub fn all_agents(&self) -> BTreeSet<Agent> {
        let mut out = BTreeSet::new();
        self.for_each(&mut |c| {
            out.extend(c.brackets.keys().cloned());
            for f in c.left.iter().chain(c.right.iter()) {
                out.extend(crate::syntax::agents(f));
            }
        });
        out
    }

    /// Atoms occurring anywhere in the sequent.
    pub fn all_atoms(&self) -> BTreeSet<crate::syntax::Atom> {
        let mut out = BTreeSet::new();
        self.for_each(&mut |c| {
            for f in c.left.iter().chain(c.right.iter()) {
                out.extend(crate::syntax::all_vars(f));
            }
        });
        out
    }

    /// Distinct subformulas of all formulas in the sequent.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.for_each(&mut |c| {
            for f in c.left.iter().chain(c.right.iter()) {
                out.extend(f.subformulas());
            }
        });
        out
    }

    /// Longest parent-child chain of components (number of edges).
    pub fn longest_chain(&self) -> usize {
        self.depth()
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn walk(c: &Component) -> serde_json::Value {
            let brackets: serde_json::Map<String, serde_json::Value> = c
                .brackets
                .iter()
                .map(|(a, members)| {
                    (
                        a.0.clone(),
                        serde_json::Value::Array(members.iter().map(walk).collect()),
                    )
                })
                .collect();
            json!({
                "label": c.label.0,
                "left": c.left.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "right": c.right.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "brackets": brackets,
            })
        }
        walk(&self.root)
    }
}

impl fmt::Display for CrossSequent {
    /// Text rendering: `f1, f2 ;#k g1, [ ... | ... ]_a`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(c: &Component, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            let left: Vec<String> = c.left.iter().map(|f| f.to_string()).collect();
            write!(out, "{} ;#{}", left.join(", "), c.label)?;
            let mut parts: Vec<String> = c.right.iter().map(|f| f.to_string()).collect();
            if !parts.is_empty() {
                write!(out, " {}", parts.join(", "))?;
            }
            parts.clear();
            for (a, members) in &c.brackets {
                write!(out, ", [")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        write!(out, " | ")?;
                    }
                    walk(m, out)?;
                }
                write!(out, "]_{a}")?;
            }
            Ok(())
        }
        walk(&self.root, out)
    }
}
