//! Test corpora and generators: the classic axiom schemes, known
//! non-theorems, curated valid implications for interpolation, seeded
//! random formulas/multiformulas, and the self-test runner used by the CLI.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cross_sequent::Label;
use crate::interpolation::{interpolate, to_box_form, to_diamond_form, Multiformula};
use crate::prover::{check_proof, prove_formula, ProofResult};
use crate::semantics::{
    enumerate_interpretations, eval_multiformula, find_countermodel_bruteforce, for_each_model,
    DEFAULT_MODEL_BUDGET,
};
use crate::syntax::{parse_nnf, Agent, Atom, Formula};

fn nnf(text: &str) -> Formula {
    parse_nnf(text).expect("corpus formulas are well-formed")
}

/// Instances of the five axiom schemes (distribution, factivity, positive
/// and negative introspection, plus boxed instances standing in for
/// necessitation closure) over atoms p, q and agents a, b. All are valid.
pub fn hilbert_corpus() -> Vec<Formula> {
    let mut out = Vec::new();
    for x in ["a", "b"] {
        for (p, q) in [("p", "q"), ("q", "p")] {
            // distribution (K)
            out.push(nnf(&format!("[{x}]({p} -> {q}) -> ([{x}]{p} -> [{x}]{q})")));
        }
        for p in ["p", "q"] {
            // factivity (T)
            out.push(nnf(&format!("[{x}]{p} -> {p}")));
            // positive introspection (4)
            out.push(nnf(&format!("[{x}]{p} -> [{x}][{x}]{p}")));
            // negative introspection (5)
            out.push(nnf(&format!("<{x}>{p} -> [{x}]<{x}>{p}")));
        }
    }
    // necessitation closure: boxed instances of the schemes above
    for y in ["a", "b"] {
        out.push(nnf(&format!("[{y}]([a]p -> p)")));
        out.push(nnf(&format!("[{y}]([b]q -> [b][b]q)")));
        out.push(nnf(&format!("[{y}]([a](p -> q) -> ([a]p -> [a]q))")));
        out.push(nnf(&format!("[{y}](<b>p -> [b]<b>p)")));
    }
    out
}

/// Classic non-theorems; the prover must refute each with a verified
/// countermodel.
pub fn non_theorem_corpus() -> Vec<Formula> {
    vec![
        nnf("p -> [a]p"),
        nnf("[a]p -> [b]p"),
        nnf("<a><b>p -> <b><a>p"),
        nnf("[a](p | q) -> ([a]p | [a]q)"),
    ]
}

/// Twenty valid implications over two agents, mixing propositional,
/// single-agent, and cross-agent reasoning. Each pair (phi, psi) satisfies
/// phi -> psi.
pub fn curated_implications() -> Vec<(Formula, Formula)> {
    [
        ("p & q", "p"),
        ("p", "p | q"),
        ("[a]p", "p"),
        ("[a]p & [a]q", "[a](p & q)"),
        ("[a](p & q)", "[a]p"),
        ("[a]p", "<a>p"),
        ("<a>p | <a>q", "<a>(p | q)"),
        ("[a]p", "[a][a]p"),
        ("<a>p", "[a]<a>p"),
        ("p & ~p", "q"),
        ("p", "q | ~q"),
        ("[a](p & q) & [b](p | r)", "[a]q"),
        ("[a]p & [b]q", "[b]q | r"),
        ("<a>(p & q)", "<a>p"),
        ("[a]p | [a]q", "[a](p | q)"),
        ("[a]~p", "~p"),
        ("[b]<b>p", "<b>p"),
        ("<b>[b]p", "p"),
        ("[a]p & q", "q & (p | r)"),
        ("[a](p | q) & [a]~p", "[a]q"),
    ]
    .into_iter()
    .map(|(phi, psi)| (nnf(phi), nnf(psi)))
    .collect()
}

/// All NNF formulas with exactly `size` nodes over the given atoms and
/// agents (literals, constants, conjunction, disjunction, and one modality
/// pair per agent).
pub fn enumerate_nnf(size: usize, atoms: &[Atom], agent_set: &[Agent]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![vec![]];
    for n in 1..=size {
        let mut layer = Vec::new();
        if n == 1 {
            layer.push(Formula::Bottom);
            layer.push(Formula::Top);
            for atom in atoms {
                layer.push(Formula::atom(atom.0.clone()));
                layer.push(Formula::natom(atom.0.clone()));
            }
        } else {
            for f in &by_size[n - 1] {
                for a in agent_set {
                    layer.push(Formula::Box(a.clone(), Box::new(f.clone())));
                    layer.push(Formula::Dia(a.clone(), Box::new(f.clone())));
                }
            }
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for f in &by_size[i] {
                    for g in &by_size[j] {
                        layer.push(Formula::and(f.clone(), g.clone()));
                        layer.push(Formula::or(f.clone(), g.clone()));
                    }
                }
            }
        }
        by_size.push(layer);
    }
    by_size.swap_remove(size)
}

/// All NNF formulas with at most `size` nodes.
pub fn enumerate_nnf_upto(size: usize, atoms: &[Atom], agent_set: &[Agent]) -> Vec<Formula> {
    (1..=size)
        .flat_map(|n| enumerate_nnf(n, atoms, agent_set))
        .collect()
}

/// A random NNF formula with roughly `size` nodes.
pub fn random_nnf(rng: &mut impl Rng, size: usize, atoms: &[Atom], agent_set: &[Agent]) -> Formula {
    if size <= 1 {
        let atom = &atoms[rng.gen_range(0..atoms.len())];
        return if rng.gen_bool(0.5) {
            Formula::atom(atom.0.clone())
        } else {
            Formula::natom(atom.0.clone())
        };
    }
    match rng.gen_range(0..4) {
        0 => {
            let left = rng.gen_range(1..size);
            Formula::and(
                random_nnf(rng, left, atoms, agent_set),
                random_nnf(rng, size - 1 - left.min(size - 1), atoms, agent_set),
            )
        }
        1 => {
            let left = rng.gen_range(1..size);
            Formula::or(
                random_nnf(rng, left, atoms, agent_set),
                random_nnf(rng, size - 1 - left.min(size - 1), atoms, agent_set),
            )
        }
        2 => {
            let a = agent_set[rng.gen_range(0..agent_set.len())].clone();
            Formula::Box(a, Box::new(random_nnf(rng, size - 1, atoms, agent_set)))
        }
        _ => {
            let a = agent_set[rng.gen_range(0..agent_set.len())].clone();
            Formula::Dia(a, Box::new(random_nnf(rng, size - 1, atoms, agent_set)))
        }
    }
}

/// Seeded stream of valid implications: a random phi together with
/// psi = phi | rho for random rho, so phi -> psi holds by construction.
pub fn random_valid_implications(seed: u64, count: usize) -> Vec<(Formula, Formula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = [Atom::new("p"), Atom::new("q")];
    let agent_set = [Agent::new("a"), Agent::new("b")];
    (0..count)
        .map(|_| {
            let phi_size = rng.gen_range(1..=5);
            let phi = random_nnf(&mut rng, phi_size, &atoms, &agent_set);
            let rho_size = rng.gen_range(1..=4);
            let rho = random_nnf(&mut rng, rho_size, &atoms, &agent_set);
            let psi = Formula::or(phi.clone(), rho);
            (phi, psi)
        })
        .collect()
}

/// A random multiformula over the given labels with roughly `size` labeled
/// atoms, each atom carrying a small formula.
pub fn random_multiformula(rng: &mut impl Rng, labels: &[Label], size: usize) -> Multiformula {
    let atoms = [Atom::new("p"), Atom::new("q")];
    let agent_set = [Agent::new("a")];
    if size <= 1 {
        let l = labels[rng.gen_range(0..labels.len())];
        let body = if rng.gen_bool(0.15) {
            if rng.gen_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bottom
            }
        } else {
            let body_size = rng.gen_range(1..=2);
            random_nnf(rng, body_size, &atoms, &agent_set)
        };
        return Multiformula::lab(l, body);
    }
    let left = rng.gen_range(1..size);
    let a = random_multiformula(rng, labels, left);
    let b = random_multiformula(rng, labels, size - left);
    if rng.gen_bool(0.5) {
        Multiformula::conj(a, b)
    } else {
        Multiformula::disj(a, b)
    }
}

/// One self-test check: a name plus pass/fail.
pub struct SelfTestResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(), String>) -> SelfTestResult {
    match run() {
        Ok(()) => SelfTestResult {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => SelfTestResult {
            name,
            passed: false,
            detail,
        },
    }
}

/// Runs a condensed version of the full test suite: axiom corpus, refuted
/// non-theorems with verified countermodels, a small exhaustive
/// prover-vs-oracle cross-check, curated and random interpolation queries,
/// and normal-form equivalence on random multiformulas.
pub fn run_selftest(seed: u64, oracle_worlds: usize) -> Vec<SelfTestResult> {
    let mut results = Vec::new();

    results.push(check("axiom corpus proved", || {
        for f in hilbert_corpus() {
            if !prove_formula(&f).is_proved() {
                return Err(format!("not proved: {f}"));
            }
        }
        Ok(())
    }));

    results.push(check("non-theorems refuted with verified countermodels", || {
        for f in non_theorem_corpus() {
            let ProofResult::Refuted { model, interp, .. } = prove_formula(&f) else {
                return Err(format!("not refuted: {f}"));
            };
            if !model.verify().is_empty() {
                return Err(format!("bad countermodel for {f}"));
            }
            let w = interp[&Label(0)];
            if model.eval(w, &f).map_err(|e| e.to_string())? {
                return Err(format!("countermodel does not falsify {f}"));
            }
        }
        Ok(())
    }));

    results.push(check("exhaustive cross-check against the oracle", || {
        let atoms = [Atom::new("p")];
        let agent_set = [Agent::new("a"), Agent::new("b")];
        for f in enumerate_nnf_upto(5, &atoms, &agent_set) {
            match prove_formula(&f) {
                ProofResult::Proved(tree) => {
                    if find_countermodel_bruteforce(&f, oracle_worlds)
                        .map_err(|e| e.to_string())?
                        .is_some()
                    {
                        return Err(format!("proved but falsifiable: {f}"));
                    }
                    let bad = check_proof(&tree);
                    if !bad.is_empty() {
                        return Err(format!("proof check failed for {f}: {}", bad[0]));
                    }
                }
                ProofResult::Refuted { model, interp, .. } => {
                    if !model.verify().is_empty() {
                        return Err(format!("bad countermodel for {f}"));
                    }
                    if model.eval(interp[&Label(0)], &f).map_err(|e| e.to_string())? {
                        return Err(format!("countermodel does not falsify {f}"));
                    }
                }
            }
        }
        Ok(())
    }));

    results.push(check("curated interpolation queries verified", || {
        for (phi, psi) in curated_implications() {
            let report = interpolate(&phi, &psi).map_err(|e| e.to_string())?;
            if !report.all_ok() {
                return Err(format!("flags not all true for {phi} -> {psi}"));
            }
        }
        Ok(())
    }));

    results.push(check("random interpolation queries verified", || {
        for (phi, psi) in random_valid_implications(seed, 25) {
            let report = interpolate(&phi, &psi).map_err(|e| e.to_string())?;
            if !report.all_ok() {
                return Err(format!("flags not all true for {phi} -> {psi}"));
            }
        }
        Ok(())
    }));

    results.push(check("normal forms preserve truth", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e66);
        let labels = [Label(0), Label(1)];
        // evaluate both labels over a two-component sequent: a root with
        // one a-child, so interpretations range over whole models
        let goal = {
            use crate::cross_sequent::{Component, CrossSequent};
            let mut root = Component::new(Label(0));
            root.right.insert(Formula::atom("p"));
            let mut child = Component::new(Label(1));
            child.right.insert(Formula::atom("q"));
            root.brackets.insert(Agent::new("a"), vec![child]);
            CrossSequent { root }
        };
        let atoms = [Atom::new("p"), Atom::new("q")].into();
        let agent_set = [Agent::new("a")].into();
        for _ in 0..50 {
            let size = rng.gen_range(1..=4);
            let u = random_multiformula(&mut rng, &labels, size);
            let box_form = to_box_form(&u, Label(1), Label(0));
            let dia_form = to_diamond_form(&u, Label(1), Label(0));
            let mut failure = None;
            for_each_model(&atoms, &agent_set, 2, DEFAULT_MODEL_BUDGET, &mut |m| {
                for i in enumerate_interpretations(m, &goal) {
                    let reference = eval_multiformula(m, &i, &u).expect("covered");
                    for v in [&box_form, &dia_form] {
                        if eval_multiformula(m, &i, v).expect("covered") != reference {
                            failure = Some(format!("{u} vs {v}"));
                            return true;
                        }
                    }
                }
                false
            })
            .map_err(|e| e.to_string())?;
            if let Some(f) = failure {
                return Err(f);
            }
        }
        Ok(())
    }));

    results
}
