//! Command-line surface: prove formulas, extract countermodels, compute
//! interpolants, check models, and run the built-in self-test.
//!
//! Exit codes: 0 for valid / interpolant found / model check true /
//! self-test passed; 1 for refuted / countermodel found / model check
//! false / self-test failure; 2 for usage, parse, or input errors.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crosseq::corpus::run_selftest;
use crosseq::interpolation::countermodel_of;
use crosseq::prover::{ProofStep, ProofTree};
use crosseq::semantics::WorldId;
use crosseq::syntax::parse_nnf;
use crosseq::{interpolate, prove_formula, Formula, KripkeModel, Label, ProofResult};

#[derive(Parser)]
#[command(name = "crosseq", version, about = "Decision procedure and interpolant synthesizer for multi-agent S5")]
struct Cli {
    /// Output format (dot applies to prove and countermodel only)
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// World bound for the brute-force oracle used by selftest
    #[arg(long, default_value_t = 3, global = true)]
    oracle_worlds: usize,

    /// Include the proof tree in prove output
    #[arg(long, global = true)]
    emit_proof: bool,

    /// Seed for selftest corpus generation
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Decide validity of a formula
    Prove { formula: String },
    /// Find a countermodel for a formula (exit 1 when the formula is valid)
    Countermodel { formula: String },
    /// Compute and verify an interpolant for the implication PHI -> PSI
    Interpolate { phi: String, psi: String },
    /// Evaluate a formula at a world of a model given as JSON
    Checkmodel {
        model: std::path::PathBuf,
        world: WorldId,
        formula: String,
    },
    /// Run the built-in verification suites
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    if cli.format == Format::Dot
        && !matches!(cli.command, Command::Prove { .. } | Command::Countermodel { .. })
    {
        return Err("dot output is only available for prove and countermodel".into());
    }
    match &cli.command {
        Command::Prove { formula } => {
            let f = parse_formula(formula)?;
            match prove_formula(&f) {
                ProofResult::Proved(tree) => {
                    match cli.format {
                        Format::Text => {
                            println!("valid");
                            if cli.emit_proof {
                                print!("{}", render_proof_text(&tree));
                            }
                        }
                        Format::Json => {
                            let mut out = json!({"result": "valid"});
                            if cli.emit_proof {
                                out["proof"] = tree.to_json();
                            }
                            println!("{out}");
                        }
                        Format::Dot => println!("{}", render_proof_dot(&tree)),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                ProofResult::Refuted { model, interp, .. } => {
                    let world = interp[&Label(0)];
                    emit_countermodel(cli.format, "refuted", &model, world);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Countermodel { formula } => {
            let f = parse_formula(formula)?;
            match prove_formula(&f) {
                ProofResult::Proved(_) => {
                    match cli.format {
                        Format::Text => println!("valid: no countermodel exists"),
                        Format::Json => println!("{}", json!({"result": "valid"})),
                        Format::Dot => println!("digraph valid {{}}"),
                    }
                    Ok(ExitCode::from(1))
                }
                ProofResult::Refuted { model, interp, .. } => {
                    let world = interp[&Label(0)];
                    emit_countermodel(cli.format, "countermodel", &model, world);
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Interpolate { phi, psi } => {
            let phi = parse_formula(phi)?;
            let psi = parse_formula(psi)?;
            match interpolate(&phi, &psi) {
                Ok(report) => {
                    if !report.all_ok() {
                        return Err(format!(
                            "internal error: interpolant verification failed: {}",
                            report.to_json()
                        ));
                    }
                    match cli.format {
                        Format::Text => {
                            println!("interpolant: {}", report.interpolant);
                            println!("preRepair: {}", report.pre_repair_interpolant);
                            println!("checks: all passed");
                        }
                        Format::Json => println!("{}", report.to_json()),
                        Format::Dot => unreachable!("rejected above"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(err) => match countermodel_of(&err) {
                    Some((model, world)) => {
                        emit_countermodel(cli.format, "refuted", model, world);
                        Ok(ExitCode::from(1))
                    }
                    None => Err(err.to_string()),
                },
            }
        }
        Command::Checkmodel {
            model,
            world,
            formula,
        } => {
            let f = parse_formula(formula)?;
            let text = std::fs::read_to_string(model)
                .map_err(|e| format!("cannot read {}: {e}", model.display()))?;
            let m: KripkeModel =
                serde_json::from_str(&text).map_err(|e| format!("invalid model JSON: {e}"))?;
            let violations = m.verify();
            if !violations.is_empty() {
                return Err(format!("invalid model: {}", violations.join("; ")));
            }
            let value = m
                .eval(*world, &f)
                .map_err(|e| e.to_string())?;
            match cli.format {
                Format::Text => println!("{value}"),
                Format::Json => println!("{}", json!({"value": value})),
                Format::Dot => unreachable!("rejected above"),
            }
            Ok(if value {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Selftest => {
            let seed = cli.seed.unwrap_or(0);
            let results = run_selftest(seed, cli.oracle_worlds);
            let all_passed = results.iter().all(|r| r.passed);
            match cli.format {
                Format::Json => {
                    let entries: Vec<_> = results
                        .iter()
                        .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
                        .collect();
                    println!("{}", json!({"seed": seed, "checks": entries, "passed": all_passed}));
                }
                _ => {
                    for r in &results {
                        if r.passed {
                            println!("PASS {}", r.name);
                        } else {
                            println!("FAIL {} ({})", r.name, r.detail);
                        }
                    }
                }
            }
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn parse_formula(text: &str) -> Result<Formula, String> {
    parse_nnf(text).map_err(|e| e.to_string())
}

fn emit_countermodel(format: Format, tag: &str, model: &KripkeModel, world: WorldId) {
    match format {
        Format::Text => {
            println!("{tag}: falsified at world {world}");
            println!(
                "{}",
                serde_json::to_string(model).expect("model serializes")
            );
        }
        Format::Json => {
            let model_json = serde_json::to_value(model).expect("model serializes");
            println!("{}", json!({"result": tag, "world": world, "model": model_json}));
        }
        Format::Dot => println!("{}", render_model_dot(model)),
    }
}

fn render_proof_text(tree: &ProofTree) -> String {
    fn walk(t: &ProofTree, depth: usize, out: &mut String) {
        let indent = "  ".repeat(depth);
        let rule = match &t.step {
            ProofStep::Saturated => "saturated".to_string(),
            ProofStep::Axiom(r) | ProofStep::Rule(r, _) => {
                let shape = r
                    .shape
                    .map(|s| format!(" {}", s.as_str()))
                    .unwrap_or_default();
                format!("{}{} ({})", r.name.as_str(), shape, r.side.tag())
            }
        };
        out.push_str(&format!("{indent}{} [{rule}]\n", t.sequent));
        if let ProofStep::Rule(_, children) = &t.step {
            for c in children {
                walk(c, depth + 1, out);
            }
        }
    }
    let mut out = String::new();
    walk(tree, 0, &mut out);
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render_proof_dot(tree: &ProofTree) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=box];\n");
    let mut next = 0usize;
    fn walk(t: &ProofTree, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        out.push_str(&format!("  n{id} [label=\"{}\"];\n", dot_escape(&t.sequent.to_string())));
        match &t.step {
            ProofStep::Saturated => {
                out.push_str(&format!("  n{id} [style=dashed];\n"));
            }
            ProofStep::Axiom(r) => {
                out.push_str(&format!(
                    "  n{id} [xlabel=\"{}\"];\n",
                    dot_escape(r.name.as_str())
                ));
            }
            ProofStep::Rule(r, children) => {
                for c in children {
                    let cid = walk(c, next, out);
                    out.push_str(&format!(
                        "  n{id} -> n{cid} [label=\"{}\"];\n",
                        dot_escape(r.name.as_str())
                    ));
                }
            }
        }
        id
    }
    walk(tree, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn render_model_dot(model: &KripkeModel) -> String {
    let mut out = String::from("digraph model {\n  node [shape=circle];\n");
    for &w in &model.worlds {
        let truths: Vec<String> = model
            .valuation
            .iter()
            .filter(|(_, ws)| ws.contains(&w))
            .map(|(a, _)| a.0.clone())
            .collect();
        out.push_str(&format!("  w{w} [label=\"{w}: {}\"];\n", truths.join(",")));
    }
    for (agent, blocks) in &model.relations {
        for block in blocks {
            let sorted: BTreeSet<WorldId> = block.iter().copied().collect();
            let items: Vec<WorldId> = sorted.into_iter().collect();
            for pair in items.windows(2) {
                out.push_str(&format!(
                    "  w{} -> w{} [dir=none, label=\"{}\"];\n",
                    pair[0], pair[1], agent.0
                ));
            }
        }
    }
    out.push_str("}\n");
    out
}
