//! `causalog`: causes, abductive diagnoses and deletion plans for Datalog
//! query answers, reported as JSON on standard output.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use causalog_core::abduction::{cdap_of, AbductionProblem, DEFAULT_OBSERVATION_BOUND};
use causalog_core::causality::{CauseQuery, ResponsibilityThreshold};
use causalog_core::crosscheck::crosscheck;
use causalog_core::datalog::{evaluate, Answer, Program};
use causalog_core::delprop::{DeletionKind, DeletionTask, Scope};
use causalog_core::flownet::query_shape;
use causalog_core::oracle::OracleBudget;
use causalog_core::relmodel::{parse_constants, parse_instance};
use causalog_core::treewidth::{hypergraph_of, is_guarded, tree_decomposition, DecompositionMode};
use causalog_core::{Atom, Instance};

use report::{atom_list, atom_sets, Digest};

#[derive(Parser)]
#[command(name = "causalog", version, about = "Causality, abduction and delete propagation for Datalog queries")]
struct Cli {
    /// Add wall-clock timing to the report.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QueryInputs {
    /// Instance file (`.cdb`).
    #[arg(long)]
    db: PathBuf,
    /// Program file (`.dl`).
    #[arg(long)]
    query: PathBuf,
    /// Comma-separated answer tuple; may be omitted for boolean programs.
    #[arg(long)]
    answer: Option<String>,
}

#[derive(Args)]
struct AbductionInputs {
    /// Program file (`.dl`).
    #[arg(long)]
    query: PathBuf,
    /// Instance whose exogenous tuples are the database, whose endogenous
    /// tuples are the hypotheses and whose observation is the boolean answer.
    #[arg(long, conflicts_with_all = ["edb", "hyps", "obs"])]
    db: Option<PathBuf>,
    /// Extensional database file.
    #[arg(long, requires_all = ["hyps", "obs"])]
    edb: Option<PathBuf>,
    /// Hypotheses file.
    #[arg(long)]
    hyps: Option<PathBuf>,
    /// Observed ground atom; repeat for a conjunction.
    #[arg(long)]
    obs: Vec<String>,
    /// Largest accepted number of observed atoms.
    #[arg(long, default_value_t = DEFAULT_OBSERVATION_BOUND)]
    observation_bound: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Minimal,
    Minimum,
    ViewSafe,
}

impl From<KindArg> for DeletionKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Minimal => DeletionKind::MinimalSourceSideEffect,
            KindArg::Minimum => DeletionKind::MinimumSourceSideEffect,
            KindArg::ViewSafe => DeletionKind::ViewSideEffectFree,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Actual causes with their minimal contingency sets and responsibilities.
    Causes(QueryInputs),
    /// Responsibility of one tuple, optionally compared with a threshold.
    Responsibility {
        #[command(flatten)]
        inputs: QueryInputs,
        #[arg(long)]
        tuple: String,
        /// Threshold `0` or `1/k`; the report says whether it is exceeded.
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Most responsible causes.
    Mrc(QueryInputs),
    /// View-conditioned causes.
    VcCauses(QueryInputs),
    /// Abductive diagnoses.
    Abduce(AbductionInputs),
    /// Relevant hypotheses, or whether one hypothesis is relevant.
    Relevance {
        #[command(flatten)]
        inputs: AbductionInputs,
        #[arg(long)]
        hypothesis: Option<String>,
    },
    /// Minimal sets of hypotheses whose removal leaves no diagnosis.
    NecessarySets(AbductionInputs),
    /// Source deletions removing an answer.
    Delprop {
        #[command(flatten)]
        inputs: QueryInputs,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Delete endogenous tuples only.
        #[arg(long)]
        endogenous_only: bool,
    },
    /// Tree decomposition of the instance hypergraph.
    Treewidth {
        #[arg(long)]
        db: PathBuf,
        /// Exact tree-width by dynamic programming (small hypergraphs only).
        #[arg(long)]
        exact: bool,
    },
    /// Linearity, chain-join shape and guardedness of a program.
    Shape {
        #[arg(long)]
        query: PathBuf,
    },
    /// Compare solvers, brute-force oracles and reductions on one answer.
    Crosscheck {
        #[command(flatten)]
        inputs: QueryInputs,
        /// Picks the answer when none is given.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Causes(_) => "causes",
            Command::Responsibility { .. } => "responsibility",
            Command::Mrc(_) => "mrc",
            Command::VcCauses(_) => "vc-causes",
            Command::Abduce(_) => "abduce",
            Command::Relevance { .. } => "relevance",
            Command::NecessarySets(_) => "necessary-sets",
            Command::Delprop { .. } => "delprop",
            Command::Treewidth { .. } => "treewidth",
            Command::Shape { .. } => "shape",
            Command::Crosscheck { .. } => "crosscheck",
        }
    }
}

/// Failures, by exit code.
enum Failure {
    /// Unreadable or malformed input: exit 2.
    Input(String),
    /// Well-formed input the solvers reject: exit 1.
    Domain(String),
}

impl From<causalog_core::Error> for Failure {
    fn from(e: causalog_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn parse_input<T>(what: &str, result: causalog_core::Result<T>) -> Outcome<T> {
    result.map_err(|e| Failure::Input(format!("{what}: {e}")))
}

fn read(path: &Path, digest: &mut Digest) -> Outcome<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    digest.add(path, &text);
    Ok(text)
}

fn load_instance(path: &Path, digest: &mut Digest) -> Outcome<Instance> {
    let text = read(path, digest)?;
    parse_input(&path.display().to_string(), parse_instance(&text))
}

fn load_program(path: &Path, digest: &mut Digest) -> Outcome<Program> {
    let text = read(path, digest)?;
    parse_input(&path.display().to_string(), Program::parse(&text))
}

fn parse_atom(text: &str) -> Outcome<Atom> {
    parse_input(&format!("atom `{text}`"), text.parse())
}

fn load_answer(program: &Program, text: Option<&str>) -> Outcome<Answer> {
    match text {
        Some(t) if t.trim().is_empty() || t.trim() == "yes" => Ok(Vec::new()),
        Some(t) => parse_input("--answer", parse_constants(t)),
        None if program.is_boolean() => Ok(Vec::new()),
        None => Err(Failure::Input("--answer is required for a non-boolean program".into())),
    }
}

fn cause_query(inputs: &QueryInputs, digest: &mut Digest) -> Outcome<CauseQuery> {
    let instance = load_instance(&inputs.db, digest)?;
    let program = load_program(&inputs.query, digest)?;
    let answer = load_answer(&program, inputs.answer.as_deref())?;
    Ok(CauseQuery::new(program, instance, answer)?)
}

fn abduction_problem(inputs: &AbductionInputs, digest: &mut Digest) -> Outcome<AbductionProblem> {
    let program = load_program(&inputs.query, digest)?;
    if let Some(db) = &inputs.db {
        let instance = load_instance(db, digest)?;
        return Ok(cdap_of(&instance, &program)?);
    }
    let (Some(edb), Some(hyps)) = (&inputs.edb, &inputs.hyps) else {
        return Err(Failure::Input("give either --db or --edb, --hyps and --obs".into()));
    };
    let edb = load_instance(edb, digest)?;
    let hyps = load_instance(hyps, digest)?;
    let obs = inputs.obs.iter().map(|o| parse_atom(o)).collect::<Outcome<Vec<_>>>()?;
    Ok(AbductionProblem::with_observation_bound(
        program,
        edb.atoms().cloned(),
        hyps.atoms().cloned(),
        obs,
        inputs.observation_bound,
    )?)
}

fn run(command: &Command, digest: &mut Digest) -> Outcome<Value> {
    match command {
        Command::Causes(inputs) => {
            let q = cause_query(inputs, digest)?;
            Ok(json!({ "causes": report::explanations(&q.actual_causes()) }))
        }
        Command::Responsibility {
            inputs,
            tuple,
            threshold,
        } => {
            let q = cause_query(inputs, digest)?;
            let t = parse_atom(tuple)?;
            let threshold: Option<ResponsibilityThreshold> = threshold
                .as_deref()
                .map(|s| parse_input("--threshold", s.parse()))
                .transpose()?;
            let rho = q.responsibility(&t)?;
            let mut out = json!({ "tuple": t.to_string(), "responsibility": rho.to_string() });
            if let Some(th) = threshold {
                out["threshold"] = json!(th.to_string());
                out["exceeds"] = json!(th.is_exceeded_by(rho));
            }
            Ok(out)
        }
        Command::Mrc(inputs) => {
            let q = cause_query(inputs, digest)?;
            let best = q.most_responsible_causes();
            let rho = best.first().map(|t| q.responsibility(t)).transpose()?;
            Ok(json!({
                "most_responsible_causes": atom_list(&best),
                "responsibility": rho.map(|r| r.to_string()),
            }))
        }
        Command::VcCauses(inputs) => {
            let q = cause_query(inputs, digest)?;
            let causes = q.vc_causes();
            let mut listed = Vec::new();
            for t in &causes {
                listed.push(json!({ "cause": t.to_string(), "contingencies": atom_sets(q.vc_contingencies(t)?) }));
            }
            Ok(json!({ "vc_causes": listed }))
        }
        Command::Abduce(inputs) => {
            let ap = abduction_problem(inputs, digest)?;
            let diagnoses: Vec<_> = ap.diagnoses().into_iter().map(|d| d.delta).collect();
            Ok(json!({ "diagnoses": atom_sets(diagnoses) }))
        }
        Command::Relevance { inputs, hypothesis } => {
            let ap = abduction_problem(inputs, digest)?;
            match hypothesis {
                Some(h) => {
                    let h = parse_atom(h)?;
                    Ok(json!({ "hypothesis": h.to_string(), "relevant": ap.is_relevant(&h)? }))
                }
                None => Ok(json!({ "relevant": atom_list(&ap.relevant_hypotheses()) })),
            }
        }
        Command::NecessarySets(inputs) => {
            let ap = abduction_problem(inputs, digest)?;
            let sets: Vec<_> = ap.necessary_hypothesis_sets().into_iter().map(|n| n.atoms).collect();
            Ok(json!({ "necessary_sets": atom_sets(sets) }))
        }
        Command::Delprop {
            inputs,
            kind,
            endogenous_only,
        } => {
            let instance = load_instance(&inputs.db, digest)?;
            let program = load_program(&inputs.query, digest)?;
            let answer = load_answer(&program, inputs.answer.as_deref())?;
            let scope = if *endogenous_only { Scope::EndogenousOnly } else { Scope::All };
            let kind = DeletionKind::from(*kind);
            let task = DeletionTask::new(instance, program, answer, scope)?;
            let solutions = task.solutions(kind);
            let mut out = json!({
                "kind": kind.to_string(),
                "endogenous_only": endogenous_only,
                "solutions": atom_sets(solutions.into_iter().map(|s| s.deleted)),
            });
            if out["solutions"].as_array().is_some_and(|s| s.is_empty()) {
                out["status"] = json!("no solution");
            }
            Ok(out)
        }
        Command::Treewidth { db, exact } => {
            let instance = load_instance(db, digest)?;
            let h = hypergraph_of(&instance);
            let mode = if *exact { DecompositionMode::Exact } else { DecompositionMode::Heuristic };
            let (td, width) = tree_decomposition(&h, mode)?;
            Ok(json!({
                "width": width.width,
                "is_exact": width.is_exact,
                "bags": td.bags.iter().map(|b| b.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "tree_edges": td.edges,
            }))
        }
        Command::Shape { query } => {
            let program = load_program(query, digest)?;
            let shape = query_shape(&program).ok();
            Ok(json!({
                "single_rule": shape.is_some(),
                "linear": shape.as_ref().map(|s| s.linear),
                "chain_join": shape.as_ref().map(|s| s.chain_join),
                "witness_order": shape.and_then(|s| s.witness_order),
                "guarded": is_guarded(&program),
            }))
        }
        Command::Crosscheck { inputs, seed } => {
            let instance = load_instance(&inputs.db, digest)?;
            let program = load_program(&inputs.query, digest)?;
            let answer = match inputs.answer.as_deref() {
                Some(text) => load_answer(&program, Some(text))?,
                None => {
                    let answers: Vec<Answer> = evaluate(&program, instance.atoms())?.tuples.into_iter().collect();
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    answers
                        .choose(&mut rng)
                        .cloned()
                        .ok_or_else(|| Failure::Domain("the query has no answers".into()))?
                }
            };
            let outcome = crosscheck(&program, &instance, &answer, OracleBudget::from_env())?;
            let failed: Vec<&str> = outcome.failures().map(|c| c.name.as_str()).collect();
            Ok(json!({
                "answer": causalog_core::datalog::format_answer(&answer),
                "verdict": if failed.is_empty() { "agree" } else { "disagree" },
                "failed": failed,
                "checks": outcome.checks.iter().map(|c| {
                    let mut entry = json!({ "name": c.name, "agree": c.agree });
                    if let Some(d) = &c.detail {
                        entry["detail"] = json!(d);
                    }
                    entry
                }).collect::<Vec<_>>(),
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    let mut digest = Digest::default();
    let outcome = run(&cli.command, &mut digest);
    let results = match outcome {
        Ok(results) => results,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(message)) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    };
    let disagree = results["verdict"] == "disagree";
    let arguments: Vec<String> = std::env::args().skip(1).collect();
    let mut document = json!({
        "command": cli.command.name(),
        "arguments": arguments,
        "inputs_digest": digest.finish(),
        "results": results,
    });
    if cli.timing {
        document["timing_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
    }
    let text = serde_json::to_string_pretty(&document).expect("JSON values serialize");
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if disagree {
        eprintln!("error: cross-check found disagreements");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
