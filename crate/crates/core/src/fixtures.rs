//! Worked examples and seeded random generators shared by tests, the
//! acceptance suite and the command-line cross-check.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::abduction::AbductionProblem;
use crate::datalog::{evaluate, parse_rules, Answer, Program};
use crate::relmodel::{parse_constants, Atom, Constant, Instance, Predicate};

fn atoms(facts: &[&str]) -> Vec<Atom> {
    facts.iter().map(|f| f.parse().expect("fixture fact")).collect()
}

const AUTHORS: [&str; 4] = [
    "Author(Joe,TKDE)",
    "Author(John,TKDE)",
    "Author(Tom,TKDE)",
    "Author(John,TODS)",
];

const JOURNALS: [&str; 3] = ["Journal(TKDE,XML,30)", "Journal(TKDE,CUBE,31)", "Journal(TODS,XML,32)"];

/// `Ans(N,T) :- Author(N,J), Journal(J,T,P).`
pub fn author_journal_query() -> Program {
    Program::parse("Ans(N,T) :- Author(N,J), Journal(J,T,P).").expect("fixture program")
}

/// The author/journal tables with every tuple endogenous.
pub fn author_journal_instance() -> Instance {
    Instance::all_endogenous(atoms(&AUTHORS).into_iter().chain(atoms(&JOURNALS))).expect("fixture instance")
}

/// The author/journal tables with the journal tuples exogenous.
pub fn author_journal_instance_with_exogenous_journals() -> Instance {
    Instance::new(atoms(&AUTHORS), atoms(&JOURNALS)).expect("fixture instance")
}

/// Parses a comma-separated answer tuple.
pub fn answer(text: &str) -> Answer {
    parse_constants(text).expect("fixture answer")
}

/// `ans :- R(X,Y), S(Y).`
pub fn boolean_join_query() -> Program {
    Program::parse("ans :- R(X,Y), S(Y).").expect("fixture program")
}

pub fn boolean_join_instance() -> Instance {
    Instance::all_endogenous(atoms(&["R(a1,a4)", "R(a2,a1)", "R(a3,a3)", "S(a1)", "S(a2)", "S(a3)"]))
        .expect("fixture instance")
}

/// A guarded boolean program over the author/journal database, with a single
/// flag hypothesis.
pub fn flagged_journal_problem() -> AbductionProblem {
    let program = Program::parse("ans :- Journal(J,T,P), Flag(J).").expect("fixture program");
    let edb = atoms(&AUTHORS).into_iter().chain(atoms(&JOURNALS));
    AbductionProblem::new(program, edb, atoms(&["Flag(TKDE)"]), atoms(&["ans"])).expect("fixture problem")
}

/// A query, an instance and one of its answers.
#[derive(Clone, Debug)]
pub struct RandomCase {
    pub program: Program,
    pub instance: Instance,
    pub answer: Answer,
}

pub const MAX_RANDOM_FACTS: usize = 12;
pub const MAX_RANDOM_ENDOGENOUS: usize = 10;

const DOMAIN: [&str; 3] = ["a", "b", "c"];
const SCHEMA: [(&str, usize); 4] = [("R", 2), ("S", 1), ("T", 2), ("U", 1)];

fn ground_atoms(schema: &[(&str, usize)], domain: &[&str]) -> Vec<Atom> {
    let mut out = Vec::new();
    for &(name, arity) in schema {
        let mut digits = vec![0usize; arity];
        loop {
            out.push(Atom::new(
                Predicate::new(name),
                digits.iter().map(|&d| Constant::new(domain[d])),
            ));
            let Some(pos) = (0..arity).rev().find(|&p| digits[p] + 1 < domain.len()) else {
                break;
            };
            digits[pos] += 1;
            digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        }
    }
    out
}

/// Random facts from `pool`, split into sections with at most
/// `MAX_RANDOM_ENDOGENOUS` endogenous tuples.
fn random_instance<R: Rng>(rng: &mut R, pool: &[Atom], max_facts: usize) -> Instance {
    let count = rng.gen_range(2..=max_facts.min(pool.len()));
    let facts: Vec<Atom> = pool.choose_multiple(rng, count).cloned().collect();
    let mut builder = Instance::builder();
    let mut endogenous = 0;
    for fact in facts {
        if endogenous < MAX_RANDOM_ENDOGENOUS && rng.gen_bool(0.75) {
            endogenous += 1;
            builder.endogenous(fact).expect("distinct facts");
        } else {
            builder.exogenous(fact).expect("distinct facts");
        }
    }
    builder.build()
}

fn term<R: Rng>(rng: &mut R, vars: &[&str]) -> String {
    if rng.gen_bool(0.1) {
        DOMAIN.choose(rng).expect("domain").to_string()
    } else {
        vars.choose(rng).expect("variables").to_string()
    }
}

/// A rule body over `schema` and its variables in order of first occurrence.
fn random_body<R: Rng>(rng: &mut R, schema: &[(&str, usize)], atoms: usize) -> (Vec<String>, Vec<String>) {
    let vars = ["X", "Y", "Z"];
    let mut body = Vec::new();
    let mut seen = Vec::new();
    for _ in 0..atoms {
        let (name, arity) = *schema.choose(rng).expect("schema");
        let args: Vec<String> = (0..arity).map(|_| term(rng, &vars)).collect();
        for a in &args {
            if vars.contains(&a.as_str()) && !seen.contains(a) {
                seen.push(a.clone());
            }
        }
        body.push(format!("{name}({})", args.join(",")));
    }
    (body, seen)
}

fn head(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(","))
    }
}

fn random_head_vars<R: Rng>(rng: &mut R, vars: &[String], arity: usize) -> Option<Vec<String>> {
    (vars.len() >= arity).then(|| vars.choose_multiple(rng, arity).cloned().collect())
}

/// A conjunctive query, a union of two, a recursive program or a two-level
/// program with an intermediate view.
fn random_program<R: Rng>(rng: &mut R) -> Program {
    loop {
        let arity = rng.gen_range(0..=2);
        let answer = if arity == 0 { "ans" } else { "Ans" };
        let text = match rng.gen_range(0..4) {
            0 => {
                let size = rng.gen_range(1..=3);
                let (body, vars) = random_body(rng, &SCHEMA, size);
                let Some(h) = random_head_vars(rng, &vars, arity) else { continue };
                format!("{} :- {}.", head(answer, &h), body.join(", "))
            }
            1 => {
                let mut rules = Vec::new();
                for _ in 0..2 {
                    let size = rng.gen_range(1..=2);
                    let (body, vars) = random_body(rng, &SCHEMA, size);
                    let Some(h) = random_head_vars(rng, &vars, arity) else { break };
                    rules.push(format!("{} :- {}.", head(answer, &h), body.join(", ")));
                }
                if rules.len() < 2 {
                    continue;
                }
                rules.join("\n")
            }
            2 => {
                let edge = *["R", "T"].choose(rng).expect("edge predicate");
                let closure = format!("P(X,Y) :- {edge}(X,Y).\nP(X,Y) :- P(X,Z), {edge}(Z,Y).");
                let top = match arity {
                    0 => "ans :- P(X,X).".to_string(),
                    1 => "Ans(X) :- P(X,Y), S(Y).".to_string(),
                    _ => "Ans(X,Y) :- P(X,Y).".to_string(),
                };
                format!("{closure}\n{top}")
            }
            _ => {
                let size = rng.gen_range(1..=2);
                let (view_body, view_vars) = random_body(rng, &SCHEMA, size);
                let Some(view_head) = random_head_vars(rng, &view_vars, 1) else { continue };
                let schema = [("V", 1), ("R", 2), ("S", 1), ("T", 2)];
                let mut body = vec![format!("V({})", term(rng, &["X", "Y"]))];
                let extra = rng.gen_range(0..=1);
                let (more, _) = random_body(rng, &schema, extra);
                body.extend(more);
                let vars: Vec<String> = ["X", "Y", "Z"]
                    .iter()
                    .filter(|v| body.iter().any(|b| b.contains(*v)))
                    .map(|v| v.to_string())
                    .collect();
                let Some(h) = random_head_vars(rng, &vars, arity) else { continue };
                format!(
                    "{} :- {}.\n{} :- {}.",
                    head("V", &view_head),
                    view_body.join(", "),
                    head(answer, &h),
                    body.join(", ")
                )
            }
        };
        if let Ok(program) = parse_rules(&text).and_then(|rules| Program::new(rules, answer)) {
            return program;
        }
    }
}

/// A random program and instance with at least one answer, and one answer
/// drawn uniformly from the result.
pub fn random_case<R: Rng>(rng: &mut R) -> RandomCase {
    let pool = ground_atoms(&SCHEMA, &DOMAIN);
    loop {
        let program = random_program(rng);
        let instance = random_instance(rng, &pool, MAX_RANDOM_FACTS);
        let answers = evaluate(&program, instance.atoms()).expect("random programs evaluate");
        let tuples: Vec<Answer> = answers.tuples.into_iter().collect();
        if let Some(answer) = tuples.choose(rng) {
            return RandomCase {
                answer: answer.clone(),
                program,
                instance,
            };
        }
    }
}

/// A random self-join-free linear conjunctive query with an answer over at
/// most `MAX_RANDOM_FACTS` facts; body atoms are shuffled so the linear order
/// has to be discovered.
pub fn random_linear_case<R: Rng>(rng: &mut R) -> RandomCase {
    loop {
        let atoms = rng.gen_range(1..=4);
        let mut open: Vec<String> = Vec::new();
        let mut fresh = 0;
        let mut body: Vec<(String, Vec<String>)> = Vec::new();
        let mut all_vars = Vec::new();
        for i in 0..atoms {
            let mut args: Vec<String> = open.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
            let new = rng.gen_range(usize::from(args.is_empty())..=2).min(3 - args.len().min(3));
            for _ in 0..new {
                let v = format!("V{fresh}");
                fresh += 1;
                all_vars.push(v.clone());
                args.push(v);
            }
            if args.is_empty() || args.len() > 3 {
                args.truncate(3);
                if args.is_empty() {
                    continue;
                }
            }
            open = args.clone();
            body.push((format!("P{i}"), args));
        }
        if body.is_empty() {
            continue;
        }
        let schema: Vec<(String, usize)> = body.iter().map(|(p, a)| (p.clone(), a.len())).collect();
        body.shuffle(rng);
        let answer_vars: Vec<String> = if rng.gen_bool(0.5) {
            Vec::new()
        } else {
            vec![all_vars.choose(rng).expect("variables").clone()]
        };
        let answer = if answer_vars.is_empty() { "ans" } else { "Ans" };
        let text = format!(
            "{} :- {}.",
            head(answer, &answer_vars),
            body.iter()
                .map(|(p, a)| format!("{p}({})", a.join(",")))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let program = Program::parse(&text).expect("generated linear query");
        let schema: Vec<(&str, usize)> = schema.iter().map(|(p, a)| (p.as_str(), *a)).collect();
        let pool = ground_atoms(&schema, &DOMAIN[..2]);
        let instance = random_instance(rng, &pool, MAX_RANDOM_FACTS);
        let answers = evaluate(&program, instance.atoms()).expect("linear query evaluates");
        let tuples: Vec<Answer> = answers.tuples.into_iter().collect();
        if let Some(answer) = tuples.choose(rng) {
            return RandomCase {
                answer: answer.clone(),
                program,
                instance,
            };
        }
    }
}

/// A program with a pair of fact sets, the first contained in the second.
#[derive(Clone, Debug)]
pub struct MonotonicityPair {
    pub program: Program,
    pub smaller: BTreeSet<Atom>,
    pub larger: BTreeSet<Atom>,
}

pub fn random_monotonicity_pair<R: Rng>(rng: &mut R) -> MonotonicityPair {
    let pool = ground_atoms(&SCHEMA, &DOMAIN);
    let program = random_program(rng);
    let count = rng.gen_range(0..=14);
    let larger: BTreeSet<Atom> = pool.choose_multiple(rng, count).cloned().collect();
    let smaller = larger.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    MonotonicityPair {
        program,
        smaller,
        larger,
    }
}

/// The abduction problem asking which endogenous tuples explain the answer
/// atom of a random case, with the exogenous tuples as database.
pub fn abduction_of_case(case: &RandomCase) -> AbductionProblem {
    let observation = Atom::new(case.program.answer_predicate().clone(), case.answer.iter().cloned());
    AbductionProblem::new(
        case.program.clone(),
        case.instance.exogenous().iter().cloned(),
        case.instance.endogenous().iter().cloned(),
        [observation],
    )
    .expect("the answer is entailed by the whole instance")
}

/// Propositional Horn abduction with bodies of at most three atoms, encoded
/// as one fixed recursive program over facts describing the clauses.
///
/// A clause `x0 <- x1, x2, x3` becomes the fact `r(x0,x1,x2,x3)`, with short
/// bodies padded by the always-true atom `true`; hypothesis `x` becomes the
/// candidate fact `h(x)` and the observation is `t(o)`.
#[derive(Debug)]
pub struct HornGadget {
    pub clauses: Vec<(String, Vec<String>)>,
    pub hypotheses: Vec<String>,
    pub observation: String,
    pub problem: AbductionProblem,
}

pub const HORN_TRUE: &str = "true";

impl HornGadget {
    pub fn program() -> Program {
        let rules = parse_rules(
            "t(X) :- top(X).\n\
             t(X) :- h(X).\n\
             t(X0) :- t(X1), t(X2), t(X3), r(X0,X1,X2,X3).",
        )
        .expect("gadget rules");
        Program::new(rules, "t").expect("gadget program")
    }

    /// Builds the gadget for a clause list; `None` when the observation does
    /// not follow from all hypotheses together.
    pub fn new(clauses: Vec<(String, Vec<String>)>, hypotheses: Vec<String>, observation: &str) -> Option<Self> {
        let mut edb = vec![Atom::from_strs("top", &[HORN_TRUE])];
        for (headv, body) in &clauses {
            let mut args = vec![headv.as_str()];
            args.extend(body.iter().map(String::as_str));
            args.resize(4, HORN_TRUE);
            edb.push(Atom::from_strs("r", &args));
        }
        let hyps = hypotheses.iter().map(|x| Atom::from_strs("h", &[x]));
        let problem =
            AbductionProblem::new(Self::program(), edb, hyps, [Atom::from_strs("t", &[observation])]).ok()?;
        Some(HornGadget {
            clauses,
            hypotheses,
            observation: observation.to_string(),
            problem,
        })
    }

    /// A random instance over `variables` propositional variables.
    pub fn random<R: Rng>(rng: &mut R, variables: usize, clauses: usize, hypotheses: usize) -> Self {
        let names: Vec<String> = (0..variables).map(|i| format!("x{i}")).collect();
        loop {
            let clause_list: Vec<(String, Vec<String>)> = (0..clauses)
                .map(|_| {
                    let len = rng.gen_range(1..=3);
                    let body = names.choose_multiple(rng, len).cloned().collect();
                    (names.choose(rng).expect("variables").clone(), body)
                })
                .collect();
            let hyps: Vec<String> = names.choose_multiple(rng, hypotheses.min(variables)).cloned().collect();
            let observation = names.choose(rng).expect("variables").clone();
            if hyps.contains(&observation) {
                continue;
            }
            if let Some(gadget) = HornGadget::new(clause_list, hyps, &observation) {
                return gadget;
            }
        }
    }

    fn closure(&self, assumed: &[&String]) -> BTreeSet<String> {
        let mut known: BTreeSet<String> = assumed.iter().map(|s| s.to_string()).collect();
        loop {
            let before = known.len();
            for (headv, body) in &self.clauses {
                if body.iter().all(|b| known.contains(b)) {
                    known.insert(headv.clone());
                }
            }
            if known.len() == before {
                return known;
            }
        }
    }

    /// Relevant hypotheses by enumerating every subset of hypotheses
    /// directly on the propositional clauses.
    pub fn relevant_by_enumeration(&self) -> BTreeSet<String> {
        let n = self.hypotheses.len();
        let explains = |mask: usize| {
            let chosen: Vec<&String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| &self.hypotheses[i]).collect();
            self.closure(&chosen).contains(&self.observation)
        };
        let mut relevant = BTreeSet::new();
        for mask in 0..1usize << n {
            let minimal = explains(mask) && (0..n).filter(|i| mask >> i & 1 == 1).all(|i| !explains(mask & !(1 << i)));
            if minimal {
                relevant.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.hypotheses[i].clone()));
            }
        }
        relevant
    }
}
