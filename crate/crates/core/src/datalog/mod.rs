//! Positive Datalog: programs, parsing, and minimal-model evaluation.

mod eval;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relmodel::{Atom, Constant, Predicate};

pub(crate) use eval::{fixpoint, AtomRef};
pub use parse::{parse_program, parse_rules};

/// An answer tuple; empty for the `yes` answer of a boolean query.
pub type Answer = Vec<Constant>;

pub fn format_answer(answer: &[Constant]) -> String {
    if answer.is_empty() {
        "yes".to_string()
    } else {
        let parts: Vec<String> = answer.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        Variable(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Variable),
    Const(Constant),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Variable::new(name))
    }

    pub fn constant(value: &str) -> Term {
        Term::Const(Constant::new(value))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => c.fmt_in_program(f),
        }
    }
}

/// A (possibly non-ground) atom occurring in a rule.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub predicate: Predicate,
    pub terms: Vec<Term>,
}

impl Literal {
    pub fn new(predicate: impl Into<Predicate>, terms: impl IntoIterator<Item = Term>) -> Self {
        Literal {
            predicate: predicate.into(),
            terms: terms.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.terms.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.terms.iter().filter_map(Term::as_var)
    }

    pub fn from_atom(atom: &Atom) -> Literal {
        Literal {
            predicate: atom.predicate.clone(),
            terms: atom.args.iter().cloned().map(Term::Const).collect(),
        }
    }

    fn substitute(&self, binding: &BTreeMap<Variable, Constant>) -> Literal {
        Literal {
            predicate: self.predicate.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| match t {
                    Term::Var(v) => binding.get(v).cloned().map_or_else(|| t.clone(), Term::Const),
                    Term::Const(_) => t.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.terms.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A positive rule `head :- body`, safe by construction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    head: Literal,
    body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Literal, body: Vec<Literal>) -> Result<Self> {
        let rule = Rule { head, body };
        if rule.body.is_empty() {
            return Err(Error::EmptyBody(rule.to_string()));
        }
        let body_vars: HashSet<&Variable> = rule.body.iter().flat_map(Literal::variables).collect();
        if let Some(v) = rule.head.variables().find(|v| !body_vars.contains(v)) {
            return Err(Error::UnsafeRule {
                variable: v.to_string(),
                rule: rule.to_string(),
            });
        }
        Ok(rule)
    }

    pub fn head(&self) -> &Literal {
        &self.head
    }

    pub fn body(&self) -> &[Literal] {
        &self.body
    }

    pub fn body_variables(&self) -> BTreeSet<&Variable> {
        self.body.iter().flat_map(Literal::variables).collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

/// A positive Datalog program with a distinguished answer predicate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    rules: Vec<Rule>,
    answer: Predicate,
    answer_arity: usize,
}

impl Program {
    /// Builds a program; duplicate rules are dropped, keeping first occurrences.
    pub fn new(rules: impl IntoIterator<Item = Rule>, answer: impl Into<Predicate>) -> Result<Self> {
        let answer = answer.into();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for rule in rules {
            if seen.insert(rule.clone()) {
                kept.push(rule);
            }
        }
        let mut arities: BTreeMap<&Predicate, usize> = BTreeMap::new();
        for lit in kept.iter().flat_map(|r| std::iter::once(&r.head).chain(&r.body)) {
            match arities.get(&lit.predicate) {
                Some(&a) if a != lit.arity() => {
                    return Err(Error::ArityConflict {
                        predicate: lit.predicate.clone(),
                        expected: a,
                        found: lit.arity(),
                    })
                }
                Some(_) => {}
                None => {
                    arities.insert(&lit.predicate, lit.arity());
                }
            }
        }
        let answer_arity = kept
            .iter()
            .find(|r| r.head.predicate == answer)
            .map(|r| r.head.arity())
            .ok_or(Error::NoAnswerRule)?;
        Ok(Program {
            rules: kept,
            answer,
            answer_arity,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_program(text)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn answer_predicate(&self) -> &Predicate {
        &self.answer
    }

    pub fn answer_arity(&self) -> usize {
        self.answer_arity
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_arity == 0
    }

    /// Predicates defined by some rule.
    pub fn intensional_predicates(&self) -> BTreeSet<&Predicate> {
        self.rules.iter().map(|r| &r.head.predicate).collect()
    }

    pub fn predicates(&self) -> BTreeSet<&Predicate> {
        self.rules
            .iter()
            .flat_map(|r| std::iter::once(&r.head).chain(&r.body))
            .map(|l| &l.predicate)
            .collect()
    }

    /// A predicate name starting with `base` that no rule mentions.
    pub fn fresh_predicate(&self, base: &str) -> Predicate {
        let used = self.predicates();
        let mut name = base.to_string();
        while used.iter().any(|p| p.name() == name) {
            name.push('_');
        }
        Predicate::new(name)
    }

    /// Returns the program extended with `rules`, answering through `answer`.
    pub fn extended(&self, rules: impl IntoIterator<Item = Rule>, answer: Predicate) -> Result<Self> {
        Program::new(self.rules.iter().cloned().chain(rules), answer)
    }

    /// A boolean program that is true exactly when `answer` is an answer of `self`.
    ///
    /// When the answer predicate is not used recursively, the answer constants are
    /// pushed into the defining rules; otherwise a fresh propositional rule over
    /// the answer atom is added.
    pub fn specialize(&self, answer: &[Constant]) -> Result<Program> {
        if answer.len() != self.answer_arity {
            return Err(Error::AnswerArity {
                expected: self.answer_arity,
                found: answer.len(),
            });
        }
        if self.is_boolean() {
            return Ok(self.clone());
        }
        let fresh = self.fresh_predicate("ans");
        let recursive = self
            .rules
            .iter()
            .any(|r| r.body.iter().any(|l| l.predicate == self.answer));
        if !recursive {
            let mut rules = Vec::new();
            for rule in &self.rules {
                if rule.head.predicate != self.answer {
                    rules.push(rule.clone());
                    continue;
                }
                if let Some(binding) = bind_head(&rule.head, answer) {
                    let body = rule.body.iter().map(|l| l.substitute(&binding)).collect();
                    rules.push(Rule::new(Literal::new(fresh.clone(), []), body)?);
                }
            }
            if rules.iter().any(|r| r.head.predicate == fresh) {
                return Program::new(rules, fresh);
            }
        }
        let goal = Literal::new(self.answer.clone(), answer.iter().cloned().map(Term::Const));
        self.extended([Rule::new(Literal::new(fresh.clone(), []), vec![goal])?], fresh)
    }
}

fn bind_head(head: &Literal, answer: &[Constant]) -> Option<BTreeMap<Variable, Constant>> {
    let mut binding = BTreeMap::new();
    for (term, value) in head.terms.iter().zip(answer) {
        match term {
            Term::Const(c) if c != value => return None,
            Term::Const(_) => {}
            Term::Var(v) => match binding.get(v) {
                Some(bound) if bound != value => return None,
                Some(_) => {}
                None => {
                    binding.insert(v.clone(), value.clone());
                }
            },
        }
    }
    Some(binding)
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_program(s)
    }
}

/// The extension of the answer predicate in the minimal model.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AnswerSet {
    pub tuples: BTreeSet<Answer>,
    pub truth: bool,
}

impl AnswerSet {
    pub fn contains(&self, answer: &[Constant]) -> bool {
        self.tuples.contains(answer)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Evaluates `program` over `facts` by semi-naive fixpoint iteration and
/// returns the answer relation.
pub fn evaluate<'a>(program: &Program, facts: impl IntoIterator<Item = &'a Atom>) -> Result<AnswerSet> {
    let model = fixpoint(program, facts)?;
    let tuples: BTreeSet<Answer> = model.tuples(program.answer_predicate()).cloned().collect();
    Ok(AnswerSet {
        truth: !tuples.is_empty(),
        tuples,
    })
}

/// Whether `answer` belongs to the evaluation of `program` over `facts`.
pub fn holds<'a>(
    program: &Program,
    facts: impl IntoIterator<Item = &'a Atom>,
    answer: &[Constant],
) -> Result<bool> {
    if answer.len() != program.answer_arity() {
        return Err(Error::AnswerArity {
            expected: program.answer_arity(),
            found: answer.len(),
        });
    }
    let model = fixpoint(program, facts)?;
    Ok(model.contains(&Atom::new(program.answer_predicate().clone(), answer.iter().cloned())))
}
