//! Brute-force reference implementations.
//!
//! Every function here enumerates subsets of tuples and decides membership by
//! re-evaluating the program from scratch with a deliberately simple naive
//! evaluator that shares no code with the solvers. The only shortcut is
//! monotonicity: a fact set containing one that entails an answer entails it
//! too.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::abduction::{AbductionProblem, Diagnosis};
use crate::causality::{CausalExplanation, CauseQuery, Responsibility};
use crate::datalog::{Answer, Literal, Program, Term, Variable};
use crate::delprop::{DeletionKind, DeletionSolution, DeletionTask};
use crate::error::{Error, Result};
use crate::relmodel::{Atom, Constant};

pub const DEFAULT_ORACLE_BUDGET: usize = 16;
pub const BUDGET_VARIABLE: &str = "CAUSALOG_ORACLE_BUDGET";

/// Largest number of tuples an oracle enumerates subsets of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    max_endogenous: usize,
}

impl OracleBudget {
    /// `None` for a zero budget.
    pub fn new(max_endogenous: usize) -> Option<Self> {
        (max_endogenous >= 1).then_some(OracleBudget { max_endogenous })
    }

    /// The budget from `CAUSALOG_ORACLE_BUDGET`, or the default when it is
    /// unset or not a positive integer.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_VARIABLE)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .and_then(OracleBudget::new)
            .unwrap_or_default()
    }

    pub fn max_endogenous(&self) -> usize {
        self.max_endogenous
    }

    fn admit(&self, found: usize) -> Result<()> {
        // Masks are u32; the cap keeps them in range whatever the budget.
        if found > self.max_endogenous || found > 24 {
            return Err(Error::BudgetExceeded {
                budget: self.max_endogenous,
                found,
            });
        }
        Ok(())
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_endogenous: DEFAULT_ORACLE_BUDGET,
        }
    }
}

type Binding = BTreeMap<Variable, Constant>;

fn unify(lit: &Literal, atom: &Atom, binding: &Binding) -> Option<Binding> {
    if lit.predicate != atom.predicate || lit.terms.len() != atom.args.len() {
        return None;
    }
    let mut out = binding.clone();
    for (term, value) in lit.terms.iter().zip(&atom.args) {
        match term {
            Term::Const(c) if c != value => return None,
            Term::Const(_) => {}
            Term::Var(v) => match out.get(v) {
                Some(bound) if bound != value => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), value.clone());
                }
            },
        }
    }
    Some(out)
}

fn ground(lit: &Literal, binding: &Binding) -> Atom {
    Atom::new(
        lit.predicate.clone(),
        lit.terms.iter().map(|t| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => binding[v].clone(),
        }),
    )
}

/// The least model, by naive iteration of all rules until nothing changes.
pub fn naive_model<'a>(program: &Program, facts: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Atom> {
    let mut model: BTreeSet<Atom> = facts.into_iter().cloned().collect();
    loop {
        let mut derived = Vec::new();
        for rule in program.rules() {
            let mut bindings = vec![Binding::new()];
            for lit in rule.body() {
                bindings = bindings
                    .iter()
                    .flat_map(|b| model.iter().filter_map(move |a| unify(lit, a, b)))
                    .collect();
            }
            derived.extend(bindings.iter().map(|b| ground(rule.head(), b)));
        }
        let before = model.len();
        model.extend(derived);
        if model.len() == before {
            return model;
        }
    }
}

pub fn naive_answers<'a>(program: &Program, facts: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Answer> {
    naive_model(program, facts)
        .into_iter()
        .filter(|a| &a.predicate == program.answer_predicate())
        .map(|a| a.args)
        .collect()
}

/// Subsets of `universe` kept alongside the fixed facts, encoded as masks.
struct Subsets<'a> {
    program: &'a Program,
    fixed: Vec<Atom>,
    universe: Vec<Atom>,
    answers: HashMap<u32, BTreeSet<Answer>>,
}

impl<'a> Subsets<'a> {
    fn new(program: &'a Program, fixed: impl IntoIterator<Item = Atom>, universe: Vec<Atom>) -> Self {
        Subsets {
            program,
            fixed: fixed.into_iter().collect(),
            universe,
            answers: HashMap::new(),
        }
    }

    fn size(&self) -> usize {
        self.universe.len()
    }

    fn full(&self) -> u32 {
        ((1u64 << self.universe.len()) - 1) as u32
    }

    fn members(&self, mask: u32) -> BTreeSet<Atom> {
        (0..self.universe.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.universe[i].clone())
            .collect()
    }

    fn answers(&mut self, mask: u32) -> &BTreeSet<Answer> {
        if !self.answers.contains_key(&mask) {
            let kept = self.members(mask);
            let answers = naive_answers(self.program, self.fixed.iter().chain(&kept));
            self.answers.insert(mask, answers);
        }
        &self.answers[&mask]
    }

    /// Whether each kept subset entails `goal`, indexed by mask.
    fn entailment_table(&mut self, goal: &[Constant]) -> Vec<bool> {
        let n = self.size();
        let mut table = vec![false; 1 << n];
        for mask in 0..1u32 << n {
            let inherited = (0..n).any(|i| mask >> i & 1 == 1 && table[(mask & !(1 << i)) as usize]);
            table[mask as usize] = inherited || self.answers(mask).contains(goal);
        }
        table
    }
}

fn is_subset(a: u32, b: u32) -> bool {
    a & !b == 0
}

/// Masks of `family` with no proper subset in `family`.
fn subset_minimal(family: &[u32]) -> Vec<u32> {
    family
        .iter()
        .copied()
        .filter(|&m| !family.iter().any(|&o| o != m && is_subset(o, m)))
        .collect()
}

fn canonical(mut sets: Vec<BTreeSet<Atom>>) -> Vec<BTreeSet<Atom>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets
}

/// Contingency sets of each endogenous tuple, by enumerating every deletion
/// from the endogenous tuples.
struct CauseEnumeration {
    endogenous: Vec<Atom>,
    /// For each tuple index, every contingency set as a deletion mask.
    contingencies: Vec<Vec<u32>>,
}

fn enumerate_causes(q: &CauseQuery, budget: OracleBudget) -> Result<(CauseEnumeration, Subsets<'_>)> {
    let endogenous: Vec<Atom> = q.instance().endogenous().iter().cloned().collect();
    budget.admit(endogenous.len())?;
    let mut subsets = Subsets::new(q.program(), q.instance().exogenous().iter().cloned(), endogenous.clone());
    let holds = subsets.entailment_table(q.answer());
    let full = subsets.full();
    let n = endogenous.len();
    let mut contingencies = vec![Vec::new(); n];
    for deleted in 0..=full {
        let kept = full & !deleted;
        if !holds[kept as usize] {
            continue;
        }
        for (t, found) in contingencies.iter_mut().enumerate() {
            if kept >> t & 1 == 1 && !holds[(kept & !(1 << t)) as usize] {
                found.push(deleted);
            }
        }
    }
    Ok((CauseEnumeration { endogenous, contingencies }, subsets))
}

/// Causes with their subset-minimal contingency sets and responsibilities,
/// straight from the definitions.
pub fn oracle_causality(q: &CauseQuery, budget: OracleBudget) -> Result<Vec<CausalExplanation>> {
    let (found, subsets) = enumerate_causes(q, budget)?;
    Ok(found
        .endogenous
        .iter()
        .zip(&found.contingencies)
        .filter(|(_, all)| !all.is_empty())
        .map(|(cause, all)| {
            let smallest = all.iter().map(|m| m.count_ones() as usize).min().expect("nonempty");
            CausalExplanation {
                cause: cause.clone(),
                contingencies: canonical(subset_minimal(all).into_iter().map(|m| subsets.members(m)).collect()),
                responsibility: Responsibility::from_contingency_size(smallest),
            }
        })
        .collect())
}

/// Responsibility of every endogenous tuple, zero for non-causes.
pub fn oracle_responsibilities(q: &CauseQuery, budget: OracleBudget) -> Result<BTreeMap<Atom, Responsibility>> {
    let explained = oracle_causality(q, budget)?;
    let mut out: BTreeMap<Atom, Responsibility> =
        q.instance().endogenous().iter().map(|a| (a.clone(), Responsibility::ZERO)).collect();
    for e in explained {
        out.insert(e.cause, e.responsibility);
    }
    Ok(out)
}

/// View-conditioned causes: some contingency set after which deleting the
/// tuple removes this answer and keeps every other original answer.
pub fn oracle_vc_causes(q: &CauseQuery, budget: OracleBudget) -> Result<BTreeSet<Atom>> {
    let (found, mut subsets) = enumerate_causes(q, budget)?;
    let full = subsets.full();
    let mut others = subsets.answers(full).clone();
    others.remove(q.answer());
    let mut causes = BTreeSet::new();
    for (t, all) in found.contingencies.iter().enumerate() {
        let keeps_others = |subsets: &mut Subsets, deleted: u32| {
            let remaining = subsets.answers(full & !deleted & !(1 << t));
            others.iter().all(|a| remaining.contains(a))
        };
        if all.iter().any(|&deleted| keeps_others(&mut subsets, deleted)) {
            causes.insert(found.endogenous[t].clone());
        }
    }
    Ok(causes)
}

/// Subset-minimal diagnoses, by checking every subset of the hypotheses.
pub fn oracle_abduction(ap: &AbductionProblem, budget: OracleBudget) -> Result<Vec<Diagnosis>> {
    let hypotheses: Vec<Atom> = ap.hypotheses().iter().cloned().collect();
    budget.admit(hypotheses.len())?;
    let program = ap.program();
    let mut explaining = Vec::new();
    for mask in 0..1u32 << hypotheses.len() {
        let chosen = (0..hypotheses.len()).filter(|i| mask >> i & 1 == 1).map(|i| &hypotheses[i]);
        let model = naive_model(program, ap.edb().iter().chain(chosen));
        if ap.observation().iter().all(|o| model.contains(o)) {
            explaining.push(mask);
        }
    }
    let mut out: Vec<Diagnosis> = subset_minimal(&explaining)
        .into_iter()
        .map(|m| Diagnosis {
            delta: (0..hypotheses.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| hypotheses[i].clone())
                .collect(),
        })
        .collect();
    out.sort_by(|a, b| a.delta.len().cmp(&b.delta.len()).then_with(|| a.delta.cmp(&b.delta)));
    Ok(out)
}

/// Deletion solutions of the given kind, by checking every subset of the
/// deletable tuples against the defining condition. For view-safe deletions
/// the subset-minimal ones are returned.
pub fn oracle_delprop(task: &DeletionTask, kind: DeletionKind, budget: OracleBudget) -> Result<Vec<DeletionSolution>> {
    let deletable: Vec<Atom> = task.deletable().to_vec();
    budget.admit(deletable.len())?;
    let fixed: Vec<Atom> = task
        .instance()
        .atoms()
        .filter(|a| deletable.binary_search(a).is_err())
        .cloned()
        .collect();
    let mut subsets = Subsets::new(task.program(), fixed, deletable);
    let full = subsets.full();
    let holds = subsets.entailment_table(task.target());
    let removing: Vec<u32> = (0..=full).filter(|&deleted| !holds[(full & !deleted) as usize]).collect();
    let chosen = match kind {
        DeletionKind::MinimalSourceSideEffect => subset_minimal(&removing),
        DeletionKind::MinimumSourceSideEffect => {
            let least = removing.iter().map(|m| m.count_ones()).min();
            removing.iter().copied().filter(|m| Some(m.count_ones()) == least).collect()
        }
        DeletionKind::ViewSideEffectFree => {
            let mut wanted = subsets.answers(full).clone();
            wanted.remove(task.target());
            let exact: Vec<u32> = removing
                .iter()
                .copied()
                .filter(|&deleted| subsets.answers(full & !deleted) == &wanted)
                .collect();
            subset_minimal(&exact)
        }
    };
    let mut out: Vec<DeletionSolution> = chosen
        .into_iter()
        .map(|m| {
            let deleted = subsets.members(m);
            DeletionSolution {
                remaining: task.instance().without(&deleted),
                deleted,
                kind,
            }
        })
        .collect();
    out.sort_by(|a, b| a.deleted.cmp(&b.deleted));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delprop::Scope;
    use crate::fixtures;
    use crate::relmodel::Instance;

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    fn budget() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn naive_evaluation_of_recursion() {
        let program = Program::parse("P(X,Y) :- E(X,Y).\nP(X,Y) :- P(X,Z), E(Z,Y).\nAns(Y) :- P(a,Y).").unwrap();
        let facts = ["E(a,b)", "E(b,c)", "E(c,a)", "E(d,e)"].map(atom);
        let answers = naive_answers(&program, &facts);
        assert_eq!(answers.len(), 3);
    }

    #[test]
    fn author_journal_causes() {
        let q = CauseQuery::new(
            fixtures::author_journal_query(),
            fixtures::author_journal_instance(),
            fixtures::answer("John,XML"),
        )
        .unwrap();
        let explained = oracle_causality(&q, budget()).unwrap();
        assert_eq!(explained.len(), 4);
        assert!(explained.iter().all(|e| e.responsibility == Responsibility::reciprocal(2)));
        assert!(oracle_vc_causes(&q, budget()).unwrap().is_empty());
    }

    #[test]
    fn single_counterfactual_tuple() {
        let program = Program::parse("ans :- R(X).").unwrap();
        let q = CauseQuery::boolean(program, Instance::all_endogenous([atom("R(a)")]).unwrap()).unwrap();
        let explained = oracle_causality(&q, budget()).unwrap();
        assert_eq!(explained.len(), 1);
        assert_eq!(explained[0].responsibility, Responsibility::reciprocal(1));
        assert_eq!(explained[0].contingencies, vec![BTreeSet::new()]);
    }

    #[test]
    fn boolean_join_diagnoses() {
        let ap = crate::abduction::cdap_of(&fixtures::boolean_join_instance(), &fixtures::boolean_join_query()).unwrap();
        let diagnoses = oracle_abduction(&ap, budget()).unwrap();
        let expected: Vec<Diagnosis> = [["R(a2,a1)", "S(a1)"], ["R(a3,a3)", "S(a3)"]]
            .iter()
            .map(|d| Diagnosis {
                delta: d.iter().map(|s| atom(s)).collect(),
            })
            .collect();
        assert_eq!(diagnoses, expected);
    }

    #[test]
    fn observation_already_entailed() {
        let program = Program::parse("ans :- R(X).").unwrap();
        let ap = AbductionProblem::new(program, [atom("R(a)")], [atom("R(b)")], [atom("ans")]).unwrap();
        assert_eq!(oracle_abduction(&ap, budget()).unwrap(), vec![Diagnosis { delta: BTreeSet::new() }]);
    }

    #[test]
    fn author_journal_deletions() {
        let task = DeletionTask::new(
            fixtures::author_journal_instance(),
            fixtures::author_journal_query(),
            fixtures::answer("John,XML"),
            Scope::All,
        )
        .unwrap();
        let minimal = oracle_delprop(&task, DeletionKind::MinimalSourceSideEffect, budget()).unwrap();
        assert_eq!(minimal.len(), 4);
        assert!(minimal.iter().all(|s| s.deleted.len() == 2));
        assert!(oracle_delprop(&task, DeletionKind::ViewSideEffectFree, budget()).unwrap().is_empty());
    }

    #[test]
    fn single_fact_deletion() {
        let program = Program::parse("ans :- R(X).").unwrap();
        let task = DeletionTask::new(Instance::all_endogenous([atom("R(a)")]).unwrap(), program, vec![], Scope::All).unwrap();
        for kind in [
            DeletionKind::MinimalSourceSideEffect,
            DeletionKind::MinimumSourceSideEffect,
            DeletionKind::ViewSideEffectFree,
        ] {
            let solutions = oracle_delprop(&task, kind, budget()).unwrap();
            assert_eq!(solutions.len(), 1);
            assert_eq!(solutions[0].deleted, BTreeSet::from([atom("R(a)")]));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let facts: Vec<Atom> = (0..5).map(|i| Atom::from_strs("R", &[&i.to_string()])).collect();
        let program = Program::parse("ans :- R(X).").unwrap();
        let q = CauseQuery::boolean(program, Instance::all_endogenous(facts).unwrap()).unwrap();
        let small = OracleBudget::new(4).unwrap();
        assert!(matches!(
            oracle_causality(&q, small),
            Err(Error::BudgetExceeded { budget: 4, found: 5 })
        ));
        assert!(OracleBudget::new(0).is_none());
    }
}
