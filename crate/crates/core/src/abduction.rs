//! Datalog abduction and its correspondence with query causality.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::bits::TupleSet;
use crate::causality::{CauseQuery, Responsibility};
use crate::datalog::{fixpoint, Literal, Program, Rule};
use crate::error::{Error, Result};
use crate::hitting::minimal_transversals;
use crate::provenance::minimal_supports;
use crate::relmodel::{Atom, Constant, Instance, Predicate};

/// Default bound on the number of observed atoms.
pub const DEFAULT_OBSERVATION_BOUND: usize = 1;

/// A subset-minimal set of hypotheses explaining the observation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnosis {
    pub delta: BTreeSet<Atom>,
}

/// A subset-minimal set of hypotheses without which nothing explains the
/// observation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NecessarySet {
    pub atoms: BTreeSet<Atom>,
}

/// An abduction problem: program, extensional database, hypotheses and a
/// conjunctive observation.
#[derive(Debug)]
pub struct AbductionProblem {
    program: Program,
    edb: BTreeSet<Atom>,
    hypotheses: BTreeSet<Atom>,
    observation: Vec<Atom>,
    /// Program extended with `goal :- observation`.
    folded: Program,
    /// Hypotheses not already in the database, in canonical order.
    candidates: Vec<Atom>,
    solutions: OnceLock<Vec<TupleSet>>,
}

impl AbductionProblem {
    pub fn new(
        program: Program,
        edb: impl IntoIterator<Item = Atom>,
        hypotheses: impl IntoIterator<Item = Atom>,
        observation: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        Self::with_observation_bound(program, edb, hypotheses, observation, DEFAULT_OBSERVATION_BOUND)
    }

    pub fn with_observation_bound(
        program: Program,
        edb: impl IntoIterator<Item = Atom>,
        hypotheses: impl IntoIterator<Item = Atom>,
        observation: impl IntoIterator<Item = Atom>,
        bound: usize,
    ) -> Result<Self> {
        let edb: BTreeSet<Atom> = edb.into_iter().collect();
        let hypotheses: BTreeSet<Atom> = hypotheses.into_iter().collect();
        let observation: Vec<Atom> = observation.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if observation.is_empty() {
            return Err(Error::EmptyObservation);
        }
        if observation.len() > bound {
            return Err(Error::ObservationTooLong {
                bound,
                found: observation.len(),
            });
        }
        let heads = program.intensional_predicates();
        if let Some(atom) = edb.iter().chain(&hypotheses).find(|a| heads.contains(&a.predicate)) {
            return Err(Error::EdbInRuleHead(atom.predicate.clone()));
        }
        let goal = program.fresh_predicate("obs");
        let fold = Rule::new(
            Literal::new(goal.clone(), []),
            observation.iter().map(Literal::from_atom).collect(),
        )?;
        let folded = program.extended([fold], goal)?;
        let candidates: Vec<Atom> = hypotheses.difference(&edb).cloned().collect();
        let model = fixpoint(&folded, edb.iter().chain(&candidates))?;
        if !model.contains(&Atom::new(folded.answer_predicate().clone(), [])) {
            return Err(Error::ObservationNotEntailed);
        }
        Ok(AbductionProblem {
            program,
            edb,
            hypotheses,
            observation,
            folded,
            candidates,
            solutions: OnceLock::new(),
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn edb(&self) -> &BTreeSet<Atom> {
        &self.edb
    }

    pub fn hypotheses(&self) -> &BTreeSet<Atom> {
        &self.hypotheses
    }

    pub fn observation(&self) -> &[Atom] {
        &self.observation
    }

    /// The program with the observation folded into a fresh propositional rule.
    pub fn folded_program(&self) -> &Program {
        &self.folded
    }

    fn solution_sets(&self) -> &[TupleSet] {
        self.solutions.get_or_init(|| {
            let goal = Atom::new(self.folded.answer_predicate().clone(), []);
            minimal_supports(&self.folded, &self.edb, &self.candidates, &[goal])
                .expect("the problem was validated at construction")
                .pop()
                .unwrap_or_default()
                .into_sorted()
        })
    }

    fn atoms_of(&self, set: &TupleSet) -> BTreeSet<Atom> {
        set.iter().map(|i| self.candidates[i].clone()).collect()
    }

    /// All abductive diagnoses, smallest first.
    pub fn diagnoses(&self) -> Vec<Diagnosis> {
        self.solution_sets()
            .iter()
            .map(|s| Diagnosis { delta: self.atoms_of(s) })
            .collect()
    }

    /// Hypotheses occurring in some diagnosis.
    pub fn relevant_hypotheses(&self) -> BTreeSet<Atom> {
        self.solution_sets().iter().flat_map(|s| self.atoms_of(s)).collect()
    }

    pub fn is_relevant(&self, h: &Atom) -> Result<bool> {
        if !self.hypotheses.contains(h) {
            return Err(Error::NotAHypothesis(h.clone()));
        }
        Ok(match self.candidates.binary_search(h) {
            Ok(i) => self.solution_sets().iter().any(|s| s.contains(i)),
            Err(_) => false,
        })
    }

    /// The minimal hitting sets of the diagnoses.
    pub fn necessary_hypothesis_sets(&self) -> Vec<NecessarySet> {
        minimal_transversals(self.solution_sets())
            .iter()
            .map(|n| NecessarySet { atoms: self.atoms_of(n) })
            .collect()
    }
}

/// The causal abduction problem of a boolean query: the exogenous tuples are
/// the database, the endogenous ones the hypotheses, `ans` the observation.
pub fn cdap_of(instance: &Instance, program: &Program) -> Result<AbductionProblem> {
    if !program.is_boolean() {
        return Err(Error::NotBoolean);
    }
    let observation = Atom::new(program.answer_predicate().clone(), []);
    AbductionProblem::new(
        program.clone(),
        instance.exogenous().iter().cloned(),
        instance.endogenous().iter().cloned(),
        [observation],
    )
}

/// Causes of a boolean query computed as the relevant hypotheses of its
/// causal abduction problem.
pub fn causes_via_abduction(instance: &Instance, program: &Program) -> Result<BTreeSet<Atom>> {
    Ok(cdap_of(instance, program)?.relevant_hypotheses())
}

/// Responsibility of `t` as `1/|N|` for a smallest necessary-hypothesis set
/// `N` containing it.
pub fn responsibility_via_necessary_sets(instance: &Instance, program: &Program, t: &Atom) -> Result<Responsibility> {
    let ap = cdap_of(instance, program)?;
    if !ap.is_relevant(t)? {
        return Err(Error::NotRelevant(t.clone()));
    }
    let smallest = ap
        .necessary_hypothesis_sets()
        .into_iter()
        .filter(|n| n.atoms.contains(t))
        .map(|n| n.atoms.len())
        .min()
        .expect("every relevant hypothesis lies in some minimal hitting set");
    Ok(Responsibility::reciprocal(smallest))
}

/// Relevance of `h` decided as actual causality for the folded program over
/// the instance whose exogenous part is the database and whose endogenous
/// part is the remaining hypotheses.
pub fn relevance_via_causality(ap: &AbductionProblem, h: &Atom) -> Result<bool> {
    if !ap.hypotheses().contains(h) {
        return Err(Error::NotAHypothesis(h.clone()));
    }
    if ap.edb().contains(h) {
        return Ok(false);
    }
    let instance = Instance::new(ap.candidates.iter().cloned(), ap.edb().iter().cloned())?;
    let query = CauseQuery::boolean(ap.folded_program().clone(), instance)?;
    query.is_actual_cause(h)
}

/// All ground atoms of `predicate` with arguments from `domain`.
pub fn ground_instances(predicate: &Predicate, arity: usize, domain: &BTreeSet<Constant>) -> Vec<Atom> {
    let values: Vec<&Constant> = domain.iter().collect();
    let mut out = Vec::new();
    if arity > 0 && values.is_empty() {
        return out;
    }
    let mut digits = vec![0usize; arity];
    loop {
        out.push(Atom::new(predicate.clone(), digits.iter().map(|&d| values[d].clone())));
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < values.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<Atom> {
        xs.iter().map(|s| atom(s)).collect()
    }

    fn join_problem() -> AbductionProblem {
        cdap_of(&fixtures::boolean_join_instance(), &fixtures::boolean_join_query()).unwrap()
    }

    #[test]
    fn boolean_join_diagnoses() {
        let ap = join_problem();
        assert!(ap.edb().is_empty());
        let found: BTreeSet<_> = ap.diagnoses().into_iter().map(|d| d.delta).collect();
        assert_eq!(
            found,
            BTreeSet::from([set(&["S(a1)", "R(a2,a1)"]), set(&["S(a3)", "R(a3,a3)"])])
        );
        assert_eq!(ap.relevant_hypotheses(), set(&["S(a3)", "R(a3,a3)", "S(a1)", "R(a2,a1)"]));
        assert!(ap.is_relevant(&atom("S(a1)")).unwrap());
        assert!(!ap.is_relevant(&atom("R(a1,a4)")).unwrap());
        assert!(matches!(ap.is_relevant(&atom("S(zz)")), Err(Error::NotAHypothesis(_))));
    }

    #[test]
    fn necessary_sets_of_two_diagnoses() {
        let ap = join_problem();
        let found: BTreeSet<_> = ap.necessary_hypothesis_sets().into_iter().map(|n| n.atoms).collect();
        assert_eq!(
            found,
            BTreeSet::from([
                set(&["S(a1)", "S(a3)"]),
                set(&["S(a1)", "R(a3,a3)"]),
                set(&["R(a2,a1)", "S(a3)"]),
                set(&["R(a2,a1)", "R(a3,a3)"]),
            ])
        );
    }

    #[test]
    fn alternative_rules() {
        let program = Program::parse("obs :- h1.\nobs :- h2.\nans :- obs.").unwrap();
        let ap = AbductionProblem::new(program, [], [atom("h1"), atom("h2")], [atom("obs")]).unwrap();
        let found: Vec<_> = ap.diagnoses().into_iter().map(|d| d.delta).collect();
        assert_eq!(found, vec![set(&["h1"]), set(&["h2"])]);
        let necessary: Vec<_> = ap.necessary_hypothesis_sets().into_iter().map(|n| n.atoms).collect();
        assert_eq!(necessary, vec![set(&["h1", "h2"])]);
    }

    #[test]
    fn observation_entailed_by_database() {
        let program = Program::parse("ans :- R(X).").unwrap();
        let ap = AbductionProblem::new(program, [atom("R(a)")], [atom("R(b)")], [atom("ans")]).unwrap();
        assert_eq!(ap.diagnoses(), vec![Diagnosis { delta: BTreeSet::new() }]);
        assert!(ap.relevant_hypotheses().is_empty());
        assert!(ap.necessary_hypothesis_sets().is_empty());
    }

    #[test]
    fn construction_errors() {
        let program = Program::parse("ans :- R(X).").unwrap();
        assert!(matches!(
            AbductionProblem::new(program.clone(), [], [atom("R(a)")], [atom("ans"), atom("R(a)")]),
            Err(Error::ObservationTooLong { bound: 1, found: 2 })
        ));
        assert!(matches!(
            AbductionProblem::new(program.clone(), [], [atom("S(a)")], [atom("ans")]),
            Err(Error::ObservationNotEntailed)
        ));
        assert!(matches!(
            AbductionProblem::new(program.clone(), [], [atom("ans")], [atom("ans")]),
            Err(Error::EdbInRuleHead(_))
        ));
        assert!(matches!(
            AbductionProblem::new(program, [], [atom("R(a)")], []),
            Err(Error::EmptyObservation)
        ));
    }

    #[test]
    fn causal_problem_matches_causes() {
        let instance = fixtures::boolean_join_instance();
        let program = fixtures::boolean_join_query();
        let via_abduction = causes_via_abduction(&instance, &program).unwrap();
        let direct = CauseQuery::boolean(program.clone(), instance.clone()).unwrap().causes();
        assert_eq!(via_abduction, direct);
        assert_eq!(
            responsibility_via_necessary_sets(&instance, &program, &atom("S(a1)")).unwrap(),
            Responsibility::reciprocal(2)
        );
        assert!(matches!(
            responsibility_via_necessary_sets(&instance, &program, &atom("R(a1,a4)")),
            Err(Error::NotRelevant(_))
        ));
    }

    #[test]
    fn exogenous_journals_give_author_hypotheses() {
        let program = fixtures::author_journal_query().specialize(&fixtures::answer("John,XML")).unwrap();
        let instance = fixtures::author_journal_instance_with_exogenous_journals();
        let ap = cdap_of(&instance, &program).unwrap();
        assert_eq!(ap.edb(), instance.exogenous());
        assert_eq!(ap.hypotheses(), instance.endogenous());
        assert_eq!(
            ap.relevant_hypotheses(),
            set(&["Author(John,TODS)", "Author(John,TKDE)"])
        );
        let rho = responsibility_via_necessary_sets(
            &fixtures::author_journal_instance(),
            &program,
            &atom("Author(John,TODS)"),
        )
        .unwrap();
        assert_eq!(rho, Responsibility::reciprocal(2));
    }

    #[test]
    fn relevance_through_causality() {
        let ap = join_problem();
        for h in ap.hypotheses() {
            assert_eq!(relevance_via_causality(&ap, h).unwrap(), ap.is_relevant(h).unwrap(), "{h}");
        }
        let program = Program::parse("ans :- o1.\nP(X) :- R(X).\no1 :- P(a).\no2 :- P(b), S(b).").unwrap();
        let ap = AbductionProblem::with_observation_bound(
            program,
            [],
            ["R(a)", "R(b)", "S(b)", "S(c)"].map(atom),
            [atom("o1"), atom("o2")],
            2,
        )
        .unwrap();
        assert_eq!(
            ap.diagnoses(),
            vec![Diagnosis {
                delta: set(&["R(a)", "R(b)", "S(b)"])
            }]
        );
        for h in ap.hypotheses() {
            assert_eq!(relevance_via_causality(&ap, h).unwrap(), ap.is_relevant(h).unwrap(), "{h}");
        }
    }

    #[test]
    fn empty_hypotheses() {
        let program = Program::parse("ans :- R(X).").unwrap();
        let instance = Instance::new([], [atom("R(a)")]).unwrap();
        let ap = cdap_of(&instance, &program).unwrap();
        assert_eq!(ap.diagnoses(), vec![Diagnosis { delta: BTreeSet::new() }]);
        assert!(causes_via_abduction(&instance, &program).unwrap().is_empty());
    }

    #[test]
    fn ground_instances_cover_the_domain() {
        let domain: BTreeSet<Constant> = ["a", "b"].into_iter().map(Constant::new).collect();
        let atoms = ground_instances(&Predicate::new("H"), 2, &domain);
        assert_eq!(atoms.len(), 4);
        assert_eq!(atoms[1], atom("H(a,b)"));
        assert_eq!(ground_instances(&Predicate::new("p"), 0, &BTreeSet::new()), vec![atom("p")]);
    }
}
