//! Actual causes, contingency sets and responsibility for query answers.
//!
//! Everything is derived from the minimal supports of the answer: the
//! subset-minimal sets of endogenous tuples that, together with the exogenous
//! ones, entail it. A tuple is a cause iff it lies in some minimal support, and
//! its minimal contingency sets are the minimal hitting sets of the supports
//! not containing it that leave at least one support containing it intact.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::bits::TupleSet;
use crate::datalog::{evaluate, format_answer, holds, Answer, Program};
use crate::error::{Error, Result};
use crate::hitting::{minimal_transversals, minimum_transversal_size};
use crate::provenance::minimal_supports;
use crate::relmodel::{Atom, Constant, Instance};

/// Degree of responsibility: `0` or `1/k` for a positive integer `k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Responsibility(Option<NonZeroUsize>);

impl Responsibility {
    pub const ZERO: Responsibility = Responsibility(None);

    /// `1/(size + 1)`, the responsibility given a smallest contingency set.
    pub fn from_contingency_size(size: usize) -> Self {
        Responsibility(NonZeroUsize::new(size + 1))
    }

    /// `1/k`; `k = 0` yields zero.
    pub fn reciprocal(k: usize) -> Self {
        Responsibility(NonZeroUsize::new(k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn numerator(&self) -> usize {
        usize::from(self.0.is_some())
    }

    pub fn denominator(&self) -> usize {
        self.0.map_or(1, NonZeroUsize::get)
    }

    /// Size of the smallest contingency set, when positive.
    pub fn contingency_size(&self) -> Option<usize> {
        self.0.map(|k| k.get() - 1)
    }
}

impl Ord for Responsibility {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl PartialOrd for Responsibility {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Responsibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => f.write_str("0"),
            Some(k) => write!(f, "1/{k}"),
        }
    }
}

impl FromStr for Responsibility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = || Error::InvalidThreshold(s.to_string());
        let t = s.trim();
        match t {
            "0" => return Ok(Responsibility::ZERO),
            "1" => return Ok(Responsibility::reciprocal(1)),
            _ => {}
        }
        let k = t.strip_prefix("1/").ok_or_else(invalid)?;
        let k: usize = k.parse().map_err(|_| invalid())?;
        NonZeroUsize::new(k).map(|k| Responsibility(Some(k))).ok_or_else(invalid)
    }
}

/// A threshold `v ∈ {0} ∪ {1/k}` for the responsibility decision problem.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ResponsibilityThreshold(Responsibility);

impl ResponsibilityThreshold {
    pub fn new(value: Responsibility) -> Self {
        ResponsibilityThreshold(value)
    }

    pub fn value(&self) -> Responsibility {
        self.0
    }

    pub fn is_exceeded_by(&self, rho: Responsibility) -> bool {
        rho > self.0
    }
}

impl FromStr for ResponsibilityThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(ResponsibilityThreshold)
    }
}

impl fmt::Display for ResponsibilityThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A cause with all of its subset-minimal contingency sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalExplanation {
    pub cause: Atom,
    pub contingencies: Vec<BTreeSet<Atom>>,
    pub responsibility: Responsibility,
}

/// Supports of the other answers of the query, used for view conditioning.
#[derive(Debug)]
struct OtherAnswers {
    supports: Vec<Vec<TupleSet>>,
}

impl OtherAnswers {
    fn all_survive(&self, deleted: &TupleSet) -> bool {
        self.supports
            .iter()
            .all(|family| family.iter().any(|s| !s.intersects(deleted)))
    }
}

/// An answer of a query over an instance, together with the cached analysis
/// of its supports.
#[derive(Debug)]
pub struct CauseQuery {
    program: Program,
    instance: Instance,
    answer: Answer,
    endogenous: Vec<Atom>,
    supports: Vec<TupleSet>,
    min_sizes: OnceLock<Vec<Option<usize>>>,
    others: OnceLock<OtherAnswers>,
}

impl CauseQuery {
    pub fn new(program: Program, instance: Instance, answer: Answer) -> Result<Self> {
        if !holds(&program, instance.atoms(), &answer)? {
            return Err(Error::NotAnAnswer(format_answer(&answer)));
        }
        let endogenous: Vec<Atom> = instance.endogenous().iter().cloned().collect();
        let goal = Atom::new(program.answer_predicate().clone(), answer.iter().cloned());
        let supports = minimal_supports(&program, instance.exogenous(), &endogenous, &[goal])?
            .pop()
            .unwrap_or_default()
            .into_sorted();
        Ok(CauseQuery {
            program,
            instance,
            answer,
            endogenous,
            supports,
            min_sizes: OnceLock::new(),
            others: OnceLock::new(),
        })
    }

    /// The boolean query `program` (with a propositional answer predicate).
    pub fn boolean(program: Program, instance: Instance) -> Result<Self> {
        if !program.is_boolean() {
            return Err(Error::NotBoolean);
        }
        CauseQuery::new(program, instance, Vec::new())
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn answer(&self) -> &[Constant] {
        &self.answer
    }

    /// The minimal supports of the answer, each a set of endogenous tuples.
    pub fn minimal_supports(&self) -> Vec<BTreeSet<Atom>> {
        self.supports.iter().map(|s| self.atoms_of(s)).collect()
    }

    pub(crate) fn support_sets(&self) -> &[TupleSet] {
        &self.supports
    }

    pub(crate) fn endogenous_atoms(&self) -> &[Atom] {
        &self.endogenous
    }

    pub(crate) fn atoms_of(&self, set: &TupleSet) -> BTreeSet<Atom> {
        set.iter().map(|i| self.endogenous[i].clone()).collect()
    }

    fn index_of(&self, t: &Atom) -> Result<usize> {
        self.endogenous
            .binary_search(t)
            .map_err(|_| Error::NotEndogenous(t.clone()))
    }

    fn is_cause_index(&self, i: usize) -> bool {
        self.supports.iter().any(|s| s.contains(i))
    }

    pub fn is_actual_cause(&self, t: &Atom) -> Result<bool> {
        Ok(self.is_cause_index(self.index_of(t)?))
    }

    /// All causes, in canonical order, without their contingency sets.
    pub fn causes(&self) -> BTreeSet<Atom> {
        (0..self.endogenous.len())
            .filter(|&i| self.is_cause_index(i))
            .map(|i| self.endogenous[i].clone())
            .collect()
    }

    /// Supports avoiding `i`, which any contingency set of `i` must hit.
    fn others_than(&self, i: usize) -> Vec<TupleSet> {
        self.supports.iter().filter(|s| !s.contains(i)).cloned().collect()
    }

    fn contingency_sets(&self, i: usize) -> Vec<TupleSet> {
        let with_i: Vec<&TupleSet> = self.supports.iter().filter(|s| s.contains(i)).collect();
        minimal_transversals(&self.others_than(i))
            .into_iter()
            .filter(|h| with_i.iter().any(|s| !s.intersects(h)))
            .collect()
    }

    fn min_size(&self, i: usize) -> Option<usize> {
        self.min_sizes.get_or_init(|| {
            (0..self.endogenous.len())
                .map(|i| {
                    let family = self.others_than(i);
                    self.supports
                        .iter()
                        .filter(|s| s.contains(i))
                        .filter_map(|s| minimum_transversal_size(&family, s))
                        .min()
                })
                .collect()
        })[i]
    }

    pub fn minimal_contingencies(&self, t: &Atom) -> Result<Vec<BTreeSet<Atom>>> {
        let i = self.index_of(t)?;
        if !self.is_cause_index(i) {
            return Err(Error::NotACause(t.clone()));
        }
        Ok(self.contingency_sets(i).iter().map(|h| self.atoms_of(h)).collect())
    }

    pub fn responsibility(&self, t: &Atom) -> Result<Responsibility> {
        let i = self.index_of(t)?;
        Ok(self.responsibility_at(i))
    }

    fn responsibility_at(&self, i: usize) -> Responsibility {
        self.min_size(i)
            .map_or(Responsibility::ZERO, Responsibility::from_contingency_size)
    }

    pub fn responsibility_exceeds(&self, t: &Atom, threshold: ResponsibilityThreshold) -> Result<bool> {
        Ok(threshold.is_exceeded_by(self.responsibility(t)?))
    }

    /// One explanation per cause, in canonical order of the cause tuples.
    pub fn actual_causes(&self) -> Vec<CausalExplanation> {
        (0..self.endogenous.len())
            .filter(|&i| self.is_cause_index(i))
            .map(|i| CausalExplanation {
                cause: self.endogenous[i].clone(),
                contingencies: self.contingency_sets(i).iter().map(|h| self.atoms_of(h)).collect(),
                responsibility: self.responsibility_at(i),
            })
            .collect()
    }

    /// Causes of maximal responsibility; empty when there are no causes.
    pub fn most_responsible_causes(&self) -> BTreeSet<Atom> {
        let rhos: Vec<Responsibility> = (0..self.endogenous.len()).map(|i| self.responsibility_at(i)).collect();
        let Some(best) = rhos.iter().copied().max().filter(|r| !r.is_zero()) else {
            return BTreeSet::new();
        };
        rhos.iter()
            .enumerate()
            .filter(|(_, r)| **r == best)
            .map(|(i, _)| self.endogenous[i].clone())
            .collect()
    }

    fn other_answers(&self) -> &OtherAnswers {
        self.others.get_or_init(|| {
            let answers = evaluate(&self.program, self.instance.atoms())
                .expect("inputs were validated when the query was built");
            let goals: Vec<Atom> = answers
                .tuples
                .iter()
                .filter(|a| **a != self.answer)
                .map(|a| Atom::new(self.program.answer_predicate().clone(), a.iter().cloned()))
                .collect();
            let supports = minimal_supports(&self.program, self.instance.exogenous(), &self.endogenous, &goals)
                .expect("inputs were validated when the query was built")
                .into_iter()
                .map(|chain| chain.into_sorted())
                .collect();
            OtherAnswers { supports }
        })
    }

    /// Whether deleting `set` from the instance keeps every other answer.
    pub(crate) fn preserves_other_answers(&self, set: &TupleSet) -> bool {
        self.other_answers().all_survive(set)
    }

    fn vc_contingency_sets(&self, i: usize) -> Vec<TupleSet> {
        self.contingency_sets(i)
            .into_iter()
            .filter(|h| self.preserves_other_answers(&h.with(i)))
            .collect()
    }

    /// Contingency sets of `t` under which deleting `t` removes this answer
    /// and keeps all others.
    pub fn vc_contingencies(&self, t: &Atom) -> Result<Vec<BTreeSet<Atom>>> {
        let i = self.index_of(t)?;
        Ok(self.vc_contingency_sets(i).iter().map(|h| self.atoms_of(h)).collect())
    }

    /// View-conditioned causes of this answer.
    pub fn vc_causes(&self) -> BTreeSet<Atom> {
        (0..self.endogenous.len())
            .filter(|&i| self.is_cause_index(i) && !self.vc_contingency_sets(i).is_empty())
            .map(|i| self.endogenous[i].clone())
            .collect()
    }

    pub fn has_vc_cause(&self) -> bool {
        (0..self.endogenous.len()).any(|i| self.is_cause_index(i) && !self.vc_contingency_sets(i).is_empty())
    }
}
