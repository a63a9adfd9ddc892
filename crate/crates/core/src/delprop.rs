//! Delete propagation: removing one answer of a view by deleting source tuples.
//!
//! The deletion sets that remove the target answer are exactly the hitting
//! sets of its minimal supports, so the subset-minimal ones are the minimal
//! transversals of that family.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::bits::TupleSet;
use crate::causality::CauseQuery;
use crate::datalog::{Answer, Program};
use crate::error::Result;
use crate::hitting::minimal_transversals;
use crate::relmodel::{Atom, Constant, Instance};

/// Which source tuples may be deleted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Any tuple of the instance.
    All,
    /// Endogenous tuples only; exogenous ones are kept.
    EndogenousOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeletionKind {
    /// Subset-minimal deletion sets removing the answer.
    MinimalSourceSideEffect,
    /// Minimum-cardinality deletion sets removing the answer.
    MinimumSourceSideEffect,
    /// Deletion sets removing the answer and no other answer.
    ViewSideEffectFree,
}

impl fmt::Display for DeletionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeletionKind::MinimalSourceSideEffect => "minimal",
            DeletionKind::MinimumSourceSideEffect => "minimum",
            DeletionKind::ViewSideEffectFree => "view-safe",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionSolution {
    pub deleted: BTreeSet<Atom>,
    pub remaining: Instance,
    pub kind: DeletionKind,
}

/// A request to delete `target` from the answers of `program` over `instance`.
#[derive(Debug)]
pub struct DeletionTask {
    instance: Instance,
    scope: Scope,
    /// Query over the instance whose endogenous part is the deletable tuples.
    query: CauseQuery,
    transversals: OnceLock<Vec<TupleSet>>,
}

impl DeletionTask {
    pub fn new(instance: Instance, program: Program, target: Answer, scope: Scope) -> Result<Self> {
        let deletable = match scope {
            Scope::All => instance.to_all_endogenous(),
            Scope::EndogenousOnly => instance.clone(),
        };
        Ok(DeletionTask {
            instance,
            scope,
            query: CauseQuery::new(program, deletable, target)?,
            transversals: OnceLock::new(),
        })
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn program(&self) -> &Program {
        self.query.program()
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn target(&self) -> &[Constant] {
        self.query.answer()
    }

    /// The deletable tuples, in canonical order.
    pub fn deletable(&self) -> &[Atom] {
        self.query.endogenous_atoms()
    }

    /// The causality view of the task: the same query and answer over the
    /// instance in which exactly the deletable tuples are endogenous.
    pub fn cause_query(&self) -> &CauseQuery {
        &self.query
    }

    fn minimal_sets(&self) -> &[TupleSet] {
        self.transversals
            .get_or_init(|| minimal_transversals(self.query.support_sets()))
    }

    fn solution(&self, set: &TupleSet, kind: DeletionKind) -> DeletionSolution {
        let deleted = self.query.atoms_of(set);
        DeletionSolution {
            remaining: self.instance.without(&deleted),
            deleted,
            kind,
        }
    }

    fn solutions_of(&self, sets: impl IntoIterator<Item = TupleSet>, kind: DeletionKind) -> Vec<DeletionSolution> {
        let mut out: Vec<DeletionSolution> = sets.into_iter().map(|s| self.solution(&s, kind)).collect();
        out.sort_by(|a, b| a.deleted.cmp(&b.deleted));
        out
    }

    pub fn minimal_source_deletions(&self) -> Vec<DeletionSolution> {
        self.solutions_of(self.minimal_sets().iter().cloned(), DeletionKind::MinimalSourceSideEffect)
    }

    pub fn minimum_source_deletions(&self) -> Vec<DeletionSolution> {
        let best = self.minimal_sets().iter().map(TupleSet::len).min();
        self.solutions_of(
            self.minimal_sets().iter().filter(|s| Some(s.len()) == best).cloned(),
            DeletionKind::MinimumSourceSideEffect,
        )
    }

    /// Every subset-minimal deletion set that removes the target and keeps
    /// all other answers.
    pub fn view_safe_deletions(&self) -> Vec<DeletionSolution> {
        self.solutions_of(
            self.minimal_sets()
                .iter()
                .filter(|s| self.query.preserves_other_answers(s))
                .cloned(),
            DeletionKind::ViewSideEffectFree,
        )
    }

    /// Some side-effect-free deletion, if one exists.
    pub fn view_side_effect_free(&self) -> Option<DeletionSolution> {
        self.view_safe_deletions().into_iter().next()
    }

    pub fn solutions(&self, kind: DeletionKind) -> Vec<DeletionSolution> {
        match kind {
            DeletionKind::MinimalSourceSideEffect => self.minimal_source_deletions(),
            DeletionKind::MinimumSourceSideEffect => self.minimum_source_deletions(),
            DeletionKind::ViewSideEffectFree => self.view_safe_deletions(),
        }
    }

    fn endogenous_union(&self, solutions: &[DeletionSolution]) -> BTreeSet<Atom> {
        solutions
            .iter()
            .filter(|s| self.is_endogenous_deletion(s))
            .flat_map(|s| s.deleted.iter().cloned())
            .collect()
    }

    fn is_endogenous_deletion(&self, s: &DeletionSolution) -> bool {
        s.deleted.iter().all(|a| self.instance.is_endogenous(a))
    }

    /// Causes of the target, read off the minimal deletions that consist of
    /// endogenous tuples only.
    pub fn causes_from_minimal_sse(&self) -> BTreeSet<Atom> {
        self.endogenous_union(&self.minimal_source_deletions())
    }

    /// Most responsible causes: the tuples of the smallest deletions made of
    /// endogenous tuples only.
    pub fn mrc_from_minimum_sse(&self) -> BTreeSet<Atom> {
        let endogenous: Vec<DeletionSolution> = self
            .minimal_source_deletions()
            .into_iter()
            .filter(|s| self.is_endogenous_deletion(s))
            .collect();
        let best = endogenous.iter().map(|s| s.deleted.len()).min();
        endogenous
            .iter()
            .filter(|s| Some(s.deleted.len()) == best)
            .flat_map(|s| s.deleted.iter().cloned())
            .collect()
    }

    /// View-conditioned causes, read off the side-effect-free deletions that
    /// consist of endogenous tuples only.
    pub fn vccauses_from_vsef(&self) -> BTreeSet<Atom> {
        self.endogenous_union(&self.view_safe_deletions())
    }

    /// Deletion sets assembled as a cause plus one of its contingency sets.
    pub fn delprop_from_causes(&self, kind: DeletionKind) -> Vec<DeletionSolution> {
        let q = &self.query;
        let mut sets: BTreeSet<BTreeSet<Atom>> = BTreeSet::new();
        let causes = match kind {
            DeletionKind::MinimalSourceSideEffect => q.causes(),
            DeletionKind::MinimumSourceSideEffect => q.most_responsible_causes(),
            DeletionKind::ViewSideEffectFree => q.vc_causes(),
        };
        for t in &causes {
            let contingencies = match kind {
                DeletionKind::MinimalSourceSideEffect => q.minimal_contingencies(t),
                DeletionKind::MinimumSourceSideEffect => q.minimal_contingencies(t).map(|all| {
                    let size = q
                        .responsibility(t)
                        .ok()
                        .and_then(|r| r.contingency_size());
                    all.into_iter().filter(|g| Some(g.len()) == size).collect()
                }),
                DeletionKind::ViewSideEffectFree => q.vc_contingencies(t),
            }
            .expect("causes are endogenous");
            for mut gamma in contingencies {
                gamma.insert(t.clone());
                sets.insert(gamma);
            }
        }
        let mut out: Vec<DeletionSolution> = sets
            .into_iter()
            .map(|deleted| DeletionSolution {
                remaining: self.instance.without(&deleted),
                deleted,
                kind,
            })
            .collect();
        out.sort_by(|a, b| a.deleted.cmp(&b.deleted));
        out
    }

    /// Whether `remaining ⊆ D` is a subset-maximal instance without the target.
    pub fn is_minimal_sse_solution(&self, remaining: &BTreeSet<Atom>) -> bool {
        match self.deletion_of(remaining) {
            Some(deleted) => self.minimal_sets().contains(&deleted),
            None => false,
        }
    }

    /// Whether `remaining ⊆ D` is a maximum-cardinality instance without the target.
    pub fn is_minimum_sse_solution(&self, remaining: &BTreeSet<Atom>) -> bool {
        let best = self.minimal_sets().iter().map(TupleSet::len).min();
        match self.deletion_of(remaining) {
            Some(deleted) => Some(deleted.len()) == best && self.minimal_sets().contains(&deleted),
            None => false,
        }
    }

    /// The deletion set turning the instance into `remaining`, when `remaining`
    /// is a subinstance reachable by deleting deletable tuples only.
    fn deletion_of(&self, remaining: &BTreeSet<Atom>) -> Option<TupleSet> {
        let deletable = self.query.instance();
        if !remaining.iter().all(|a| deletable.contains(a)) {
            return None;
        }
        if deletable.exogenous().iter().any(|a| !remaining.contains(a)) {
            return None;
        }
        Some(TupleSet::from_indices(
            self.deletable()
                .iter()
                .enumerate()
                .filter(|(_, a)| !remaining.contains(*a))
                .map(|(i, _)| i),
        ))
    }
}
