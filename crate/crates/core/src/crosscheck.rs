//! Agreement checks between the solvers, the brute-force oracles and the
//! reductions that connect causality, abduction and delete propagation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use crate::abduction::{cdap_of, responsibility_via_necessary_sets, relevance_via_causality, AbductionProblem};
use crate::causality::{CauseQuery, Responsibility};
use crate::datalog::{Answer, Program};
use crate::delprop::{DeletionKind, DeletionSolution, DeletionTask, Scope};
use crate::error::{Error, Result};
use crate::flownet::{min_contingency_via_cut, query_shape};
use crate::oracle::{oracle_abduction, oracle_causality, oracle_delprop, oracle_vc_causes, OracleBudget};
use crate::relmodel::{Atom, Instance};

/// Outcome of one named agreement check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub agree: bool,
    /// Both sides, when they differ.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub checks: Vec<Check>,
}

impl CrossCheckReport {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(|c| c.agree)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.agree)
    }

    fn compare<T: PartialEq + Debug>(&mut self, name: impl Into<String>, solver: T, reference: T) {
        let agree = solver == reference;
        self.checks.push(Check {
            name: name.into(),
            agree,
            detail: (!agree).then(|| format!("solver {solver:?} but reference {reference:?}")),
        });
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<()>) {
        let detail = outcome.err().map(|e| e.to_string());
        self.checks.push(Check {
            name: name.into(),
            agree: detail.is_none(),
            detail,
        });
    }
}

const KINDS: [DeletionKind; 3] = [
    DeletionKind::MinimalSourceSideEffect,
    DeletionKind::MinimumSourceSideEffect,
    DeletionKind::ViewSideEffectFree,
];

fn scope_name(scope: Scope) -> &'static str {
    match scope {
        Scope::All => "all",
        Scope::EndogenousOnly => "endogenous",
    }
}

fn deleted_sets(solutions: &[DeletionSolution]) -> Vec<BTreeSet<Atom>> {
    solutions.iter().map(|s| s.deleted.clone()).collect()
}

/// Runs every check for one answer of `program` over `instance`.
pub fn crosscheck(
    program: &Program,
    instance: &Instance,
    answer: &Answer,
    budget: OracleBudget,
) -> Result<CrossCheckReport> {
    let mut report = CrossCheckReport::default();
    let query = CauseQuery::new(program.clone(), instance.clone(), answer.clone())?;
    oracle_checks(&mut report, &query, budget)?;
    bridge_checks(&mut report, &query)?;
    cut_checks(&mut report, &query);
    Ok(report)
}

/// Solver outputs against the brute-force oracles.
pub fn oracle_checks(report: &mut CrossCheckReport, query: &CauseQuery, budget: OracleBudget) -> Result<()> {
    let program = query.program();
    let instance = query.instance();
    let answer = query.answer().to_vec();
    report.compare("causes-vs-oracle", query.actual_causes(), oracle_causality(query, budget)?);

    let responsibilities = |q: &CauseQuery| -> Result<BTreeMap<Atom, Responsibility>> {
        q.instance()
            .endogenous()
            .iter()
            .map(|t| Ok((t.clone(), q.responsibility(t)?)))
            .collect()
    };
    report.compare(
        "responsibility-vs-oracle",
        responsibilities(query)?,
        crate::oracle::oracle_responsibilities(query, budget)?,
    );
    report.compare("vc-causes-vs-oracle", query.vc_causes(), oracle_vc_causes(query, budget)?);

    let ap = answer_abduction(query)?;
    report.compare("diagnoses-vs-oracle", ap.diagnoses(), oracle_abduction(&ap, budget)?);

    for scope in [Scope::All, Scope::EndogenousOnly] {
        let task = DeletionTask::new(instance.clone(), program.clone(), answer.clone(), scope)?;
        for kind in KINDS {
            report.compare(
                format!("delprop-{kind}-{}-vs-oracle", scope_name(scope)),
                deleted_sets(&task.solutions(kind)),
                deleted_sets(&oracle_delprop(&task, kind, budget)?),
            );
        }
    }
    Ok(())
}

/// The abduction problem whose observation is the answer atom, with the
/// endogenous tuples as hypotheses and the exogenous tuples as database.
pub fn answer_abduction(query: &CauseQuery) -> Result<AbductionProblem> {
    let observation = Atom::new(query.program().answer_predicate().clone(), query.answer().iter().cloned());
    AbductionProblem::new(
        query.program().clone(),
        query.instance().exogenous().iter().cloned(),
        query.instance().endogenous().iter().cloned(),
        [observation],
    )
}

/// The reductions between causality, abduction and delete propagation.
pub fn bridge_checks(report: &mut CrossCheckReport, query: &CauseQuery) -> Result<()> {
    let program = query.program();
    let instance = query.instance();
    let answer = query.answer().to_vec();
    let causes = query.causes();

    let boolean = program.specialize(&answer)?;
    report.compare(
        "causes-as-relevant-hypotheses",
        causes.clone(),
        cdap_of(instance, &boolean)?.relevant_hypotheses(),
    );

    let mut by_query = BTreeMap::new();
    let mut by_necessary_sets = BTreeMap::new();
    for t in &causes {
        by_query.insert(t.clone(), query.responsibility(t)?);
        by_necessary_sets.insert(t.clone(), responsibility_via_necessary_sets(instance, &boolean, t)?);
    }
    report.compare("responsibility-as-necessary-sets", by_query, by_necessary_sets);

    let ap = answer_abduction(query)?;
    let mut relevant = BTreeSet::new();
    let mut via_causality = BTreeSet::new();
    for h in ap.hypotheses() {
        if ap.is_relevant(h)? {
            relevant.insert(h.clone());
        }
        if relevance_via_causality(&ap, h)? {
            via_causality.insert(h.clone());
        }
    }
    report.compare("relevance-as-causality", relevant, via_causality);

    let whole = DeletionTask::new(instance.clone(), program.clone(), answer.clone(), Scope::All)?;
    report.compare(
        "minimal-deletions-from-causes",
        deleted_sets(&whole.minimal_source_deletions()),
        deleted_sets(&whole.delprop_from_causes(DeletionKind::MinimalSourceSideEffect)),
    );
    report.compare(
        "minimum-deletions-from-most-responsible-causes",
        deleted_sets(&whole.minimum_source_deletions()),
        deleted_sets(&whole.delprop_from_causes(DeletionKind::MinimumSourceSideEffect)),
    );
    for scope in [Scope::All, Scope::EndogenousOnly] {
        let task = DeletionTask::new(instance.clone(), program.clone(), answer.clone(), scope)?;
        report.compare(
            format!("view-safe-deletion-iff-vc-cause-{}", scope_name(scope)),
            task.view_side_effect_free().is_some(),
            task.cause_query().has_vc_cause(),
        );
        report.compare(
            format!("view-safe-deletions-from-vc-causes-{}", scope_name(scope)),
            deleted_sets(&task.view_safe_deletions()),
            deleted_sets(&task.delprop_from_causes(DeletionKind::ViewSideEffectFree)),
        );
    }

    report.compare("causes-from-minimal-deletions", causes, whole.causes_from_minimal_sse());
    let partitioned = DeletionTask::new(instance.clone(), program.clone(), answer.clone(), Scope::EndogenousOnly)?;
    report.compare(
        "most-responsible-causes-from-minimum-deletions",
        query.most_responsible_causes(),
        partitioned.mrc_from_minimum_sse(),
    );
    report.compare("vc-causes-from-view-safe-deletions", query.vc_causes(), whole.vccauses_from_vsef());
    Ok(())
}

/// Minimum cuts against responsibilities, for linear self-join-free
/// single-rule queries; other queries add no checks.
pub fn cut_checks(report: &mut CrossCheckReport, query: &CauseQuery) {
    let applicable = query_shape(query.program()).is_ok_and(|s| s.linear);
    if !applicable {
        return;
    }
    let mut by_cut = BTreeMap::new();
    let mut by_responsibility = BTreeMap::new();
    for t in query.instance().endogenous() {
        let cut = match min_contingency_via_cut(query.instance(), query.program(), query.answer(), t) {
            Ok(found) => Some(found.size),
            Err(Error::NotACause(_)) => None,
            Err(Error::SelfJoin) => return,
            Err(other) => {
                report.record("cut-vs-responsibility", Err(other));
                return;
            }
        };
        by_cut.insert(t.clone(), cut.map_or(Responsibility::ZERO, Responsibility::from_contingency_size));
        by_responsibility.insert(t.clone(), query.responsibility(t).unwrap_or(Responsibility::ZERO));
    }
    report.compare("cut-vs-responsibility", by_cut, by_responsibility);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn author_journal_agrees() {
        let report = crosscheck(
            &fixtures::author_journal_query(),
            &fixtures::author_journal_instance(),
            &fixtures::answer("John,XML"),
            OracleBudget::default(),
        )
        .unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:?}");
        assert!(report.checks.iter().any(|c| c.name == "cut-vs-responsibility"));
    }

    #[test]
    fn mismatches_are_named() {
        let mut report = CrossCheckReport::default();
        report.compare("left-vs-right", 1, 2);
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["left-vs-right"]);
        assert!(!report.all_agree());
    }
}
