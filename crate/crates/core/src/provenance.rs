//! Minimal supports of derived atoms.
//!
//! Each atom of the least model is labelled with the antichain of minimal
//! candidate sets that derive it (fixed atoms are free, candidate `i` costs
//! `{i}`). Labels are propagated through the ground rules until stable, which
//! also covers recursive programs.

use std::collections::VecDeque;

use crate::bits::{Antichain, TupleSet};
use crate::datalog::{fixpoint, Program};
use crate::error::Result;
use crate::relmodel::Atom;

/// For every goal, the subset-minimal `Δ ⊆ candidates` (as index sets) such
/// that `program ∪ fixed ∪ Δ` derives the goal.
pub(crate) fn minimal_supports<'a>(
    program: &Program,
    fixed: impl IntoIterator<Item = &'a Atom> + Clone,
    candidates: &'a [Atom],
    goals: &[Atom],
) -> Result<Vec<Antichain>> {
    let model = fixpoint(program, fixed.clone().into_iter().chain(candidates))?;
    let offsets = model.offsets();
    let total = *offsets.last().unwrap_or(&0);
    let dense = |r: crate::datalog::AtomRef| offsets[r.pred as usize] + r.row as usize;

    let mut labels = vec![Antichain::new(); total];
    for (i, atom) in candidates.iter().enumerate() {
        if let Some(r) = model.lookup(atom) {
            labels[dense(r)].insert(TupleSet::singleton(i));
        }
    }
    for atom in fixed {
        if let Some(r) = model.lookup(atom) {
            labels[dense(r)].insert(TupleSet::empty());
        }
    }

    let rules: Vec<(usize, Vec<usize>)> = model
        .ground_rules()
        .into_iter()
        .map(|g| (dense(g.head), g.body.into_iter().map(dense).collect()))
        .collect();

    let mut by_head: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (idx, (head, _)) in rules.iter().enumerate() {
        by_head[*head].push(idx);
    }
    let goal_ids: Vec<Option<usize>> = goals.iter().map(|g| model.lookup(g).map(dense)).collect();

    // Restrict to the rules that can contribute to some goal.
    let mut in_cone = vec![false; total];
    let mut stack: Vec<usize> = goal_ids.iter().flatten().copied().collect();
    for &g in &stack {
        in_cone[g] = true;
    }
    let mut live_rules = Vec::new();
    while let Some(atom) = stack.pop() {
        for &idx in &by_head[atom] {
            live_rules.push(idx);
            for &b in &rules[idx].1 {
                if !in_cone[b] {
                    in_cone[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    live_rules.sort_unstable();

    let mut users: Vec<Vec<usize>> = vec![Vec::new(); total];
    for &idx in &live_rules {
        for &b in &rules[idx].1 {
            if users[b].last() != Some(&idx) {
                users[b].push(idx);
            }
        }
    }

    let mut queued = vec![false; rules.len()];
    let mut worklist: VecDeque<usize> = live_rules.iter().copied().collect();
    for &idx in &live_rules {
        queued[idx] = true;
    }
    while let Some(idx) = worklist.pop_front() {
        queued[idx] = false;
        let (head, body) = &rules[idx];
        let mut acc = Antichain::unit();
        for &b in body {
            acc = acc.product(&labels[b]);
            if acc.is_empty() {
                break;
            }
        }
        if acc.is_empty() {
            continue;
        }
        if labels[*head].merge(&acc) {
            for &user in &users[*head] {
                if !queued[user] {
                    queued[user] = true;
                    worklist.push_back(user);
                }
            }
        }
    }

    Ok(goal_ids
        .into_iter()
        .map(|g| g.map(|id| labels[id].clone()).unwrap_or_default())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(text: &str) -> Vec<Atom> {
        text.split(';').map(|s| s.trim().parse().unwrap()).collect()
    }

    fn sorted(chain: &Antichain) -> Vec<Vec<usize>> {
        chain.clone().into_sorted().iter().map(|s| s.iter().collect()).collect()
    }

    #[test]
    fn supports_of_a_boolean_join() {
        let program = Program::parse("ans :- R(X,Y), S(Y).").unwrap();
        let candidates = atoms("R(a1,a4); R(a2,a1); R(a3,a3); S(a1); S(a2); S(a3)");
        let goal: Atom = "ans".parse().unwrap();
        let out = minimal_supports(&program, [], &candidates, &[goal]).unwrap();
        assert_eq!(sorted(&out[0]), vec![vec![1, 3], vec![2, 5]]);
    }

    #[test]
    fn fixed_atoms_are_free() {
        let program = Program::parse("ans :- R(X), S(X).").unwrap();
        let fixed = atoms("S(a)");
        let candidates = atoms("R(a)");
        let goal: Atom = "ans".parse().unwrap();
        let out = minimal_supports(&program, &fixed, &candidates, &[goal]).unwrap();
        assert_eq!(sorted(&out[0]), vec![vec![0]]);
    }

    #[test]
    fn recursion_yields_every_minimal_path() {
        let program =
            Program::parse("T(X,Y) :- E(X,Y).\nT(X,Y) :- E(X,Z), T(Z,Y).\nans :- T(a,d).").unwrap();
        let candidates = atoms("E(a,b); E(b,d); E(a,c); E(c,d); E(b,c); E(c,b)");
        let goal: Atom = "ans".parse().unwrap();
        let out = minimal_supports(&program, [], &candidates, &[goal]).unwrap();
        assert_eq!(
            sorted(&out[0]),
            vec![vec![0, 1], vec![2, 3], vec![0, 3, 4], vec![1, 2, 5]]
        );
    }

    #[test]
    fn underivable_goal_has_no_support() {
        let program = Program::parse("ans :- R(X), S(X).").unwrap();
        let candidates = atoms("R(a); S(b)");
        let goal: Atom = "ans".parse().unwrap();
        let out = minimal_supports(&program, [], &candidates, &[goal]).unwrap();
        assert!(out[0].is_empty());
    }
}
