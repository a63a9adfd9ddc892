//! Semi-naive bottom-up evaluation.
//!
//! Relations are append-only, so the delta of an iteration is a contiguous
//! range of tuple indices. Each rule body is joined left to right; a literal
//! is matched through the index of its first bound column when it has one.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use crate::error::{Error, Result};
use crate::relmodel::{Atom, Constant, Predicate};

use super::{Program, Term};

type Emit<'a> = dyn FnMut(&[Option<Constant>], &[AtomRef]) + 'a;

type Tuple = Vec<Constant>;

#[derive(Debug, Default)]
struct Relation {
    arity: usize,
    tuples: Vec<Tuple>,
    positions: HashMap<Tuple, u32>,
    index: Vec<HashMap<Constant, Vec<u32>>>,
}

impl Relation {
    fn new(arity: usize) -> Self {
        Relation {
            arity,
            index: vec![HashMap::new(); arity],
            ..Default::default()
        }
    }

    fn len(&self) -> u32 {
        self.tuples.len() as u32
    }

    fn insert(&mut self, tuple: Tuple) -> bool {
        if self.positions.contains_key(&tuple) {
            return false;
        }
        let idx = self.len();
        for (col, value) in tuple.iter().enumerate() {
            self.index[col].entry(value.clone()).or_default().push(idx);
        }
        self.positions.insert(tuple.clone(), idx);
        self.tuples.push(tuple);
        true
    }
}

/// Reference to a tuple of the model: predicate slot and row index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct AtomRef {
    pub pred: u32,
    pub row: u32,
}

#[derive(Clone, Debug)]
enum Slot {
    Var(usize),
    Const(Constant),
}

#[derive(Clone, Debug)]
struct CompiledLiteral {
    pred: usize,
    slots: Vec<Slot>,
}

#[derive(Clone, Debug)]
struct CompiledRule {
    head: CompiledLiteral,
    body: Vec<CompiledLiteral>,
    vars: usize,
}

/// A ground instance of a rule whose body atoms all hold in the model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct GroundRule {
    pub head: AtomRef,
    pub body: Vec<AtomRef>,
}

/// The least model of a program over a set of facts.
#[derive(Debug)]
pub(crate) struct Model {
    predicates: Vec<Predicate>,
    ids: HashMap<Predicate, usize>,
    relations: Vec<Relation>,
    rules: Vec<CompiledRule>,
}

impl Model {
    pub fn contains(&self, atom: &Atom) -> bool {
        self.lookup(atom).is_some()
    }

    pub fn lookup(&self, atom: &Atom) -> Option<AtomRef> {
        let pred = *self.ids.get(&atom.predicate)?;
        let row = *self.relations[pred].positions.get(&atom.args)?;
        Some(AtomRef {
            pred: pred as u32,
            row,
        })
    }

    pub fn tuples<'a>(&'a self, predicate: &Predicate) -> impl Iterator<Item = &'a Tuple> + 'a {
        self.ids
            .get(predicate)
            .map(|&p| self.relations[p].tuples.iter())
            .into_iter()
            .flatten()
    }

    /// Dense numbering of all atoms: offsets per predicate slot.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.relations.len() + 1);
        let mut total = 0;
        for rel in &self.relations {
            offsets.push(total);
            total += rel.tuples.len();
        }
        offsets.push(total);
        offsets
    }

    /// Every instantiation of every rule over the model.
    pub fn ground_rules(&self) -> Vec<GroundRule> {
        let mut out = Vec::new();
        for rule in &self.rules {
            let ranges: Vec<Range<u32>> = rule.body.iter().map(|l| 0..self.relations[l.pred].len()).collect();
            let mut binding = vec![None; rule.vars];
            let mut matched = Vec::with_capacity(rule.body.len());
            self.join(rule, &ranges, 0, &mut binding, &mut matched, &mut |binding, matched| {
                let head = instantiate(&rule.head, binding);
                let row = self.relations[rule.head.pred].positions[&head];
                out.push(GroundRule {
                    head: AtomRef {
                        pred: rule.head.pred as u32,
                        row,
                    },
                    body: matched.to_vec(),
                });
            });
        }
        out
    }

    fn join(
        &self,
        rule: &CompiledRule,
        ranges: &[Range<u32>],
        pos: usize,
        binding: &mut Vec<Option<Constant>>,
        matched: &mut Vec<AtomRef>,
        emit: &mut Emit<'_>,
    ) {
        if pos == rule.body.len() {
            emit(binding, matched);
            return;
        }
        let lit = &rule.body[pos];
        let rel = &self.relations[lit.pred];
        let range = ranges[pos].clone();
        let key = lit.slots.iter().enumerate().find_map(|(col, slot)| match slot {
            Slot::Const(c) => Some((col, c.clone())),
            Slot::Var(v) => binding[*v].clone().map(|c| (col, c)),
        });
        let mut visit = |row: u32, binding: &mut Vec<Option<Constant>>, matched: &mut Vec<AtomRef>| {
            let tuple = &rel.tuples[row as usize];
            let mut bound_here = Vec::new();
            let mut ok = true;
            for (slot, value) in lit.slots.iter().zip(tuple) {
                match slot {
                    Slot::Const(c) => {
                        if c != value {
                            ok = false;
                            break;
                        }
                    }
                    Slot::Var(v) => match &binding[*v] {
                        Some(b) => {
                            if b != value {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            binding[*v] = Some(value.clone());
                            bound_here.push(*v);
                        }
                    },
                }
            }
            if ok {
                matched.push(AtomRef {
                    pred: lit.pred as u32,
                    row,
                });
                self.join(rule, ranges, pos + 1, binding, matched, emit);
                matched.pop();
            }
            for v in bound_here {
                binding[v] = None;
            }
        };
        match key {
            Some((col, value)) => {
                if let Some(rows) = rel.index[col].get(&value) {
                    let start = rows.partition_point(|&r| r < range.start);
                    for &row in rows[start..].iter().take_while(|&&r| r < range.end) {
                        visit(row, binding, matched);
                    }
                }
            }
            None => {
                for row in range {
                    visit(row, binding, matched);
                }
            }
        }
    }
}

fn instantiate(lit: &CompiledLiteral, binding: &[Option<Constant>]) -> Tuple {
    lit.slots
        .iter()
        .map(|s| match s {
            Slot::Const(c) => c.clone(),
            Slot::Var(v) => binding[*v].clone().expect("safe rule binds every head variable"),
        })
        .collect()
}

/// Computes the least model of `program ∪ facts`.
pub(crate) fn fixpoint<'a>(program: &Program, facts: impl IntoIterator<Item = &'a Atom>) -> Result<Model> {
    let mut model = Model {
        predicates: Vec::new(),
        ids: HashMap::new(),
        relations: Vec::new(),
        rules: Vec::new(),
    };
    let intern = |model: &mut Model, pred: &Predicate, arity: usize| -> Result<usize> {
        if let Some(&id) = model.ids.get(pred) {
            let expected = model.relations[id].arity;
            if expected != arity {
                return Err(Error::ArityConflict {
                    predicate: pred.clone(),
                    expected,
                    found: arity,
                });
            }
            return Ok(id);
        }
        let id = model.relations.len();
        model.ids.insert(pred.clone(), id);
        model.predicates.push(pred.clone());
        model.relations.push(Relation::new(arity));
        Ok(id)
    };

    let mut is_idb = Vec::new();
    for rule in program.rules() {
        let mut vars: BTreeMap<String, usize> = BTreeMap::new();
        let mut compile = |model: &mut Model, lit: &super::Literal| -> Result<CompiledLiteral> {
            let pred = intern(model, &lit.predicate, lit.arity())?;
            let slots = lit
                .terms
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(c.clone()),
                    Term::Var(v) => {
                        let next = vars.len();
                        Slot::Var(*vars.entry(v.name().to_string()).or_insert(next))
                    }
                })
                .collect();
            Ok(CompiledLiteral { pred, slots })
        };
        let body = rule
            .body()
            .iter()
            .map(|l| compile(&mut model, l))
            .collect::<Result<Vec<_>>>()?;
        let head = compile(&mut model, rule.head())?;
        let compiled = CompiledRule {
            head,
            body,
            vars: vars.len(),
        };
        if is_idb.len() < model.relations.len() {
            is_idb.resize(model.relations.len(), false);
        }
        is_idb[compiled.head.pred] = true;
        model.rules.push(compiled);
    }

    for atom in facts {
        let pred = intern(&mut model, &atom.predicate, atom.arity())?;
        if is_idb.get(pred).copied().unwrap_or(false) {
            return Err(Error::EdbInRuleHead(atom.predicate.clone()));
        }
        model.relations[pred].insert(atom.args.clone());
    }
    is_idb.resize(model.relations.len(), false);

    // First round: every rule over the full extensional data.
    let mut delta_start: Vec<u32> = vec![0; model.relations.len()];
    let mut pending: Vec<(usize, Tuple)> = Vec::new();
    for rule in &model.rules {
        let ranges: Vec<Range<u32>> = rule.body.iter().map(|l| 0..model.relations[l.pred].len()).collect();
        collect(&model, rule, &ranges, &mut pending);
    }
    for (i, rel) in model.relations.iter().enumerate() {
        delta_start[i] = rel.len();
    }
    let mut changed = apply(&mut model, &mut pending);

    while changed {
        let snapshot: Vec<u32> = model.relations.iter().map(Relation::len).collect();
        for rule in &model.rules {
            for (i, lit) in rule.body.iter().enumerate() {
                if !is_idb[lit.pred] || delta_start[lit.pred] == snapshot[lit.pred] {
                    continue;
                }
                let ranges: Vec<Range<u32>> = rule
                    .body
                    .iter()
                    .enumerate()
                    .map(|(j, l)| {
                        if j == i {
                            delta_start[l.pred]..snapshot[l.pred]
                        } else {
                            0..snapshot[l.pred]
                        }
                    })
                    .collect();
                collect(&model, rule, &ranges, &mut pending);
            }
        }
        delta_start = snapshot;
        changed = apply(&mut model, &mut pending);
    }
    Ok(model)
}

fn collect(model: &Model, rule: &CompiledRule, ranges: &[Range<u32>], pending: &mut Vec<(usize, Tuple)>) {
    let mut binding = vec![None; rule.vars];
    let mut matched = Vec::with_capacity(rule.body.len());
    model.join(rule, ranges, 0, &mut binding, &mut matched, &mut |binding, _| {
        pending.push((rule.head.pred, instantiate(&rule.head, binding)));
    });
}

fn apply(model: &mut Model, pending: &mut Vec<(usize, Tuple)>) -> bool {
    let mut changed = false;
    for (pred, tuple) in pending.drain(..) {
        changed |= model.relations[pred].insert(tuple);
    }
    changed
}
