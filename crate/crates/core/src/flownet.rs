//! Linear conjunctive queries and minimum contingency sets by minimum cut.
//!
//! For a self-join-free query whose atoms admit an order in which each
//! variable occurs in a contiguous block, the witnesses of an answer are the
//! source-sink paths of a layered network: layer `i` holds the assignments to
//! the variables shared between the first `i` atoms and the rest, and each
//! tuple matching atom `i` is an edge between consecutive layers. Endogenous
//! tuples have capacity one and exogenous tuples are uncuttable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::datalog::{format_answer, Literal, Program, Term, Variable};
use crate::error::{Error, Result};
use crate::relmodel::{Atom, Constant, Instance};

/// Structural classification of a single-rule conjunctive query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryShape {
    pub linear: bool,
    pub chain_join: bool,
    /// Body positions in an order witnessing linearity.
    pub witness_order: Option<Vec<usize>>,
}

fn single_rule(program: &Program) -> Result<&crate::datalog::Rule> {
    match program.rules() {
        [rule] => Ok(rule),
        _ => Err(Error::NotSingleRule),
    }
}

pub fn query_shape(program: &Program) -> Result<QueryShape> {
    let body = single_rule(program)?.body();
    let witness_order = linear_order(body);
    let chain_join = chain_order(body).is_some();
    Ok(QueryShape {
        linear: witness_order.is_some(),
        chain_join,
        witness_order,
    })
}

fn variable_sets(body: &[Literal]) -> Vec<BTreeSet<&Variable>> {
    body.iter().map(|l| l.variables().collect()).collect()
}

/// An order of `body` in which every variable occurs in a contiguous block of
/// atoms with pairwise distinct predicates.
fn linear_order(body: &[Literal]) -> Option<Vec<usize>> {
    let vars = variable_sets(body);
    let all: BTreeSet<&Variable> = vars.iter().flatten().copied().collect();
    for v in &all {
        let mut seen = BTreeSet::new();
        for (lit, vs) in body.iter().zip(&vars) {
            if vs.contains(v) && !seen.insert(&lit.predicate) {
                return None;
            }
        }
    }
    let mut order = Vec::with_capacity(body.len());
    let mut used = vec![false; body.len()];
    search(&mut order, &mut used, &|order, next| {
        // Every variable of `next` seen before must still be open, i.e. in the last atom.
        let Some(&last) = order.last() else { return true };
        vars[next].iter().all(|v| {
            let seen_before = order.iter().any(|&i| vars[i].contains(v));
            !seen_before || vars[last].contains(v)
        })
    })
    .then_some(order)
}

/// An order with pairwise distinct predicates in which only adjacent atoms
/// share variables.
fn chain_order(body: &[Literal]) -> Option<Vec<usize>> {
    let predicates: BTreeSet<_> = body.iter().map(|l| &l.predicate).collect();
    if predicates.len() != body.len() {
        return None;
    }
    let vars = variable_sets(body);
    let mut order = Vec::with_capacity(body.len());
    let mut used = vec![false; body.len()];
    search(&mut order, &mut used, &|order, next| {
        let Some((_, earlier)) = order.split_last() else { return true };
        earlier.iter().all(|&i| vars[i].is_disjoint(&vars[next]))
    })
    .then_some(order)
}

fn search(order: &mut Vec<usize>, used: &mut [bool], fits: &dyn Fn(&[usize], usize) -> bool) -> bool {
    if order.len() == used.len() {
        return true;
    }
    for next in 0..used.len() {
        if used[next] || !fits(order, next) {
            continue;
        }
        used[next] = true;
        order.push(next);
        if search(order, used, fits) {
            return true;
        }
        order.pop();
        used[next] = false;
    }
    false
}

/// An edge capacity; infinite edges are never cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Capacity {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    edges: Vec<FlowEdge>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes {
            return Err(Error::InvalidNetwork(format!(
                "terminals {source} and {sink} must be below the node count {nodes}"
            )));
        }
        if source == sink {
            return Err(Error::InvalidNetwork("source and sink coincide".into()));
        }
        Ok(FlowNetwork {
            nodes,
            source,
            sink,
            edges: Vec::new(),
        })
    }

    /// Adds a directed edge and returns its index.
    pub fn add_edge(&mut self, from: usize, to: usize, capacity: Capacity) -> Result<usize> {
        if from >= self.nodes || to >= self.nodes {
            return Err(Error::InvalidNetwork(format!("edge {from}->{to} leaves the node range")));
        }
        self.edges.push(FlowEdge { from, to, capacity });
        Ok(self.edges.len() - 1)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFlow {
    /// Infinite when some source-sink path uses infinite edges only.
    pub value: Capacity,
    /// Edge indices of the minimum cut whose source side is smallest; empty
    /// when the value is infinite.
    pub cut: Vec<usize>,
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(net: &FlowNetwork, infinity: u64) -> Self {
        let mut r = Residual {
            head: Vec::with_capacity(2 * net.edges.len()),
            cap: Vec::with_capacity(2 * net.edges.len()),
            adj: vec![Vec::new(); net.nodes],
        };
        for e in &net.edges {
            let c = match e.capacity {
                Capacity::Finite(c) => c,
                Capacity::Infinite => infinity,
            };
            r.adj[e.from].push(r.head.len());
            r.head.push(e.to);
            r.cap.push(c);
            r.adj[e.to].push(r.head.len());
            r.head.push(e.from);
            r.cap.push(0);
        }
        r
    }

    fn levels(&self, source: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let w = self.head[arc];
                if self.cap[arc] > 0 && level[w].is_none() {
                    level[w] = Some(level[u].unwrap_or(0) + 1);
                    queue.push_back(w);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, sink: usize, pushed: u64, level: &[Option<usize>], next: &mut [usize]) -> u64 {
        if u == sink {
            return pushed;
        }
        while next[u] < self.adj[u].len() {
            let arc = self.adj[u][next[u]];
            let w = self.head[arc];
            let deeper = matches!((level[u], level[w]), (Some(a), Some(b)) if b == a + 1);
            if self.cap[arc] > 0 && deeper {
                let got = self.augment(w, sink, pushed.min(self.cap[arc]), level, next);
                if got > 0 {
                    self.cap[arc] -= got;
                    self.cap[arc ^ 1] += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }
}

/// Maximum flow by Dinic's algorithm, with a certifying minimum cut.
pub fn max_flow(net: &FlowNetwork) -> MaxFlow {
    let finite_total: u64 = net
        .edges
        .iter()
        .map(|e| match e.capacity {
            Capacity::Finite(c) => c,
            Capacity::Infinite => 0,
        })
        .sum();
    let infinity = finite_total + 1;
    let mut residual = Residual::new(net, infinity);
    let mut flow: u64 = 0;
    loop {
        let level = residual.levels(net.source);
        if level[net.sink].is_none() || flow >= infinity {
            break;
        }
        let mut next = vec![0; net.nodes];
        loop {
            let pushed = residual.augment(net.source, net.sink, u64::MAX, &level, &mut next);
            if pushed == 0 {
                break;
            }
            flow = flow.saturating_add(pushed);
            if flow >= infinity {
                break;
            }
        }
    }
    if flow >= infinity {
        return MaxFlow {
            value: Capacity::Infinite,
            cut: Vec::new(),
        };
    }
    let reached = residual.levels(net.source);
    let cut = net
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| reached[e.from].is_some() && reached[e.to].is_none())
        .map(|(i, _)| i)
        .collect();
    MaxFlow {
        value: Capacity::Finite(flow),
        cut,
    }
}

/// A smallest contingency set found by a minimum cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutContingency {
    pub size: usize,
    pub contingency: BTreeSet<Atom>,
}

/// The layered witness network of a linear query for one answer.
struct WitnessNetwork {
    net: FlowNetwork,
    /// Tuple carried by each edge.
    tuples: Vec<Atom>,
    /// Layer of each node.
    layer: Vec<usize>,
}

impl WitnessNetwork {
    fn build(body: &[Literal], instance: &Instance) -> Result<Self> {
        let m = body.len();
        let vars = variable_sets(body);
        // Variables shared between atoms [0, i) and [i, m).
        let boundaries: Vec<Vec<&Variable>> = (0..=m)
            .map(|i| {
                let before: BTreeSet<&Variable> = vars[..i].iter().flatten().copied().collect();
                let after: BTreeSet<&Variable> = vars[i..].iter().flatten().copied().collect();
                before.intersection(&after).copied().collect()
            })
            .collect();
        let mut ids: BTreeMap<(usize, Vec<Constant>), usize> = BTreeMap::new();
        ids.insert((0, Vec::new()), 0);
        ids.insert((m, Vec::new()), 1);
        let mut layer = vec![0, m];
        let mut pending = Vec::new();
        for (i, lit) in body.iter().enumerate() {
            for atom in instance.atoms().filter(|a| a.predicate == lit.predicate) {
                let Some(binding) = match_literal(lit, atom) else { continue };
                let key = |b: usize| -> (usize, Vec<Constant>) {
                    (b, boundaries[b].iter().map(|v| binding[v].clone()).collect())
                };
                let mut node = |k: (usize, Vec<Constant>)| {
                    let next = ids.len();
                    *ids.entry(k.clone()).or_insert_with(|| {
                        layer.push(k.0);
                        next
                    })
                };
                let from = node(key(i));
                let to = node(key(i + 1));
                let capacity = if instance.is_endogenous(atom) {
                    Capacity::Finite(1)
                } else {
                    Capacity::Infinite
                };
                pending.push((from, to, capacity, atom.clone()));
            }
        }
        let mut net = FlowNetwork::new(ids.len(), 0, 1)?;
        let mut tuples = Vec::with_capacity(pending.len());
        for (from, to, capacity, atom) in pending {
            net.add_edge(from, to, capacity)?;
            tuples.push(atom);
        }
        Ok(WitnessNetwork { net, tuples, layer })
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.net.nodes];
        for (i, e) in self.net.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        out
    }

    fn in_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.net.nodes];
        for (i, e) in self.net.edges.iter().enumerate() {
            inc[e.to].push(i);
        }
        inc
    }
}

fn match_literal<'a>(lit: &'a Literal, atom: &Atom) -> Option<BTreeMap<&'a Variable, Constant>> {
    let mut binding = BTreeMap::new();
    for (term, value) in lit.terms.iter().zip(&atom.args) {
        match term {
            Term::Const(c) if c != value => return None,
            Term::Const(_) => {}
            Term::Var(v) => {
                if let Some(old) = binding.insert(v, value.clone()) {
                    if &old != value {
                        return None;
                    }
                }
            }
        }
    }
    Some(binding)
}

/// All edge paths from `start` following `step` until `stop` holds.
fn paths(start: usize, step: &[Vec<usize>], advance: impl Fn(usize) -> usize, stop: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(start, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if stop(node) {
            out.push(path);
            continue;
        }
        for &e in &step[node] {
            let mut longer = path.clone();
            longer.push(e);
            stack.push((advance(e), longer));
        }
    }
    out
}

/// Body of the single rule with the answer constants substituted for the
/// head variables, in witness order.
fn grounded_body(program: &Program, answer: &[Constant]) -> Result<Vec<Literal>> {
    let rule = single_rule(program)?;
    if answer.len() != program.answer_arity() {
        return Err(Error::AnswerArity {
            expected: program.answer_arity(),
            found: answer.len(),
        });
    }
    let shape = query_shape(program)?;
    let order = shape.witness_order.ok_or(Error::NotLinear)?;
    let predicates: BTreeSet<_> = rule.body().iter().map(|l| &l.predicate).collect();
    if predicates.len() != rule.body().len() {
        return Err(Error::SelfJoin);
    }
    let mut binding: BTreeMap<&Variable, &Constant> = BTreeMap::new();
    for (term, value) in rule.head().terms.iter().zip(answer) {
        let clash = match term {
            Term::Const(c) => c != value,
            Term::Var(v) => binding.insert(v, value).is_some_and(|old| old != value),
        };
        if clash {
            return Err(Error::NotAnAnswer(format_answer(answer)));
        }
    }
    Ok(order
        .iter()
        .map(|&i| {
            let lit = &rule.body()[i];
            Literal::new(
                lit.predicate.clone(),
                lit.terms.iter().map(|t| match t.as_var().and_then(|v| binding.get(v)) {
                    Some(&c) => Term::Const(c.clone()),
                    None => t.clone(),
                }),
            )
        })
        .collect())
}

/// Size of a smallest contingency set of `t` for `answer`, by minimum cuts in
/// the witness network of a linear, self-join-free query.
pub fn min_contingency_via_cut(
    instance: &Instance,
    program: &Program,
    answer: &[Constant],
    t: &Atom,
) -> Result<CutContingency> {
    let body = grounded_body(program, answer)?;
    if !instance.is_endogenous(t) {
        return Err(Error::NotEndogenous(t.clone()));
    }
    let witness = WitnessNetwork::build(&body, instance)?;
    let net = &witness.net;
    let out = witness.out_edges();
    let inc = witness.in_edges();
    let m = body.len();
    let connected = !paths(net.source, &out, |e| net.edges[e].to, |n| witness.layer[n] == m).is_empty();
    if !connected {
        return Err(Error::NotAnAnswer(format_answer(answer)));
    }
    let Some(target) = witness.tuples.iter().position(|a| a == t) else {
        return Err(Error::NotACause(t.clone()));
    };
    let e_t = &net.edges[target];
    let prefixes = paths(e_t.from, &inc, |e| net.edges[e].from, |n| witness.layer[n] == 0);
    let suffixes = paths(e_t.to, &out, |e| net.edges[e].to, |n| witness.layer[n] == m);

    let mut best: Option<(u64, Vec<usize>)> = None;
    for prefix in &prefixes {
        for suffix in &suffixes {
            let protected: BTreeSet<usize> = prefix.iter().chain(suffix).copied().collect();
            let mut reduced = FlowNetwork::new(net.nodes, net.source, net.sink)?;
            let mut original = Vec::new();
            for (i, e) in net.edges.iter().enumerate() {
                if i == target {
                    continue;
                }
                let capacity = if protected.contains(&i) {
                    Capacity::Infinite
                } else {
                    e.capacity
                };
                reduced.add_edge(e.from, e.to, capacity)?;
                original.push(i);
            }
            let flow = max_flow(&reduced);
            if let Capacity::Finite(value) = flow.value {
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, flow.cut.iter().map(|&c| original[c]).collect()));
                }
            }
        }
    }
    let (size, cut) = best.ok_or_else(|| Error::NotACause(t.clone()))?;
    Ok(CutContingency {
        size: size as usize,
        contingency: cut.iter().map(|&e| witness.tuples[e].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(s: &str) -> Atom {
        s.parse().unwrap()
    }

    fn shape(text: &str) -> QueryShape {
        query_shape(&Program::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn shapes() {
        let s = shape("ans :- A(X), S1(X,V), S2(V,Y), R(Y,U), S3(Y,Z).");
        assert!(s.linear);
        assert!(!s.chain_join);
        assert!(!shape("ans :- A(X), B(Y), C(Z), W(X,Y,Z).").linear);
        let s = shape("ans :- R(X,Y), S(Y,Z), T(Z,X), V(X).");
        assert!(!s.linear && !s.chain_join);
        let s = shape("ans :- S(Y,Z), R(X,Y), T(Z,W).");
        assert!(s.chain_join && s.linear);
        assert_eq!(s.witness_order, Some(vec![1, 0, 2]));
        assert!(!shape("ans :- R(X,Y), R(Y,Z).").linear);
        assert!(matches!(
            query_shape(&Program::parse("ans :- R(X).\nans :- S(X).").unwrap()),
            Err(Error::NotSingleRule)
        ));
    }

    #[test]
    fn flow_basics() {
        let mut net = FlowNetwork::new(2, 0, 1).unwrap();
        net.add_edge(0, 1, Capacity::Finite(3)).unwrap();
        assert_eq!(max_flow(&net).value, Capacity::Finite(3));

        let mut diamond = FlowNetwork::new(4, 0, 3).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            diamond.add_edge(a, b, Capacity::Finite(1)).unwrap();
        }
        let flow = max_flow(&diamond);
        assert_eq!(flow.value, Capacity::Finite(2));
        assert_eq!(flow.cut, vec![0, 1]);

        let mut unbounded = FlowNetwork::new(3, 0, 2).unwrap();
        unbounded.add_edge(0, 1, Capacity::Infinite).unwrap();
        unbounded.add_edge(1, 2, Capacity::Infinite).unwrap();
        assert_eq!(max_flow(&unbounded).value, Capacity::Infinite);

        assert!(FlowNetwork::new(2, 1, 1).is_err());
        assert!(FlowNetwork::new(2, 0, 1).unwrap().add_edge(0, 5, Capacity::Finite(1)).is_err());
    }

    #[test]
    fn two_parallel_witnesses() {
        let program = Program::parse("ans :- A(X), S(X,Y).").unwrap();
        let instance =
            Instance::all_endogenous(["A(a1)", "A(a2)", "S(a1,b)", "S(a2,b)"].map(atom)).unwrap();
        let found = min_contingency_via_cut(&instance, &program, &[], &atom("A(a1)")).unwrap();
        assert_eq!(found.size, 1);
        assert_eq!(found.contingency, BTreeSet::from([atom("A(a2)")]));
    }

    #[test]
    fn counterfactual_and_parallel_chains() {
        let program = Program::parse("ans :- A(X), S(X,Y), T(Y).").unwrap();
        let instance = Instance::all_endogenous(["A(a)", "S(a,b)", "T(b)"].map(atom)).unwrap();
        assert_eq!(min_contingency_via_cut(&instance, &program, &[], &atom("S(a,b)")).unwrap().size, 0);

        let instance = Instance::all_endogenous(
            ["A(a)", "S(a,b)", "T(b)", "A(c)", "S(c,d)", "T(d)", "A(e)", "S(e,f)", "T(f)", "A(g)", "S(g,h)", "T(h)"]
                .map(atom),
        )
        .unwrap();
        assert_eq!(min_contingency_via_cut(&instance, &program, &[], &atom("A(a)")).unwrap().size, 3);
    }

    #[test]
    fn exogenous_edges_cannot_be_cut() {
        let program = Program::parse("ans :- A(X), S(X,Y).").unwrap();
        let instance = Instance::new(["A(a1)", "S(a1,b)"].map(atom), ["A(a2)", "S(a2,b)"].map(atom)).unwrap();
        assert!(matches!(
            min_contingency_via_cut(&instance, &program, &[], &atom("A(a1)")),
            Err(Error::NotACause(_))
        ));
    }

    #[test]
    fn answer_constants_restrict_witnesses() {
        let program = Program::parse("Ans(X) :- A(X), S(X,Y).").unwrap();
        let instance =
            Instance::all_endogenous(["A(a1)", "A(a2)", "S(a1,b)", "S(a2,b)", "S(a1,c)"].map(atom)).unwrap();
        let found = min_contingency_via_cut(&instance, &program, &[Constant::new("a1")], &atom("S(a1,b)")).unwrap();
        assert_eq!(found.size, 1);
        assert_eq!(found.contingency, BTreeSet::from([atom("S(a1,c)")]));
        assert!(matches!(
            min_contingency_via_cut(&instance, &program, &[Constant::new("a1")], &atom("A(a2)")),
            Err(Error::NotACause(_))
        ));
    }

    #[test]
    fn rejects_unsupported_queries() {
        let instance = Instance::all_endogenous([atom("R(a,b)")]).unwrap();
        let nonlinear = Program::parse("ans :- A(X), B(Y), C(Z), W(X,Y,Z).").unwrap();
        assert!(matches!(
            min_contingency_via_cut(&instance, &nonlinear, &[], &atom("R(a,b)")),
            Err(Error::NotLinear)
        ));
        let self_join = Program::parse("ans :- R(X,Y), S(Y,Z), R(Z,W).").unwrap();
        assert!(matches!(
            min_contingency_via_cut(&instance, &self_join, &[], &atom("R(a,b)")),
            Err(Error::SelfJoin)
        ));
    }

    /// Smallest capacity over all source-sink cuts, by enumerating source sides.
    fn cut_by_enumeration(net: &FlowNetwork) -> Capacity {
        let inner: Vec<usize> = (0..net.nodes()).filter(|&v| v != net.source() && v != net.sink()).collect();
        let mut best = Capacity::Infinite;
        for mask in 0..1u32 << inner.len() {
            let mut side = vec![false; net.nodes()];
            side[net.source()] = true;
            for (bit, &v) in inner.iter().enumerate() {
                side[v] = mask >> bit & 1 == 1;
            }
            let mut total = 0;
            let mut finite = true;
            for e in net.edges().iter().filter(|e| side[e.from] && !side[e.to]) {
                match e.capacity {
                    Capacity::Finite(c) => total += c,
                    Capacity::Infinite => finite = false,
                }
            }
            if finite {
                best = best.min(Capacity::Finite(total));
            }
        }
        best
    }

    fn network() -> impl Strategy<Value = FlowNetwork> {
        (2usize..=10).prop_flat_map(|n| {
            let edge = (0..n, 0..n, prop_oneof![4 => (0u64..6).prop_map(Capacity::Finite), 1 => Just(Capacity::Infinite)]);
            proptest::collection::vec(edge, 0..25).prop_map(move |edges| {
                let mut net = FlowNetwork::new(n, 0, n - 1).unwrap();
                for (a, b, c) in edges {
                    net.add_edge(a, b, c).unwrap();
                }
                net
            })
        })
    }

    proptest! {
        #[test]
        fn max_flow_equals_min_cut(net in network()) {
            let flow = max_flow(&net);
            prop_assert_eq!(flow.value, cut_by_enumeration(&net));
            if let Capacity::Finite(value) = flow.value {
                let cut: u64 = flow.cut.iter().map(|&e| match net.edges()[e].capacity {
                    Capacity::Finite(c) => c,
                    Capacity::Infinite => u64::MAX,
                }).sum();
                prop_assert_eq!(cut, value);
            }
        }

        #[test]
        fn chain_joins_are_linear(atoms in proptest::collection::vec((0usize..4, proptest::collection::vec(0usize..4, 1..=3)), 1..=5)) {
            let body: Vec<String> = atoms
                .iter()
                .map(|(p, vars)| {
                    let args: Vec<String> = vars.iter().map(|v| format!("V{v}")).collect();
                    format!("P{p}_{}({})", vars.len(), args.join(","))
                })
                .collect();
            let program = Program::parse(&format!("ans :- {}.", body.join(", "))).unwrap();
            let shape = query_shape(&program).unwrap();
            prop_assert!(!shape.chain_join || shape.linear);
            prop_assert_eq!(shape.linear, shape.witness_order.is_some());
        }
    }
}
