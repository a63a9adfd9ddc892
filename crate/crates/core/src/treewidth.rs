//! Hypergraphs of instances, tree decompositions and guardedness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::abduction::AbductionProblem;
use crate::datalog::Program;
use crate::error::{Error, Result};
use crate::relmodel::{Atom, Constant, Instance};

/// Largest vertex count accepted by [`DecompositionMode::Exact`].
pub const EXACT_VERTEX_CAP: usize = 12;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Hypergraph {
    pub vertices: BTreeSet<Constant>,
    pub edges: BTreeSet<BTreeSet<Constant>>,
}

impl Hypergraph {
    /// Vertices are the constants; each atom contributes its set of arguments.
    pub fn of_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut h = Hypergraph::default();
        for atom in atoms {
            let edge: BTreeSet<Constant> = atom.args.iter().cloned().collect();
            h.vertices.extend(edge.iter().cloned());
            h.edges.insert(edge);
        }
        h
    }
}

pub fn hypergraph_of(instance: &Instance) -> Hypergraph {
    Hypergraph::of_atoms(instance.atoms())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<BTreeSet<Constant>>,
    /// Tree edges between bag indices.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionDefect {
    NotATree,
    VertexUncovered(Constant),
    EdgeUncovered(BTreeSet<Constant>),
    Disconnected(Constant),
}

impl fmt::Display for DecompositionDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionDefect::NotATree => f.write_str("the bags do not form a tree"),
            DecompositionDefect::VertexUncovered(v) => write!(f, "vertex {v} is in no bag"),
            DecompositionDefect::EdgeUncovered(e) => write!(f, "hyperedge {e:?} is in no bag"),
            DecompositionDefect::Disconnected(v) => write!(f, "bags containing {v} are not connected"),
        }
    }
}

impl TreeDecomposition {
    /// Largest bag size minus one, saturating at zero.
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks the tree shape, vertex and edge coverage, and connectedness.
    pub fn validate(&self, h: &Hypergraph) -> std::result::Result<(), DecompositionDefect> {
        let n = self.bags.len();
        if n == 0 || self.edges.len() != n - 1 || self.edges.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(DecompositionDefect::NotATree);
        }
        let adj = self.adjacency();
        if reachable(&adj, 0, |_| true).iter().filter(|&&r| r).count() != n {
            return Err(DecompositionDefect::NotATree);
        }
        for v in &h.vertices {
            let holders: Vec<usize> = (0..n).filter(|&i| self.bags[i].contains(v)).collect();
            let Some(&first) = holders.first() else {
                return Err(DecompositionDefect::VertexUncovered(v.clone()));
            };
            let seen = reachable(&adj, first, |i| self.bags[i].contains(v));
            if holders.iter().any(|&i| !seen[i]) {
                return Err(DecompositionDefect::Disconnected(v.clone()));
            }
        }
        for e in &h.edges {
            if !self.bags.iter().any(|b| e.is_subset(b)) {
                return Err(DecompositionDefect::EdgeUncovered(e.clone()));
            }
        }
        Ok(())
    }
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WidthReport {
    pub width: usize,
    /// Whether `width` is the tree-width itself rather than an upper bound.
    pub is_exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionMode {
    /// Min-fill elimination ordering.
    Heuristic,
    /// Optimal ordering by dynamic programming over vertex subsets.
    Exact,
}

/// Primal graph over vertex indices in canonical order.
struct PrimalGraph {
    vertices: Vec<Constant>,
    adj: Vec<BTreeSet<usize>>,
}

impl PrimalGraph {
    fn new(h: &Hypergraph) -> Self {
        let vertices: Vec<Constant> = h.vertices.iter().cloned().collect();
        let index: BTreeMap<&Constant, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj = vec![BTreeSet::new(); vertices.len()];
        for e in &h.edges {
            let ids: Vec<usize> = e.iter().map(|v| index[v]).collect();
            for &a in &ids {
                for &b in &ids {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        PrimalGraph { vertices, adj }
    }

    fn min_fill_order(&self) -> Vec<usize> {
        let mut adj = self.adj.clone();
        let mut alive: BTreeSet<usize> = (0..adj.len()).collect();
        let mut order = Vec::with_capacity(adj.len());
        while !alive.is_empty() {
            let v = *alive
                .iter()
                .min_by_key(|&&v| (fill_in(&adj, v), v))
                .expect("alive is nonempty");
            eliminate(&mut adj, v);
            alive.remove(&v);
            order.push(v);
        }
        order
    }

    /// Optimal elimination ordering for graphs of at most [`EXACT_VERTEX_CAP`] vertices.
    fn exact_order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let full = (1usize << n) - 1;
        // best[S]: least achievable maximum neighbourhood size when the vertices
        // of S are eliminated first; choice[S]: the last of them to go.
        let mut best = vec![usize::MAX; full + 1];
        let mut choice = vec![usize::MAX; full + 1];
        best[0] = 0;
        for set in 1..=full {
            for v in (0..n).filter(|v| set & (1 << v) != 0) {
                let rest = set & !(1 << v);
                let cost = best[rest].max(self.eliminated_degree(rest, v));
                if cost < best[set] {
                    best[set] = cost;
                    choice[set] = v;
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut set = full;
        while set != 0 {
            let v = choice[set];
            order.push(v);
            set &= !(1 << v);
        }
        order.reverse();
        order
    }

    /// Number of vertices outside `eliminated ∪ {v}` reachable from `v`
    /// through `eliminated`: the degree of `v` once `eliminated` is gone.
    fn eliminated_degree(&self, eliminated: usize, v: usize) -> usize {
        let mut seen = 1usize << v;
        let mut stack = vec![v];
        let mut count = 0;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if seen & (1 << w) != 0 {
                    continue;
                }
                seen |= 1 << w;
                if eliminated & (1 << w) != 0 {
                    stack.push(w);
                } else {
                    count += 1;
                }
            }
        }
        count
    }

    /// Decomposition whose bags are the eliminated vertices with their
    /// neighbourhoods at elimination time.
    fn decomposition(&self, order: &[usize]) -> TreeDecomposition {
        let n = order.len();
        if n == 0 {
            return TreeDecomposition {
                bags: vec![BTreeSet::new()],
                edges: Vec::new(),
            };
        }
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut adj = self.adj.clone();
        let mut bags = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n - 1);
        for (i, &v) in order.iter().enumerate() {
            let neighbours: BTreeSet<usize> = adj[v].clone();
            let mut bag: BTreeSet<Constant> = neighbours.iter().map(|&u| self.vertices[u].clone()).collect();
            bag.insert(self.vertices[v].clone());
            bags.push(bag);
            if i + 1 < n {
                let parent = neighbours.iter().map(|&u| position[u]).min().unwrap_or(i + 1);
                edges.push((i, parent));
            }
            eliminate(&mut adj, v);
        }
        TreeDecomposition { bags, edges }
    }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let neighbours: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in neighbours.iter().enumerate() {
        for &b in &neighbours[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let neighbours: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
    for &a in &neighbours {
        adj[a].remove(&v);
        for &b in &neighbours {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
}

/// A validated tree decomposition of `h` with its width.
pub fn tree_decomposition(h: &Hypergraph, mode: DecompositionMode) -> Result<(TreeDecomposition, WidthReport)> {
    let graph = PrimalGraph::new(h);
    let order = match mode {
        DecompositionMode::Heuristic => graph.min_fill_order(),
        DecompositionMode::Exact => {
            if graph.vertices.len() > EXACT_VERTEX_CAP {
                return Err(Error::ExactTooLarge {
                    cap: EXACT_VERTEX_CAP,
                    found: graph.vertices.len(),
                });
            }
            graph.exact_order()
        }
    };
    let td = graph.decomposition(&order);
    if let Err(defect) = td.validate(h) {
        panic!("elimination produced an invalid decomposition: {defect}");
    }
    let report = WidthReport {
        width: td.width(),
        is_exact: mode == DecompositionMode::Exact,
    };
    Ok((td, report))
}

/// Whether every rule body has an atom mentioning all of the body's variables.
pub fn is_guarded(program: &Program) -> bool {
    program.rules().iter().all(|rule| {
        let all = rule.body_variables();
        rule.body().iter().any(|lit| {
            let vars: BTreeSet<_> = lit.variables().collect();
            all.is_subset(&vars)
        })
    })
}

/// Whether the program is guarded and the database has heuristic width at
/// most `k`, the regime in which relevance is fixed-parameter tractable.
pub fn fpt_gate(ap: &AbductionProblem, k: usize) -> bool {
    if !is_guarded(ap.program()) {
        return false;
    }
    let h = Hypergraph::of_atoms(ap.edb());
    let (_, report) = tree_decomposition(&h, DecompositionMode::Heuristic).expect("heuristic mode has no size cap");
    report.width <= k
}
