//! Exhaustive minor-embedding search.
//!
//! Iterative deepening over the number of extra qubits: level 0 is plain
//! subgraph isomorphism (all trees singletons), level `k` allows trees whose
//! sizes add up to `n + k`. Within a level, logical vertices are placed in a
//! fixed order and each is tried on every connected set of free qubits,
//! smallest sets first and then in sorted order, so results are reproducible
//! and use as few qubits as possible.

use std::collections::BTreeSet;

use super::{Embedding, Processor};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Candidate-tree expansions allowed before the search gives up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

pub fn find_embedding(problem: &WeightedGraph, proc: &Processor) -> Result<Embedding> {
    find_embedding_with_budget(problem, proc, DEFAULT_SEARCH_BUDGET)
}

/// Like [`find_embedding`] with an explicit budget. Returns
/// [`Error::EmbeddingImpossible`] only when every level was searched to
/// completion, and [`Error::EmbeddingBudget`] when the budget ran out first.
pub fn find_embedding_with_budget(problem: &WeightedGraph, proc: &Processor, budget: u64) -> Result<Embedding> {
    let n = problem.n();
    let hw = proc.graph();
    if n == 0 {
        return Err(Error::Graph("problem graph has no vertices".into()));
    }
    if n > hw.n() {
        return Err(Error::EmbeddingImpossible(format!(
            "{n} logical vertices cannot fit on {} qubits",
            hw.n()
        )));
    }
    let mut search = Search {
        problem,
        hw,
        order: placement_order(problem),
        trees: vec![None; n],
        used: vec![false; hw.n()],
        expansions: 0,
        budget,
    };
    for extra in 0..=(hw.n() - n) {
        match search.place(0, extra) {
            Ok(true) => {
                let trees = search.trees.into_iter().map(|t| t.expect("all placed")).collect();
                return Ok(Embedding::new(trees));
            }
            Ok(false) => continue,
            Err(()) => return Err(Error::EmbeddingBudget(budget)),
        }
    }
    Err(Error::EmbeddingImpossible(format!(
        "no minor embedding into '{}' exists (exhaustive search)",
        proc.name
    )))
}

/// Next vertex: the unplaced one with most placed neighbours, then highest
/// degree, then lowest index.
fn placement_order(g: &WeightedGraph) -> Vec<usize> {
    let n = g.n();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let attached = g.neighbors(v).iter().filter(|&&u| placed[u]).count();
                (attached, g.degree(v), std::cmp::Reverse(v))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    problem: &'a WeightedGraph,
    hw: &'a WeightedGraph,
    order: Vec<usize>,
    trees: Vec<Option<BTreeSet<usize>>>,
    used: Vec<bool>,
    expansions: u64,
    budget: u64,
}

impl Search<'_> {
    /// `Ok(true)` when the remaining vertices were placed, `Ok(false)` when
    /// this branch is exhausted, `Err(())` when the budget ran out.
    fn place(&mut self, depth: usize, extra: usize) -> std::result::Result<bool, ()> {
        if depth == self.order.len() {
            return Ok(extra == 0);
        }
        let free = self.used.iter().filter(|u| !**u).count();
        if free < self.order.len() - depth + extra {
            return Ok(false);
        }
        let v = self.order[depth];
        let placed_neighbours: Vec<usize> = self
            .problem
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.trees[u].is_some())
            .collect();

        for tree in self.candidates(v, &placed_neighbours, extra + 1) {
            self.expansions += 1;
            if self.expansions > self.budget {
                return Err(());
            }
            for &q in &tree {
                self.used[q] = true;
            }
            let grown = tree.len() - 1;
            self.trees[v] = Some(tree);
            if self.place(depth + 1, extra - grown)? {
                return Ok(true);
            }
            let tree = self.trees[v].take().expect("just placed");
            for &q in &tree {
                self.used[q] = false;
            }
        }
        Ok(false)
    }

    /// Connected sets of free qubits of size at most `max_size` that touch
    /// every placed neighbour's tree and have enough boundary for the
    /// vertex's degree.
    fn candidates(&self, v: usize, placed: &[usize], max_size: usize) -> Vec<BTreeSet<usize>> {
        let degree = self.problem.degree(v);
        let mut out: Vec<BTreeSet<usize>> = connected_free_sets(self.hw, &self.used, max_size)
            .into_iter()
            .filter(|t| {
                placed.iter().all(|&u| {
                    let other = self.trees[u].as_ref().expect("placed");
                    t.iter().any(|&k| self.hw.neighbors(k).iter().any(|l| other.contains(l)))
                })
            })
            .filter(|t| {
                let boundary: BTreeSet<usize> = t
                    .iter()
                    .flat_map(|&k| self.hw.neighbors(k).iter().copied())
                    .filter(|l| !t.contains(l))
                    .collect();
                boundary.len() >= degree
            })
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
        out
    }
}

/// All connected sets of unused vertices with at most `max_size` members.
/// Each set is generated once, from its smallest vertex.
fn connected_free_sets(g: &WeightedGraph, used: &[bool], max_size: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    for root in (0..g.n()).filter(|&r| !used[r]) {
        let current = BTreeSet::from([root]);
        let frontier: BTreeSet<usize> = g
            .neighbors(root)
            .iter()
            .copied()
            .filter(|&u| u > root && !used[u])
            .collect();
        extend(g, used, root, current, frontier, max_size, &mut out);
    }
    out
}

fn extend(
    g: &WeightedGraph,
    used: &[bool],
    root: usize,
    current: BTreeSet<usize>,
    mut frontier: BTreeSet<usize>,
    max_size: usize,
    out: &mut Vec<BTreeSet<usize>>,
) {
    out.push(current.clone());
    if current.len() == max_size {
        return;
    }
    // Standard exclusive-neighbourhood enumeration: once a frontier vertex
    // is skipped it may not be added deeper in this branch.
    while let Some(w) = frontier.pop_first() {
        let mut next = current.clone();
        next.insert(w);
        let mut next_frontier = frontier.clone();
        for &u in g.neighbors(w) {
            if u > root
                && !used[u]
                && !current.contains(&u)
                && !frontier.contains(&u)
                && !current.iter().any(|&c| g.has_edge(c, u))
                && u != w
            {
                next_frontier.insert(u);
            }
        }
        extend(g, used, root, next, next_frontier, max_size, out);
    }
}
