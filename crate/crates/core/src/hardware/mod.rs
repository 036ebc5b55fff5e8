//! Processor connectivity, minor embeddings, and the embedded (physical)
//! Ising model.

mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{connected_components, WeightedGraph};
use crate::ising::IsingModel;

pub use search::{find_embedding, find_embedding_with_budget, DEFAULT_SEARCH_BUDGET};

/// Hardware graph with unit weights marking available qubits and couplers.
#[derive(Debug, Clone, PartialEq)]
pub struct Processor {
    pub name: String,
    graph: WeightedGraph,
}

impl Processor {
    pub fn new(name: impl Into<String>, graph: WeightedGraph) -> Result<Self> {
        if graph.vertex_weights().iter().any(|&w| w != 1.0) || graph.edges().any(|(_, _, w)| w != 1.0) {
            return Err(Error::Processor(
                "hardware graphs carry unit vertex and edge weights".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            graph,
        })
    }

    /// Unit-weight processor over `n` qubits with the given couplers.
    pub fn from_couplers(
        name: impl Into<String>,
        n: usize,
        couplers: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let graph = WeightedGraph::from_edges(vec![1.0; n], couplers.into_iter().map(|(i, j)| (i, j, 1.0)))?;
        Self::new(name, graph)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.n()
    }
}

/// Chimera lattice of `rows x cols` K_{4,4} cells. Qubit `8 (r cols + c) + k`
/// is position `k` of cell `(r, c)`; positions 0-3 form the left half and
/// couple to the same position in the cells above and below, positions 4-7
/// form the right half and couple to the cells left and right.
pub fn chimera(rows: usize, cols: usize) -> Result<Processor> {
    if rows == 0 || cols == 0 {
        return Err(Error::Processor(format!(
            "chimera dimensions must be positive, got {rows} x {cols}"
        )));
    }
    let cell = |r: usize, c: usize| 8 * (r * cols + c);
    let mut couplers = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let base = cell(r, c);
            for i in 0..4 {
                for j in 4..8 {
                    couplers.push((base + i, base + j));
                }
            }
            if r + 1 < rows {
                let below = cell(r + 1, c);
                couplers.extend((0..4).map(|k| (base + k, below + k)));
            }
            if c + 1 < cols {
                let right = cell(r, c + 1);
                couplers.extend((4..8).map(|k| (base + k, right + k)));
            }
        }
    }
    Processor::from_couplers(format!("chimera_{rows}x{cols}"), 8 * rows * cols, couplers)
}

/// Minor embedding: logical vertex `i` is represented by the hardware qubit
/// set `trees[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    trees: Vec<BTreeSet<usize>>,
}

impl Embedding {
    pub fn new(trees: Vec<BTreeSet<usize>>) -> Self {
        Self { trees }
    }

    /// Logical vertex `i` placed on qubit `placement[i]`.
    pub fn identity_like(placement: &[usize]) -> Self {
        Self::new(placement.iter().map(|&q| BTreeSet::from([q])).collect())
    }

    pub fn trees(&self) -> &[BTreeSet<usize>] {
        &self.trees
    }

    pub fn tree(&self, i: usize) -> &BTreeSet<usize> {
        &self.trees[i]
    }

    pub fn num_logical(&self) -> usize {
        self.trees.len()
    }

    /// Sorted union of all trees.
    pub fn used_qubits(&self) -> Vec<usize> {
        self.trees
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn total_qubits(&self) -> usize {
        self.trees.iter().map(BTreeSet::len).sum()
    }

    /// Logical owner of each used hardware qubit.
    pub fn owners(&self) -> BTreeMap<usize, usize> {
        self.trees
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.iter().map(move |&q| (q, i)))
            .collect()
    }
}

/// Number of hardware couplers with one end in `a` and the other in `b`.
pub fn edges_between(hw: &WeightedGraph, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> usize {
    a.iter()
        .map(|&k| hw.neighbors(k).iter().filter(|l| b.contains(l)).count())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The embedding has a different number of trees than the problem has vertices.
    TreeCount { expected: usize, actual: usize },
    EmptyTree { logical: usize },
    UnknownQubit { logical: usize, qubit: usize },
    /// Tree does not induce a connected hardware subgraph.
    Disconnected { logical: usize, pieces: usize },
    Overlap { first: usize, second: usize, qubit: usize },
    /// No coupler joins the trees of a logical edge.
    Uncovered { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TreeCount { expected, actual } => {
                write!(f, "expected {expected} trees, found {actual}")
            }
            Violation::EmptyTree { logical } => write!(f, "tree of vertex {logical} is empty"),
            Violation::UnknownQubit { logical, qubit } => {
                write!(f, "tree of vertex {logical} uses qubit {qubit} absent from the processor")
            }
            Violation::Disconnected { logical, pieces } => write!(
                f,
                "connectivity: tree of vertex {logical} splits into {pieces} pieces"
            ),
            Violation::Overlap {
                first,
                second,
                qubit,
            } => write!(f, "trees of vertices {first} and {second} share qubit {qubit}"),
            Violation::Uncovered { i, j } => {
                write!(f, "coverage: no coupler between the trees of edge ({i}, {j})")
            }
        }
    }
}

/// Every violation of the embedding conditions, in a deterministic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingReport {
    pub violations: Vec<Violation>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_embedding(problem: &WeightedGraph, proc: &Processor, emb: &Embedding) -> EmbeddingReport {
    let hw = proc.graph();
    let mut violations = Vec::new();
    if emb.num_logical() != problem.n() {
        violations.push(Violation::TreeCount {
            expected: problem.n(),
            actual: emb.num_logical(),
        });
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, tree) in emb.trees().iter().enumerate() {
        if tree.is_empty() {
            violations.push(Violation::EmptyTree { logical: i });
            continue;
        }
        if let Some(&q) = tree.iter().find(|&&q| q >= hw.n()) {
            violations.push(Violation::UnknownQubit { logical: i, qubit: q });
            continue;
        }
        let pieces = connected_components(hw, tree).len();
        if pieces > 1 {
            violations.push(Violation::Disconnected { logical: i, pieces });
        }
        for &q in tree {
            if let Some(&first) = owner.get(&q) {
                violations.push(Violation::Overlap {
                    first,
                    second: i,
                    qubit: q,
                });
            } else {
                owner.insert(q, i);
            }
        }
    }
    for (i, j, _) in problem.edges() {
        if i >= emb.num_logical() || j >= emb.num_logical() {
            continue;
        }
        let (a, b) = (emb.tree(i), emb.tree(j));
        if a.iter().chain(b).any(|&q| q >= hw.n()) {
            continue;
        }
        if edges_between(hw, a, b) == 0 {
            violations.push(Violation::Uncovered { i, j });
        }
    }
    EmbeddingReport { violations }
}

/// Embedded Ising model over the used qubits `qubits` (compact index `k`
/// is hardware qubit `qubits[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalIsing {
    pub model: IsingModel,
    pub qubits: Vec<usize>,
    pub embedding: Embedding,
    pub penalty_j: f64,
}

impl PhysicalIsing {
    /// Compact qubit indices of each logical vertex's tree.
    pub fn compact_trees(&self) -> Vec<Vec<usize>> {
        compact_trees(&self.embedding, &self.qubits)
    }
}

pub(crate) fn compact_trees(emb: &Embedding, qubits: &[usize]) -> Vec<Vec<usize>> {
    emb.trees()
        .iter()
        .map(|t| {
            t.iter()
                .map(|q| qubits.binary_search(q).expect("tree qubits are used"))
                .collect()
        })
        .collect()
}

/// Ferromagnetic chain strength `1 + sum |alpha_i| + sum |beta_ij|`, larger
/// than any energy a broken chain could recover.
pub fn auto_penalty(logical: &IsingModel) -> f64 {
    1.0 + logical.total_magnitude()
}

/// Distributes a logical model over its embedding: each tree shares its
/// bias evenly, each logical coupling is split evenly across the couplers
/// joining the two trees, and couplers inside a tree get strength `J`.
///
/// The physical shift is the logical shift plus `J` per intra-tree coupler,
/// so aligned configurations keep their logical energy plus shift.
pub fn embed_ising(
    logical: &IsingModel,
    emb: &Embedding,
    proc: &Processor,
    penalty_j: Option<f64>,
) -> Result<PhysicalIsing> {
    let report = validate_embedding(&logical.topology(), proc, emb);
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidEmbedding(msgs.join("; ")));
    }
    let j_strength = penalty_j.unwrap_or_else(|| auto_penalty(logical));
    let hw = proc.graph();
    let qubits = emb.used_qubits();
    let owners = emb.owners();
    let compact = |q: usize| qubits.binary_search(&q).expect("used qubit");

    let mut alpha = vec![0.0; qubits.len()];
    for (i, tree) in emb.trees().iter().enumerate() {
        let share = logical.alpha()[i] / tree.len() as f64;
        for &q in tree {
            alpha[compact(q)] = share;
        }
    }

    let mut couplings = Vec::new();
    let mut intra = 0usize;
    for &k in &qubits {
        for &l in hw.neighbors(k).iter().filter(|&&l| l > k) {
            let (Some(&i), Some(&j)) = (owners.get(&k), owners.get(&l)) else {
                continue;
            };
            if i == j {
                couplings.push((compact(k), compact(l), j_strength));
                intra += 1;
            } else {
                let beta = logical.coupling(i, j);
                if beta != 0.0 {
                    let count = edges_between(hw, emb.tree(i), emb.tree(j));
                    couplings.push((compact(k), compact(l), beta / count as f64));
                }
            }
        }
    }
    let gamma = logical.gamma() + j_strength * intra as f64;
    Ok(PhysicalIsing {
        model: IsingModel::new(alpha, couplings, gamma)?,
        qubits,
        embedding: emb.clone(),
        penalty_j: j_strength,
    })
}

#[derive(Serialize, Deserialize)]
struct EmbeddingRepr {
    trees: BTreeMap<String, Vec<usize>>,
}

impl Serialize for Embedding {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Keys sorted numerically, not lexicographically.
        use serde::ser::SerializeMap;
        struct Trees<'a>(&'a [BTreeSet<usize>]);
        impl Serialize for Trees<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (i, t) in self.0.iter().enumerate() {
                    map.serialize_entry(&i.to_string(), t)?;
                }
                map.end()
            }
        }
        let mut outer = s.serialize_map(Some(1))?;
        outer.serialize_entry("trees", &Trees(&self.trees))?;
        outer.end()
    }
}

impl<'de> Deserialize<'de> for Embedding {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = EmbeddingRepr::deserialize(d)?;
        let mut indexed = BTreeMap::new();
        for (k, v) in repr.trees {
            let i: usize = k
                .parse()
                .map_err(|_| D::Error::custom(format!("tree key '{k}' is not an index")))?;
            indexed.insert(i, v.into_iter().collect::<BTreeSet<_>>());
        }
        let n = indexed.len();
        if indexed.keys().copied().ne(0..n) {
            return Err(D::Error::custom("tree keys must be 0..n without gaps"));
        }
        Ok(Embedding::new(indexed.into_values().collect()))
    }
}

#[derive(Serialize, Deserialize)]
struct ProcessorRepr {
    name: String,
    #[serde(flatten)]
    graph: WeightedGraph,
}

impl Serialize for Processor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProcessorRepr {
            name: self.name.clone(),
            graph: self.graph.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Processor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ProcessorRepr::deserialize(d)?;
        Processor::new(repr.name, repr.graph).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{benchmark_model, BENCHMARK_PLACEMENT};

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn k44() -> WeightedGraph {
        WeightedGraph::from_edges(vec![0.0; 8], (0..4).flat_map(|i| (4..8).map(move |j| (i, j, 1.0)))).unwrap()
    }

    #[test]
    fn chimera_sizes() {
        let one = chimera(1, 1).unwrap();
        assert_eq!(one.num_qubits(), 8);
        assert_eq!(one.graph().edge_count(), 16);
        assert_eq!(chimera(4, 4).unwrap().num_qubits(), 128);
        let tall = chimera(2, 1).unwrap();
        assert_eq!(tall.num_qubits(), 16);
        assert_eq!(tall.graph().edge_count(), 36);
        assert!(chimera(0, 3).is_err());
    }

    #[test]
    fn chimera_degrees_and_bipartite_cells() {
        let p = chimera(3, 3).unwrap();
        let g = p.graph();
        assert!((0..g.n()).map(|v| g.degree(v)).max() == Some(6));
        // centre cell: every qubit has 4 in-cell + 2 inter-cell couplers
        let centre = 8 * 4;
        for k in 0..8 {
            assert_eq!(g.degree(centre + k), 6);
        }
        for (i, j, _) in g.edges() {
            if i / 8 == j / 8 {
                assert!((i % 8 < 4) != (j % 8 < 4), "in-cell coupler ({i}, {j}) within one half");
            }
        }
    }

    #[test]
    fn processor_requires_unit_weights() {
        let g = WeightedGraph::from_edges(vec![1.0, 1.0], [(0, 1, 2.0)]).unwrap();
        assert!(Processor::new("bad", g).is_err());
    }

    #[test]
    fn validation_names_each_violation() {
        let proc = chimera(1, 1).unwrap();
        let ok = Embedding::identity_like(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(validate_embedding(&k44(), &proc, &ok).is_valid());

        let path = WeightedGraph::from_edges(vec![0.0; 2], [(0, 1, 1.0)]).unwrap();
        // qubits 0 and 1 sit on the same side: not adjacent
        let split = Embedding::new(vec![set(&[0, 1]), set(&[4])]);
        let report = validate_embedding(&path, &proc, &split);
        assert_eq!(report.violations, vec![Violation::Disconnected { logical: 0, pieces: 2 }]);
        assert!(report.violations[0].to_string().contains("connectivity"));

        let uncovered = Embedding::new(vec![set(&[0]), set(&[1])]);
        let report = validate_embedding(&path, &proc, &uncovered);
        assert_eq!(report.violations, vec![Violation::Uncovered { i: 0, j: 1 }]);

        let overlap = Embedding::new(vec![set(&[0, 4]), set(&[4])]);
        let report = validate_embedding(&path, &proc, &overlap);
        assert!(report.violations.contains(&Violation::Overlap { first: 0, second: 1, qubit: 4 }));
    }

    #[test]
    fn singleton_embedding_keeps_the_model() {
        let proc = chimera(1, 1).unwrap();
        let logical = benchmark_model();
        let emb = Embedding::identity_like(&BENCHMARK_PLACEMENT);
        let phys = embed_ising(&logical, &emb, &proc, None).unwrap();
        assert_eq!(phys.qubits, (0..8).collect::<Vec<_>>());
        assert_eq!(phys.model.couplings().count(), logical.couplings().count());
        for (i, &q) in BENCHMARK_PLACEMENT.iter().enumerate() {
            assert_eq!(phys.model.alpha()[q], logical.alpha()[i]);
        }
        for (i, j, b) in logical.couplings() {
            assert_eq!(phys.model.coupling(BENCHMARK_PLACEMENT[i], BENCHMARK_PLACEMENT[j]), b);
        }
        assert_eq!(phys.model.gamma(), logical.gamma());
    }

    #[test]
    fn shared_bias_and_split_coupling() {
        let proc = chimera(1, 1).unwrap();
        // vertex 0 on the chain {0, 4}; vertex 1 on {1, 5}
        let logical = IsingModel::new(vec![1.0, 0.0], [(0, 1, 1.0)], 0.0).unwrap();
        let emb = Embedding::new(vec![set(&[0, 4]), set(&[1, 5])]);
        let phys = embed_ising(&logical, &emb, &proc, Some(3.0)).unwrap();
        assert_eq!(phys.qubits, vec![0, 1, 4, 5]);
        assert_eq!(phys.model.alpha(), &[0.5, 0.0, 0.5, 0.0]);
        // two couplers (0,5) and (1,4) join the trees
        assert_eq!(phys.model.coupling(0, 3), 0.5);
        assert_eq!(phys.model.coupling(1, 2), 0.5);
        assert_eq!(phys.model.coupling(0, 2), 3.0);
        assert_eq!(phys.model.coupling(1, 3), 3.0);
        assert_eq!(phys.model.gamma(), 6.0);
    }

    #[test]
    fn uncovered_edge_is_rejected() {
        let proc = chimera(1, 1).unwrap();
        let logical = IsingModel::new(vec![0.0, 0.0], [(0, 1, 1.0)], 0.0).unwrap();
        let emb = Embedding::new(vec![set(&[0]), set(&[1])]);
        assert!(matches!(embed_ising(&logical, &emb, &proc, None), Err(Error::InvalidEmbedding(_))));
    }

    #[test]
    fn json_schemas() {
        let emb = Embedding::new(vec![set(&[3]), set(&[0, 4]), set(&[1]), set(&[2]), set(&[5]), set(&[6]), set(&[7]), set(&[8]), set(&[9]), set(&[10]), set(&[11])]);
        let text = serde_json::to_string(&emb).unwrap();
        assert!(text.starts_with(r#"{"trees":{"0":[3],"1":[0,4],"2":[1]"#), "{text}");
        assert_eq!(serde_json::from_str::<Embedding>(&text).unwrap(), emb);

        let proc = chimera(1, 1).unwrap();
        let text = serde_json::to_string(&proc).unwrap();
        assert!(text.contains(r#""name":"chimera_1x1""#));
        assert_eq!(serde_json::from_str::<Processor>(&text).unwrap(), proc);
    }
}
