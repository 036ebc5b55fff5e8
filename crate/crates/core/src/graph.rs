//! Weighted graphs and symmetric cost matrices shared by every pipeline stage.
//!
//! Vertices are 0-indexed. Edges are stored on unordered pairs normalized to
//! `i < j`, so `weight(i, j) == weight(j, i)` holds by construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Undirected graph with real vertex and edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_weights: Vec<f64>,
    edges: BTreeMap<(usize, usize), f64>,
    adjacency: Vec<Vec<usize>>,
}

impl WeightedGraph {
    /// Graph with `n` vertices of weight zero and no edges.
    pub fn empty(n: usize) -> Self {
        Self::with_vertex_weights(vec![0.0; n])
    }

    pub fn with_vertex_weights(vertex_weights: Vec<f64>) -> Self {
        let n = vertex_weights.len();
        Self {
            vertex_weights,
            edges: BTreeMap::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from vertex weights and an edge list. Pairs may be given
    /// in either order; self-loops, out-of-range vertices and repeated pairs
    /// are rejected.
    pub fn from_edges(
        vertex_weights: Vec<f64>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut g = Self::with_vertex_weights(vertex_weights);
        for (i, j, w) in edges {
            g.add_edge(i, j, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::Graph(format!(
                "edge ({i}, {j}) references a vertex outside [0, {n})"
            )));
        }
        if i == j {
            return Err(Error::Graph(format!("self-loop on vertex {i}")));
        }
        let key = (i.min(j), i.max(j));
        if self.edges.contains_key(&key) {
            return Err(Error::Graph(format!(
                "duplicate edge ({}, {})",
                key.0, key.1
            )));
        }
        self.edges.insert(key, w);
        self.adjacency[i].push(j);
        self.adjacency[j].push(i);
        self.adjacency[i].sort_unstable();
        self.adjacency[j].sort_unstable();
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j).is_some()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Dense symmetric matrix with vertex weights on the diagonal and edge
    /// weights off the diagonal. Inverse of [`graph_from_matrix`].
    pub fn to_matrix(&self) -> SymmetricMatrix {
        let n = self.n();
        let mut m = SymmetricMatrix::zeros(n);
        for (i, &w) in self.vertex_weights.iter().enumerate() {
            m.set(i, i, w);
        }
        for (i, j, w) in self.edges() {
            m.set(i, j, w);
        }
        m
    }
}

/// Dense real symmetric matrix; symmetry is exact and checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Accepts row-major data and rejects ragged or asymmetric input, naming
    /// the first offending entry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        upper: rows[i][j],
                        lower: rows[j][i],
                    });
                }
            }
        }
        Ok(Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Writes both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.n + j] = value;
        self.entries[j * self.n + i] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j) + value;
        self.set(i, j, v);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `x^T P x` for a 0/1 vector.
    pub fn quadratic_form(&self, x: &[u8]) -> f64 {
        assert_eq!(x.len(), self.n, "assignment length");
        let mut total = 0.0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if x[j] != 0 {
                    total += self.get(i, j);
                }
            }
        }
        total
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymmetricMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymmetricMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Problem graph of a cost matrix: `(i, j)` is an edge iff `P[i][j] != 0`.
pub fn graph_from_matrix(p: &SymmetricMatrix) -> WeightedGraph {
    let n = p.n();
    let mut g = WeightedGraph::with_vertex_weights((0..n).map(|i| p.get(i, i)).collect());
    for i in 0..n {
        for j in (i + 1)..n {
            let w = p.get(i, j);
            if w != 0.0 {
                g.add_edge(i, j, w).expect("pairs are unique and i < j");
            }
        }
    }
    g
}

/// Partition of `subset` into maximal connected pieces of the induced
/// subgraph. Each piece is sorted; pieces are ordered by smallest member.
pub fn connected_components(g: &WeightedGraph, subset: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut seen = BTreeSet::new();
    let mut components = Vec::new();
    for &start in subset {
        if !seen.insert(start) {
            continue;
        }
        let mut component = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if subset.contains(&u) && seen.insert(u) {
                    component.insert(u);
                    queue.push_back(u);
                }
            }
        }
        components.push(component);
    }
    components
}

/// True when `subset` is nonempty and induces a connected subgraph.
pub fn is_connected(g: &WeightedGraph, subset: &BTreeSet<usize>) -> bool {
    connected_components(g, subset).len() == 1
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    vertex_weights: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl Serialize for WeightedGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n(),
            vertex_weights: self.vertex_weights.clone(),
            edges: self.edges().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GraphRepr::deserialize(d)?;
        if repr.vertex_weights.len() != repr.n {
            return Err(D::Error::custom(format!(
                "n = {} but {} vertex weights",
                repr.n,
                repr.vertex_weights.len()
            )));
        }
        if let Some(&(i, j, _)) = repr.edges.iter().find(|(i, j, _)| i >= j) {
            return Err(D::Error::custom(format!("edge ({i}, {j}) must satisfy i < j")));
        }
        WeightedGraph::from_edges(repr.vertex_weights, repr.edges).map_err(D::Error::custom)
    }
}
