//! Ising Hamiltonians `H = -sum_i alpha_i s_i - sum_{i<j} beta_ij s_i s_j`
//! with an energy shift `gamma`, and their correspondence with QUBO.
//!
//! Bits and spins are related by `x = (1 - s) / 2`: bit 0 is spin +1 and
//! bit 1 is spin -1. Under this convention `x^T P x = E(s) + gamma` for every
//! assignment, which the oracle tests in this module pin down.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frontend::QuboProblem;
use crate::graph::{graph_from_matrix, WeightedGraph};

/// Largest model [`brute_force_ising`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    alpha: Vec<f64>,
    beta: BTreeMap<(usize, usize), f64>,
    gamma: f64,
}

impl IsingModel {
    /// Couplings may be listed with either index first; repeated pairs and
    /// self-couplings are rejected.
    pub fn new(
        alpha: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        gamma: f64,
    ) -> Result<Self> {
        let n = alpha.len();
        let mut beta = BTreeMap::new();
        for (i, j, b) in couplings {
            if i >= n || j >= n || i == j {
                return Err(Error::Graph(format!("invalid coupling ({i}, {j}) for {n} spins")));
            }
            if beta.insert((i.min(j), i.max(j)), b).is_some() {
                return Err(Error::Graph(format!("duplicate coupling ({i}, {j})")));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            alpha: vec![0.0; n],
            beta: BTreeMap::new(),
            gamma: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Couplings `(i, j, beta_ij)` with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.beta.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.beta.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    /// Interaction graph: biases as vertex weights, couplings as edges.
    pub fn topology(&self) -> WeightedGraph {
        WeightedGraph::from_edges(self.alpha.clone(), self.couplings())
            .expect("couplings validated on construction")
    }

    /// `-sum alpha_i s_i - sum beta_ij s_i s_j`; the shift is not included.
    pub fn energy(&self, s: &SpinConfiguration) -> Result<f64> {
        if s.len() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                actual: s.len(),
            });
        }
        Ok(self.energy_of(s.spins()))
    }

    pub(crate) fn energy_of(&self, s: &[i8]) -> f64 {
        let field: f64 = self.alpha.iter().zip(s).map(|(a, &si)| a * si as f64).sum();
        let coupling: f64 = self
            .beta
            .iter()
            .map(|(&(i, j), &b)| b * (s[i] * s[j]) as f64)
            .sum();
        -field - coupling
    }

    /// Energy of computational basis state `z`, see [`SpinConfiguration::from_basis_index`].
    pub fn basis_energy(&self, z: usize) -> f64 {
        let s = SpinConfiguration::from_basis_index(z, self.n());
        self.energy_of(s.spins())
    }

    /// Sum of absolute biases and couplings.
    pub fn total_magnitude(&self) -> f64 {
        self.alpha.iter().map(|a| a.abs()).sum::<f64>()
            + self.beta.values().map(|b| b.abs()).sum::<f64>()
    }
}

/// Spins in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Graph(format!("spin value {bad} is not +1 or -1")));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Spin pattern of basis index `z` over `n` qubits. Qubit 0 is the most
    /// significant bit, so the binary string of `z` lists qubits in order;
    /// a set bit is spin -1.
    pub fn from_basis_index(z: usize, n: usize) -> Self {
        Self((0..n).map(|q| 1 - 2 * ((z >> (n - 1 - q)) & 1) as i8).collect())
    }

    pub fn basis_index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s == -1))
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect())
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Bits of a spin configuration under `x = (1 - s) / 2`.
pub fn spin_bit_decode(s: &SpinConfiguration) -> Vec<u8> {
    s.0.iter().map(|&si| u8::from(si == -1)).collect()
}

/// Bit string grouped in nibbles, e.g. `0000 1111`.
pub fn format_bits(bits: &[u8]) -> String {
    let mut out = String::with_capacity(bits.len() + bits.len() / 4);
    for (k, chunk) in bits.chunks(4).enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.extend(chunk.iter().map(|&b| if b == 0 { '0' } else { '1' }));
    }
    out
}

/// Logical Ising model of a QUBO. Substituting `x_i = (1 - s_i) / 2` into
/// `x^T P x` gives
///
/// ```text
/// alpha_i = P_ii / 2 + (1/2) sum_{j != i} P_ij
/// beta_ij = -P_ij / 2                         (i < j)
/// gamma   = (1/2) sum_i P_ii + (1/2) sum_{i<j} P_ij
/// ```
///
/// so that `x^T P x = E(s) + gamma` exactly. Couplings exist precisely on
/// the edges of the problem graph.
pub fn qubo_to_ising(q: &QuboProblem) -> IsingModel {
    let p = &q.matrix;
    let n = p.n();
    let graph = graph_from_matrix(p);
    let alpha = (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| p.get(i, j)).sum();
            p.get(i, i) / 2.0 + off / 2.0
        })
        .collect();
    let couplings: Vec<_> = graph.edges().map(|(i, j, w)| (i, j, -w / 2.0)).collect();
    let diag: f64 = (0..n).map(|i| p.get(i, i)).sum();
    let upper: f64 = graph.edges().map(|(_, _, w)| w).sum();
    IsingModel::new(alpha, couplings, diag / 2.0 + upper / 2.0)
        .expect("edges of a graph are valid couplings")
}

/// Inverse of [`qubo_to_ising`]: the QUBO whose logical model is `m`
/// (the shift `gamma` of `m` is not used; it is re-derived from `P`).
pub fn ising_to_qubo(m: &IsingModel) -> QuboProblem {
    let n = m.n();
    let mut p = crate::graph::SymmetricMatrix::zeros(n);
    let mut incident = vec![0.0; n];
    for (i, j, b) in m.couplings() {
        p.set(i, j, -2.0 * b);
        incident[i] += b;
        incident[j] += b;
    }
    for i in 0..n {
        p.set(i, i, 2.0 * m.alpha()[i] + 2.0 * incident[i]);
    }
    QuboProblem::from_matrix(p)
}

/// Exhaustive minimum over all `2^n` configurations. The ground set is
/// sorted by basis index; energies within `1e-9` of the minimum count as
/// ground states.
pub fn brute_force_ising(m: &IsingModel) -> Result<(f64, Vec<SpinConfiguration>)> {
    let n = m.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let energies: Vec<f64> = (0..1usize << n).map(|z| m.basis_energy(z)).collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * min.abs().max(1.0);
    let ground = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e - min <= tol)
        .map(|(z, _)| SpinConfiguration::from_basis_index(z, n))
        .collect();
    Ok((min, ground))
}

#[derive(Serialize, Deserialize)]
struct IsingRepr {
    n: usize,
    alpha: Vec<f64>,
    beta: Vec<(usize, usize, f64)>,
    #[serde(default)]
    gamma: f64,
}

impl Serialize for IsingModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IsingRepr {
            n: self.n(),
            alpha: self.alpha.clone(),
            beta: self.couplings().collect(),
            gamma: self.gamma,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsingModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = IsingRepr::deserialize(d)?;
        if r.alpha.len() != r.n {
            return Err(D::Error::custom(format!(
                "n = {} but {} biases",
                r.n,
                r.alpha.len()
            )));
        }
        IsingModel::new(r.alpha, r.beta, r.gamma).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::benchmark_model;
    use crate::frontend::all_assignments;
    use crate::graph::SymmetricMatrix;
    use proptest::prelude::*;

    fn qubo(rows: &[Vec<f64>]) -> QuboProblem {
        QuboProblem::from_matrix(SymmetricMatrix::from_rows(rows).unwrap())
    }

    /// Sorted multiset of `x^T P x` over all bit strings.
    fn qubo_spectrum(q: &QuboProblem) -> Vec<f64> {
        let mut v: Vec<f64> = all_assignments(q.n()).map(|x| q.energy(&x)).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn ising_spectrum(m: &IsingModel) -> Vec<f64> {
        let mut v: Vec<f64> = (0..1usize << m.n()).map(|z| m.basis_energy(z) + m.gamma()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn zero_matrix_maps_to_zero_model() {
        let m = qubo_to_ising(&qubo(&[vec![0.0, 0.0], vec![0.0, 0.0]]));
        assert_eq!(m.alpha(), &[0.0, 0.0]);
        assert_eq!(m.couplings().count(), 0);
        assert_eq!(m.gamma(), 0.0);
    }

    #[test]
    fn single_variable() {
        // x in {0, 1} -> {0, 1}; E(+1) + gamma = 0, E(-1) + gamma = 1.
        let m = qubo_to_ising(&qubo(&[vec![1.0]]));
        assert_eq!(m.alpha(), &[0.5]);
        assert_eq!(m.gamma(), 0.5);
    }

    #[test]
    fn single_coupling() {
        let m = qubo_to_ising(&qubo(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        assert_eq!(m.alpha(), &[0.5, 0.5]);
        assert_eq!(m.couplings().collect::<Vec<_>>(), vec![(0, 1, -0.5)]);
        assert_eq!(m.gamma(), 0.5);
    }

    /// The textbook coefficients taken at face value (1/4 weights, positive
    /// couplings) do not reproduce QUBO energies under either convention.
    #[test]
    fn literal_quarter_weight_coefficients_fail_the_oracle() {
        let q = qubo(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let literal = IsingModel::new(vec![0.25, 0.25], [(0, 1, 0.25)], 0.5).unwrap();
        assert_ne!(ising_spectrum(&literal), qubo_spectrum(&q));
        let flipped = IsingModel::new(vec![-0.25, -0.25], [(0, 1, 0.25)], 0.5).unwrap();
        assert_ne!(ising_spectrum(&flipped), qubo_spectrum(&q));
        assert_eq!(ising_spectrum(&qubo_to_ising(&q)), qubo_spectrum(&q));
    }

    #[test]
    fn energies_of_simple_models() {
        let zero = IsingModel::zeros(3);
        for z in 0..8 {
            assert_eq!(zero.basis_energy(z), 0.0);
        }
        let m = benchmark_model();
        assert_eq!(m.energy(&SpinConfiguration::all_up(8)).unwrap(), -8.0);
        assert!(m.energy(&SpinConfiguration::all_up(3)).is_err());
    }

    #[test]
    fn brute_force_small_models() {
        let single = IsingModel::new(vec![1.0], [], 0.0).unwrap();
        let (e, ground) = brute_force_ising(&single).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(ground, vec![SpinConfiguration::all_up(1)]);

        let pair = IsingModel::new(vec![0.0, 0.0], [(0, 1, 1.0)], 0.0).unwrap();
        let (e, ground) = brute_force_ising(&pair).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(
            ground,
            vec![
                SpinConfiguration::new(vec![1, 1]).unwrap(),
                SpinConfiguration::new(vec![-1, -1]).unwrap()
            ]
        );

        assert!(matches!(brute_force_ising(&IsingModel::zeros(25)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn bit_decoding() {
        assert_eq!(spin_bit_decode(&SpinConfiguration::all_up(4)), vec![0, 0, 0, 0]);
        let s = SpinConfiguration::from_basis_index(15, 8);
        assert_eq!(format_bits(&spin_bit_decode(&s)), "0000 1111");
        assert_eq!(s.basis_index(), 15);
        assert!(SpinConfiguration::new(vec![1, 0]).is_err());
    }

    #[test]
    fn json_schema() {
        let m = IsingModel::new(vec![1.0, -1.0], [(1, 0, 0.5)], 2.0).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"n":2,"alpha":[1.0,-1.0],"beta":[[0,1,0.5]],"gamma":2.0}"#);
        assert_eq!(serde_json::from_str::<IsingModel>(&text).unwrap(), m);
    }

    fn symmetric(n: usize) -> impl Strategy<Value = SymmetricMatrix> {
        proptest::collection::vec(prop_oneof![Just(0.0), -4.0..4.0f64], n * n).prop_map(move |v| {
            let mut m = SymmetricMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    m.set(i, j, v[i * n + j]);
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn qubo_and_ising_spectra_agree(p in (1usize..=4).prop_flat_map(symmetric)) {
            let q = QuboProblem::from_matrix(p);
            let m = qubo_to_ising(&q);
            for x in all_assignments(q.n()) {
                let s = SpinConfiguration::from_bits(&x);
                prop_assert!((q.energy(&x) - (m.energy(&s).unwrap() + m.gamma())).abs() < 1e-9);
                prop_assert_eq!(spin_bit_decode(&s), x);
            }
        }

        #[test]
        fn inverse_mapping_round_trips(p in (1usize..=4).prop_flat_map(symmetric)) {
            let q = QuboProblem::from_matrix(p);
            let back = ising_to_qubo(&qubo_to_ising(&q));
            for i in 0..q.n() {
                for j in 0..q.n() {
                    prop_assert!((back.matrix.get(i, j) - q.matrix.get(i, j)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn couplings_live_on_problem_edges(p in (1usize..=5).prop_flat_map(symmetric)) {
            let m = qubo_to_ising(&QuboProblem::from_matrix(p.clone()));
            let g = graph_from_matrix(&p);
            let edges: Vec<_> = g.edges().map(|(i, j, _)| (i, j)).collect();
            let couplings: Vec<_> = m.couplings().map(|(i, j, _)| (i, j)).collect();
            prop_assert_eq!(edges, couplings);
        }

        #[test]
        fn diagonal_shift_is_affine(p in (1usize..=4).prop_flat_map(symmetric), c in -3.0..3.0f64) {
            let mut shifted = p.clone();
            for i in 0..p.n() {
                shifted.add(i, i, c);
            }
            let base = qubo_to_ising(&QuboProblem::from_matrix(p));
            let moved = qubo_to_ising(&QuboProblem::from_matrix(shifted));
            for z in 0..1usize << base.n() {
                let ones = z.count_ones() as f64;
                let delta = moved.basis_energy(z) + moved.gamma() - base.basis_energy(z) - base.gamma();
                prop_assert!((delta - c * ones).abs() < 1e-9);
            }
        }
    }
}
