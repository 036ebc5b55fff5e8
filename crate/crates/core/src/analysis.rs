//! Post-processing: spectral gaps, eigenpath tracking, population traces and
//! decoding of physical readouts into logical solutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::engine::{spectral_norm, ProgramResult, SpectrumSnapshot, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::hardware::compact_trees;
use crate::ising::{spin_bit_decode, SpinConfiguration};
use crate::program::{IsingHamiltonianGenerator, QuantumProgram};

/// Overlap below which a backward eigenpath match is flagged.
pub const OVERLAP_THRESHOLD: f64 = 0.5;

/// Energies within `1e-9 * max(1, |E_0|)` of the ground energy are degenerate
/// with it.
pub fn degeneracy_tolerance(e0: f64) -> f64 {
    1e-9 * e0.abs().max(1.0)
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub times: Vec<f64>,
    /// `E_1(t) - E_0(t)` per snapshot.
    pub delta: Vec<f64>,
    pub delta_star: f64,
    pub t_star: f64,
    /// `max_t || dH/dt ||` (spectral norm).
    pub rate_bound: f64,
    /// `rate_bound / delta_star`; infinite (JSON `null`) when the sampled
    /// gap closes.
    #[serde(serialize_with = "finite_or_null", deserialize_with = "null_as_infinity")]
    pub t_adiabatic: f64,
}

/// Gap per snapshot and the adiabatic time estimate `rate_bound / delta_star`.
pub fn gap_profile(snapshots: &[SpectrumSnapshot], program: &QuantumProgram) -> Result<GapProfile> {
    if snapshots.len() < 2 {
        return Err(Error::Analysis(format!("gap profile needs at least 2 snapshots, got {}", snapshots.len())));
    }
    if let Some(s) = snapshots.iter().find(|s| s.eigenvalues.len() < 2) {
        return Err(Error::Analysis(format!("snapshot at t = {} has fewer than 2 eigenvalues", s.t)));
    }
    if program.n() > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: program.n(),
            limit: DENSE_LIMIT,
        });
    }
    let generator = IsingHamiltonianGenerator::new(program);
    let times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let delta: Vec<f64> = snapshots.iter().map(|s| (s.eigenvalues[1] - s.eigenvalues[0]).max(0.0)).collect();
    let (k_star, &delta_star) = delta
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two snapshots");
    let mut rate_bound = 0.0f64;
    for &t in &times {
        rate_bound = rate_bound.max(spectral_norm(&generator.rate_at(t)?)?);
    }
    let t_adiabatic = if delta_star > 0.0 {
        rate_bound / delta_star
    } else {
        f64::INFINITY
    };
    Ok(GapProfile {
        t_star: times[k_star],
        times,
        delta,
        delta_star,
        rate_bound,
        t_adiabatic,
    })
}

/// A weak backward match: at interval `interval` (between snapshots
/// `interval` and `interval + 1`) the path ending at `final_index` was
/// continued with overlap `overlap < OVERLAP_THRESHOLD`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguousMatch {
    pub final_index: usize,
    pub interval: usize,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenpathTrace {
    pub times: Vec<f64>,
    /// Final-time indices of the ground manifold.
    pub ground_manifold: Vec<usize>,
    /// For each tracked final index, the eigen index at every snapshot.
    pub indices: BTreeMap<usize, Vec<usize>>,
    /// For each tracked final index, the energy at every snapshot.
    pub energies: BTreeMap<usize, Vec<f64>>,
    pub ambiguous: Vec<AmbiguousMatch>,
}

fn overlap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs()
}

/// Follows every final-time ground state backward through the snapshots by
/// greedy maximal-overlap matching of eigenvectors.
pub fn track_eigenpaths(snapshots: &[SpectrumSnapshot]) -> Result<EigenpathTrace> {
    let last = snapshots
        .last()
        .ok_or_else(|| Error::Analysis("no snapshots to track".into()))?;
    if let Some(s) = snapshots.iter().find(|s| s.eigenvectors.is_none()) {
        return Err(Error::Analysis(format!("snapshot at t = {} has no eigenvectors", s.t)));
    }
    let e0 = last.eigenvalues[0];
    let tol = degeneracy_tolerance(e0);
    let manifold: Vec<usize> = (0..last.eigenvalues.len())
        .filter(|&j| (last.eigenvalues[j] - e0).abs() < tol)
        .collect();

    let k_count = snapshots.len();
    let mut indices: BTreeMap<usize, Vec<usize>> = manifold.iter().map(|&f| (f, vec![0; k_count])).collect();
    for (&f, path) in indices.iter_mut() {
        path[k_count - 1] = f;
    }
    let mut ambiguous = Vec::new();
    for k in (0..k_count - 1).rev() {
        let (earlier, later) = (&snapshots[k], &snapshots[k + 1]);
        let mut pairs = Vec::new();
        for &f in &manifold {
            let v = later.eigenvector(indices[&f][k + 1]).expect("checked");
            for a in 0..earlier.eigenvalues.len() {
                pairs.push((overlap(earlier.eigenvector(a).expect("checked"), v), f, a));
            }
        }
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut assigned: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
        let mut taken = vec![false; earlier.eigenvalues.len()];
        for (o, f, a) in pairs {
            if assigned.contains_key(&f) || taken[a] {
                continue;
            }
            taken[a] = true;
            assigned.insert(f, (a, o));
        }
        for &f in &manifold {
            let (a, o) = *assigned.get(&f).ok_or_else(|| {
                Error::Analysis(format!("snapshot at t = {} has too few eigenstates to continue paths", earlier.t))
            })?;
            indices.get_mut(&f).expect("tracked")[k] = a;
            if o < OVERLAP_THRESHOLD {
                ambiguous.push(AmbiguousMatch {
                    final_index: f,
                    interval: k,
                    overlap: o,
                });
            }
        }
    }
    let energies = indices
        .iter()
        .map(|(&f, path)| (f, path.iter().zip(snapshots).map(|(&j, s)| s.eigenvalues[j]).collect()))
        .collect();
    Ok(EigenpathTrace {
        times: snapshots.iter().map(|s| s.t).collect(),
        ground_manifold: manifold,
        indices,
        energies,
        ambiguous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationPoint {
    pub t: f64,
    /// `|<phi_0(t)|psi(t)>|^2`.
    pub ground: f64,
    /// Population of the tracked ground-manifold paths.
    pub manifold: f64,
    /// `||psi||^2 - manifold`.
    pub excited: f64,
}

/// Instantaneous populations along the traced ground manifold.
pub fn population_trace(snapshots: &[SpectrumSnapshot], trace: &EigenpathTrace) -> Result<Vec<PopulationPoint>> {
    if trace.times.len() != snapshots.len() {
        return Err(Error::Analysis("trace and snapshots differ in length".into()));
    }
    snapshots
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let state = s
                .state
                .as_ref()
                .ok_or_else(|| Error::Analysis(format!("snapshot at t = {} has no state", s.t)))?;
            let vec = |j: usize| {
                s.eigenvector(j)
                    .ok_or_else(|| Error::Analysis(format!("snapshot at t = {} lacks eigenvector {j}", s.t)))
            };
            let ground = state.overlap_real(vec(0)?);
            let mut manifold = 0.0;
            for path in trace.indices.values() {
                manifold += state.overlap_real(vec(path[k])?);
            }
            Ok(PopulationPoint {
                t: s.t,
                ground,
                manifold,
                excited: state.norm_sqr() - manifold,
            })
        })
        .collect()
}

/// CSV with header `t,E_trace_1,...`, traces in ascending final index.
pub fn trace_csv(trace: &EigenpathTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=trace.energies.len()).map(|k| format!("E_trace_{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for (k, t) in trace.times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(trace.energies.values().map(|e| e[k].to_string()));
        w.write_record(&row).map_err(csv_error)?;
    }
    finish_csv(w)
}

/// CSV with header `t,ground,manifold`.
pub fn population_csv(points: &[PopulationPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "ground", "manifold"]).map_err(csv_error)?;
    for p in points {
        w.write_record([p.t.to_string(), p.ground.to_string(), p.manifold.to_string()])
            .map_err(csv_error)?;
    }
    finish_csv(w)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Analysis(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Analysis(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub ones: usize,
    pub zeros: usize,
    pub value: u8,
    /// Equal counts; the value was chosen by objective.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedReadout {
    pub bits: Vec<u8>,
    pub votes: Vec<Vote>,
}

/// Majority vote over each tree (`trees` hold indices into `physical`).
/// Ties are settled by evaluating `objective` on every combination of tied
/// values and keeping the lowest; equal objectives go to the smaller bit
/// string.
pub fn decode_readout(
    physical: &[u8],
    trees: &[Vec<usize>],
    objective: impl Fn(&[u8]) -> f64,
) -> Result<DecodedReadout> {
    let mut votes = Vec::with_capacity(trees.len());
    for (i, tree) in trees.iter().enumerate() {
        if tree.is_empty() {
            return Err(Error::Analysis(format!("tree {i} is empty")));
        }
        let mut ones = 0;
        for &q in tree {
            let b = *physical
                .get(q)
                .ok_or_else(|| Error::Analysis(format!("readout has no qubit {q}")))?;
            ones += usize::from(b != 0);
        }
        let zeros = tree.len() - ones;
        votes.push(Vote {
            ones,
            zeros,
            value: u8::from(ones > zeros),
            tie: ones == zeros,
        });
    }
    let tied: Vec<usize> = (0..votes.len()).filter(|&i| votes[i].tie).collect();
    let mut bits: Vec<u8> = votes.iter().map(|v| v.value).collect();
    if !tied.is_empty() {
        if tied.len() > 24 {
            return Err(Error::TooLarge {
                n: tied.len(),
                limit: 24,
            });
        }
        let mut best: Option<(f64, Vec<u8>)> = None;
        for mask in 0u32..(1 << tied.len()) {
            let mut candidate = bits.clone();
            for (k, &i) in tied.iter().enumerate() {
                candidate[i] = u8::from(mask & (1 << (tied.len() - 1 - k)) != 0);
            }
            let value = objective(&candidate);
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, candidate));
            }
        }
        bits = best.expect("at least one candidate").1;
        for &i in &tied {
            votes[i].value = bits[i];
        }
    }
    Ok(DecodedReadout { bits, votes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    pub index: usize,
    pub probability: f64,
    pub physical_bits: Vec<u8>,
    /// Hardware qubit behind each physical bit.
    pub qubits: Vec<usize>,
    pub votes: Vec<Vote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Values of the original problem variables (ancillas removed), or the
    /// raw physical bits for a program without provenance.
    pub bits: Vec<u8>,
    /// Decoded value of every QUBO variable, ancillas included.
    pub assignment: Vec<u8>,
    /// `x^T P x` at `assignment`, recomputed from the matrix.
    pub qubo_value: Option<f64>,
    /// Weighted clause sum at `bits`, when the problem came from clauses.
    pub bop_value: Option<f64>,
    /// Energy plus shift of the physical readout.
    pub physical_energy: f64,
    pub readout: Readout,
}

/// Decodes the most probable readout of a run into a solution.
pub fn assemble_solution(result: &ProgramResult, program: &QuantumProgram) -> Result<Solution> {
    let (index, probability) = result
        .most_probable()
        .ok_or_else(|| Error::Analysis("result has no distribution".into()))?;
    solution_from_readout(index, probability, program)
}

/// Solution for a given physical basis state.
pub fn solution_from_readout(index: usize, probability: f64, program: &QuantumProgram) -> Result<Solution> {
    let n = program.n();
    if index >= 1 << n {
        return Err(Error::Analysis(format!("readout {index} outside a {n}-qubit register")));
    }
    let spins = SpinConfiguration::from_basis_index(index, n);
    let physical_bits = spin_bit_decode(&spins);
    let physical_energy = program.physical.energy(&spins)? + program.physical.gamma();
    let mut readout = Readout {
        index,
        probability,
        physical_bits: physical_bits.clone(),
        qubits: program.qubits.clone(),
        votes: Vec::new(),
    };
    let Some(logical) = &program.logical else {
        return Ok(Solution {
            bits: physical_bits.clone(),
            assignment: physical_bits,
            qubo_value: None,
            bop_value: None,
            physical_energy,
            readout,
        });
    };
    let qubo = &logical.problem.qubo;
    let trees = compact_trees(&logical.embedding, &program.qubits);
    let decoded = decode_readout(&physical_bits, &trees, |x| qubo.energy(x))?;
    readout.votes = decoded.votes;
    let bits = qubo.strip_ancillas(&decoded.bits).to_vec();
    let bop_value = match logical.problem.source() {
        Some(source) => Some(source?.objective(&bits)),
        None => None,
    };
    Ok(Solution {
        qubo_value: Some(qubo.energy(&decoded.bits)),
        bits,
        assignment: decoded.bits,
        bop_value,
        physical_energy,
        readout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::benchmark_model;
    use crate::engine::{run, spectrum_at, Plugin, SimulationOptions, StateVector};
    use crate::frontend::{Problem, QuboProblem};
    use crate::graph::SymmetricMatrix;
    use crate::hardware::chimera;
    use crate::ising::IsingModel;
    use crate::program::{hamiltonian_at, synthesize, Schedule};
    use nalgebra::DMatrix;

    fn snapshots(program: &QuantumProgram, times: &[f64]) -> Vec<SpectrumSnapshot> {
        times
            .iter()
            .map(|&t| {
                let mut s = spectrum_at(&hamiltonian_at(program, t).unwrap(), 1 << program.n(), true).unwrap();
                s.t = t;
                s
            })
            .collect()
    }

    #[test]
    fn gap_of_independent_qubits_matches_closed_form() {
        // H = -A (X1 + X2) - B Z1: levels -r - A, -r + A, r - A, r + A with
        // r = sqrt(A^2 + B^2), so the gap is 2A.
        let model = IsingModel::new(vec![1.0, 0.0], [], 0.0).unwrap();
        let prog = QuantumProgram::linear(model, 4.0).unwrap();
        let times: Vec<f64> = (0..=8).map(|k| 0.5 * k as f64).collect();
        let profile = gap_profile(&snapshots(&prog, &times), &prog).unwrap();
        for (&t, &d) in times.iter().zip(&profile.delta) {
            assert!((d - 2.0 * (1.0 - t / 4.0)).abs() < 1e-12, "t = {t}");
        }
        assert_eq!(profile.delta_star, 0.0);
        assert_eq!(profile.t_star, 4.0);
        // dH/dt = (X1 + X2 - Z1) / T has spectral norm (1 + sqrt 2) / T.
        assert!((profile.rate_bound - (1.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!(profile.t_adiabatic.is_infinite());
        let json = serde_json::to_value(&profile).unwrap();
        assert!(json["t_adiabatic"].is_null());
    }

    #[test]
    fn gap_profile_needs_two_eigenvalues() {
        let prog = QuantumProgram::linear(benchmark_model(), 30.0).unwrap();
        let mut snaps = snapshots(&prog, &[0.0, 30.0]);
        assert!((gap_profile(&snaps, &prog).unwrap().delta[0] - 2.0).abs() < 1e-12);
        snaps[1].eigenvalues.truncate(1);
        assert!(gap_profile(&snaps, &prog).is_err());
        assert!(gap_profile(&snaps[..1], &prog).is_err());
    }

    #[test]
    fn nondegenerate_wide_gap_tracks_identity() {
        let model = IsingModel::new(vec![1.0, 0.5], [(0, 1, 0.25)], 0.0).unwrap();
        let prog = QuantumProgram::linear(model, 1.0).unwrap();
        let snaps = snapshots(&prog, &[0.2, 0.4, 0.6, 0.8, 1.0]);
        let trace = track_eigenpaths(&snaps).unwrap();
        assert_eq!(trace.ground_manifold, vec![0]);
        assert_eq!(trace.indices[&0], vec![0; 5]);
        assert!(trace.ambiguous.is_empty());
    }

    #[test]
    fn crossing_levels_swap_sorted_indices() {
        // Two levels exchanging order between snapshots: the path ending in
        // the ground state started as the excited state.
        let snap = |t: f64, values: [f64; 2], vectors: DMatrix<f64>| SpectrumSnapshot {
            t,
            eigenvalues: values.to_vec(),
            eigenvectors: Some(vectors),
            state: None,
            populations: None,
        };
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let snaps = vec![
            snap(0.0, [-1.0, 1.0], id.clone()),
            snap(1.0, [-0.5, 0.5], id),
            snap(2.0, [-1.0, 2.0], swap),
        ];
        let trace = track_eigenpaths(&snaps).unwrap();
        assert_eq!(trace.indices[&0], vec![1, 1, 0]);
        assert_eq!(trace.energies[&0], vec![1.0, 0.5, -1.0]);
    }

    #[test]
    fn benchmark_final_manifold_has_seventeen_paths() {
        let prog = QuantumProgram::linear(benchmark_model(), 30.0).unwrap();
        let snaps = snapshots(&prog, &[24.0, 27.0, 30.0]);
        let trace = track_eigenpaths(&snaps).unwrap();
        assert_eq!(trace.ground_manifold.len(), 17);
        let csv = trace_csv(&trace).unwrap();
        assert!(csv.starts_with("t,E_trace_1,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn populations_partition_the_norm() {
        let model = IsingModel::new(vec![1.0, -0.5], [(0, 1, 0.5)], 0.0).unwrap();
        let prog = QuantumProgram::linear(model, 3.0).unwrap();
        let opts = SimulationOptions::new(Plugin::FopMagnus, 0.01, 0.1, 0.5).with_eigenvectors();
        let r = run(&prog, &opts).unwrap();
        let trace = track_eigenpaths(&r.snapshots).unwrap();
        let pops = population_trace(&r.snapshots, &trace).unwrap();
        assert!((pops[0].ground - 1.0).abs() < 1e-12);
        for p in &pops {
            assert!((p.manifold + p.excited - 1.0).abs() < 1e-10);
            assert!(p.ground <= 1.0 + 1e-12);
        }
        assert_eq!(population_csv(&pops).unwrap().lines().next(), Some("t,ground,manifold"));
    }

    #[test]
    fn constant_hamiltonian_keeps_ground_population() {
        let prog = QuantumProgram::linear(IsingModel::zeros(2), 1.0).unwrap();
        let opts = SimulationOptions::new(Plugin::Rk4, 0.01, 0.1, 0.2).with_eigenvectors();
        let r = run(&prog, &opts).unwrap();
        // H(T) = 0 is fully degenerate; the initial state stays uniform.
        for s in &r.snapshots[..r.snapshots.len() - 1] {
            let pops = s.state.as_ref().unwrap().overlap_real(s.eigenvector(0).unwrap());
            assert!((pops - 1.0).abs() < 1e-9, "t = {}", s.t);
        }
        assert!(r.snapshots.last().unwrap().state.as_ref().unwrap().fidelity(&StateVector::uniform(2)) > 1.0 - 1e-9);
    }

    #[test]
    fn majority_vote_and_ties() {
        let trees = vec![vec![0], vec![1, 2, 3], vec![4, 5]];
        let d = decode_readout(&[1, 1, 1, 0, 1, 0], &trees, |_| 0.0).unwrap();
        assert_eq!(d.bits[..2], [1, 1]);
        assert!(d.votes[2].tie && !d.votes[1].tie);
        // Tie settled by the objective.
        let prefer_one = decode_readout(&[0, 0, 0, 0, 1, 0], &trees, |x| -(x[2] as f64)).unwrap();
        assert_eq!(prefer_one.bits, vec![0, 0, 1]);
        let prefer_zero = decode_readout(&[0, 0, 0, 0, 1, 0], &trees, |x| x[2] as f64).unwrap();
        assert_eq!(prefer_zero.bits, vec![0, 0, 0]);
        // Singletons decode to themselves.
        let single: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        assert_eq!(decode_readout(&[1, 0, 0, 1], &single, |_| 0.0).unwrap().bits, vec![1, 0, 0, 1]);
        assert!(decode_readout(&[1], &[vec![3]], |_| 0.0).is_err());
    }

    #[test]
    fn benchmark_readout_without_provenance() {
        let prog = QuantumProgram::linear(benchmark_model(), 30.0).unwrap();
        let sol = solution_from_readout(15, 0.0677, &prog).unwrap();
        assert_eq!(sol.bits, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert_eq!(sol.physical_energy, -8.0);
        assert!(sol.qubo_value.is_none());
    }

    #[test]
    fn one_variable_qubo_solves_to_one() {
        let problem = Problem::from_qubo(QuboProblem::from_matrix(SymmetricMatrix::from_rows(&[vec![-1.0]]).unwrap()));
        let prog = synthesize(&problem, &chimera(1, 1).unwrap(), (Schedule::LinearOff, Schedule::LinearOn), 20.0, None)
            .unwrap();
        let r = run(&prog, &SimulationOptions::new(Plugin::FopMagnus, 0.01, 0.1, 5.0)).unwrap();
        let sol = assemble_solution(&r, &prog).unwrap();
        assert_eq!(sol.bits, vec![1]);
        assert_eq!(sol.qubo_value, Some(-1.0));
        assert_eq!(sol.physical_energy, -1.0);
    }

    #[test]
    fn quadratized_problem_strips_ancillas() {
        let problem = Problem::from_bop_text("-1 : b1 AND b2 AND b3\n0.5 : b1\n").unwrap();
        assert_eq!(problem.qubo.n(), 4);
        let proc = chimera(1, 1).unwrap();
        let prog = synthesize(&problem, &proc, (Schedule::LinearOff, Schedule::LinearOn), 10.0, None).unwrap();
        // The readout that encodes x = 111 with a consistent ancilla.
        let target = problem.qubo.complete_assignment(&[1, 1, 1]);
        let trees = compact_trees(&prog.logical.as_ref().unwrap().embedding, &prog.qubits);
        let mut index = 0usize;
        for (i, tree) in trees.iter().enumerate() {
            for &q in tree {
                if target[i] == 1 {
                    index |= 1 << (prog.n() - 1 - q);
                }
            }
        }
        let sol = solution_from_readout(index, 1.0, &prog).unwrap();
        assert_eq!(sol.bits, vec![1, 1, 1]);
        assert_eq!(sol.bop_value, Some(-0.5));
        let logical = prog.logical_model().unwrap();
        let spins = SpinConfiguration::from_bits(&sol.assignment);
        let via_ising = logical.energy(&spins).unwrap() + logical.gamma();
        assert!((sol.qubo_value.unwrap() - via_ising).abs() < 1e-12);
        assert!((sol.physical_energy - via_ising).abs() < 1e-12);
    }
}
