//! Quantum programs: a physical Ising model, annealing schedules and a final
//! time, plus the time-dependent Hamiltonian `H(t) = A(t) H_I + B(t) H_P`
//! with `H_I = -sum_i X_i`.
//!
//! Time is dimensionless (`hbar = 1`, energies in units of the Hamiltonian's
//! scale). Basis index `z` follows `SpinConfiguration::from_basis_index`:
//! qubit 0 is the most significant bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::Problem;
use crate::hardware::{embed_ising, find_embedding, Embedding, Processor};
use crate::ising::{qubo_to_ising, IsingModel};

/// Largest register the engine will simulate (`2^16` amplitudes).
pub const MAX_QUBITS: usize = 16;

/// A function of normalized time `s = t / T` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub enum Schedule {
    /// `s`
    LinearOn,
    /// `1 - s`
    LinearOff,
    /// Piecewise-linear through `(s, value)` knots from `s = 0` to `s = 1`.
    Tabulated(Vec<(f64, f64)>),
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<(f64, f64)>>,
}

impl TryFrom<ScheduleRepr> for Schedule {
    type Error = Error;
    fn try_from(r: ScheduleRepr) -> Result<Self> {
        match (r.kind.as_str(), r.samples) {
            ("linear_on", _) => Ok(Schedule::LinearOn),
            ("linear_off", _) => Ok(Schedule::LinearOff),
            ("tabulated", Some(knots)) => Schedule::tabulated(knots),
            ("tabulated", None) => Err(Error::Schedule("tabulated schedule needs samples".into())),
            (other, _) => Err(Error::Schedule(format!("unknown schedule kind '{other}'"))),
        }
    }
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::LinearOn => ScheduleRepr {
                kind: "linear_on".into(),
                samples: None,
            },
            Schedule::LinearOff => ScheduleRepr {
                kind: "linear_off".into(),
                samples: None,
            },
            Schedule::Tabulated(k) => ScheduleRepr {
                kind: "tabulated".into(),
                samples: Some(k),
            },
        }
    }
}

impl Schedule {
    /// Knots must start at `s = 0`, end at `s = 1` and strictly increase.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Schedule("tabulated schedule needs at least two knots".into()));
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(Error::Schedule("knots must span s = 0 to s = 1".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Schedule("knot times must strictly increase".into()));
        }
        Ok(Schedule::Tabulated(knots))
    }

    fn segment(knots: &[(f64, f64)], s: f64) -> usize {
        knots
            .windows(2)
            .position(|w| s <= w[1].0)
            .unwrap_or(knots.len() - 2)
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            Schedule::LinearOn => s,
            Schedule::LinearOff => 1.0 - s,
            Schedule::Tabulated(k) => {
                let i = Self::segment(k, s);
                let ((s0, v0), (s1, v1)) = (k[i], k[i + 1]);
                v0 + (v1 - v0) * (s - s0) / (s1 - s0)
            }
        }
    }

    /// `d value / d s` (slope of the containing segment for tabulated).
    pub fn slope(&self, s: f64) -> f64 {
        match self {
            Schedule::LinearOn => 1.0,
            Schedule::LinearOff => -1.0,
            Schedule::Tabulated(k) => {
                let i = Self::segment(k, s);
                let ((s0, v0), (s1, v1)) = (k[i], k[i + 1]);
                (v1 - v0) / (s1 - s0)
            }
        }
    }
}

/// `A` must dominate at the start and `B` at the end.
pub fn check_boundaries(a: &Schedule, b: &Schedule) -> Result<()> {
    if !(a.value(0.0) > b.value(0.0)) {
        return Err(Error::Schedule(format!(
            "A(0) = {} must exceed B(0) = {}",
            a.value(0.0),
            b.value(0.0)
        )));
    }
    if !(a.value(1.0) < b.value(1.0)) {
        return Err(Error::Schedule(format!(
            "A(T) = {} must be below B(T) = {}",
            a.value(1.0),
            b.value(1.0)
        )));
    }
    Ok(())
}

/// Where a logical program came from: the QUBO (and source BOP, if any)
/// and the embedding used to place it.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalPart {
    pub problem: Problem,
    pub embedding: Embedding,
}

/// Program JSON layout; see [`QuantumProgram`].
#[derive(Serialize, Deserialize)]
struct ProgramRepr {
    physical: IsingModel,
    embedding: Option<Embedding>,
    problem: Option<Problem>,
    #[serde(rename = "schedule_A")]
    schedule_a: Schedule,
    #[serde(rename = "schedule_B")]
    schedule_b: Schedule,
    #[serde(rename = "T")]
    final_time: f64,
    #[serde(default)]
    qubits: Option<Vec<usize>>,
    #[serde(default)]
    penalty_j: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProgramRepr", into = "ProgramRepr")]
pub struct QuantumProgram {
    /// Model over the used qubits, in compact order.
    pub physical: IsingModel,
    /// Hardware qubit behind each compact index.
    pub qubits: Vec<usize>,
    pub penalty_j: Option<f64>,
    pub schedule_a: Schedule,
    pub schedule_b: Schedule,
    pub final_time: f64,
    pub logical: Option<LogicalPart>,
}

impl TryFrom<ProgramRepr> for QuantumProgram {
    type Error = Error;
    fn try_from(r: ProgramRepr) -> Result<Self> {
        let logical = match (r.problem, r.embedding) {
            (Some(problem), Some(embedding)) => Some(LogicalPart { problem, embedding }),
            (None, None) => None,
            _ => {
                return Err(Error::Program(
                    "problem and embedding must be given together".into(),
                ))
            }
        };
        let qubits = match (&logical, r.qubits) {
            (_, Some(q)) => q,
            (Some(l), None) => l.embedding.used_qubits(),
            (None, None) => (0..r.physical.n()).collect(),
        };
        let program = QuantumProgram {
            physical: r.physical,
            qubits,
            penalty_j: r.penalty_j,
            schedule_a: r.schedule_a,
            schedule_b: r.schedule_b,
            final_time: r.final_time,
            logical,
        };
        program.validate()?;
        Ok(program)
    }
}

impl From<QuantumProgram> for ProgramRepr {
    fn from(p: QuantumProgram) -> Self {
        let (problem, embedding) = match p.logical {
            Some(l) => (Some(l.problem), Some(l.embedding)),
            None => (None, None),
        };
        ProgramRepr {
            physical: p.physical,
            embedding,
            problem,
            schedule_a: p.schedule_a,
            schedule_b: p.schedule_b,
            final_time: p.final_time,
            qubits: Some(p.qubits),
            penalty_j: p.penalty_j,
        }
    }
}

impl QuantumProgram {
    /// Engineer-defined program: the Ising model is used as given, qubit `i`
    /// on hardware qubit `i`.
    pub fn physical(model: IsingModel, schedule_a: Schedule, schedule_b: Schedule, final_time: f64) -> Result<Self> {
        let program = QuantumProgram {
            qubits: (0..model.n()).collect(),
            physical: model,
            penalty_j: None,
            schedule_a,
            schedule_b,
            final_time,
            logical: None,
        };
        program.validate()?;
        Ok(program)
    }

    /// Linear schedules `A = 1 - t/T`, `B = t/T`.
    pub fn linear(model: IsingModel, final_time: f64) -> Result<Self> {
        Self::physical(model, Schedule::LinearOff, Schedule::LinearOn, final_time)
    }

    pub fn n(&self) -> usize {
        self.physical.n()
    }

    fn validate(&self) -> Result<()> {
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::Program(format!("final time must be positive, got {}", self.final_time)));
        }
        if self.n() > MAX_QUBITS {
            return Err(Error::TooLarge {
                n: self.n(),
                limit: MAX_QUBITS,
            });
        }
        if self.qubits.len() != self.n() {
            return Err(Error::Program(format!(
                "{} qubit labels for a {}-qubit model",
                self.qubits.len(),
                self.n()
            )));
        }
        check_boundaries(&self.schedule_a, &self.schedule_b)
    }

    /// Same program with `A` and `B` exchanged. The boundary contract is not
    /// enforced on the result.
    pub fn with_swapped_schedules(&self) -> Self {
        let mut p = self.clone();
        std::mem::swap(&mut p.schedule_a, &mut p.schedule_b);
        p
    }

    /// The logical model implied by the provenance, if any.
    pub fn logical_model(&self) -> Option<IsingModel> {
        self.logical.as_ref().map(|l| qubo_to_ising(&l.problem.qubo))
    }

    /// Checks that the qubit labels exist on `proc` and every coupling sits
    /// on a hardware coupler.
    pub fn check_hardware(&self, proc: &Processor) -> Result<()> {
        let hw = proc.graph();
        let mut seen = std::collections::BTreeSet::new();
        for &q in &self.qubits {
            if q >= hw.n() || !seen.insert(q) {
                return Err(Error::Program(format!("qubit label {q} is unknown or repeated on '{}'", proc.name)));
            }
        }
        for (i, j, _) in self.physical.couplings() {
            let (a, b) = (self.qubits[i], self.qubits[j]);
            if !hw.has_edge(a, b) {
                return Err(Error::Program(format!(
                    "coupling ({i}, {j}) needs coupler ({a}, {b}), which '{}' lacks",
                    proc.name
                )));
            }
        }
        Ok(())
    }

    /// Same program placed on the given hardware qubits.
    pub fn with_qubits(mut self, qubits: Vec<usize>) -> Result<Self> {
        self.qubits = qubits;
        self.validate()?;
        Ok(self)
    }

    /// Re-derives the physical model from the logical part and compares.
    pub fn check_provenance(&self, proc: &Processor) -> Result<()> {
        let Some(logical) = &self.logical else {
            return Ok(());
        };
        let model = qubo_to_ising(&logical.problem.qubo);
        let phys = embed_ising(&model, &logical.embedding, proc, self.penalty_j)?;
        if phys.model != self.physical || phys.qubits != self.qubits {
            return Err(Error::Program("physical model does not match its logical provenance".into()));
        }
        Ok(())
    }
}

/// Compiles a QUBO problem for a processor: logical Ising model, embedding
/// (searched for unless given), embedded physical model.
pub fn synthesize(
    problem: &Problem,
    proc: &Processor,
    schedules: (Schedule, Schedule),
    final_time: f64,
    embedding: Option<Embedding>,
) -> Result<QuantumProgram> {
    check_boundaries(&schedules.0, &schedules.1)?;
    let logical = qubo_to_ising(&problem.qubo);
    let embedding = match embedding {
        Some(e) => e,
        None => find_embedding(&logical.topology(), proc)?,
    };
    let phys = embed_ising(&logical, &embedding, proc, None)?;
    let program = QuantumProgram {
        physical: phys.model,
        qubits: phys.qubits,
        penalty_j: Some(phys.penalty_j),
        schedule_a: schedules.0,
        schedule_b: schedules.1,
        final_time,
        logical: Some(LogicalPart {
            problem: problem.clone(),
            embedding,
        }),
    };
    program.validate()?;
    Ok(program)
}

/// `H = transverse * H_I + diag(diagonal)` in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianOperator {
    n: usize,
    pub diagonal: Vec<f64>,
    pub transverse: f64,
}

impl HamiltonianOperator {
    pub fn new(n: usize, diagonal: Vec<f64>, transverse: f64) -> Result<Self> {
        if diagonal.len() != 1 << n {
            return Err(Error::Dimension {
                expected: 1 << n,
                actual: diagonal.len(),
            });
        }
        Ok(Self { n, diagonal, transverse })
    }

    /// `-sum_i X_i` on `n` qubits.
    pub fn transverse_field(n: usize) -> Self {
        Self {
            n,
            diagonal: vec![0.0; 1 << n],
            transverse: 1.0,
        }
    }

    /// Diagonal problem Hamiltonian of an Ising model (shift excluded).
    pub fn problem(model: &IsingModel) -> Self {
        Self {
            n: model.n(),
            diagonal: ising_diagonal(model),
            transverse: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `out = H v`, matrix-free: each bit flip contributes `-transverse`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let a = self.transverse;
        let n = self.n;
        if a == 0.0 {
            for ((o, x), d) in out.iter_mut().zip(v).zip(&self.diagonal) {
                *o = x * d;
            }
            return;
        }
        for (z, o) in out.iter_mut().enumerate() {
            let mut flipped = Complex64::new(0.0, 0.0);
            for q in 0..n {
                flipped += v[z ^ (1 << q)];
            }
            *o = v[z] * self.diagonal[z] - flipped * a;
        }
    }

    /// Dense real symmetric matrix of the operator.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let dim = self.dim();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for z in 0..dim {
            m[(z, z)] = self.diagonal[z];
            if self.transverse != 0.0 {
                for q in 0..self.n {
                    m[(z, z ^ (1 << q))] -= self.transverse;
                }
            }
        }
        m
    }
}

/// `H v` with a length check.
pub fn apply_hamiltonian(h: &HamiltonianOperator, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != h.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            actual: v.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    h.apply_into(v, &mut out);
    Ok(out)
}

/// Ising energy of every basis state, indexed by basis index (see
/// [`crate::ising::SpinConfiguration::from_basis_index`]).
pub fn ising_diagonal(model: &IsingModel) -> Vec<f64> {
    let n = model.n();
    (0..1usize << n).map(|z| model.basis_energy(z)).collect()
}

/// Evaluates `H(t)` for a program; the problem diagonal is computed once.
#[derive(Debug, Clone)]
pub struct IsingHamiltonianGenerator {
    n: usize,
    problem_diagonal: Vec<f64>,
    schedule_a: Schedule,
    schedule_b: Schedule,
    final_time: f64,
}

impl IsingHamiltonianGenerator {
    pub fn new(program: &QuantumProgram) -> Self {
        Self {
            n: program.n(),
            problem_diagonal: ising_diagonal(&program.physical),
            schedule_a: program.schedule_a.clone(),
            schedule_b: program.schedule_b.clone(),
            final_time: program.final_time,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn problem_diagonal(&self) -> &[f64] {
        &self.problem_diagonal
    }

    fn normalized(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.final_time;
        if !(t >= -slack && t <= self.final_time + slack) {
            return Err(Error::TimeOutOfRange {
                t,
                final_time: self.final_time,
            });
        }
        Ok((t / self.final_time).clamp(0.0, 1.0))
    }

    pub fn schedules_at(&self, t: f64) -> Result<(f64, f64)> {
        let s = self.normalized(t)?;
        Ok((self.schedule_a.value(s), self.schedule_b.value(s)))
    }

    pub fn at(&self, t: f64) -> Result<HamiltonianOperator> {
        let (a, b) = self.schedules_at(t)?;
        Ok(HamiltonianOperator {
            n: self.n,
            diagonal: self.problem_diagonal.iter().map(|e| b * e).collect(),
            transverse: a,
        })
    }

    /// `dH/dt = A'(t) H_I + B'(t) H_P`.
    pub fn rate_at(&self, t: f64) -> Result<HamiltonianOperator> {
        let s = self.normalized(t)?;
        let da = self.schedule_a.slope(s) / self.final_time;
        let db = self.schedule_b.slope(s) / self.final_time;
        Ok(HamiltonianOperator {
            n: self.n,
            diagonal: self.problem_diagonal.iter().map(|e| db * e).collect(),
            transverse: da,
        })
    }
}

/// `H(t)` of a program.
pub fn hamiltonian_at(program: &QuantumProgram, t: f64) -> Result<HamiltonianOperator> {
    IsingHamiltonianGenerator::new(program).at(t)
}
