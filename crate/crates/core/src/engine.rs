//! State-vector simulation of annealing programs.
//!
//! A run follows the lifecycle initialize, anneal, query state, measure,
//! finalize. `H(t)` is re-evaluated once per `dt_anneal` window (at the
//! window midpoint by default) and held frozen while the state is advanced in
//! `dt_evolve` steps. Snapshots of the instantaneous spectrum are taken every
//! `snapshot_interval`, starting at `t = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::program::{HamiltonianOperator, IsingHamiltonianGenerator, QuantumProgram, MAX_QUBITS};

/// Largest register for which dense spectra are computed without
/// [`SimulationOptions::allow_large_dense`].
pub const DENSE_LIMIT: usize = 12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plugin {
    /// Spectra only, no dynamics.
    SpectrumZero,
    /// Classical fourth-order Runge-Kutta.
    Rk4,
    /// First-order Magnus propagator through an eigendecomposition.
    FopMagnus,
}

impl Plugin {
    pub fn evolves_state(self) -> bool {
        self != Plugin::SpectrumZero
    }
}

impl FromStr for Plugin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "spectrum_zero" => Ok(Plugin::SpectrumZero),
            "rk4" => Ok(Plugin::Rk4),
            "fop" | "fop_magnus" | "magnus" => Ok(Plugin::FopMagnus),
            other => Err(Error::Options(format!("unknown plugin '{other}'"))),
        }
    }
}

impl fmt::Display for Plugin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plugin::SpectrumZero => "spectrum_zero",
            Plugin::Rk4 => "rk4",
            Plugin::FopMagnus => "fop_magnus",
        })
    }
}

/// Where in each anneal window `H` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationPoint {
    #[default]
    Midpoint,
    Start,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub plugin: Plugin,
    pub dt_evolve: f64,
    pub dt_anneal: f64,
    pub snapshot_interval: f64,
    /// Eigenvalues per snapshot; `None` means the whole spectrum, `Some(0)`
    /// means no spectra.
    pub num_eigenstates: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub evaluation: EvaluationPoint,
    #[serde(default)]
    pub store_eigenvectors: bool,
    #[serde(default)]
    pub store_state: bool,
    #[serde(default)]
    pub allow_large_dense: bool,
}

impl SimulationOptions {
    /// Step sizes used for the 8-qubit benchmark.
    pub fn benchmark(plugin: Plugin) -> Self {
        Self {
            plugin,
            dt_evolve: 1e-4,
            dt_anneal: 0.05,
            snapshot_interval: 3.0,
            num_eigenstates: None,
            seed: 0,
            evaluation: EvaluationPoint::Midpoint,
            store_eigenvectors: false,
            store_state: false,
            allow_large_dense: false,
        }
    }

    pub fn new(plugin: Plugin, dt_evolve: f64, dt_anneal: f64, snapshot_interval: f64) -> Self {
        Self {
            dt_evolve,
            dt_anneal,
            snapshot_interval,
            ..Self::benchmark(plugin)
        }
    }

    pub fn with_eigenvectors(mut self) -> Self {
        self.store_eigenvectors = true;
        self.store_state = true;
        self
    }

    /// Checks step ordering and divisibility for a given final time and
    /// register size.
    pub fn validate(&self, final_time: f64, n: usize) -> Result<()> {
        let (de, da, si) = (self.dt_evolve, self.dt_anneal, self.snapshot_interval);
        let finite = [de, da, si, final_time].iter().all(|v| v.is_finite());
        if !(finite && 0.0 < de && de <= da && da <= si && si <= final_time) {
            return Err(Error::Options(format!(
                "need 0 < dt_evolve ({de}) <= dt_anneal ({da}) <= snapshot_interval ({si}) <= T ({final_time})"
            )));
        }
        for (what, num, den) in [
            ("dt_anneal / dt_evolve", da, de),
            ("T / dt_anneal", final_time, da),
            ("snapshot_interval / dt_anneal", si, da),
        ] {
            if whole_ratio(num, den).is_none() {
                return Err(Error::Options(format!("{what} = {} is not an integer", num / den)));
            }
        }
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { n, limit: MAX_QUBITS });
        }
        let k = self.eigenstates(n);
        if k > 1 << n {
            return Err(Error::Options(format!("{k} eigenstates requested from a {}-dimensional space", 1 << n)));
        }
        if k == 0 && self.plugin == Plugin::SpectrumZero {
            return Err(Error::Options("spectrum_zero needs at least one eigenstate".into()));
        }
        if k > 0 && n > DENSE_LIMIT && !self.allow_large_dense {
            return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
        }
        if self.plugin == Plugin::FopMagnus && n > DENSE_LIMIT && !self.allow_large_dense {
            return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
        }
        Ok(())
    }

    pub fn eigenstates(&self, n: usize) -> usize {
        self.num_eigenstates.unwrap_or(1 << n)
    }
}

fn whole_ratio(num: f64, den: f64) -> Option<usize> {
    let r = num / den;
    let k = r.round();
    ((r - k).abs() <= 1e-9 * r.max(1.0) && k >= 1.0).then_some(k as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `2^{-n/2} sum_z |z>`, the ground state of `-sum_i X_i`.
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = 1.0 / (dim as f64).sqrt();
        Self {
            amplitudes: vec![Complex64::new(a, 0.0); dim],
        }
    }

    pub fn basis(n: usize, z: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[z] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|<v|self>|^2` for a real vector `v`.
    pub fn overlap_real(&self, v: &[f64]) -> f64 {
        let s: Complex64 = self.amplitudes.iter().zip(v).map(|(a, x)| a * x).sum();
        s.norm_sqr()
    }

    /// `(index, probability)` sorted by descending probability, ties by
    /// ascending index.
    pub fn distribution(&self) -> Vec<(usize, f64)> {
        let mut d: Vec<(usize, f64)> = self.probabilities().into_iter().enumerate().collect();
        d.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        d
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.amplitudes.iter().map(|a| [a.re, a.im]))
    }
}

/// Instantaneous spectrum at time `t`, plus the state when one is evolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSnapshot {
    pub t: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` belongs to `eigenvalues[j]`.
    pub eigenvectors: Option<DMatrix<f64>>,
    pub state: Option<StateVector>,
    /// `|<z|psi>|^2` per basis state.
    pub populations: Option<Vec<f64>>,
}

impl SpectrumSnapshot {
    pub fn eigenvector(&self, j: usize) -> Option<&[f64]> {
        let v = self.eigenvectors.as_ref()?;
        (j < v.ncols()).then(|| {
            let start = j * v.nrows();
            &v.as_slice()[start..start + v.nrows()]
        })
    }
}

impl Serialize for SpectrumSnapshot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("t", &self.t)?;
        m.serialize_entry("eigenvalues", &self.eigenvalues)?;
        if let Some(p) = &self.populations {
            m.serialize_entry("populations", p)?;
        }
        if let Some(state) = &self.state {
            m.serialize_entry("amplitudes", state)?;
        }
        m.end()
    }
}

/// Eigenpairs of a real symmetric matrix, ascending.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = m.nrows();
    let a = faer::Mat::<f64>::from_fn(dim, dim, |i, j| m[(i, j)]);
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("symmetric eigensolver failed on {dim}x{dim} matrix: {e:?}")))?;
    let (s, u) = (eig.S().column_vector(), eig.U());
    let values = (0..dim).map(|j| s[j]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| u[(r, c)]);
    Ok((values, vectors))
}

/// The `k` lowest eigenvalues of `h` (and eigenvectors when asked).
pub fn spectrum_at(h: &HamiltonianOperator, k: usize, with_vectors: bool) -> Result<SpectrumSnapshot> {
    if k == 0 || k > h.dim() {
        return Err(Error::Options(format!("cannot report {k} eigenstates of a {}-dimensional space", h.dim())));
    }
    let (mut values, vectors) = symmetric_eigen(h.to_dense())?;
    values.truncate(k);
    Ok(SpectrumSnapshot {
        t: 0.0,
        eigenvalues: values,
        eigenvectors: with_vectors.then(|| vectors.columns(0, k).into_owned()),
        state: None,
        populations: None,
    })
}

/// Largest absolute eigenvalue of `h`.
pub fn spectral_norm(h: &HamiltonianOperator) -> Result<f64> {
    let (values, _) = symmetric_eigen(h.to_dense())?;
    Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Scratch space for [`rk4_in_place`].
#[derive(Debug, Clone)]
pub struct Rk4Workspace {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    pub fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![ZERO; dim]),
            tmp: vec![ZERO; dim],
        }
    }
}

/// One RK4 step of `d psi/dt = -i H psi` with `H` frozen.
pub fn rk4_in_place(psi: &mut [Complex64], h: &HamiltonianOperator, dt: f64, ws: &mut Rk4Workspace) {
    let minus_i = Complex64::new(0.0, -1.0);
    let Rk4Workspace { k, tmp } = ws;
    let [k1, k2, k3, k4] = k;
    let deriv = |input: &[Complex64], out: &mut Vec<Complex64>| {
        h.apply_into(input, out);
        for v in out.iter_mut() {
            *v *= minus_i;
        }
    };
    deriv(psi, k1);
    for ((t, p), d) in tmp.iter_mut().zip(psi.iter()).zip(k1.iter()) {
        *t = p + d * (0.5 * dt);
    }
    deriv(tmp, k2);
    for ((t, p), d) in tmp.iter_mut().zip(psi.iter()).zip(k2.iter()) {
        *t = p + d * (0.5 * dt);
    }
    deriv(tmp, k3);
    for ((t, p), d) in tmp.iter_mut().zip(psi.iter()).zip(k3.iter()) {
        *t = p + d * dt;
    }
    deriv(tmp, k4);
    let w = dt / 6.0;
    for z in 0..psi.len() {
        psi[z] += (k1[z] + (k2[z] + k3[z]) * 2.0 + k4[z]) * w;
    }
}

fn check_step(state: &StateVector, h: &HamiltonianOperator, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Options(format!("step must be positive, got {dt}")));
    }
    if state.dim() != h.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            actual: state.dim(),
        });
    }
    Ok(())
}

/// Classical RK4 step with `H` frozen.
pub fn step_rk4(state: &StateVector, h: &HamiltonianOperator, dt: f64) -> Result<StateVector> {
    check_step(state, h, dt)?;
    let mut out = state.clone();
    rk4_in_place(&mut out.amplitudes, h, dt, &mut Rk4Workspace::new(state.dim()));
    Ok(out)
}

/// `exp(-i H dt) psi` through `H = V diag(lambda) V^T`.
pub fn step_magnus1(state: &StateVector, h: &HamiltonianOperator, dt: f64) -> Result<StateVector> {
    check_step(state, h, dt)?;
    let (values, vectors) = symmetric_eigen(h.to_dense())?;
    let mut out = state.clone();
    propagate_eigenbasis(&mut out.amplitudes, &values, &vectors, dt, 1);
    Ok(out)
}

/// Applies `exp(-i H dt)` `steps` times, given the eigenpairs of `H`.
fn propagate_eigenbasis(psi: &mut [Complex64], values: &[f64], vectors: &DMatrix<f64>, dt: f64, steps: usize) {
    let re = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.re));
    let im = DVector::from_iterator(psi.len(), psi.iter().map(|a| a.im));
    let (cr, ci) = (vectors.tr_mul(&re), vectors.tr_mul(&im));
    let mut c: Vec<Complex64> = cr.iter().zip(ci.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
    for (cj, &lambda) in c.iter_mut().zip(values) {
        let phase = Complex64::from_polar(1.0, -lambda * dt);
        for _ in 0..steps {
            *cj *= phase;
        }
    }
    let cr = DVector::from_iterator(c.len(), c.iter().map(|a| a.re));
    let ci = DVector::from_iterator(c.len(), c.iter().map(|a| a.im));
    let (re, im) = (vectors * cr, vectors * ci);
    for (z, a) in psi.iter_mut().enumerate() {
        *a = Complex64::new(re[z], im[z]);
    }
}

/// A simulation back-end.
pub trait Simulation {
    fn plugin(&self) -> Plugin;

    /// Prepares the uniform superposition on `n` qubits.
    fn initialize(&mut self, n: usize) -> Result<()>;

    /// Advances the state by `duration` under the frozen `h`.
    fn anneal(&mut self, h: &HamiltonianOperator, duration: f64) -> Result<()>;

    fn state(&self) -> Option<&StateVector>;

    /// Snapshot of the spectrum of `h` (the Hamiltonian at `t`) and the
    /// current state.
    fn query_state(&self, t: f64, h: &HamiltonianOperator, opts: &SimulationOptions) -> Result<SpectrumSnapshot> {
        let k = opts.eigenstates(h.n());
        let mut snap = if k > 0 {
            spectrum_at(h, k, opts.store_eigenvectors)?
        } else {
            SpectrumSnapshot {
                t,
                eigenvalues: Vec::new(),
                eigenvectors: None,
                state: None,
                populations: None,
            }
        };
        snap.t = t;
        if let Some(state) = self.state() {
            snap.populations = Some(state.probabilities());
            if opts.store_state {
                snap.state = Some(state.clone());
            }
        }
        Ok(snap)
    }

    /// Full output distribution, if the back-end evolves a state.
    fn measure(&self) -> Option<Vec<(usize, f64)>> {
        self.state().map(StateVector::distribution)
    }

    fn finalize(&mut self) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct SpectrumZero;

impl Simulation for SpectrumZero {
    fn plugin(&self) -> Plugin {
        Plugin::SpectrumZero
    }
    fn initialize(&mut self, _n: usize) -> Result<()> {
        Ok(())
    }
    fn anneal(&mut self, _h: &HamiltonianOperator, _duration: f64) -> Result<()> {
        Ok(())
    }
    fn state(&self) -> Option<&StateVector> {
        None
    }
}

fn steps_for(duration: f64, dt: f64) -> Result<usize> {
    whole_ratio(duration, dt)
        .ok_or_else(|| Error::Options(format!("window {duration} is not a whole number of {dt} steps")))
}

#[derive(Debug)]
pub struct Rk4Simulation {
    dt_evolve: f64,
    state: Option<StateVector>,
    workspace: Rk4Workspace,
}

impl Rk4Simulation {
    pub fn new(dt_evolve: f64) -> Self {
        Self {
            dt_evolve,
            state: None,
            workspace: Rk4Workspace::new(0),
        }
    }
}

impl Simulation for Rk4Simulation {
    fn plugin(&self) -> Plugin {
        Plugin::Rk4
    }
    fn initialize(&mut self, n: usize) -> Result<()> {
        self.state = Some(StateVector::uniform(n));
        self.workspace = Rk4Workspace::new(1 << n);
        Ok(())
    }
    fn anneal(&mut self, h: &HamiltonianOperator, duration: f64) -> Result<()> {
        let steps = steps_for(duration, self.dt_evolve)?;
        let state = self.state.as_mut().ok_or_else(|| Error::Options("simulation not initialized".into()))?;
        for _ in 0..steps {
            rk4_in_place(&mut state.amplitudes, h, self.dt_evolve, &mut self.workspace);
        }
        Ok(())
    }
    fn state(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }
}

#[derive(Debug)]
pub struct MagnusSimulation {
    dt_evolve: f64,
    state: Option<StateVector>,
}

impl MagnusSimulation {
    pub fn new(dt_evolve: f64) -> Self {
        Self { dt_evolve, state: None }
    }
}

impl Simulation for MagnusSimulation {
    fn plugin(&self) -> Plugin {
        Plugin::FopMagnus
    }
    fn initialize(&mut self, n: usize) -> Result<()> {
        self.state = Some(StateVector::uniform(n));
        Ok(())
    }
    fn anneal(&mut self, h: &HamiltonianOperator, duration: f64) -> Result<()> {
        let steps = steps_for(duration, self.dt_evolve)?;
        let state = self.state.as_mut().ok_or_else(|| Error::Options("simulation not initialized".into()))?;
        let (values, vectors) = symmetric_eigen(h.to_dense())?;
        propagate_eigenbasis(&mut state.amplitudes, &values, &vectors, self.dt_evolve, steps);
        Ok(())
    }
    fn state(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }
}

pub fn create_simulation(opts: &SimulationOptions) -> Box<dyn Simulation> {
    match opts.plugin {
        Plugin::SpectrumZero => Box::new(SpectrumZero),
        Plugin::Rk4 => Box::new(Rk4Simulation::new(opts.dt_evolve)),
        Plugin::FopMagnus => Box::new(MagnusSimulation::new(opts.dt_evolve)),
    }
}

#[derive(Debug, Clone)]
pub struct ProgramResult {
    pub final_state: Option<StateVector>,
    /// Descending probability, ties by ascending index.
    pub distribution: Option<Vec<(usize, f64)>>,
    pub snapshots: Vec<SpectrumSnapshot>,
    pub options: SimulationOptions,
}

/// The persisted part of a [`ProgramResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub distribution: Vec<(usize, f64)>,
    pub norm: f64,
    pub options: SimulationOptions,
}

impl ProgramResult {
    /// `||psi(T)||^2`.
    pub fn norm(&self) -> Option<f64> {
        self.final_state.as_ref().map(StateVector::norm_sqr)
    }

    pub fn probability(&self, z: usize) -> Option<f64> {
        self.final_state.as_ref().map(|s| s.amplitudes[z].norm_sqr())
    }

    pub fn most_probable(&self) -> Option<(usize, f64)> {
        self.distribution.as_ref().and_then(|d| d.first().copied())
    }

    pub fn record(&self) -> Option<ResultRecord> {
        Some(ResultRecord {
            distribution: self.distribution.clone()?,
            norm: self.norm()?,
            options: self.options.clone(),
        })
    }
}

/// Runs a program through the back-end selected in `opts`.
pub fn run(program: &QuantumProgram, opts: &SimulationOptions) -> Result<ProgramResult> {
    let mut sim = create_simulation(opts);
    run_with(sim.as_mut(), program, opts, |_| Ok(()))
}

/// Like [`run`] with a caller-supplied back-end and a callback invoked on
/// every snapshot as soon as it is taken.
pub fn run_with(
    sim: &mut dyn Simulation,
    program: &QuantumProgram,
    opts: &SimulationOptions,
    mut on_snapshot: impl FnMut(&SpectrumSnapshot) -> Result<()>,
) -> Result<ProgramResult> {
    let n = program.n();
    let final_time = program.final_time;
    opts.validate(final_time, n)?;
    let generator = IsingHamiltonianGenerator::new(program);
    let windows = whole_ratio(final_time, opts.dt_anneal).expect("validated");
    let per_snapshot = whole_ratio(opts.snapshot_interval, opts.dt_anneal).expect("validated");

    sim.initialize(n)?;
    let mut snapshots = Vec::new();
    let mut take = |sim: &dyn Simulation, t: f64, snapshots: &mut Vec<SpectrumSnapshot>| -> Result<()> {
        let snap = sim.query_state(t, &generator.at(t)?, opts)?;
        on_snapshot(&snap)?;
        snapshots.push(snap);
        Ok(())
    };
    take(sim, 0.0, &mut snapshots)?;
    for w in 0..windows {
        if sim.plugin().evolves_state() {
            let start = w as f64 * opts.dt_anneal;
            let t_eval = match opts.evaluation {
                EvaluationPoint::Midpoint => start + 0.5 * opts.dt_anneal,
                EvaluationPoint::Start => start,
            };
            sim.anneal(&generator.at(t_eval)?, opts.dt_anneal)?;
        }
        if (w + 1) % per_snapshot == 0 {
            let t = if w + 1 == windows {
                final_time
            } else {
                (w + 1) as f64 * opts.dt_anneal
            };
            take(sim, t, &mut snapshots)?;
        }
    }
    sim.finalize()?;
    Ok(ProgramResult {
        final_state: sim.state().cloned(),
        distribution: sim.measure(),
        snapshots,
        options: opts.clone(),
    })
}

/// Draws `shots` readouts from a distribution; counts per basis index.
pub fn sample_readouts(distribution: &[(usize, f64)], shots: usize, seed: u64) -> Result<BTreeMap<usize, usize>> {
    let weights = WeightedIndex::new(distribution.iter().map(|&(_, p)| p))
        .map_err(|e| Error::Options(format!("cannot sample from distribution: {e}")))?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(distribution[weights.sample(&mut rng)].0).or_insert(0) += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::benchmark_model;
    use crate::ising::IsingModel;
    use crate::program::hamiltonian_at;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn binomial(n: u64, k: u64) -> usize {
        ((n - k + 1..=n).product::<u64>() / (1..=k).product::<u64>()) as usize
    }

    fn multiplicities(values: &[f64]) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for v in values {
            let r = v.round();
            assert!((v - r).abs() < 1e-9, "{v} is not an integer");
            *m.entry(r as i64).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn options_are_validated() {
        let ok = SimulationOptions::benchmark(Plugin::Rk4);
        ok.validate(30.0, 8).unwrap();
        for bad in [
            SimulationOptions::new(Plugin::Rk4, 0.0, 0.05, 3.0),
            SimulationOptions::new(Plugin::Rk4, 0.1, 0.05, 3.0),
            SimulationOptions::new(Plugin::Rk4, 0.03, 0.05, 3.0),
            SimulationOptions::new(Plugin::Rk4, 0.01, 0.05, 40.0),
            SimulationOptions::new(Plugin::Rk4, 0.01, 0.07, 3.0),
        ] {
            assert!(bad.validate(30.0, 8).is_err(), "{bad:?}");
        }
        let mut too_many = ok.clone();
        too_many.num_eigenstates = Some(257);
        assert!(too_many.validate(30.0, 8).is_err());
        assert!(ok.validate(30.0, 13).is_err());
        assert!(ok.validate(30.0, 17).is_err());
        assert_eq!("fop".parse::<Plugin>().unwrap(), Plugin::FopMagnus);
        assert!("euler".parse::<Plugin>().is_err());
    }

    #[test]
    fn zero_hamiltonian_leaves_state_alone() {
        let h = HamiltonianOperator::new(2, vec![0.0; 4], 0.0).unwrap();
        let psi = StateVector {
            amplitudes: vec![c(0.5, 0.1), c(-0.3, 0.2), c(0.0, 0.7), c(0.1, 0.0)],
        };
        assert_eq!(step_rk4(&psi, &h, 0.1).unwrap(), psi);
        let m = step_magnus1(&psi, &h, 0.1).unwrap();
        for (a, b) in m.amplitudes.iter().zip(&psi.amplitudes) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(step_rk4(&psi, &h, 0.0).is_err());
    }

    #[test]
    fn rk4_matches_closed_form_single_qubit() {
        // H = -X: exp(-iHt) = cos t I + i sin t X.
        let h = HamiltonianOperator::transverse_field(1);
        let psi = StateVector {
            amplitudes: vec![c(0.6, 0.0), c(0.0, 0.8)],
        };
        let exact = |t: f64| {
            let (co, si) = (t.cos(), t.sin());
            let [a, b] = [psi.amplitudes[0], psi.amplitudes[1]];
            [a * co + c(0.0, si) * b, b * co + c(0.0, si) * a]
        };
        let err = |dt: f64| {
            let out = step_rk4(&psi, &h, dt).unwrap();
            let e = exact(dt);
            (out.amplitudes[0] - e[0]).norm() + (out.amplitudes[1] - e[1]).norm()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 < 1e-6);
        // Local error is fifth order.
        let ratio = e1 / e2;
        assert!((ratio - 32.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn magnus_on_diagonal_h_only_adds_phases() {
        let model = benchmark_model();
        let h = HamiltonianOperator::problem(&model);
        let psi = StateVector::uniform(8);
        let out = step_magnus1(&psi, &h, 0.37).unwrap();
        for z in 0..256 {
            let expected = psi.amplitudes[z] * Complex64::from_polar(1.0, -model.basis_energy(z) * 0.37);
            assert!((out.amplitudes[z] - expected).norm() < 1e-12);
        }
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transverse_field_spectrum_is_binomial() {
        let snap = spectrum_at(&HamiltonianOperator::transverse_field(8), 256, false).unwrap();
        let counts = multiplicities(&snap.eigenvalues);
        for m in 0..=8u64 {
            assert_eq!(counts[&(-8 + 2 * m as i64)], binomial(8, m));
        }
        assert!(spectrum_at(&HamiltonianOperator::transverse_field(2), 5, false).is_err());
    }

    #[test]
    fn benchmark_final_spectrum_has_seventeen_ground_states() {
        let prog = QuantumProgram::linear(benchmark_model(), 30.0).unwrap();
        let snap = spectrum_at(&hamiltonian_at(&prog, 30.0).unwrap(), 256, false).unwrap();
        assert_eq!(snap.eigenvalues[0], -8.0);
        assert_eq!(snap.eigenvalues.iter().filter(|&&e| e == -8.0).count(), 17);
        assert!(snap.eigenvalues[17] > -8.0);
    }

    #[test]
    fn two_qubit_spectrum_matches_power_sums() {
        // Newton's identities: tr H^p for p = 1..4 pin down four eigenvalues.
        let model = IsingModel::new(vec![0.3, -0.7], [(0, 1, 0.45)], 0.0).unwrap();
        let prog = QuantumProgram::linear(model, 1.0).unwrap();
        let h = hamiltonian_at(&prog, 0.4).unwrap();
        let dense = h.to_dense();
        let snap = spectrum_at(&h, 4, true).unwrap();
        let mut power = DMatrix::<f64>::identity(4, 4);
        for p in 1..=4 {
            power = &power * &dense;
            let from_eig: f64 = snap.eigenvalues.iter().map(|l| l.powi(p)).sum();
            assert!((power.trace() - from_eig).abs() < 1e-12);
        }
        for j in 0..4 {
            let v = DVector::from_column_slice(snap.eigenvector(j).unwrap());
            assert!((&dense * &v - &v * snap.eigenvalues[j]).amax() < 1e-12);
        }
    }

    #[test]
    fn trivial_program_stays_uniform() {
        let prog = QuantumProgram::linear(IsingModel::zeros(3), 2.0).unwrap();
        for plugin in [Plugin::Rk4, Plugin::FopMagnus] {
            let r = run(&prog, &SimulationOptions::new(plugin, 0.01, 0.1, 1.0)).unwrap();
            let d = r.distribution.unwrap();
            let first = d[0].1;
            assert!((first - 0.125).abs() < 1e-8);
            assert!(d.iter().all(|(_, p)| (p - first).abs() < 1e-12));
        }
    }

    #[test]
    fn snapshot_cadence_and_spectrum_zero() {
        let prog = QuantumProgram::linear(benchmark_model(), 30.0).unwrap();
        let opts = SimulationOptions::benchmark(Plugin::SpectrumZero);
        let r = run(&prog, &opts).unwrap();
        assert!(r.distribution.is_none() && r.final_state.is_none() && r.record().is_none());
        let times: Vec<f64> = r.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times, (0..=10).map(|k| 3.0 * k as f64).collect::<Vec<_>>());
        assert!(r.snapshots.iter().all(|s| s.eigenvalues.len() == 256 && s.populations.is_none()));
    }

    #[test]
    fn rk4_and_magnus_agree_and_conserve_norm() {
        let model = IsingModel::new(vec![0.5, -0.2, 0.1], [(0, 1, 1.0), (1, 2, -0.6)], 0.0).unwrap();
        let prog = QuantumProgram::linear(model, 5.0).unwrap();
        let rk = run(&prog, &SimulationOptions::new(Plugin::Rk4, 0.001, 0.05, 1.0)).unwrap();
        let fop = run(&prog, &SimulationOptions::new(Plugin::FopMagnus, 0.001, 0.05, 1.0)).unwrap();
        let (a, b) = (rk.final_state.unwrap(), fop.final_state.unwrap());
        assert!(a.fidelity(&b) > 1.0 - 1e-10);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-8);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adiabatic_and_quench_limits() {
        let model = IsingModel::new(vec![1.0, 0.5], [(0, 1, 0.5)], 0.0).unwrap();
        let slow = QuantumProgram::linear(model.clone(), 100.0).unwrap();
        let r = run(&slow, &SimulationOptions::new(Plugin::FopMagnus, 0.01, 0.1, 10.0)).unwrap();
        assert!(r.probability(0).unwrap() > 0.999);

        let fast = QuantumProgram::linear(model, 0.01).unwrap();
        let r = run(&fast, &SimulationOptions::new(Plugin::Rk4, 0.0001, 0.001, 0.01)).unwrap();
        assert!(r.final_state.unwrap().fidelity(&StateVector::uniform(2)) > 0.999);
    }

    #[test]
    fn distribution_ties_break_by_index() {
        let s = StateVector {
            amplitudes: vec![c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, -0.5)],
        };
        let d: Vec<usize> = s.distribution().into_iter().map(|(z, _)| z).collect();
        assert_eq!(d, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sampling_is_seeded() {
        let d = vec![(3, 0.5), (1, 0.25), (0, 0.25)];
        let a = sample_readouts(&d, 1000, 9).unwrap();
        assert_eq!(a, sample_readouts(&d, 1000, 9).unwrap());
        assert_eq!(a.values().sum::<usize>(), 1000);
        assert!(a[&3] > 400 && a[&3] < 600);
    }

    #[test]
    fn snapshot_json_layout() {
        let snap = SpectrumSnapshot {
            t: 1.5,
            eigenvalues: vec![-1.0, 1.0],
            eigenvectors: None,
            state: Some(StateVector::basis(1, 1)),
            populations: Some(vec![0.0, 1.0]),
        };
        let v = serde_json::to_value(&snap).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"t": 1.5, "eigenvalues": [-1.0, 1.0], "populations": [0.0, 1.0], "amplitudes": [[0.0, 0.0], [1.0, 0.0]]})
        );
    }
}
