//! Command-line front end over an [`EntityStore`].
//!
//! Exit codes: 0 on success, 1 for domain errors, 2 for usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    assemble_solution, gap_profile, population_csv, population_trace, trace_csv, track_eigenpaths, Solution,
};
use crate::benchmark::{benchmark_model, BENCHMARK_PLACEMENT};
use crate::engine::{create_simulation, run_with, sample_readouts, EvaluationPoint, Plugin, ProgramResult, SimulationOptions, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::frontend::{aggregate, parse_bop, quadratize, Penalty, Problem, QuboProblem};
use crate::graph::SymmetricMatrix;
use crate::hardware::{chimera, find_embedding_with_budget, validate_embedding, Embedding, Processor, DEFAULT_SEARCH_BUDGET};
use crate::ising::{format_bits, qubo_to_ising, IsingModel};
use crate::program::{synthesize, QuantumProgram, Schedule};
use crate::store::{to_json_text, write_atomic, EntityKind, EntityStore, STORE_ENV};

#[derive(Debug, Parser)]
#[command(name = "aqo", version, about = "Adiabatic quantum optimization toolchain")]
pub struct Cli {
    /// Entity store directory.
    #[arg(long, global = true, env = STORE_ENV)]
    pub store: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create problems.
    #[command(subcommand)]
    Problem(ProblemCommand),
    /// Create processors.
    #[command(subcommand)]
    Processor(ProcessorCommand),
    /// Find a minor embedding of a problem into a processor.
    Embed(EmbedArgs),
    /// Create programs.
    #[command(subcommand)]
    Program(ProgramCommand),
    /// Simulate a program.
    Run(RunArgs),
    /// Embed, synthesize, run and decode in one go.
    Solve(SolveArgs),
    /// Built-in benchmark data.
    #[command(subcommand)]
    Benchmark(BenchmarkCommand),
}

#[derive(Debug, Subcommand)]
pub enum ProblemCommand {
    Create(ProblemCreateArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["bop", "qubo"])))]
pub struct ProblemCreateArgs {
    /// Weighted clauses, one `<weight> : <expr>` per line.
    #[arg(long)]
    pub bop: Option<PathBuf>,
    /// JSON matrix (array of rows, or an object with a "matrix" field).
    #[arg(long)]
    pub qubo: Option<PathBuf>,
    /// Fixed ancilla penalty for quadratization (default: automatic).
    #[arg(long, value_parser = positive_f64)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Subcommand)]
pub enum ProcessorCommand {
    Chimera(ChimeraArgs),
}

#[derive(Debug, Args)]
pub struct ChimeraArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub rows: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub cols: u32,
    /// Defaults to `chimera_<rows>x<cols>`.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub processor: String,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    pub budget: u64,
    /// Defaults to the problem name.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScheduleChoice {
    /// A = 1 - t/T, B = t/T.
    Linear,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long = "T", value_parser = positive_f64, default_value_t = 30.0)]
    pub final_time: f64,
    #[arg(long, value_enum, default_value_t = ScheduleChoice::Linear)]
    pub schedule: ScheduleChoice,
    /// JSON schedule for A, overriding --schedule.
    #[arg(long)]
    pub schedule_a: Option<PathBuf>,
    /// JSON schedule for B, overriding --schedule.
    #[arg(long)]
    pub schedule_b: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ProgramCommand {
    /// Compile a problem for a processor.
    Synth(SynthArgs),
    /// Use an Ising model as the physical Hamiltonian directly.
    Physical(PhysicalArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub processor: String,
    /// Stored embedding to use instead of searching.
    #[arg(long)]
    pub embedding: Option<String>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct PhysicalArgs {
    /// Ising model JSON.
    #[arg(long)]
    pub ising: PathBuf,
    /// Check the couplings against this processor.
    #[arg(long)]
    pub processor: Option<String>,
    /// Hardware qubit of each model spin (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub qubits: Option<Vec<usize>>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PluginChoice {
    Rk4,
    Fop,
    Zero,
}

impl From<PluginChoice> for Plugin {
    fn from(p: PluginChoice) -> Self {
        match p {
            PluginChoice::Rk4 => Plugin::Rk4,
            PluginChoice::Fop => Plugin::FopMagnus,
            PluginChoice::Zero => Plugin::SpectrumZero,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EvaluationChoice {
    Midpoint,
    Start,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = PluginChoice::Rk4)]
    pub plugin: PluginChoice,
    #[arg(long, value_parser = positive_f64, default_value_t = 1e-4)]
    pub dt_evolve: f64,
    #[arg(long, value_parser = positive_f64, default_value_t = 0.05)]
    pub dt_anneal: f64,
    /// Snapshot interval.
    #[arg(long, value_parser = positive_f64, default_value_t = 3.0)]
    pub snapshots: f64,
    /// Eigenvalues per snapshot (default: all).
    #[arg(long)]
    pub eigenstates: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exchange A and B (diagnostic; violates the boundary conditions).
    #[arg(long)]
    pub swap_schedules: bool,
    /// Where H is evaluated in each anneal window.
    #[arg(long, value_enum, default_value_t = EvaluationChoice::Midpoint)]
    pub evaluation: EvaluationChoice,
    /// Also draw this many seeded readouts from the final distribution.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Allow dense spectra above 12 qubits.
    #[arg(long)]
    pub allow_large_dense: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub program: String,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Defaults to the program name.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub processor: String,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    pub budget: u64,
    /// Name for every entity produced; defaults to the problem name.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum BenchmarkCommand {
    /// Write the 8-qubit benchmark Ising model as JSON.
    Ising {
        #[arg(long)]
        out: PathBuf,
    },
    /// Store the benchmark program (chimera 1x1, linear schedules, T = 30).
    Program {
        #[arg(long, default_value = "benchmark")]
        out: String,
    },
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let store = EntityStore::from_env(cli.store.as_deref())?;
    match cli.command {
        Command::Problem(ProblemCommand::Create(a)) => cmd_problem(&store, a, out),
        Command::Processor(ProcessorCommand::Chimera(a)) => cmd_chimera(&store, a, out),
        Command::Embed(a) => cmd_embed(&store, a, out).map(|_| ()),
        Command::Program(ProgramCommand::Synth(a)) => cmd_synth(&store, a, out).map(|_| ()),
        Command::Program(ProgramCommand::Physical(a)) => cmd_physical(&store, a, out),
        Command::Run(a) => {
            let name = a.out.clone().unwrap_or_else(|| a.program.clone());
            let program: QuantumProgram = store.load(EntityKind::Program, &a.program)?;
            cmd_run(&store, &program, &a.engine, &name, out).map(|_| ())
        }
        Command::Solve(a) => cmd_solve(&store, a, out),
        Command::Benchmark(BenchmarkCommand::Ising { out: path }) => {
            write_atomic(&path, &to_json_text(&benchmark_model())?)?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(())
        }
        Command::Benchmark(BenchmarkCommand::Program { out: name }) => {
            let program = QuantumProgram::linear(benchmark_model(), 30.0)?.with_qubits(BENCHMARK_PLACEMENT.to_vec())?;
            program.check_hardware(&chimera(1, 1)?)?;
            let path = store.save(EntityKind::Program, &name, &program)?;
            writeln!(out, "program '{name}': 8 qubits, T = 30 -> {}", path.display())?;
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Store(format!("cannot read {}: {e}", path.display())))
}

/// A QUBO matrix file: a JSON array of rows, an object with a `matrix`
/// field, or a full QUBO problem document.
pub fn parse_qubo_file(text: &str) -> Result<QuboProblem> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let rows_value = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(m) if m.contains_key("num_original") => {
            return Ok(serde_json::from_value(value)?);
        }
        serde_json::Value::Object(m) => m
            .get("matrix")
            .ok_or_else(|| Error::Store("QUBO object needs a \"matrix\" field".into()))?,
        _ => return Err(Error::Store("QUBO file must hold an array of rows".into())),
    };
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows_value.clone())?;
    Ok(QuboProblem::from_matrix(SymmetricMatrix::from_rows(&rows)?))
}

fn cmd_problem(store: &EntityStore, a: ProblemCreateArgs, out: &mut dyn Write) -> Result<()> {
    let problem = match (&a.bop, &a.qubo) {
        (Some(path), None) => {
            let bop = parse_bop(&read_text(path)?)?;
            let penalty = a.penalty.map_or(Penalty::Auto, Penalty::Fixed);
            Problem {
                qubo: quadratize(&aggregate(&bop), penalty)?,
                bop: Some(bop.to_text()),
            }
        }
        (None, Some(path)) => Problem::from_qubo(parse_qubo_file(&read_text(path)?)?),
        _ => unreachable!("clap enforces exactly one source"),
    };
    let path = store.save(EntityKind::Problem, &a.out, &problem)?;
    writeln!(
        out,
        "problem '{}': {} variables ({} ancillas) -> {}",
        a.out,
        problem.qubo.n(),
        problem.qubo.ancillas.len(),
        path.display()
    )?;
    Ok(())
}

fn cmd_chimera(store: &EntityStore, a: ChimeraArgs, out: &mut dyn Write) -> Result<()> {
    let proc = chimera(a.rows as usize, a.cols as usize)?;
    let name = a.out.unwrap_or_else(|| format!("chimera_{}x{}", a.rows, a.cols));
    let path = store.save(EntityKind::Processor, &name, &proc)?;
    writeln!(
        out,
        "processor '{name}': {} qubits, {} couplers -> {}",
        proc.num_qubits(),
        proc.graph().edge_count(),
        path.display()
    )?;
    Ok(())
}

fn embed(problem: &Problem, proc: &Processor, budget: u64) -> Result<Embedding> {
    find_embedding_with_budget(&qubo_to_ising(&problem.qubo).topology(), proc, budget)
}

fn cmd_embed(store: &EntityStore, a: EmbedArgs, out: &mut dyn Write) -> Result<Embedding> {
    let problem: Problem = store.load(EntityKind::Problem, &a.problem)?;
    let proc: Processor = store.load(EntityKind::Processor, &a.processor)?;
    let emb = embed(&problem, &proc, a.budget)?;
    let name = a.out.unwrap_or(a.problem);
    let path = store.save(EntityKind::Embedding, &name, &emb)?;
    writeln!(
        out,
        "embedding '{name}': {} logical -> {} physical qubits -> {}",
        emb.num_logical(),
        emb.total_qubits(),
        path.display()
    )?;
    Ok(emb)
}

fn schedules(a: &ScheduleArgs) -> Result<(Schedule, Schedule)> {
    let load = |p: &Option<PathBuf>, default: Schedule| -> Result<Schedule> {
        match p {
            Some(path) => Ok(serde_json::from_str(&read_text(path)?)?),
            None => Ok(default),
        }
    };
    let (a_default, b_default) = match a.schedule {
        ScheduleChoice::Linear => (Schedule::LinearOff, Schedule::LinearOn),
    };
    Ok((load(&a.schedule_a, a_default)?, load(&a.schedule_b, b_default)?))
}

fn synth(
    problem: &Problem,
    proc: &Processor,
    embedding: Embedding,
    a: &ScheduleArgs,
) -> Result<QuantumProgram> {
    let report = validate_embedding(&qubo_to_ising(&problem.qubo).topology(), proc, &embedding);
    if !report.is_valid() {
        let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidEmbedding(msgs.join("; ")));
    }
    synthesize(problem, proc, schedules(a)?, a.final_time, Some(embedding))
}

fn describe_program(name: &str, p: &QuantumProgram, path: &Path, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "program '{name}': {} qubits, T = {}{} -> {}",
        p.n(),
        p.final_time,
        p.penalty_j.map(|j| format!(", J = {j}")).unwrap_or_default(),
        path.display()
    )?;
    Ok(())
}

fn cmd_synth(store: &EntityStore, a: SynthArgs, out: &mut dyn Write) -> Result<QuantumProgram> {
    let problem: Problem = store.load(EntityKind::Problem, &a.problem)?;
    let proc: Processor = store.load(EntityKind::Processor, &a.processor)?;
    let embedding = match &a.embedding {
        Some(e) => store.load(EntityKind::Embedding, e)?,
        None => embed(&problem, &proc, DEFAULT_SEARCH_BUDGET)?,
    };
    let program = synth(&problem, &proc, embedding, &a.schedule)?;
    let path = store.save(EntityKind::Program, &a.out, &program)?;
    describe_program(&a.out, &program, &path, out)?;
    Ok(program)
}

fn cmd_physical(store: &EntityStore, a: PhysicalArgs, out: &mut dyn Write) -> Result<()> {
    let model: IsingModel = serde_json::from_str(&read_text(&a.ising)?)?;
    let (sa, sb) = schedules(&a.schedule)?;
    let mut program = QuantumProgram::physical(model, sa, sb, a.schedule.final_time)?;
    if let Some(q) = a.qubits {
        program = program.with_qubits(q)?;
    }
    if let Some(name) = &a.processor {
        let proc: Processor = store.load(EntityKind::Processor, name)?;
        program.check_hardware(&proc)?;
    }
    let path = store.save(EntityKind::Program, &a.out, &program)?;
    describe_program(&a.out, &program, &path, out)
}

fn options(e: &EngineArgs, n: usize) -> SimulationOptions {
    let plugin: Plugin = e.plugin.into();
    let dense = n <= DENSE_LIMIT || e.allow_large_dense;
    SimulationOptions {
        plugin,
        dt_evolve: e.dt_evolve,
        dt_anneal: e.dt_anneal,
        snapshot_interval: e.snapshots,
        num_eigenstates: if dense { e.eigenstates } else { Some(e.eigenstates.unwrap_or(0)) },
        seed: e.seed,
        evaluation: match e.evaluation {
            EvaluationChoice::Midpoint => EvaluationPoint::Midpoint,
            EvaluationChoice::Start => EvaluationPoint::Start,
        },
        store_eigenvectors: dense,
        store_state: plugin.evolves_state(),
        allow_large_dense: e.allow_large_dense,
    }
}

/// Runs a program and writes the result entity plus the run directory
/// (`snapshot_<k>.json`, `gap.json`, `trace.csv`, `population.csv`).
fn cmd_run(
    store: &EntityStore,
    program: &QuantumProgram,
    e: &EngineArgs,
    name: &str,
    out: &mut dyn Write,
) -> Result<ProgramResult> {
    let program = if e.swap_schedules {
        program.with_swapped_schedules()
    } else {
        program.clone()
    };
    let opts = options(e, program.n());
    let dir = store.run_dir(name)?;
    let mut index = 0usize;
    let mut sim = create_simulation(&opts);
    let result = run_with(sim.as_mut(), &program, &opts, |snap| {
        write_atomic(&dir.join(format!("snapshot_{index}.json")), &to_json_text(snap)?)?;
        index += 1;
        Ok(())
    })?;
    writeln!(out, "{}: {} snapshots in {}", opts.plugin, result.snapshots.len(), dir.display())?;

    let spectra = result.snapshots.iter().all(|s| s.eigenvalues.len() >= 2);
    if spectra && result.snapshots.len() >= 2 {
        let gap = gap_profile(&result.snapshots, &program)?;
        write_atomic(&dir.join("gap.json"), &to_json_text(&gap)?)?;
        writeln!(out, "minimum sampled gap {} at t = {}", gap.delta_star, gap.t_star)?;
    }
    if opts.store_eigenvectors && !result.snapshots.is_empty() {
        let trace = track_eigenpaths(&result.snapshots)?;
        write_atomic(&dir.join("trace.csv"), &trace_csv(&trace)?)?;
        if opts.store_state {
            let pops = population_trace(&result.snapshots, &trace)?;
            write_atomic(&dir.join("population.csv"), &population_csv(&pops)?)?;
        }
    }
    if let Some(record) = result.record() {
        let path = store.save(EntityKind::Result, name, &record)?;
        writeln!(out, "norm^2 = {:.12}; result -> {}", record.norm, path.display())?;
        for &(z, p) in record.distribution.iter().take(5) {
            let bits = crate::ising::spin_bit_decode(&crate::ising::SpinConfiguration::from_basis_index(z, program.n()));
            writeln!(out, "  {z:>6}  {}  {p:.7}", format_bits(&bits))?;
        }
        if let Some(shots) = e.shots {
            let counts = sample_readouts(&record.distribution, shots, opts.seed)?;
            let rows: Vec<(usize, usize)> = counts.into_iter().collect();
            write_atomic(&dir.join("samples.json"), &to_json_text(&rows)?)?;
        }
    }
    Ok(result)
}

fn describe_solution(name: &str, s: &Solution, path: &Path, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "solution '{name}': bits {} (p = {:.6}){}{} -> {}",
        format_bits(&s.bits),
        s.readout.probability,
        s.qubo_value.map(|v| format!(", QUBO {v}")).unwrap_or_default(),
        s.bop_value.map(|v| format!(", BOP {v}")).unwrap_or_default(),
        path.display()
    )?;
    Ok(())
}

fn cmd_solve(store: &EntityStore, a: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let name = a.out.clone().unwrap_or_else(|| a.problem.clone());
    let embedding = cmd_embed(
        store,
        EmbedArgs {
            problem: a.problem.clone(),
            processor: a.processor.clone(),
            budget: a.budget,
            out: Some(name.clone()),
        },
        out,
    )?;
    let problem: Problem = store.load(EntityKind::Problem, &a.problem)?;
    let proc: Processor = store.load(EntityKind::Processor, &a.processor)?;
    let program = synth(&problem, &proc, embedding, &a.schedule)?;
    let path = store.save(EntityKind::Program, &name, &program)?;
    describe_program(&name, &program, &path, out)?;
    if a.engine.swap_schedules {
        return Err(Error::Options("solve does not accept --swap-schedules".into()));
    }
    let result = cmd_run(store, &program, &a.engine, &name, out)?;
    if result.distribution.is_none() {
        return Err(Error::Options("solve needs a plugin that evolves the state".into()));
    }
    let solution = assemble_solution(&result, &program)?;
    let path = store.save(EntityKind::Solution, &name, &solution)?;
    describe_solution(&name, &solution, &path, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("aqo").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_come_from_the_parser() {
        let e = parse(&["run", "--program", "p", "--dt-evolve", "0"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(parse(&["problem", "create", "--out", "x"]).is_err());
        assert!(parse(&["problem", "create", "--bop", "a", "--qubo", "b", "--out", "x"]).is_err());
        assert!(parse(&["processor", "chimera", "--rows", "0", "--cols", "1"]).is_err());
        assert!(parse(&["run", "--program", "p", "--plugin", "euler"]).is_err());
        let ok = parse(&["run", "--program", "p", "--plugin", "fop", "--snapshots", "3.0", "--eigenstates", "256"]).unwrap();
        assert!(matches!(ok.command, Command::Run(_)));
    }

    #[test]
    fn qubo_files_in_three_shapes() {
        let rows = parse_qubo_file("[[1, 2], [2, -1]]").unwrap();
        assert_eq!(rows.n(), 2);
        assert_eq!(parse_qubo_file(r#"{"matrix": [[1, 2], [2, -1]]}"#).unwrap(), rows);
        let full = serde_json::to_string(&rows).unwrap();
        assert_eq!(parse_qubo_file(&full).unwrap(), rows);
        let err = parse_qubo_file("[[0, 1], [2, 0]]").unwrap_err().to_string();
        assert!(err.contains("(0, 1)") || err.contains("0, 1"), "{err}");
    }
}
