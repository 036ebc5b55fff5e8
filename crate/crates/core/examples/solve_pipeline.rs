//! Clauses in, decoded assignment out: embed, synthesize, anneal, read out.
//!
//! `cargo run --release --example solve_pipeline`

use aqo::analysis::assemble_solution;
use aqo::engine::{run, Plugin, SimulationOptions};
use aqo::ising::format_bits;
use aqo::program::synthesize;
use aqo::{chimera, Problem, Schedule};

fn main() -> aqo::Result<()> {
    let problem = Problem::from_bop_text("1 : b1 AND b2\n-2 : b1 OR b3\n1 : NOT b3\n-0.5 : b2\n")?;
    let proc = chimera(1, 1)?;
    let program = synthesize(&problem, &proc, (Schedule::LinearOff, Schedule::LinearOn), 20.0, None)?;
    println!("{} logical variables on hardware qubits {:?}", problem.num_original(), program.qubits);

    let result = run(&program, &SimulationOptions::new(Plugin::Rk4, 1e-3, 0.05, 5.0))?;
    let solution = assemble_solution(&result, &program)?;
    println!(
        "bits {} with probability {:.4}; clause value {:?}, QUBO value {:?}",
        format_bits(&solution.bits),
        solution.readout.probability,
        solution.bop_value,
        solution.qubo_value
    );
    Ok(())
}
