//! RK4 and first-order Magnus on a two-qubit ramp as the window shrinks.
//! The Hamiltonian is frozen per window, so both errors fall as dt^2.
//!
//! `cargo run --release --example integrators`

use aqo::engine::{run, Plugin, SimulationOptions, StateVector};
use aqo::{IsingModel, QuantumProgram};

fn final_state(program: &QuantumProgram, plugin: Plugin, dt: f64) -> aqo::Result<StateVector> {
    let opts = SimulationOptions::new(plugin, dt, dt, program.final_time);
    Ok(run(program, &opts)?.final_state.expect("evolving plugin"))
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn main() -> aqo::Result<()> {
    let model = IsingModel::new(vec![1.0, -0.5], [(0, 1, 0.8)], 0.0)?;
    let program = QuantumProgram::linear(model, 4.0)?;
    let reference = final_state(&program, Plugin::Rk4, 1e-4)?;

    println!("{:>8}  {:>12}  {:>12}  {:>14}", "dt", "rk4 error", "magnus error", "rk4 norm drift");
    for dt in [0.2, 0.1, 0.05, 0.025] {
        let rk = final_state(&program, Plugin::Rk4, dt)?;
        let fop = final_state(&program, Plugin::FopMagnus, dt)?;
        println!(
            "{dt:>8}  {:>12.3e}  {:>12.3e}  {:>14.3e}",
            distance(&rk, &reference),
            distance(&fop, &reference),
            (rk.norm_sqr() - 1.0).abs()
        );
    }
    Ok(())
}
