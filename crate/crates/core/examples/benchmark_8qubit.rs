//! The 8-qubit ring-with-pendants benchmark: 17 degenerate ground states,
//! annealed for T = 30 with RK4 and compared with the reference table.
//!
//! `cargo run --release --example benchmark_8qubit [rk4|fop]`

use std::time::Instant;

use aqo::benchmark::{benchmark_model, BENCHMARK_FINAL_TIME, TABLE_PROBABILITIES};
use aqo::engine::{run, Plugin, SimulationOptions};
use aqo::ising::{format_bits, spin_bit_decode, SpinConfiguration};
use aqo::QuantumProgram;

fn main() -> aqo::Result<()> {
    let plugin: Plugin = std::env::args().nth(1).as_deref().unwrap_or("rk4").parse()?;
    let program = QuantumProgram::linear(benchmark_model(), BENCHMARK_FINAL_TIME)?;
    let opts = SimulationOptions::benchmark(plugin);

    let started = Instant::now();
    let result = run(&program, &opts)?;
    println!("{plugin}: {} snapshots in {:.1?}", result.snapshots.len(), started.elapsed());
    println!("norm^2 = {:.12}", result.norm().unwrap_or(f64::NAN));

    println!("{:>5}  {:>9}  {:>12}  {:>12}  {:>7}", "index", "bits", "simulated", "reference", "rel");
    for (z, reference) in TABLE_PROBABILITIES {
        let p = result.probability(z).unwrap_or(f64::NAN);
        let bits = format_bits(&spin_bit_decode(&SpinConfiguration::from_basis_index(z, 8)));
        println!("{z:>5}  {bits:>9}  {p:>12.7}  {reference:>12.7}  {:>+6.2}%", 100.0 * (p / reference - 1.0));
    }
    if let Some(d) = &result.distribution {
        println!("18th largest probability: {:.3e}", d[17].1);
    }
    Ok(())
}
