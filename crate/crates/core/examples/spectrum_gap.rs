//! Instantaneous spectrum of the benchmark anneal and the minimum gap.
//!
//! `cargo run --release --example spectrum_gap`

use aqo::analysis::gap_profile;
use aqo::benchmark::{benchmark_model, BENCHMARK_FINAL_TIME};
use aqo::engine::{run, Plugin, SimulationOptions};
use aqo::QuantumProgram;

fn main() -> aqo::Result<()> {
    let program = QuantumProgram::linear(benchmark_model(), BENCHMARK_FINAL_TIME)?;
    let mut opts = SimulationOptions::new(Plugin::SpectrumZero, 0.05, 0.15, 1.5);
    opts.num_eigenstates = Some(20);
    let result = run(&program, &opts)?;

    println!("{:>6}  {:>10}  {:>10}  {:>10}", "t", "E0", "E1", "E19");
    for s in &result.snapshots {
        let e = &s.eigenvalues;
        println!("{:>6.2}  {:>10.5}  {:>10.5}  {:>10.5}", s.t, e[0], e[1], e[e.len() - 1]);
    }

    let gap = gap_profile(&result.snapshots, &program)?;
    println!("minimum sampled gap {:.3e} at t = {}", gap.delta_star, gap.t_star);
    println!("max ||dH/dt|| = {:.4}, adiabatic time estimate {:.3e}", gap.rate_bound, gap.t_adiabatic);
    Ok(())
}
