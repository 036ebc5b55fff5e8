//! QUBO matrix to Ising fields and couplings; energies agree up to the shift.
//!
//! `cargo run --example qubo_to_ising`

use aqo::frontend::all_assignments;
use aqo::ising::{format_bits, qubo_to_ising, SpinConfiguration};
use aqo::{QuboProblem, SymmetricMatrix};

fn main() -> aqo::Result<()> {
    let p = SymmetricMatrix::from_rows(&[
        vec![-1.0, 2.0, 0.0],
        vec![2.0, -1.0, -0.5],
        vec![0.0, -0.5, 1.0],
    ])?;
    let qubo = QuboProblem::from_matrix(p);
    let model = qubo_to_ising(&qubo);
    println!("alpha = {:?}", model.alpha());
    for (i, j, b) in model.couplings() {
        println!("beta[{i}][{j}] = {b}");
    }
    println!("gamma = {}", model.gamma());

    println!("{:>5}  {:>8}  {:>8}", "x", "x^T P x", "E + gamma");
    for x in all_assignments(qubo.n()) {
        let e = model.energy(&SpinConfiguration::from_bits(&x))? + model.gamma();
        println!("{:>5}  {:>8.3}  {:>8.3}", format_bits(&x), qubo.energy(&x), e);
    }
    Ok(())
}
