//! Weighted Boolean clauses to a QUBO with ancillas, checked by brute force.
//!
//! `cargo run --example bop_to_qubo`

use aqo::frontend::{aggregate, bop_to_qubo, brute_force_argmin, parse_bop, projected_argmin};
use aqo::ising::format_bits;

const CLAUSES: &str = "\
# three-literal conjunction forces one ancilla
1.5 : b1 AND b2 AND b3
-2  : b1 OR NOT b2
1   : b3
";

fn main() -> aqo::Result<()> {
    let bop = parse_bop(CLAUSES)?;
    print!("clauses:\n{}", bop.to_text());

    let poly = aggregate(&bop);
    println!("polynomial degree {}, {} terms", poly.degree(), poly.term_count());

    let qubo = bop_to_qubo(&bop)?;
    println!(
        "QUBO: {} variables ({} original), offset {}, penalty {:?}",
        qubo.n(),
        qubo.num_original,
        qubo.offset,
        qubo.penalty
    );
    for s in &qubo.ancillas {
        println!("  x{} = x{} x{}", s.ancilla, s.a, s.b);
    }
    for row in qubo.matrix.rows() {
        println!("  {row:?}");
    }

    let (best, optima) = brute_force_argmin(bop.num_vars(), |x| bop.objective(x), 1e-9);
    let (qbest, qoptima) = projected_argmin(&qubo, 1e-9);
    println!("clause minimum {best}, QUBO minimum {qbest}");
    for x in &optima {
        println!("  optimum {} (found by QUBO: {})", format_bits(x), qoptima.contains(x));
    }
    Ok(())
}
