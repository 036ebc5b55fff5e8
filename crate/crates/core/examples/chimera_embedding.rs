//! Minor-embed a 5-clique into a Chimera unit cell and check the chains.
//!
//! `cargo run --example chimera_embedding`

use aqo::analysis::decode_readout;
use aqo::hardware::{embed_ising, find_embedding, validate_embedding};
use aqo::ising::{brute_force_ising, format_bits, spin_bit_decode};
use aqo::{chimera, IsingModel, SpinConfiguration};

fn main() -> aqo::Result<()> {
    let proc = chimera(1, 1)?;
    println!("{}: {} qubits, {} couplers", proc.name, proc.num_qubits(), proc.graph().edge_count());

    let n = 5;
    let couplings: Vec<_> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j, if (i + j) % 2 == 0 { 0.5 } else { -0.5 })))
        .collect();
    let logical = IsingModel::new(vec![0.2, -0.1, 0.0, 0.3, -0.4], couplings, 0.0)?;

    let emb = find_embedding(&logical.topology(), &proc)?;
    for (v, tree) in emb.trees().iter().enumerate() {
        println!("  spin {v} -> qubits {tree:?}");
    }
    println!("valid: {}", validate_embedding(&logical.topology(), &proc, &emb).is_valid());

    let phys = embed_ising(&logical, &emb, &proc, None)?;
    println!("{} physical qubits, chain coupling J = {}", phys.model.n(), phys.penalty_j);

    let (e_logical, ground) = brute_force_ising(&logical)?;
    let (e_physical, physical_ground) = brute_force_ising(&phys.model)?;
    println!("logical ground energy {e_logical}, physical {e_physical}");
    let trees = phys.compact_trees();
    for s in &physical_ground {
        let bits = spin_bit_decode(s);
        let decoded = decode_readout(&bits, &trees, |x| {
            logical.energy(&SpinConfiguration::from_bits(x)).unwrap_or(f64::INFINITY)
        })?;
        let ok = ground.iter().any(|g| spin_bit_decode(g) == decoded.bits);
        println!("  physical {} -> logical {} (ground: {ok})", format_bits(&bits), format_bits(&decoded.bits));
    }
    Ok(())
}
