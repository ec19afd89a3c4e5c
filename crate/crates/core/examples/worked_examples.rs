//! The two-corporation cycles solved by every solver.
//!
//! With c2 starting at -30, c2 first withholds, then turns positive once c1
//! has paid out and the cycle has to be solved again.

use taxflow::{solve, Algorithm, IncomeVector, NetworkBuilder, SolverConfig};

fn main() -> taxflow::Result<()> {
    let net = NetworkBuilder::new()
        .corporation("c1")
        .corporation("c2")
        .individual("p1")
        .individual("p2")
        .share("c1", "c2", 0.5)
        .share("c1", "p1", 0.5)
        .share("c2", "c1", 0.5)
        .share("c2", "p2", 0.5)
        .build()?;

    for (label, c2) in [("mutual, c2 at 0", 0.0), ("c2 at -30", -30.0)] {
        let e0 = IncomeVector::from_pairs(&net, [("c1", 100.0), ("c2", c2)])?;
        println!("{label}");
        for alg in [Algorithm::Naive, Algorithm::Global, Algorithm::Decomp] {
            let cfg = SolverConfig::new(alg).with_epsilon(1e-10);
            let (e, rep) = solve(&net, &e0, &cfg)?;
            println!(
                "  {alg:<6} p1 {:>9.5}  p2 {:>9.5}  iterations {:>2}  solves {}  redos {}",
                e.get(&net, "p1").unwrap(),
                e.get(&net, "p2").unwrap(),
                rep.outer_iterations,
                rep.linear_solves,
                rep.redo_total,
            );
        }
    }
    Ok(())
}
