//! Letting arbitrary corporations hold back for a while does not change
//! where the income ends up.

use taxflow::{generate, relative_l1, solve_decomp, solve_randomized_schedule, GeneratorConfig, SolverConfig};

fn main() -> taxflow::Result<()> {
    let g = generate(&GeneratorConfig::small(200, 400, 6, 12).with_seed(11))?;
    let cfg = SolverConfig::default();
    let (reference, _) = solve_decomp(&g.network, &g.incomes, &cfg)?;

    for (seed, k) in [(1, 0), (2, 3), (3, 10), (4, 50), (5, 200)] {
        let (e, _) = solve_randomized_schedule(&g.network, &g.incomes, k, seed, &cfg)?;
        println!(
            "{k:>3} random partial steps: relative deviation {:.2e}",
            relative_l1(&e, &reference, &g.incomes)
        );
    }
    Ok(())
}
