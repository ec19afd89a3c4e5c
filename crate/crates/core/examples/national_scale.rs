//! Generates a network the size of a national tax register and solves it.
//!
//! `cargo run --release --example national_scale -- [seed] [--naive]`

use std::time::{Duration, Instant};

use taxflow::report::Report;
use taxflow::{generate, network_stats, solve_decomp, solve_naive, Algorithm, Error, GeneratorConfig, SolverConfig};

fn main() -> Result<(), Error> {
    let mut seed = 7;
    let mut naive = false;
    for arg in std::env::args().skip(1) {
        match arg.as_str() {
            "--naive" => naive = true,
            s => seed = s.parse().expect("seed must be an integer"),
        }
    }

    let t = Instant::now();
    let g = generate(&GeneratorConfig::national_scale().with_seed(seed))?;
    println!("generated in {:.2?}\n", t.elapsed());
    print!("{}", network_stats(&g.network).render_text());

    let (_, decomp) = solve_decomp(&g.network, &g.incomes, &SolverConfig::default())?;
    println!();
    print!("{}", decomp.render_text());

    if naive {
        // stop once no corporation holds a dollar or more
        let cfg = SolverConfig {
            time_budget: Some(Duration::from_secs(600)),
            ..SolverConfig::new(Algorithm::Naive).with_epsilon(1.0)
        };
        let rep = match solve_naive(&g.network, &g.incomes, &cfg) {
            Ok((_, r)) => r,
            Err(Error::NonConverged { report, .. }) => *report,
            Err(e) => return Err(e),
        };
        println!();
        print!("{}", rep.render_text());
        println!("\nnaive / decomp: {:.1}x", rep.wall_time_ms / decomp.wall_time_ms);
    }
    Ok(())
}
