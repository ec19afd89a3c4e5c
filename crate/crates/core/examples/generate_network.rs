//! Generates a seeded synthetic network and writes it as CSV.
//!
//! `cargo run --example generate_network -- [out_dir] [seed]`

use std::path::PathBuf;

use taxflow::io::{create, write_incomes, write_ownership};
use taxflow::report::Report;
use taxflow::{generate, network_stats, GeneratorConfig};

fn main() -> taxflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed must be an integer"));

    let cfg = GeneratorConfig {
        n_trivial_corporations: 500,
        ..GeneratorConfig::small(5_000, 11_000, 25, 60)
    }
    .with_seed(seed);
    let g = generate(&cfg)?;

    let (own, inc) = (dir.join("ownership.csv"), dir.join("incomes.csv"));
    write_ownership(&g.network, create(&own)?)?;
    write_incomes(&g.network, &g.incomes, create(&inc)?)?;
    println!("wrote {} and {}", own.display(), inc.display());
    println!("planted components: {:?}\n", g.planted_scc_sizes);
    print!("{}", network_stats(&g.network).render_text());
    Ok(())
}
