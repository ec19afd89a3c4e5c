//! Reads ownership and income CSV files, solves, and prints the results.
//!
//! `cargo run --example solve_csv -- ownership.csv incomes.csv`

use std::path::PathBuf;

use taxflow::io::{parse_inputs, write_results};
use taxflow::report::Report;
use taxflow::validate::DEFAULT_ROW_TOLERANCE;
use taxflow::{solve_decomp, validate_network, Error, SolverConfig};

fn main() -> taxflow::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let own = args.next().unwrap_or_else(|| data.join("holding_ownership.csv"));
    let inc = args.next().unwrap_or_else(|| data.join("holding_incomes.csv"));

    let parsed = parse_inputs(&own, &inc)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let check = validate_network(&parsed.network, DEFAULT_ROW_TOLERANCE);
    if !check.passed {
        eprint!("{}", check.render_text());
        return Err(Error::Validation(Box::new(check)));
    }

    let (e, report) = solve_decomp(&parsed.network, &parsed.incomes, &SolverConfig::default())?;
    write_results(&parsed.network, &parsed.incomes, &e, std::io::stdout().lock())?;
    eprint!("\n{}", report.render_text());
    Ok(())
}
