//! Strongly connected components of a small holding structure, in the
//! order the decomposition solver visits them.

use std::path::Path;

use taxflow::io::parse_inputs;
use taxflow::report::Report;
use taxflow::{decompose, network_stats};

fn main() -> taxflow::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let parsed = parse_inputs(&data.join("holding_ownership.csv"), &data.join("holding_incomes.csv"))?;
    let net = &parsed.network;

    let dec = decompose(net);
    for (k, comp) in dec.iter().enumerate() {
        let names: Vec<&str> = comp.member_ids(net).map(|id| id.as_str()).collect();
        let path = if comp.has_internal_edge { "solve" } else { "pass through" };
        println!("{k}: {{{}}} ({path})", names.join(", "));
    }
    for (a, b) in dec.condensation_arcs(net) {
        println!("component {a} pays into component {b}");
    }
    println!();
    print!("{}", network_stats(net).render_text());
    Ok(())
}
