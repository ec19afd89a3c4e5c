//! Structural checks on an ownership network before solving.

use taxflow::report::Report;
use taxflow::validate::DEFAULT_ROW_TOLERANCE;
use taxflow::{validate_network, NetworkBuilder};

fn main() -> taxflow::Result<()> {
    // c1 and c2 own each other outright, so their income could never
    // reach a person; c3 only hands out 90% of its income.
    let net = NetworkBuilder::new()
        .corporation("c1")
        .corporation("c2")
        .corporation("c3")
        .individual("p1")
        .share("c1", "c2", 1.0)
        .share("c2", "c1", 1.0)
        .share("c3", "c1", 0.3)
        .share("c3", "p1", 0.6)
        .share("c3", "ghost", 0.1)
        .build()?;
    print!("{}", validate_network(&net, DEFAULT_ROW_TOLERANCE).render_text());

    // opening the cycle and rescaling rows makes it solvable
    let fixed = NetworkBuilder::new()
        .corporation("c1")
        .corporation("c2")
        .corporation("c3")
        .individual("p1")
        .share("c1", "c2", 0.8)
        .share("c1", "p1", 0.2)
        .share("c2", "c1", 1.0)
        .share("c3", "c1", 0.3)
        .share("c3", "p1", 0.6)
        .build()?
        .normalized();
    print!("\n{}", validate_network(&fixed, DEFAULT_ROW_TOLERANCE).render_text());
    Ok(())
}
