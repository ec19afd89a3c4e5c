//! Where each unit of income held by a set of corporations ends up.

use std::collections::BTreeSet;

use taxflow::{absorb, absorption_matrix, build_transient_system, IncomeVector, NetworkBuilder, TaxpayerId};

fn main() -> taxflow::Result<()> {
    let net = NetworkBuilder::new()
        .corporation("a")
        .corporation("b")
        .corporation("c")
        .individual("p1")
        .individual("p2")
        .share("a", "b", 0.6)
        .share("a", "p1", 0.4)
        .share("b", "a", 0.3)
        .share("b", "c", 0.3)
        .share("b", "p2", 0.4)
        .share("c", "p1", 1.0)
        .build()?;

    // c stays outside: it receives from b but does not pass anything on
    let t: BTreeSet<TaxpayerId> = ["a", "b"].into_iter().map(TaxpayerId::from).collect();
    let sys = build_transient_system(&net, &t, 16)?;
    let m = absorption_matrix(&sys)?;

    let cols: Vec<&str> = m.cols.iter().map(|&j| net.id(j).as_str()).collect();
    println!("      {}", cols.iter().map(|c| format!("{c:>8}")).collect::<String>());
    for (r, &i) in m.rows.iter().enumerate() {
        let row: String = m.row(r).iter().map(|x| format!("{x:>8.4}")).collect();
        println!("{:<6}{row}   sum {:.12}", net.id(i).as_str(), m.row(r).iter().sum::<f64>());
    }

    let e = IncomeVector::from_pairs(&net, [("a", 100.0), ("b", 50.0)])?;
    let out = absorb(&e, &sys)?;
    for id in ["a", "b", "c", "p1", "p2"] {
        println!("{id:<3} {:>8.3} -> {:>8.3}", e.get(&net, id).unwrap(), out.get(&net, id).unwrap());
    }
    Ok(())
}
