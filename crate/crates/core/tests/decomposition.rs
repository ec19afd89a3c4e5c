mod common;

use rand::Rng;
use taxflow::scc::{tarjan, Digraph};
use taxflow::{decompose, NetworkBuilder};

use common::{random_network, reachability, rng};

#[test]
fn tarjan_matches_mutual_reachability() {
    let mut r = rng(21);
    for _ in 0..500 {
        let n = r.random_range(0..=12);
        let p = r.random_range(0.0..0.5);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if r.random::<f64>() < p {
                    arcs.push((u, v));
                }
            }
        }
        let reach = reachability(n, &arcs);
        let parts = tarjan(&Digraph::from_arcs(n, &arcs));
        let mut comp = vec![usize::MAX; n];
        for (k, members) in parts.iter().enumerate() {
            assert!(members.windows(2).all(|w| w[0] < w[1]));
            for &u in members {
                assert_eq!(comp[u], usize::MAX, "node in two components");
                comp[u] = k;
            }
        }
        for u in 0..n {
            for v in 0..n {
                assert_eq!(comp[u] == comp[v], reach[u][v] && reach[v][u]);
            }
        }
        // reverse topological emission
        assert!(arcs.iter().all(|&(u, v)| comp[u] >= comp[v]));
    }
}

#[test]
fn condensation_is_acyclic_and_collapses() {
    let mut r = rng(22);
    for _ in 0..100 {
        let nc = r.random_range(1..=40);
        let (net, _) = random_network(&mut r, nc, 5, 0.0);
        let dec = decompose(&net);
        let arcs = dec.condensation_arcs(&net);
        assert!(arcs.iter().all(|&(a, b)| a < b));

        // the condensation as a network has only singleton components
        let mut b = NetworkBuilder::new().individual("p");
        for k in 0..dec.len() {
            b = b.corporation(format!("k{k:03}"));
        }
        for k in 0..dec.len() {
            let outs: Vec<usize> = arcs.iter().filter(|a| a.0 == k).map(|a| a.1).collect();
            let w = 1.0 / (outs.len() + 1) as f64;
            for o in outs {
                b = b.share(format!("k{k:03}"), format!("k{o:03}"), w);
            }
            b = b.share(format!("k{k:03}"), "p", w);
        }
        let cond = b.build().unwrap();
        let again = decompose(&cond);
        assert_eq!(again.len(), dec.len());
        assert!(again.iter().all(|c| c.len() == 1 && !c.has_internal_edge));
    }
}

#[test]
fn component_lookup_is_consistent() {
    let mut r = rng(23);
    let (net, _) = random_network(&mut r, 40, 10, 0.0);
    let dec = decompose(&net);
    let mut seen = 0;
    for (k, c) in dec.iter().enumerate() {
        for &u in c.members {
            assert_eq!(dec.component_of(u), Some(k));
            seen += 1;
        }
    }
    assert_eq!(seen, net.n_corporations());
    for i in (0..net.len()).filter(|&i| !net.is_corporation(i)) {
        assert_eq!(dec.component_of(i), None);
    }
}

#[test]
fn zero_shares_do_not_link() {
    let net = NetworkBuilder::new()
        .corporation("a")
        .corporation("b")
        .individual("p")
        .share("a", "b", 0.0)
        .share("a", "p", 1.0)
        .share("b", "a", 0.5)
        .share("b", "p", 0.5)
        .build()
        .unwrap();
    let dec = decompose(&net);
    assert_eq!(dec.len(), 2);
    assert!(dec.iter().all(|c| !c.has_internal_edge));
}
