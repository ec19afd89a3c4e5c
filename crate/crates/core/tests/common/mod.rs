//! Helpers shared by the integration tests. Everything here is written
//! against dense matrices or brute force so it can serve as an oracle for
//! the sparse code paths in the crate.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taxflow::{validate_network, IncomeVector, NetworkBuilder, OwnershipNetwork};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid network with `n_corp` corporations `c*` and `n_ind`
/// individuals `p*`. Exactly `round(neg_frac * n_corp)` corporations start
/// negative. Cycles, self-ownership and rows without individual owners all
/// occur; draws that fail validation are retried.
pub fn random_network(
    rng: &mut ChaCha8Rng,
    n_corp: usize,
    n_ind: usize,
    neg_frac: f64,
) -> (OwnershipNetwork, IncomeVector) {
    assert!(n_ind > 0);
    loop {
        let mut b = NetworkBuilder::new();
        for c in 0..n_corp {
            b = b.corporation(format!("c{c}"));
        }
        for p in 0..n_ind {
            b = b.individual(format!("p{p}"));
        }
        for c in 0..n_corp {
            let mut owners: Vec<String> = Vec::new();
            let n_c = rng.random_range(0..=3.min(n_corp));
            for _ in 0..n_c {
                let o = format!("c{}", rng.random_range(0..n_corp));
                if !owners.contains(&o) {
                    owners.push(o);
                }
            }
            let n_p = if owners.is_empty() || rng.random::<f64>() < 0.8 {
                rng.random_range(1..=3.min(n_ind))
            } else {
                0
            };
            for _ in 0..n_p {
                let o = format!("p{}", rng.random_range(0..n_ind));
                if !owners.contains(&o) {
                    owners.push(o);
                }
            }
            let w: Vec<f64> = owners.iter().map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            for (o, wi) in owners.iter().zip(&w) {
                b = b.share(format!("c{c}"), o.as_str(), wi / total);
            }
        }
        let net = b.build().expect("distinct ids and pairs");
        if !validate_network(&net, 1e-9).passed {
            continue;
        }
        let e0 = random_incomes(rng, &net, neg_frac);
        return (net, e0);
    }
}

pub fn random_incomes(rng: &mut ChaCha8Rng, net: &OwnershipNetwork, neg_frac: f64) -> IncomeVector {
    let mut corps: Vec<usize> = net.corporations().collect();
    corps.shuffle(rng);
    let k = (neg_frac * corps.len() as f64).round() as usize;
    let mut e = IncomeVector::zeros(net.len());
    for (rank, &i) in corps.iter().enumerate() {
        let m = rng.random_range(1.0..1000.0);
        e[i] = if rank < k { -m } else { m };
    }
    for i in 0..net.len() {
        if !net.is_corporation(i) && rng.random::<f64>() < 0.5 {
            e[i] = rng.random_range(0.0..500.0);
        }
    }
    e
}

/// Dense `P` with unit rows for individuals.
pub fn dense_p(net: &OwnershipNetwork) -> Vec<Vec<f64>> {
    let n = net.len();
    let mut p = vec![vec![0.0; n]; n];
    for (i, row) in p.iter_mut().enumerate() {
        if net.is_corporation(i) {
            for (j, x) in row.iter_mut().enumerate() {
                *x = net.share(i, j);
            }
        } else {
            row[i] = 1.0;
        }
    }
    p
}

/// Dense `P_S`: rows of withheld corporations replaced by unit rows.
pub fn dense_p_restricted(net: &OwnershipNetwork, withheld: &[bool]) -> Vec<Vec<f64>> {
    let mut p = dense_p(net);
    for (i, row) in p.iter_mut().enumerate() {
        if withheld[i] {
            row.iter_mut().for_each(|x| *x = 0.0);
            row[i] = 1.0;
        }
    }
    p
}

pub fn vec_mat(e: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; n];
    for (ei, row) in e.iter().zip(m) {
        for (o, x) in out.iter_mut().zip(row) {
            *o += ei * x;
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().map(|row| vec_mat(row, b)).collect()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs()))
            .unwrap();
        m.swap(k, p);
        let d = m[k][k];
        assert!(d.abs() > 1e-300, "singular matrix");
        for x in m[k].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != k {
                let f = m[r][k];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[k][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Dense `P^∞` for the unrestricted matrix: corporate rows become
/// `(I - Q)^{-1} R` spread over individuals, individual rows stay unit.
pub fn dense_p_infinity(net: &OwnershipNetwork) -> Vec<Vec<f64>> {
    let corps: Vec<usize> = net.corporations().collect();
    let inds: Vec<usize> = (0..net.len()).filter(|&i| !net.is_corporation(i)).collect();
    let k = corps.len();
    let i_minus_q: Vec<Vec<f64>> = corps
        .iter()
        .enumerate()
        .map(|(a, &u)| {
            corps
                .iter()
                .enumerate()
                .map(|(b, &v)| (a == b) as u8 as f64 - net.share(u, v))
                .collect()
        })
        .collect();
    let n_mat = if k > 0 { invert(&i_minus_q) } else { Vec::new() };
    let mut out = vec![vec![0.0; net.len()]; net.len()];
    for &i in &inds {
        out[i][i] = 1.0;
    }
    for (a, &u) in corps.iter().enumerate() {
        for &j in &inds {
            out[u][j] = (0..k).map(|b| n_mat[a][b] * net.share(corps[b], j)).sum();
        }
    }
    out
}

/// Final income by an asynchronous schedule: repeatedly let the richest
/// corporation distribute everything it holds. Independent of the crate's
/// solvers; by order invariance it reaches the same fixed point.
pub fn sequential_oracle(net: &OwnershipNetwork, e0: &IncomeVector) -> Vec<f64> {
    let p = dense_p(net);
    let corps: Vec<usize> = net.corporations().collect();
    let scale = e0.abs_total().max(1.0);
    let mut e = e0.as_slice().to_vec();
    for _ in 0..10_000_000 {
        let Some(&u) = corps.iter().max_by(|&&a, &&b| e[a].total_cmp(&e[b])) else {
            break;
        };
        let x = e[u];
        if x <= 1e-15 * scale {
            break;
        }
        e[u] = 0.0;
        for (j, s) in p[u].iter().enumerate() {
            e[j] += x * s;
        }
    }
    e
}

/// Transitive closure by Floyd-Warshall; `r[u][v]` iff a path `u -> v`
/// of length at least zero exists.
pub fn reachability(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (u, row) in r.iter_mut().enumerate() {
        row[u] = true;
    }
    for &(u, v) in arcs {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

pub fn rel_l1(a: &[f64], b: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    num / reference.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data")
}
