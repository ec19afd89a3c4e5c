//! Absorption of income held by a set of transient corporations.
//!
//! Treating the transient corporations `T` as transient states of an
//! absorbing Markov chain, the income they hold ends up at the owners
//! outside `T` in proportions given by `(I - Q_TT)^{-1} R`, where `R` holds
//! the shares of those outside owners. We never form the inverse: the
//! action on an income row vector is one transposed solve against the LU
//! factors of `I - Q_TT`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lu::LuFactors;
use crate::network::{IncomeVector, OwnershipNetwork, TaxpayerId};

pub const DEFAULT_DENSE_CAP: usize = 10_000;

/// Reciprocal condition numbers below this mean the transient set is
/// (numerically) closed.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TransientSystem {
    transients: Vec<usize>,
    /// `|T| x |T|` row-major, row = owned, column = owner.
    q: Vec<f64>,
    boundary: Vec<Vec<(usize, f64)>>,
}

impl TransientSystem {
    /// Assembles `Q_TT` and the boundary rows for the corporations in
    /// `transients` (network indices, any order, duplicates ignored).
    pub fn build(net: &OwnershipNetwork, transients: &[usize], dense_cap: usize) -> Result<Self> {
        let mut t: Vec<usize> = transients.to_vec();
        t.sort_unstable();
        t.dedup();
        if t.len() > dense_cap {
            return Err(Error::CapExceeded {
                size: t.len(),
                cap: dense_cap,
            });
        }
        if let Some(&bad) = t.iter().find(|&&i| !net.is_corporation(i)) {
            return Err(Error::NotACorporation(net.id(bad).to_string()));
        }
        let n = t.len();
        let mut q = vec![0.0; n * n];
        let mut boundary = Vec::with_capacity(n);
        for (a, &i) in t.iter().enumerate() {
            let mut out = Vec::new();
            for (j, p) in net.row_iter(i) {
                match t.binary_search(&j) {
                    Ok(b) => q[a * n + b] += p,
                    Err(_) => out.push((j, p)),
                }
            }
            boundary.push(out);
        }
        Ok(TransientSystem {
            transients: t,
            q,
            boundary,
        })
    }

    pub fn len(&self) -> usize {
        self.transients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transients.is_empty()
    }

    pub fn transients(&self) -> &[usize] {
        &self.transients
    }

    /// Share of transient `b` in transient `a`, by position.
    pub fn q(&self, a: usize, b: usize) -> f64 {
        self.q[a * self.len() + b]
    }

    pub fn boundary(&self, a: usize) -> &[(usize, f64)] {
        &self.boundary[a]
    }

    /// Factors `I - Q_TT` and rejects closed (or nearly closed) sets.
    fn factor(&self) -> Result<LuFactors> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for (k, x) in a.iter_mut().enumerate() {
            *x = -self.q[k];
        }
        for d in 0..n {
            a[d * n + d] += 1.0;
        }
        let norm = (0..n)
            .map(|r| a[r * n..(r + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let singular = |rcond| Error::AbsorbingSubset { size: n, rcond };
        let lu = LuFactors::factor(a, n).map_err(|_| singular(0.0))?;

        // (I - Q)^{-1} = Σ Qᵏ is entrywise nonnegative when the set leaks, so
        // its ∞-norm is the largest entry of (I - Q)^{-1} 1.
        let mut throughput = vec![1.0; n];
        lu.solve(&mut throughput);
        let mut inv_norm = 0.0f64;
        for &x in &throughput {
            if !x.is_finite() || x < 0.0 {
                return Err(singular(0.0));
            }
            inv_norm = inv_norm.max(x);
        }
        // measured against the identity so that a lone corporation owning
        // almost all of itself still counts as closed
        let rcond = if n == 0 { 1.0 } else { 1.0 / (norm.max(1.0) * inv_norm) };
        if !(rcond >= RCOND_THRESHOLD) {
            return Err(singular(rcond));
        }
        Ok(lu)
    }

    /// Moves all income held by the transients to the boundary owners.
    /// Transient entries end at exactly zero; everything else is untouched
    /// apart from the deposits.
    pub fn absorb_in_place(&self, e: &mut IncomeVector) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        let lu = self.factor()?;
        let mut x: Vec<f64> = self.transients.iter().map(|&i| e[i]).collect();
        lu.solve_transpose(&mut x);
        for &i in &self.transients {
            e[i] = 0.0;
        }
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for &(j, p) in &self.boundary[a] {
                e[j] += xa * p;
            }
        }
        Ok(())
    }

    /// Long-run fraction of each transient's income reaching each boundary
    /// owner.
    pub fn absorption_matrix(&self) -> Result<AbsorptionMatrix> {
        let targets: Vec<usize> = self
            .boundary
            .iter()
            .flatten()
            .map(|&(j, _)| j)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let (n, m) = (self.len(), targets.len());
        let mut data = vec![0.0; n * m];
        if n > 0 {
            let lu = self.factor()?;
            let mut col = vec![0.0; n];
            for (c, &j) in targets.iter().enumerate() {
                for (a, b) in self.boundary.iter().enumerate() {
                    col[a] = b.iter().find(|e| e.0 == j).map_or(0.0, |e| e.1);
                }
                lu.solve(&mut col);
                for a in 0..n {
                    data[a * m + c] = col[a];
                }
            }
        }
        Ok(AbsorptionMatrix {
            rows: self.transients.clone(),
            cols: targets,
            data,
        })
    }
}

/// Dense `(I - Q_TT)^{-1} R` over transients × boundary owners.
#[derive(Debug, Clone)]
pub struct AbsorptionMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    data: Vec<f64>,
}

impl AbsorptionMatrix {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols.len() + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let m = self.cols.len();
        &self.data[r * m..(r + 1) * m]
    }

    /// Entry by taxpayer indices, zero if `owner` is not a boundary owner.
    pub fn fraction(&self, transient: usize, owner: usize) -> Option<f64> {
        let r = self.rows.binary_search(&transient).ok()?;
        Some(
            self.cols
                .binary_search(&owner)
                .map_or(0.0, |c| self.get(r, c)),
        )
    }
}

/// Transient system over the corporations named in `transients`.
pub fn build_transient_system(
    net: &OwnershipNetwork,
    transients: &BTreeSet<TaxpayerId>,
    dense_cap: usize,
) -> Result<TransientSystem> {
    let t = net.corporate_indices(transients)?;
    TransientSystem::build(net, &t, dense_cap)
}

pub fn absorb(e: &IncomeVector, sys: &TransientSystem) -> Result<IncomeVector> {
    let mut out = e.clone();
    sys.absorb_in_place(&mut out)?;
    Ok(out)
}

pub fn absorption_matrix(sys: &TransientSystem) -> Result<AbsorptionMatrix> {
    sys.absorption_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;

    fn set(v: &[&str]) -> BTreeSet<TaxpayerId> {
        v.iter().map(|s| TaxpayerId::from(*s)).collect()
    }

    fn mutual() -> OwnershipNetwork {
        NetworkBuilder::new()
            .corporation("c1")
            .corporation("c2")
            .individual("p1")
            .individual("p2")
            .share("c1", "c2", 0.5)
            .share("c1", "p1", 0.5)
            .share("c2", "c1", 0.5)
            .share("c2", "p2", 0.5)
            .build()
            .unwrap()
    }

    #[test]
    fn assembly() {
        let net = NetworkBuilder::new()
            .corporation("c1")
            .corporation("c2")
            .individual("p1")
            .share("c1", "c2", 0.6)
            .share("c1", "p1", 0.4)
            .share("c2", "p1", 1.0)
            .build()
            .unwrap();
        let sys = build_transient_system(&net, &set(&["c1"]), 10).unwrap();
        assert_eq!(sys.q(0, 0), 0.0);
        let c2 = net.index_of("c2").unwrap();
        let p1 = net.index_of("p1").unwrap();
        assert_eq!(sys.boundary(0), &[(c2, 0.6), (p1, 0.4)]);

        let sys = build_transient_system(&mutual(), &set(&["c1", "c2"]), 10).unwrap();
        assert_eq!([sys.q(0, 0), sys.q(0, 1), sys.q(1, 0), sys.q(1, 1)], [0.0, 0.5, 0.5, 0.0]);

        let selfish = NetworkBuilder::new()
            .corporation("c1")
            .individual("p1")
            .share("c1", "c1", 0.3)
            .share("c1", "p1", 0.7)
            .build()
            .unwrap();
        let sys = build_transient_system(&selfish, &set(&["c1"]), 10).unwrap();
        assert_eq!(sys.q(0, 0), 0.3);
    }

    #[test]
    fn cap_and_kind_errors() {
        let net = mutual();
        assert!(matches!(
            build_transient_system(&net, &set(&["c1", "c2"]), 1),
            Err(Error::CapExceeded { size: 2, cap: 1 })
        ));
        assert!(matches!(
            build_transient_system(&net, &set(&["p1"]), 10),
            Err(Error::NotACorporation(_))
        ));
    }

    #[test]
    fn identity_solve() {
        let net = NetworkBuilder::new()
            .corporation("c1")
            .individual("p1")
            .share("c1", "p1", 1.0)
            .build()
            .unwrap();
        let sys = build_transient_system(&net, &set(&["c1"]), 10).unwrap();
        let e = IncomeVector::from_pairs(&net, [("c1", 100.0), ("p1", 1.0)]).unwrap();
        let out = absorb(&e, &sys).unwrap();
        assert_eq!(out.get(&net, "c1"), Some(0.0));
        assert_eq!(out.get(&net, "p1"), Some(101.0));
        let m = absorption_matrix(&sys).unwrap();
        assert_eq!(m.row(0), &[1.0]);
    }

    #[test]
    fn self_share_is_a_geometric_series() {
        let net = NetworkBuilder::new()
            .corporation("c1")
            .individual("p1")
            .share("c1", "c1", 0.3)
            .share("c1", "p1", 0.7)
            .build()
            .unwrap();
        let sys = build_transient_system(&net, &set(&["c1"]), 10).unwrap();
        let e = IncomeVector::from_pairs(&net, [("c1", 70.0)]).unwrap();
        let out = absorb(&e, &sys).unwrap();
        assert_eq!(out.get(&net, "c1"), Some(0.0));
        assert!((out.get(&net, "p1").unwrap() - 70.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_half_shares() {
        let net = mutual();
        let sys = build_transient_system(&net, &set(&["c1", "c2"]), 10).unwrap();
        let e = IncomeVector::from_pairs(&net, [("c1", 100.0)]).unwrap();
        let out = absorb(&e, &sys).unwrap();
        assert!((out.get(&net, "p1").unwrap() - 200.0 / 3.0).abs() < 1e-12);
        assert!((out.get(&net, "p2").unwrap() - 100.0 / 3.0).abs() < 1e-12);

        let m = absorption_matrix(&sys).unwrap();
        let expect = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for (r, row) in expect.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                assert!((m.get(r, c) - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_set_is_rejected() {
        let net = NetworkBuilder::new()
            .corporation("c1")
            .corporation("c2")
            .share("c1", "c2", 1.0)
            .share("c2", "c1", 1.0)
            .build()
            .unwrap();
        let sys = build_transient_system(&net, &set(&["c1", "c2"]), 10).unwrap();
        let e = IncomeVector::from_pairs(&net, [("c1", 1.0)]).unwrap();
        assert!(matches!(absorb(&e, &sys), Err(Error::AbsorbingSubset { .. })));

        let nearly = NetworkBuilder::new()
            .corporation("c1")
            .individual("p1")
            .share("c1", "c1", 1.0 - 1e-15)
            .share("c1", "p1", 1e-15)
            .build()
            .unwrap();
        let sys = build_transient_system(&nearly, &set(&["c1"]), 10).unwrap();
        assert!(matches!(
            absorb(&IncomeVector::zeros(2), &sys),
            Err(Error::AbsorbingSubset { .. })
        ));
    }
}
