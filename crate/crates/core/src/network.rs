//! Taxpayers, ownership shares and income vectors.
//!
//! An [`OwnershipNetwork`] stores the share matrix sparsely, one row per
//! taxpayer: row `i` lists every owner `j` of `i` with the fraction `p_ij`.
//! Taxpayers are indexed in sorted-id order and rows are sorted by owner
//! index, so every traversal is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaxpayerId(String);

impl TaxpayerId {
    pub fn new(id: impl Into<String>) -> Self {
        TaxpayerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TaxpayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TaxpayerId {
    fn from(s: &str) -> Self {
        TaxpayerId(s.to_owned())
    }
}

impl From<String> for TaxpayerId {
    fn from(s: String) -> Self {
        TaxpayerId(s)
    }
}

impl std::borrow::Borrow<str> for TaxpayerId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaxpayerKind {
    Corporation,
    Individual,
}

impl TaxpayerKind {
    /// Token used in income files.
    pub fn token(self) -> &'static str {
        match self {
            TaxpayerKind::Corporation => "corp",
            TaxpayerKind::Individual => "individual",
        }
    }
}

/// A share record naming a taxpayer that is not registered in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct DanglingShare {
    pub owned: TaxpayerId,
    pub owner: TaxpayerId,
    pub share: f64,
}

/// Collects taxpayers and share records before freezing them into an
/// [`OwnershipNetwork`].
#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    taxpayers: Vec<(TaxpayerId, TaxpayerKind)>,
    shares: Vec<(TaxpayerId, TaxpayerId, f64)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_taxpayer(&mut self, id: impl Into<TaxpayerId>, kind: TaxpayerKind) -> &mut Self {
        self.taxpayers.push((id.into(), kind));
        self
    }

    /// Records that `owner` holds `share` of `owned`.
    pub fn add_share(
        &mut self,
        owned: impl Into<TaxpayerId>,
        owner: impl Into<TaxpayerId>,
        share: f64,
    ) -> &mut Self {
        self.shares.push((owned.into(), owner.into(), share));
        self
    }

    pub fn corporation(mut self, id: impl Into<TaxpayerId>) -> Self {
        self.add_taxpayer(id, TaxpayerKind::Corporation);
        self
    }

    pub fn individual(mut self, id: impl Into<TaxpayerId>) -> Self {
        self.add_taxpayer(id, TaxpayerKind::Individual);
        self
    }

    pub fn share(
        mut self,
        owned: impl Into<TaxpayerId>,
        owner: impl Into<TaxpayerId>,
        share: f64,
    ) -> Self {
        self.add_share(owned, owner, share);
        self
    }

    /// Freezes the network.
    ///
    /// Duplicate taxpayers and duplicate `(owned, owner)` pairs are rejected.
    /// Records that mention unregistered ids are kept aside as dangling
    /// shares so that validation can report them.
    pub fn build(self) -> Result<OwnershipNetwork> {
        let mut registry: BTreeMap<TaxpayerId, TaxpayerKind> = BTreeMap::new();
        for (id, kind) in self.taxpayers {
            if registry.contains_key(&id) {
                return Err(Error::DuplicateTaxpayer(id.0));
            }
            registry.insert(id, kind);
        }

        let (ids, kinds): (Vec<_>, Vec<_>) = registry.into_iter().unzip();
        let index: HashMap<TaxpayerId, usize> =
            ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();

        let mut edges = Vec::with_capacity(self.shares.len());
        let mut dangling = Vec::new();
        for (owned, owner, share) in self.shares {
            match (index.get(&owned), index.get(&owner)) {
                (Some(&i), Some(&j)) => edges.push((i, j, share)),
                _ => dangling.push(DanglingShare { owned, owner, share }),
            }
        }
        edges.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = edges.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::DuplicateShare {
                owned: ids[w[0].0].0.clone(),
                owner: ids[w[0].1].0.clone(),
            });
        }

        Ok(OwnershipNetwork::from_sorted_edges(ids, kinds, index, &edges, dangling))
    }
}

#[derive(Debug, Clone)]
pub struct OwnershipNetwork {
    ids: Vec<TaxpayerId>,
    kinds: Vec<TaxpayerKind>,
    index: HashMap<TaxpayerId, usize>,
    row_start: Vec<usize>,
    owners: Vec<usize>,
    shares: Vec<f64>,
    dangling: Vec<DanglingShare>,
    n_corporations: usize,
}

impl OwnershipNetwork {
    fn from_sorted_edges(
        ids: Vec<TaxpayerId>,
        kinds: Vec<TaxpayerKind>,
        index: HashMap<TaxpayerId, usize>,
        edges: &[(usize, usize, f64)],
        dangling: Vec<DanglingShare>,
    ) -> Self {
        let n = ids.len();
        let mut row_start = vec![0usize; n + 1];
        for &(i, _, _) in edges {
            row_start[i + 1] += 1;
        }
        for i in 0..n {
            row_start[i + 1] += row_start[i];
        }
        let owners = edges.iter().map(|e| e.1).collect();
        let shares = edges.iter().map(|e| e.2).collect();
        let n_corporations = kinds
            .iter()
            .filter(|&&k| k == TaxpayerKind::Corporation)
            .count();
        OwnershipNetwork {
            ids,
            kinds,
            index,
            row_start,
            owners,
            shares,
            dangling,
            n_corporations,
        }
    }

    /// Number of taxpayers.
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn n_corporations(&self) -> usize {
        self.n_corporations
    }

    pub fn n_individuals(&self) -> usize {
        self.ids.len() - self.n_corporations
    }

    /// Number of ownership records with a registered owner and owned party.
    pub fn n_links(&self) -> usize {
        self.owners.len()
    }

    pub fn id(&self, i: usize) -> &TaxpayerId {
        &self.ids[i]
    }

    pub fn ids(&self) -> &[TaxpayerId] {
        &self.ids
    }

    pub fn kind(&self, i: usize) -> TaxpayerKind {
        self.kinds[i]
    }

    pub fn is_corporation(&self, i: usize) -> bool {
        self.kinds[i] == TaxpayerKind::Corporation
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Indices of all corporations, ascending.
    pub fn corporations(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_corporation(i))
    }

    /// Owners of `i` with their shares, sorted by owner index.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_start[i]..self.row_start[i + 1];
        (&self.owners[r.clone()], &self.shares[r])
    }

    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (o, s) = self.row(i);
        o.iter().copied().zip(s.iter().copied())
    }

    pub fn share(&self, owned: usize, owner: usize) -> f64 {
        let (o, s) = self.row(owned);
        o.binary_search(&owner).map(|k| s[k]).unwrap_or(0.0)
    }

    pub fn dangling(&self) -> &[DanglingShare] {
        &self.dangling
    }

    /// Iterates `(owned, owner, share)` over every registered record.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |i| self.row_iter(i).map(move |(j, p)| (i, j, p)))
    }

    /// Copy of the network where every corporate row with a positive sum is
    /// rescaled to sum to exactly one (up to floating-point rounding).
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.len() {
            if !self.is_corporation(i) {
                continue;
            }
            let r = self.row_start[i]..self.row_start[i + 1];
            let sum: f64 = out.shares[r.clone()].iter().sum();
            if sum > 0.0 && sum != 1.0 {
                for s in &mut out.shares[r] {
                    *s /= sum;
                }
            }
        }
        out
    }

    /// Sub-network induced by the taxpayers for which `keep` returns true.
    /// Records touching removed taxpayers are dropped.
    pub fn retain(&self, keep: impl Fn(usize) -> bool) -> Self {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        let mut remap = vec![usize::MAX; self.len()];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let ids: Vec<TaxpayerId> = kept.iter().map(|&i| self.ids[i].clone()).collect();
        let kinds = kept.iter().map(|&i| self.kinds[i]).collect();
        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let edges: Vec<(usize, usize, f64)> = self
            .edges()
            .filter(|&(i, j, _)| remap[i] != usize::MAX && remap[j] != usize::MAX)
            .map(|(i, j, p)| (remap[i], remap[j], p))
            .collect();
        Self::from_sorted_edges(ids, kinds, index, &edges, self.dangling.clone())
    }

    pub(crate) fn check_dimension(&self, e: &IncomeVector) -> Result<()> {
        if e.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: e.len(),
            });
        }
        Ok(())
    }

    /// Resolves a set of ids to sorted corporate indices.
    pub fn corporate_indices<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a TaxpayerId>,
    ) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for id in ids {
            let i = self
                .index_of(id.as_str())
                .ok_or_else(|| Error::UnknownTaxpayer(id.to_string()))?;
            if !self.is_corporation(i) {
                return Err(Error::NotACorporation(id.to_string()));
            }
            out.push(i);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Signed income per taxpayer, indexed like the owning network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IncomeVector(Vec<f64>);

impl IncomeVector {
    pub fn zeros(n: usize) -> Self {
        IncomeVector(vec![0.0; n])
    }

    pub fn from_vec(v: Vec<f64>) -> Self {
        IncomeVector(v)
    }

    /// Builds a vector from `(id, income)` pairs; missing taxpayers get 0.
    pub fn from_pairs<'a>(
        net: &OwnershipNetwork,
        pairs: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        let mut v = vec![0.0; net.len()];
        for (id, x) in pairs {
            let i = net
                .index_of(id)
                .ok_or_else(|| Error::UnknownTaxpayer(id.to_owned()))?;
            v[i] = x;
        }
        Ok(IncomeVector(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn abs_total(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn get(&self, net: &OwnershipNetwork, id: &str) -> Option<f64> {
        net.index_of(id).map(|i| self.0[i])
    }

    /// `‖self − other‖₁`.
    pub fn l1_distance(&self, other: &IncomeVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl Index<usize> for IncomeVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for IncomeVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Corporations with strictly negative income.
pub fn negative_set(e: &IncomeVector, net: &OwnershipNetwork) -> Result<BTreeSet<TaxpayerId>> {
    net.check_dimension(e)?;
    Ok(net
        .corporations()
        .filter(|&i| e[i] < 0.0)
        .map(|i| net.id(i).clone())
        .collect())
}

/// The share matrix with the rows of a frozen set of corporations replaced
/// by unit self-rows: those corporations keep whatever they hold.
#[derive(Debug, Clone)]
pub struct RestrictedShareView<'a> {
    net: &'a OwnershipNetwork,
    withheld: Vec<bool>,
}

impl<'a> RestrictedShareView<'a> {
    /// View where exactly the corporations flagged in `withheld` keep their
    /// income. Flags on individuals are ignored.
    pub fn from_mask(net: &'a OwnershipNetwork, mut withheld: Vec<bool>) -> Self {
        assert_eq!(withheld.len(), net.len(), "mask length must match network");
        for (i, w) in withheld.iter_mut().enumerate() {
            if !net.is_corporation(i) {
                *w = false;
            }
        }
        RestrictedShareView { net, withheld }
    }

    /// View withholding the corporations with strictly negative income in `e`.
    pub fn negative(net: &'a OwnershipNetwork, e: &IncomeVector) -> Result<Self> {
        net.check_dimension(e)?;
        let withheld = (0..net.len())
            .map(|i| net.is_corporation(i) && e[i] < 0.0)
            .collect();
        Ok(RestrictedShareView { net, withheld })
    }

    pub fn network(&self) -> &'a OwnershipNetwork {
        self.net
    }

    pub fn is_withheld(&self, i: usize) -> bool {
        self.withheld[i]
    }

    pub fn withheld(&self) -> &[bool] {
        &self.withheld
    }

    /// Whether corporation/taxpayer `i` passes its income on under this view.
    pub fn distributes(&self, i: usize) -> bool {
        self.net.is_corporation(i) && !self.withheld[i]
    }

    /// Effective row of `i`: the base row, or `(i, 1.0)` if `i` does not distribute.
    pub fn effective_row(&self, i: usize) -> Vec<(usize, f64)> {
        if self.distributes(i) {
            self.net.row_iter(i).collect()
        } else {
            vec![(i, 1.0)]
        }
    }
}

/// Restricts the share matrix to the corporations named in `withheld`.
pub fn restrict_shares<'a>(
    net: &'a OwnershipNetwork,
    withheld: &BTreeSet<TaxpayerId>,
) -> Result<RestrictedShareView<'a>> {
    let mut mask = vec![false; net.len()];
    for i in net.corporate_indices(withheld)? {
        mask[i] = true;
    }
    Ok(RestrictedShareView { net, withheld: mask })
}

/// One synchronous distribution step, `E · P_S`.
pub fn distribute_step(e: &IncomeVector, view: &RestrictedShareView<'_>) -> Result<IncomeVector> {
    view.net.check_dimension(e)?;
    let mut out = vec![0.0; e.len()];
    distribute_into(e.as_slice(), &mut out, view.net, &view.withheld);
    Ok(IncomeVector(out))
}

/// Writes `E · P_S` into `out`. Sources are visited in index order and
/// owners in row order, so results are reproducible bit for bit.
pub(crate) fn distribute_into(
    e: &[f64],
    out: &mut [f64],
    net: &OwnershipNetwork,
    withheld: &[bool],
) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for i in 0..e.len() {
        let x = e[i];
        if net.is_corporation(i) && !withheld[i] {
            if x != 0.0 {
                for (j, p) in net.row_iter(i) {
                    out[j] += x * p;
                }
            }
        } else {
            out[i] += x;
        }
    }
}
