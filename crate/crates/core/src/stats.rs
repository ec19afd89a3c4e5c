//! Structural statistics of an ownership network.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::network::OwnershipNetwork;
use crate::scc::{decompose_graph, CorporateGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakComponentSummary {
    pub count: usize,
    /// Taxpayers in the largest weak component.
    pub largest: usize,
    /// Corporations in the largest weak component.
    pub largest_corporations: usize,
    /// Strongly connected components inside the largest weak component.
    pub largest_scc_count: usize,
    /// Fraction of weak components holding at most three corporations.
    pub fraction_at_most_three_corporations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats {
    pub n_individuals: usize,
    pub n_corporations: usize,
    pub n_links: usize,
    pub n_links_to_individuals: usize,
    pub n_links_to_corporations: usize,
    pub fraction_links_to_individuals: f64,
    pub mean_corporations_owned_per_corporation: f64,
    pub mean_owners_per_corporation: f64,
    pub mean_individual_owners_per_corporation: f64,
    pub mean_corporate_owners_per_corporation: f64,
    pub mean_corporations_owned_per_individual: f64,
    /// Corporations owned by each corporation.
    pub corporation_in_degree: BTreeMap<usize, usize>,
    /// Owners of each corporation.
    pub corporation_out_degree: BTreeMap<usize, usize>,
    /// Corporations owned by each individual.
    pub individual_in_degree: BTreeMap<usize, usize>,
    pub n_sccs: usize,
    pub n_nontrivial_sccs: usize,
    pub largest_scc: usize,
    /// Mean in-component out-degree of the largest strongly connected component.
    pub largest_scc_mean_internal_degree: f64,
    pub scc_size_histogram: BTreeMap<usize, usize>,
    pub weak_corporate: WeakComponentSummary,
    pub weak_with_individuals: WeakComponentSummary,
    pub trivial_components: usize,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Corporations that own no corporation and have only individual owners.
fn trivial_mask(net: &OwnershipNetwork) -> Vec<bool> {
    let mut owns_corporation = vec![false; net.len()];
    let mut has_corporate_owner = vec![false; net.len()];
    for (i, j, _) in net.edges() {
        if net.is_corporation(i) && net.is_corporation(j) {
            owns_corporation[j] = true;
            has_corporate_owner[i] = true;
        }
    }
    (0..net.len())
        .map(|i| {
            net.is_corporation(i)
                && !owns_corporation[i]
                && !has_corporate_owner[i]
                && !net.row(i).0.is_empty()
        })
        .collect()
}

pub fn network_stats(net: &OwnershipNetwork) -> NetworkStats {
    let n = net.len();
    let n_corporations = net.n_corporations();
    let n_individuals = net.n_individuals();

    let mut to_individuals = 0;
    let mut to_corporations = 0;
    let mut owned_count = vec![0usize; n];
    for (i, j, _) in net.edges() {
        if !net.is_corporation(i) {
            continue;
        }
        owned_count[j] += 1;
        if net.is_corporation(j) {
            to_corporations += 1;
        } else {
            to_individuals += 1;
        }
    }
    let n_links = to_individuals + to_corporations;

    let mut corporation_in_degree = BTreeMap::new();
    let mut corporation_out_degree = BTreeMap::new();
    let mut individual_in_degree = BTreeMap::new();
    let mut corporate_owned_by_corporations = 0;
    for i in 0..n {
        if net.is_corporation(i) {
            *corporation_out_degree.entry(net.row(i).0.len()).or_insert(0) += 1;
            *corporation_in_degree.entry(owned_count[i]).or_insert(0) += 1;
            corporate_owned_by_corporations += owned_count[i];
        } else {
            *individual_in_degree.entry(owned_count[i]).or_insert(0) += 1;
        }
    }
    let individual_links: usize = (0..n)
        .filter(|&i| !net.is_corporation(i))
        .map(|i| owned_count[i])
        .sum();

    let cg = CorporateGraph::new(net);
    let dec = decompose_graph(net, &cg);
    let mut scc_size_histogram = BTreeMap::new();
    let mut largest = 0;
    let mut largest_pos = None;
    for (pos, c) in dec.iter().enumerate() {
        *scc_size_histogram.entry(c.len()).or_insert(0) += 1;
        if c.len() > largest {
            largest = c.len();
            largest_pos = Some(pos);
        }
    }
    let n_nontrivial_sccs = dec.iter().filter(|c| c.len() > 1).count();
    let largest_scc_mean_internal_degree = largest_pos.map_or(0.0, |pos| {
        let members = dec.get(pos).members;
        let internal: usize = members
            .iter()
            .map(|&u| {
                net.row_iter(u)
                    .filter(|&(v, p)| p > 0.0 && v != u && dec.component_of(v) == Some(pos))
                    .count()
            })
            .sum();
        ratio(internal, members.len())
    });

    let weak_summary = |with_individuals: bool| {
        let mut uf = UnionFind::new(n);
        for (i, j, _) in net.edges() {
            if with_individuals || (net.is_corporation(i) && net.is_corporation(j)) {
                uf.union(i, j);
            }
        }
        let mut members: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut sccs: BTreeMap<usize, std::collections::BTreeSet<usize>> = BTreeMap::new();
        for i in 0..n {
            if !with_individuals && !net.is_corporation(i) {
                continue;
            }
            let r = uf.find(i);
            let m = members.entry(r).or_insert((0, 0));
            m.0 += 1;
            if let Some(c) = dec.component_of(i) {
                m.1 += 1;
                sccs.entry(r).or_default().insert(c);
            }
        }
        let (root, &(largest, largest_corporations)) = members
            .iter()
            .max_by_key(|(r, m)| (m.0, std::cmp::Reverse(**r)))
            .map(|(r, m)| (*r, m))
            .unwrap_or((usize::MAX, &(0, 0)));
        let small = members.values().filter(|m| m.1 <= 3).count();
        WeakComponentSummary {
            count: members.len(),
            largest,
            largest_corporations,
            largest_scc_count: sccs.get(&root).map_or(0, |s| s.len()),
            fraction_at_most_three_corporations: ratio(small, members.len()),
        }
    };

    NetworkStats {
        n_individuals,
        n_corporations,
        n_links,
        n_links_to_individuals: to_individuals,
        n_links_to_corporations: to_corporations,
        fraction_links_to_individuals: ratio(to_individuals, n_links),
        mean_corporations_owned_per_corporation: ratio(corporate_owned_by_corporations, n_corporations),
        mean_owners_per_corporation: ratio(n_links, n_corporations),
        mean_individual_owners_per_corporation: ratio(to_individuals, n_corporations),
        mean_corporate_owners_per_corporation: ratio(to_corporations, n_corporations),
        mean_corporations_owned_per_individual: ratio(individual_links, n_individuals),
        corporation_in_degree,
        corporation_out_degree,
        individual_in_degree,
        n_sccs: dec.len(),
        n_nontrivial_sccs,
        largest_scc: largest,
        largest_scc_mean_internal_degree,
        scc_size_histogram,
        weak_corporate: weak_summary(false),
        weak_with_individuals: weak_summary(true),
        trivial_components: trivial_mask(net).iter().filter(|&&t| t).count(),
    }
}

/// Drops trivial corporations (owning nothing, owned only by individuals)
/// and the individuals left without any holding. Returns the simplified
/// network and the number of corporations removed.
pub fn trivial_component_filter(net: &OwnershipNetwork) -> (OwnershipNetwork, usize) {
    let trivial = trivial_mask(net);
    let removed = trivial.iter().filter(|&&t| t).count();
    let mut had_link = vec![false; net.len()];
    let mut keeps_link = vec![false; net.len()];
    for (i, j, _) in net.edges() {
        had_link[j] = true;
        if !trivial[i] {
            keeps_link[j] = true;
        }
    }
    let simplified = net.retain(|i| {
        if net.is_corporation(i) {
            !trivial[i]
        } else {
            !had_link[i] || keeps_link[i]
        }
    });
    (simplified, removed)
}
