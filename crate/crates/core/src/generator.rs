//! Seeded synthetic ownership networks.
//!
//! Construction plants the strongly connected components explicitly:
//!
//! 1. draw the non-trivial component sizes (the first one is pinned at the
//!    maximum size, the rest follow a truncated power law);
//! 2. wire each component as a directed cycle plus random chords;
//! 3. leave the remaining corporations as singletons;
//! 4. shuffle the components into a random total order and add corporate
//!    owners only from later components, so no cross-component cycle
//!    can appear;
//! 5. give every corporation at least one individual owner;
//! 6. draw positive weights and normalise each row with at least
//!    `individual_share_floor` of the mass on individuals;
//! 7. draw log-normal income magnitudes with a random sign for corporations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{IncomeVector, NetworkBuilder, OwnershipNetwork, TaxpayerKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SccSizeLaw {
    pub exponent: f64,
    pub max_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncomeLaw {
    /// Location of `ln |income|`.
    pub log_mean: f64,
    /// Scale of `ln |income|`.
    pub log_sd: f64,
    pub negative_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_corporations: usize,
    pub n_individuals: usize,
    pub nontrivial_scc_count: usize,
    pub scc_size_law: SccSizeLaw,
    /// Target mean in-component out-degree; capped at `size - 1`.
    pub scc_internal_degree: f64,
    pub mean_corporate_owners: f64,
    pub mean_individual_owners: f64,
    pub individual_share_floor: f64,
    /// Weight of a corporate owner relative to an individual one when a
    /// row's shares are drawn. Large values push individual mass towards
    /// the floor, as in holding groups.
    pub corporate_owner_weight: f64,
    pub income_law: IncomeLaw,
    /// Extra corporations owned only by individuals and owning nothing.
    pub n_trivial_corporations: usize,
    /// Extra individuals that only own trivial corporations.
    pub n_trivial_individuals: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_corporations: 1_000,
            n_individuals: 2_300,
            nontrivial_scc_count: 10,
            scc_size_law: SccSizeLaw {
                exponent: 3.9,
                max_size: 20,
            },
            scc_internal_degree: 3.0,
            mean_corporate_owners: 1.75,
            mean_individual_owners: 5.48,
            individual_share_floor: 0.05,
            corporate_owner_weight: 1.0,
            income_law: IncomeLaw {
                log_mean: 10.0,
                log_sd: 2.0,
                negative_probability: 0.3,
            },
            n_trivial_corporations: 0,
            n_trivial_individuals: 0,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    /// Calibrated to a simplified national taxpayer network: about 153k
    /// corporations, 356k individuals, 268 non-trivial components with the
    /// largest at 396 corporations, and 7.23 owners per corporation.
    pub fn national_scale() -> Self {
        GeneratorConfig {
            n_corporations: 152_914,
            n_individuals: 356_372,
            nontrivial_scc_count: 268,
            scc_size_law: SccSizeLaw {
                exponent: 3.9,
                max_size: 396,
            },
            scc_internal_degree: 8.21,
            mean_corporate_owners: 1.75,
            mean_individual_owners: 5.48,
            corporate_owner_weight: 20.0,
            // peso-denominated register: median corporate income near 10M
            income_law: IncomeLaw {
                log_mean: 16.1,
                log_sd: 2.5,
                negative_probability: 0.3,
            },
            ..Self::default()
        }
    }

    /// Small network for tests and property runs.
    pub fn small(n_corporations: usize, n_individuals: usize, nontrivial: usize, max_size: usize) -> Self {
        GeneratorConfig {
            n_corporations,
            n_individuals,
            nontrivial_scc_count: nontrivial,
            scc_size_law: SccSizeLaw {
                exponent: 2.0,
                max_size,
            },
            scc_internal_degree: 2.0,
            mean_corporate_owners: 1.5,
            mean_individual_owners: 2.0,
            income_law: IncomeLaw {
                log_mean: 4.0,
                log_sd: 1.5,
                negative_probability: 0.3,
            },
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.individual_share_floor > 0.0 && self.individual_share_floor < 1.0) {
            return bad(format!(
                "individual_share_floor must lie in (0, 1), got {}",
                self.individual_share_floor
            ));
        }
        if self.nontrivial_scc_count > 0 {
            if self.scc_size_law.max_size < 2 {
                return bad("scc_size_law.max_size must be at least 2".into());
            }
            if self.scc_size_law.max_size > self.n_corporations {
                return bad(format!(
                    "scc_size_law.max_size {} exceeds n_corporations {}",
                    self.scc_size_law.max_size, self.n_corporations
                ));
            }
        }
        if !self.scc_size_law.exponent.is_finite() {
            return bad("scc_size_law.exponent must be finite".into());
        }
        if self.n_corporations > 0 && self.n_individuals == 0 {
            return bad("corporations need at least one individual owner".into());
        }
        if self.n_trivial_corporations > 0 && self.n_individuals + self.n_trivial_individuals == 0 {
            return bad("trivial corporations need individual owners".into());
        }
        if !(0.0..=1.0).contains(&self.income_law.negative_probability) {
            return bad("income_law.negative_probability must lie in [0, 1]".into());
        }
        if !(self.income_law.log_sd >= 0.0) || !self.income_law.log_mean.is_finite() {
            return bad("income_law needs finite log_mean and log_sd >= 0".into());
        }
        for (name, v) in [
            ("mean_corporate_owners", self.mean_corporate_owners),
            ("mean_individual_owners", self.mean_individual_owners),
            ("scc_internal_degree", self.scc_internal_degree),
            ("corporate_owner_weight", self.corporate_owner_weight),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be a non-negative number"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub network: OwnershipNetwork,
    pub incomes: IncomeVector,
    /// Sizes of the planted non-trivial components, largest first.
    pub planted_scc_sizes: Vec<usize>,
}

fn width(n: usize) -> usize {
    n.max(1).to_string().len()
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map_or(0, |d| d.sample(rng) as usize)
}

fn sample_sizes(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if cfg.nontrivial_scc_count == 0 {
        return Ok(Vec::new());
    }
    let max = cfg.scc_size_law.max_size;
    let weights: Vec<f64> = (2..=max)
        .map(|s| (s as f64).powf(-cfg.scc_size_law.exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut sizes = vec![max];
    for _ in 1..cfg.nontrivial_scc_count {
        let mut u = rng.random::<f64>() * total;
        let mut size = max;
        for (k, w) in weights.iter().enumerate() {
            if u < *w {
                size = k + 2;
                break;
            }
            u -= w;
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let planted: usize = sizes.iter().sum();
    if planted > cfg.n_corporations {
        return Err(Error::Infeasible(format!(
            "planted components hold {planted} corporations but only {} exist",
            cfg.n_corporations
        )));
    }
    Ok(sizes)
}

pub fn generate(cfg: &GeneratorConfig) -> Result<GeneratedNetwork> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sizes = sample_sizes(cfg, &mut rng)?;

    let n_c = cfg.n_corporations;
    let n_t = cfg.n_trivial_corporations;
    let n_p = cfg.n_individuals;
    let n_tp = cfg.n_trivial_individuals;
    let corp_w = width(n_c + n_t);
    let ind_w = width(n_p + n_tp);
    let corp_name = |k: usize| format!("C{k:0corp_w$}");
    let ind_name = |k: usize| format!("P{k:0ind_w$}");

    // Components as lists of corporation numbers; planted ones first.
    let mut perm: Vec<usize> = (0..n_c).collect();
    perm.shuffle(&mut rng);
    let mut components: Vec<Vec<usize>> = Vec::with_capacity(n_c);
    let mut cursor = 0;
    for &s in &sizes {
        components.push(perm[cursor..cursor + s].to_vec());
        cursor += s;
    }
    for &c in &perm[cursor..] {
        components.push(vec![c]);
    }

    // corporate owners per corporation: (owner, weight)
    let mut corp_owners: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    let mut internal_edges = 0usize;
    for comp in components.iter().take(sizes.len()) {
        let s = comp.len();
        for k in 0..s {
            corp_owners[comp[k]].push(comp[(k + 1) % s]);
        }
        let target_degree = cfg.scc_internal_degree.min((s - 1) as f64).max(1.0);
        let target = ((target_degree * s as f64).round() as usize).min(s * (s - 1));
        let mut edges = s;
        let mut attempts = 0;
        while edges < target && attempts < 20 * target {
            attempts += 1;
            let u = comp[rng.random_range(0..s)];
            let v = comp[rng.random_range(0..s)];
            if u == v || corp_owners[u].contains(&v) {
                continue;
            }
            corp_owners[u].push(v);
            edges += 1;
        }
        internal_edges += edges;
    }

    // random total order over components, owners only from later ones
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.shuffle(&mut rng);
    let ordered: Vec<usize> = order.iter().flat_map(|&c| components[c].iter().copied()).collect();
    let mut comp_end = vec![0usize; n_c];
    let mut end = 0;
    for &c in &order {
        end += components[c].len();
        for &m in &components[c] {
            comp_end[m] = end;
        }
    }
    // planted members already have their corporate owners inside the
    // component; the rest of the mean goes to the singletons
    let planted: usize = sizes.iter().sum();
    let external_mean = if n_c == planted {
        0.0
    } else {
        (cfg.mean_corporate_owners * n_c as f64 - internal_edges as f64).max(0.0)
            / (n_c - planted) as f64
    };
    for &c in &ordered {
        let later = n_c - comp_end[c];
        if later == 0 || !corp_owners[c].is_empty() {
            continue;
        }
        let want = poisson(&mut rng, external_mean).min(later);
        let mut added = 0;
        let mut attempts = 0;
        while added < want && attempts < 10 * want + 10 {
            attempts += 1;
            let owner = ordered[comp_end[c] + rng.random_range(0..later)];
            if corp_owners[c].contains(&owner) {
                continue;
            }
            corp_owners[c].push(owner);
            added += 1;
        }
    }

    // individual owners: every individual gets at least one holding when
    // there are enough slots
    let ind_counts: Vec<usize> = (0..n_c)
        .map(|_| 1 + poisson(&mut rng, (cfg.mean_individual_owners - 1.0).max(0.0)))
        .collect();
    let mut slots: Vec<usize> = ind_counts
        .iter()
        .enumerate()
        .flat_map(|(c, &k)| std::iter::repeat_n(c, k))
        .collect();
    slots.shuffle(&mut rng);
    let mut ind_owners: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    for (k, &c) in slots.iter().enumerate() {
        let mut p = if k < n_p { k } else { rng.random_range(0..n_p) };
        let mut tries = 0;
        while ind_owners[c].contains(&p) && tries < 8 {
            p = rng.random_range(0..n_p);
            tries += 1;
        }
        if !ind_owners[c].contains(&p) {
            ind_owners[c].push(p);
        }
    }

    let mut b = NetworkBuilder::new();
    for c in 0..n_c + n_t {
        b.add_taxpayer(corp_name(c), TaxpayerKind::Corporation);
    }
    for p in 0..n_p + n_tp {
        b.add_taxpayer(ind_name(p), TaxpayerKind::Individual);
    }

    let floor = cfg.individual_share_floor;
    let kappa = cfg.corporate_owner_weight;
    let add_row = |b: &mut NetworkBuilder, rng: &mut ChaCha8Rng, c: usize, corps: &[usize], inds: &[usize]| {
        let wc: Vec<f64> = corps.iter().map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect();
        let wi: Vec<f64> = inds.iter().map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect();
        let (sc, si): (f64, f64) = (wc.iter().sum(), wi.iter().sum());
        let ind_mass = if corps.is_empty() {
            1.0
        } else {
            (si / (kappa * sc + si)).max(floor)
        };
        for (&o, w) in corps.iter().zip(&wc) {
            b.add_share(corp_name(c), corp_name(o), w / sc * (1.0 - ind_mass));
        }
        for (&o, w) in inds.iter().zip(&wi) {
            b.add_share(corp_name(c), ind_name(o), w / si * ind_mass);
        }
    };
    for c in 0..n_c {
        add_row(&mut b, &mut rng, c, &corp_owners[c], &ind_owners[c]);
    }
    for t in 0..n_t {
        let k = 1 + poisson(&mut rng, (cfg.mean_individual_owners - 1.0).max(0.0));
        let pool = if n_tp > 0 { (n_p, n_tp) } else { (0, n_p) };
        let mut inds: Vec<usize> = Vec::with_capacity(k);
        if n_tp > 0 && t < n_tp {
            inds.push(n_p + t);
        }
        for _ in 0..k * 2 {
            if inds.len() >= k {
                break;
            }
            let p = pool.0 + rng.random_range(0..pool.1);
            if !inds.contains(&p) {
                inds.push(p);
            }
        }
        add_row(&mut b, &mut rng, n_c + t, &[], &inds);
    }
    let network = b.build()?;

    let law = LogNormal::new(cfg.income_law.log_mean, cfg.income_law.log_sd)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut incomes = IncomeVector::zeros(network.len());
    for i in 0..network.len() {
        let magnitude = law.sample(&mut rng);
        let negative = network.is_corporation(i)
            && rng.random::<f64>() < cfg.income_law.negative_probability;
        incomes[i] = if negative { -magnitude } else { magnitude };
    }

    Ok(GeneratedNetwork {
        network,
        incomes,
        planted_scc_sizes: sizes,
    })
}

/// Sets exactly `round(negative_fraction · n_S)` corporate incomes negative
/// and the rest non-negative, keeping every magnitude.
pub fn perturb_incomes(
    e: &IncomeVector,
    net: &OwnershipNetwork,
    negative_fraction: f64,
    seed: u64,
) -> Result<IncomeVector> {
    net.check_dimension(e)?;
    if !(0.0..=1.0).contains(&negative_fraction) {
        return Err(Error::InvalidConfig(format!(
            "negative_fraction must lie in [0, 1], got {negative_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corps: Vec<usize> = net.corporations().collect();
    let k = (negative_fraction * corps.len() as f64).round() as usize;
    corps.shuffle(&mut rng);
    let mut out = e.clone();
    for (rank, &i) in corps.iter().enumerate() {
        out[i] = if rank < k { -e[i].abs() } else { e[i].abs() };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scc::decompose;
    use crate::validate::validate_network;

    #[test]
    fn empty_corporate_side() {
        let cfg = GeneratorConfig {
            n_corporations: 0,
            n_individuals: 5,
            nontrivial_scc_count: 0,
            ..GeneratorConfig::default()
        };
        let g = generate(&cfg).unwrap();
        assert_eq!(g.network.n_corporations(), 0);
        assert_eq!(g.network.n_individuals(), 5);
    }

    #[test]
    fn minimal_two_cycle() {
        let cfg = GeneratorConfig {
            n_corporations: 2,
            n_individuals: 2,
            nontrivial_scc_count: 1,
            scc_size_law: SccSizeLaw {
                exponent: 2.0,
                max_size: 2,
            },
            individual_share_floor: 0.5,
            ..GeneratorConfig::default()
        };
        let g = generate(&cfg).unwrap();
        assert!(validate_network(&g.network, 1e-9).passed);
        let d = decompose(&g.network);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0).len(), 2);
        for i in g.network.corporations() {
            let corp_mass: f64 = g
                .network
                .row_iter(i)
                .filter(|&(j, _)| g.network.is_corporation(j))
                .map(|(_, p)| p)
                .sum();
            assert!(corp_mass <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = GeneratorConfig::small(40, 60, 3, 6).with_seed(9);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.incomes, b.incomes);
        assert_eq!(a.network.edges().collect::<Vec<_>>(), b.network.edges().collect::<Vec<_>>());
    }

    #[test]
    fn infeasible_and_invalid_configs() {
        let too_many = GeneratorConfig {
            n_corporations: 10,
            nontrivial_scc_count: 6,
            scc_size_law: SccSizeLaw {
                exponent: 0.0,
                max_size: 10,
            },
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate(&too_many), Err(Error::Infeasible(_))));

        let no_floor = GeneratorConfig {
            individual_share_floor: 0.0,
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate(&no_floor), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn perturbation_counts() {
        let g = generate(&GeneratorConfig::small(100, 50, 4, 5).with_seed(3)).unwrap();
        let neg = |e: &IncomeVector| g.network.corporations().filter(|&i| e[i] < 0.0).count();
        let e0 = perturb_incomes(&g.incomes, &g.network, 0.0, 1).unwrap();
        assert_eq!(neg(&e0), 0);
        let e1 = perturb_incomes(&g.incomes, &g.network, 1.0, 1).unwrap();
        assert_eq!(neg(&e1), 100);
        let e3 = perturb_incomes(&g.incomes, &g.network, 0.3, 1).unwrap();
        assert_eq!(neg(&e3), 30);
        for i in 0..g.incomes.len() {
            assert_eq!(e3[i].abs(), g.incomes[i].abs());
        }
    }
}
