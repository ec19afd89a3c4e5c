//! End-to-end solvers for the final attributed income.
//!
//! Three routes reach the same fixed point:
//!
//! * [`solve_naive`] repeats the synchronous distribution step, withholding
//!   corporations with negative income, until corporate income drops below
//!   a threshold;
//! * [`solve_global`] absorbs the income of every non-negative corporation
//!   at once and repeats until the negative set stops changing;
//! * [`solve_decomp`] walks the strongly connected components in income-flow
//!   order and solves each one locally.
//!
//! [`solve_randomized_schedule`] prepends arbitrary admissible partial
//! distributions before the decomposition solve; it exists to check that the
//! result does not depend on the order in which corporations distribute.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::absorption::{TransientSystem, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::network::{distribute_into, IncomeVector, OwnershipNetwork};
use crate::scc::decompose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Global,
    Decomp,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Naive => "naive",
            Algorithm::Global => "global",
            Algorithm::Decomp => "decomp",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "naive" => Ok(Algorithm::Naive),
            "global" => Ok(Algorithm::Global),
            "decomp" => Ok(Algorithm::Decomp),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Absolute currency threshold for the naive solver. `None` means
    /// `1e-6 * max(1, Σ|E0|)`.
    pub epsilon: Option<f64>,
    pub max_iter: usize,
    pub dense_cap: usize,
    pub seed: u64,
    /// Wall-clock budget for the naive solver.
    #[serde(skip)]
    pub time_budget: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Decomp,
            epsilon: None,
            max_iter: 1_000_000,
            dense_cap: DEFAULT_DENSE_CAP,
            seed: 0,
            time_budget: None,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            ..Self::default()
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn effective_epsilon(&self, e0: &IncomeVector) -> f64 {
        self.epsilon
            .unwrap_or_else(|| 1e-6 * e0.abs_total().max(1.0))
    }
}

/// Passes spent on one component solved through the matrix path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentPasses {
    pub component: usize,
    pub size: usize,
    pub redos: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub converged: bool,
    pub outer_iterations: usize,
    /// Partial distribution steps applied before the solve proper.
    pub schedule_steps: usize,
    pub n_taxpayers: usize,
    pub n_corporations: usize,
    pub n_components: usize,
    pub n_matrix_components: usize,
    pub component_redos: Vec<ComponentPasses>,
    pub redo_total: usize,
    pub linear_solves: usize,
    /// Transient-system size → number of solves of that size.
    pub solve_sizes: BTreeMap<usize, usize>,
    pub max_solve_size: usize,
    /// `|S(E)|` at the start of each outer iteration (global solver).
    pub negative_counts: Vec<usize>,
    pub epsilon: Option<f64>,
    pub fixed_point_residual: f64,
    pub conservation_error: f64,
    pub wall_time_ms: f64,
}

impl SolveReport {
    fn new(algorithm: Algorithm, net: &OwnershipNetwork) -> Self {
        SolveReport {
            algorithm,
            converged: false,
            outer_iterations: 0,
            schedule_steps: 0,
            n_taxpayers: net.len(),
            n_corporations: net.n_corporations(),
            n_components: 0,
            n_matrix_components: 0,
            component_redos: Vec::new(),
            redo_total: 0,
            linear_solves: 0,
            solve_sizes: BTreeMap::new(),
            max_solve_size: 0,
            negative_counts: Vec::new(),
            epsilon: None,
            fixed_point_residual: 0.0,
            conservation_error: 0.0,
            wall_time_ms: 0.0,
        }
    }

    fn record_solve(&mut self, size: usize) {
        self.linear_solves += 1;
        *self.solve_sizes.entry(size).or_default() += 1;
        self.max_solve_size = self.max_solve_size.max(size);
    }

    fn finish(&mut self, net: &OwnershipNetwork, e0: &IncomeVector, e: &IncomeVector, start: Instant) {
        self.fixed_point_residual = fixed_point_residual(net, e);
        self.conservation_error = (e.total() - e0.total()).abs();
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    }
}

/// Dispatches on `cfg.algorithm`.
pub fn solve(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    match cfg.algorithm {
        Algorithm::Naive => solve_naive(net, e0, cfg),
        Algorithm::Global => solve_global(net, e0, cfg),
        Algorithm::Decomp => solve_decomp(net, e0, cfg),
    }
}

fn max_corporate_income(net: &OwnershipNetwork, e: &[f64]) -> f64 {
    net.corporations()
        .map(|i| e[i])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Repeated synchronous distribution until every corporation holds less
/// than epsilon.
pub fn solve_naive(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    net.check_dimension(e0)?;
    let epsilon = cfg.effective_epsilon(e0);
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    if cfg.max_iter == 0 {
        return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
    }
    let start = Instant::now();
    let mut report = SolveReport::new(Algorithm::Naive, net);
    report.epsilon = Some(epsilon);

    let corporate: Vec<bool> = (0..net.len()).map(|i| net.is_corporation(i)).collect();
    let mut cur = e0.as_slice().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut withheld = vec![false; cur.len()];
    loop {
        let max = max_corporate_income(net, &cur);
        if max < epsilon {
            report.converged = true;
            break;
        }
        let out_of_time = cfg.time_budget.is_some_and(|b| start.elapsed() > b);
        if report.outer_iterations >= cfg.max_iter || out_of_time {
            let e = IncomeVector::from_vec(cur);
            report.finish(net, e0, &e, start);
            return Err(Error::NonConverged {
                max_income: max,
                epsilon,
                report: Box::new(report),
            });
        }
        for (i, w) in withheld.iter_mut().enumerate() {
            *w = corporate[i] && cur[i] < 0.0;
        }
        distribute_into(&cur, &mut next, net, &withheld);
        std::mem::swap(&mut cur, &mut next);
        report.outer_iterations += 1;
    }
    let e = IncomeVector::from_vec(cur);
    report.finish(net, e0, &e, start);
    Ok((e, report))
}

/// Absorbs every non-negative corporation at once until the negative set
/// is stable. Needs one dense system over all corporations, so it is meant
/// as a reference for networks within the dense cap.
pub fn solve_global(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    net.check_dimension(e0)?;
    if net.n_corporations() > cfg.dense_cap {
        return Err(Error::CapExceeded {
            size: net.n_corporations(),
            cap: cfg.dense_cap,
        });
    }
    let start = Instant::now();
    let mut report = SolveReport::new(Algorithm::Global, net);
    let mut e = e0.clone();
    let corps: Vec<usize> = net.corporations().collect();
    let limit = corps.len() + 1;

    let mut negative: Vec<usize> = corps.iter().copied().filter(|&i| e[i] < 0.0).collect();
    loop {
        if report.outer_iterations >= limit {
            return Err(Error::RedoOverflow {
                size: corps.len(),
                limit,
            });
        }
        report.outer_iterations += 1;
        report.negative_counts.push(negative.len());
        let transients: Vec<usize> = corps.iter().copied().filter(|&i| e[i] >= 0.0).collect();
        if !transients.is_empty() {
            let sys = TransientSystem::build(net, &transients, cfg.dense_cap)?;
            sys.absorb_in_place(&mut e)?;
            report.record_solve(sys.len());
        }
        let now: Vec<usize> = corps.iter().copied().filter(|&i| e[i] < 0.0).collect();
        debug_assert!(now.iter().all(|i| negative.binary_search(i).is_ok()));
        if now == negative {
            break;
        }
        negative = now;
    }
    report.converged = true;
    report.n_components = 1;
    report.finish(net, e0, &e, start);
    Ok((e, report))
}

/// Component-by-component solve in income-flow order.
pub fn solve_decomp(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    let start = Instant::now();
    let mut e = e0.clone();
    let mut report = SolveReport::new(Algorithm::Decomp, net);
    decomp_in_place(net, &mut e, cfg, &mut report)?;
    report.finish(net, e0, &e, start);
    Ok((e, report))
}

fn decomp_in_place(
    net: &OwnershipNetwork,
    e: &mut IncomeVector,
    cfg: &SolverConfig,
    report: &mut SolveReport,
) -> Result<()> {
    net.check_dimension(e)?;
    let dec = decompose(net);
    report.n_components = dec.len();
    report.outer_iterations = 1;

    for (pos, comp) in dec.iter().enumerate() {
        if !comp.has_internal_edge {
            let v = comp.members[0];
            let x = e[v];
            if x > 0.0 {
                for (j, p) in net.row_iter(v) {
                    e[j] += x * p;
                }
                e[v] = 0.0;
            }
            continue;
        }

        report.n_matrix_components += 1;
        let limit = comp.len() + 1;
        let mut passes = 0;
        loop {
            passes += 1;
            if passes > limit {
                return Err(Error::RedoOverflow {
                    size: comp.len(),
                    limit,
                });
            }
            let transients: Vec<usize> =
                comp.members.iter().copied().filter(|&v| e[v] >= 0.0).collect();
            if transients.is_empty() {
                break;
            }
            let sys = TransientSystem::build(net, &transients, cfg.dense_cap)?;
            sys.absorb_in_place(e)?;
            report.record_solve(sys.len());
            // members outside the transient set that turned positive
            let redo = comp
                .members
                .iter()
                .any(|&v| e[v] > 0.0 && transients.binary_search(&v).is_err());
            if !redo {
                break;
            }
        }
        report.redo_total += passes - 1;
        report.component_redos.push(ComponentPasses {
            component: pos,
            size: comp.len(),
            redos: passes - 1,
        });
    }
    report.converged = true;
    Ok(())
}

/// Applies `k` random admissible partial distribution steps, then finishes
/// with [`solve_decomp`]. Each step withholds the negative corporations
/// plus a random subset of the others.
pub fn solve_randomized_schedule(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    k: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    schedule_then_decomp(net, e0, k, cfg, |rng, _| {
        let keep = rng.random::<f64>();
        move |rng: &mut ChaCha8Rng| rng.random::<f64>() < keep
    }, seed)
}

/// Like [`solve_randomized_schedule`] but every step withholds all
/// corporations, so the prefix is a sequence of identity steps.
pub fn solve_all_withheld_schedule(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    k: usize,
    cfg: &SolverConfig,
) -> Result<(IncomeVector, SolveReport)> {
    schedule_then_decomp(net, e0, k, cfg, |_, _| |_: &mut ChaCha8Rng| true, 0)
}

fn schedule_then_decomp<F, G>(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    k: usize,
    cfg: &SolverConfig,
    mut step_rule: F,
    seed: u64,
) -> Result<(IncomeVector, SolveReport)>
where
    F: FnMut(&mut ChaCha8Rng, usize) -> G,
    G: FnMut(&mut ChaCha8Rng) -> bool,
{
    net.check_dimension(e0)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = e0.as_slice().to_vec();
    let mut next = vec![0.0; cur.len()];
    let mut withheld = vec![false; cur.len()];
    for step in 0..k {
        let mut extra = step_rule(&mut rng, step);
        for (i, w) in withheld.iter_mut().enumerate() {
            *w = net.is_corporation(i) && (cur[i] < 0.0 || extra(&mut rng));
        }
        distribute_into(&cur, &mut next, net, &withheld);
        std::mem::swap(&mut cur, &mut next);
    }
    let mut e = IncomeVector::from_vec(cur);
    let mut report = SolveReport::new(Algorithm::Decomp, net);
    report.schedule_steps = k;
    decomp_in_place(net, &mut e, cfg, &mut report)?;
    report.finish(net, e0, &e, start);
    Ok((e, report))
}

fn fixed_point_residual(net: &OwnershipNetwork, e: &IncomeVector) -> f64 {
    let withheld: Vec<bool> = (0..net.len())
        .map(|i| net.is_corporation(i) && e[i] <= 0.0)
        .collect();
    let mut next = vec![0.0; e.len()];
    distribute_into(e.as_slice(), &mut next, net, &withheld);
    0.5 * e
        .as_slice()
        .iter()
        .zip(&next)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Income that one more distribution step would still move:
/// `½ ‖E − E·P_{S'}‖₁` with `S'` the corporations holding `E_i ≤ 0`.
/// Zero exactly when `E` is the final attributed income.
pub fn verify_fixed_point(net: &OwnershipNetwork, e: &IncomeVector) -> Result<f64> {
    net.check_dimension(e)?;
    Ok(fixed_point_residual(net, e))
}

/// `‖a − b‖₁ / max(Σ|reference|, tiny)`.
pub fn relative_l1(a: &IncomeVector, b: &IncomeVector, reference: &IncomeVector) -> f64 {
    a.l1_distance(b) / reference.abs_total().max(f64::MIN_POSITIVE)
}
