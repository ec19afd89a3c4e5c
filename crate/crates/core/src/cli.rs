//! Command-line driver.
//!
//! Exit codes: 0 success, 1 validation failure, 2 non-convergence or
//! singular system, 3 IO or format error, 4 verification mismatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::engine::{relative_l1, solve, Algorithm, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorConfig};
use crate::io::{create, parse_inputs, parse_ownership, write_incomes, write_ownership, write_results};
use crate::network::{IncomeVector, OwnershipNetwork};
use crate::report::{write_report, Report};
use crate::stats::network_stats;
use crate::validate::{validate_network, DEFAULT_ROW_TOLERANCE};

#[derive(Debug, Parser)]
#[command(name = "taxflow", about = "Final attributed income in pass-through ownership networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the final attributed income of every taxpayer.
    Solve {
        #[arg(long)]
        ownership: PathBuf,
        #[arg(long)]
        incomes: PathBuf,
        #[arg(long, default_value = "decomp")]
        algorithm: String,
        /// Absolute threshold for the naive solver.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
        /// Rescale corporate rows to sum exactly to one.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = DEFAULT_ROW_TOLERANCE)]
        row_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Structural statistics of an ownership network.
    Stats {
        #[arg(long)]
        ownership: PathBuf,
        #[arg(long)]
        incomes: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic network from a JSON configuration.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_ownership: PathBuf,
        #[arg(long)]
        out_incomes: PathBuf,
    },
    /// Run two solvers and compare their results.
    Verify {
        #[arg(long)]
        ownership: PathBuf,
        #[arg(long)]
        incomes: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "naive,decomp")]
        algorithms: Vec<String>,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Generate a network, solve it and report timings.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Also time the naive solver with this absolute epsilon.
        #[arg(long)]
        naive_epsilon: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first) and runs the command; returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(ownership: &Path, incomes: &Path, normalize: bool, row_tol: f64) -> Result<(OwnershipNetwork, IncomeVector)> {
    let parsed = parse_inputs(ownership, incomes)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let net = if normalize {
        parsed.network.normalized()
    } else {
        parsed.network
    };
    let v = validate_network(&net, row_tol);
    for f in &v.findings {
        eprintln!("{f}");
    }
    if !v.passed {
        return Err(Error::Validation(Box::new(v)));
    }
    Ok((net, parsed.incomes))
}

fn config_for(algorithm: Algorithm, epsilon: Option<f64>, max_iter: usize) -> SolverConfig {
    SolverConfig {
        epsilon,
        max_iter,
        ..SolverConfig::new(algorithm)
    }
}

/// Runs a solver, writing the partial report when the naive solver stops
/// without converging.
fn solve_reporting(
    net: &OwnershipNetwork,
    e0: &IncomeVector,
    cfg: &SolverConfig,
    report_path: Option<&Path>,
) -> Result<(IncomeVector, SolveReport)> {
    match solve(net, e0, cfg) {
        Err(Error::NonConverged {
            max_income,
            epsilon,
            report,
        }) => {
            eprint!("{}", report.render_text());
            if let Some(p) = report_path {
                write_report(report.as_ref(), p)?;
            }
            Err(Error::NonConverged {
                max_income,
                epsilon,
                report,
            })
        }
        other => other,
    }
}

fn read_config(path: &Path) -> Result<GeneratorConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Serialize)]
struct BenchReport {
    seed: u64,
    generate_ms: f64,
    decomp: SolveReport,
    naive: Option<SolveReport>,
    naive_over_decomp: Option<f64>,
}

impl Report for BenchReport {
    fn render_text(&self) -> String {
        let mut s = format!("seed {} generated in {:.1} ms\n\n", self.seed, self.generate_ms);
        s += &self.decomp.render_text();
        if let Some(n) = &self.naive {
            s += "\n";
            s += &n.render_text();
        }
        if let Some(r) = self.naive_over_decomp {
            s += &format!("\nnaive / decomp wall time           {r:.1}x\n");
        }
        s
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve {
            ownership,
            incomes,
            algorithm,
            epsilon,
            max_iter,
            normalize,
            row_tol,
            out,
            report,
        } => {
            let algorithm: Algorithm = algorithm.parse()?;
            let (net, e0) = load(&ownership, &incomes, normalize, row_tol)?;
            let cfg = config_for(algorithm, epsilon, max_iter);
            let (e, rep) = solve_reporting(&net, &e0, &cfg, report.as_deref())?;
            match out {
                Some(p) => write_results(&net, &e0, &e, create(&p)?)?,
                None => write_results(&net, &e0, &e, std::io::stdout().lock())?,
            }
            if let Some(p) = report {
                write_report(&rep, &p)?;
            }
            eprint!("{}", rep.render_text());
            Ok(())
        }
        Command::Stats {
            ownership,
            incomes,
            out,
        } => {
            let net = match incomes {
                Some(inc) => parse_inputs(&ownership, &inc)?.network,
                None => parse_ownership(&ownership)?.network,
            };
            let stats = network_stats(&net);
            print!("{}", stats.render_text());
            if let Some(p) = out {
                write_report(&stats, &p)?;
            }
            Ok(())
        }
        Command::Generate {
            config,
            seed,
            out_ownership,
            out_incomes,
        } => {
            let cfg = read_config(&config)?.with_seed(seed);
            let g = generate(&cfg)?;
            write_ownership(&g.network, create(&out_ownership)?)?;
            write_incomes(&g.network, &g.incomes, create(&out_incomes)?)?;
            eprintln!(
                "generated {} corporations, {} individuals, {} links",
                g.network.n_corporations(),
                g.network.n_individuals(),
                g.network.n_links()
            );
            Ok(())
        }
        Command::Verify {
            ownership,
            incomes,
            algorithms,
            tolerance,
            epsilon,
        } => {
            if algorithms.len() != 2 {
                return Err(Error::InvalidConfig("--algorithms takes exactly two names".into()));
            }
            let a: Algorithm = algorithms[0].parse()?;
            let b: Algorithm = algorithms[1].parse()?;
            let (net, e0) = load(&ownership, &incomes, false, DEFAULT_ROW_TOLERANCE)?;
            // the naive solver needs a tight threshold to be comparable
            let eps = epsilon.or(Some(1e-10 * e0.abs_total().max(1.0)));
            let (ea, _) = solve_reporting(&net, &e0, &config_for(a, eps, usize::MAX), None)?;
            let (eb, _) = solve_reporting(&net, &e0, &config_for(b, eps, usize::MAX), None)?;
            let deviation = relative_l1(&ea, &eb, &e0);
            println!("{a} vs {b}: relative L1 deviation {deviation:e} (tolerance {tolerance:e})");
            if deviation > tolerance {
                return Err(Error::VerificationMismatch {
                    deviation,
                    tolerance,
                });
            }
            Ok(())
        }
        Command::Bench {
            config,
            seed,
            naive_epsilon,
            report,
        } => {
            let cfg = read_config(&config)?.with_seed(seed);
            let t = Instant::now();
            let g = generate(&cfg)?;
            let generate_ms = t.elapsed().as_secs_f64() * 1e3;
            let (_, decomp) = solve(&g.network, &g.incomes, &SolverConfig::default())?;
            let naive = match naive_epsilon {
                Some(eps) => {
                    let cfg = config_for(Algorithm::Naive, Some(eps), usize::MAX);
                    Some(solve_reporting(&g.network, &g.incomes, &cfg, None)?.1)
                }
                None => None,
            };
            let naive_over_decomp = naive
                .as_ref()
                .map(|n| n.wall_time_ms / decomp.wall_time_ms.max(1e-9));
            let bench = BenchReport {
                seed,
                generate_ms,
                decomp,
                naive,
                naive_over_decomp,
            };
            print!("{}", bench.render_text());
            if let Some(p) = report {
                write_report(&bench, &p)?;
            }
            Ok(())
        }
    }
}
