//! Final attributed income in pass-through ownership networks.
//!
//! Corporations pass positive income on to their owners in proportion to
//! their shares; corporations with negative income keep it. Ownership can be
//! cyclic, so the final state is the fixed point of an absorbing Markov
//! chain rather than the result of a single pass. The crate offers three
//! solvers for that fixed point ([`engine`]), the strongly connected
//! component decomposition that makes the fast one fast ([`scc`]), the dense
//! absorption kernel it relies on ([`absorption`]), a calibrated synthetic
//! network generator ([`generator`]) and CSV/JSON plumbing ([`io`],
//! [`report`], [`cli`]).
//!
//! ```
//! use taxflow::{solve_decomp, IncomeVector, NetworkBuilder, SolverConfig};
//!
//! let net = NetworkBuilder::new()
//!     .corporation("c1")
//!     .corporation("c2")
//!     .individual("p1")
//!     .individual("p2")
//!     .share("c1", "c2", 0.5)
//!     .share("c1", "p1", 0.5)
//!     .share("c2", "c1", 0.5)
//!     .share("c2", "p2", 0.5)
//!     .build()?;
//! let e0 = IncomeVector::from_pairs(&net, [("c1", 100.0), ("c2", -30.0)])?;
//! let (e, _report) = solve_decomp(&net, &e0, &SolverConfig::default())?;
//! assert!((e.get(&net, "p1").unwrap() - 170.0 / 3.0).abs() < 1e-9);
//! # Ok::<(), taxflow::Error>(())
//! ```

pub mod absorption;
pub mod cli;
pub mod engine;
pub mod error;
pub mod generator;
pub mod io;
mod lu;
pub mod network;
pub mod report;
pub mod scc;
pub mod stats;
pub mod validate;

pub use absorption::{absorb, absorption_matrix, build_transient_system, AbsorptionMatrix, TransientSystem};
pub use engine::{
    relative_l1, solve, solve_all_withheld_schedule, solve_decomp, solve_global, solve_naive,
    solve_randomized_schedule,
    verify_fixed_point, Algorithm, SolveReport, SolverConfig,
};
pub use error::{Error, Result};
pub use generator::{generate, perturb_incomes, GeneratedNetwork, GeneratorConfig};
pub use network::{
    distribute_step, negative_set, restrict_shares, IncomeVector, NetworkBuilder, OwnershipNetwork,
    RestrictedShareView, TaxpayerId, TaxpayerKind,
};
pub use scc::{decompose, Component, ComponentDecomposition, Partition};
pub use stats::{network_stats, trivial_component_filter, NetworkStats};
pub use validate::{validate_network, ValidationReport};
