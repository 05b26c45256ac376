//! Metric k-median with a `1 + √3 + ε` guarantee.
//!
//! The pipeline has three stages:
//!
//! 1. [`bipoint::bipoint_solve`] runs a Lagrangian dual-ascent facility
//!    location algorithm under a binary search on the facility price and
//!    returns two solutions `F1`, `F2` whose convex combination opens `k`
//!    facilities fractionally.
//! 2. [`rounding::pseudo_approx`] rounds that bi-point into a set of at most
//!    `k + c` facilities for a constant `c`.
//! 3. [`sparsify::solve`] guesses residual instances without dense
//!    facilities and [`sparsify::transform`]s each pseudo-solution into at
//!    most `k` facilities.
//!
//! [`oracle`] holds the brute-force solvers used to check all of the above.
//!
//! ```
//! use kmedian::{gen_gap, oracle::brute_force, sparsify::solve};
//!
//! let inst = gen_gap(4)?;
//! let opt = brute_force(&inst, inst.k())?;
//! let sol = solve(&inst, 1.0, 0, Some(2))?;
//! assert_eq!(inst.cost(&sol), opt.cost);
//! # Ok::<(), kmedian::Error>(())
//! ```

pub mod bipoint;
mod combinatorics;
pub mod error;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod rounding;
pub mod sparsify;
pub mod tolerance;

pub use bipoint::{bipoint_solve, lmp_solve, BiPoint};
pub use error::{Error, Result};
pub use instance::{FacilitySet, Instance, Point};
pub use io::{gen_euclidean, gen_gap, gen_stars};
pub use rounding::{pseudo_approx, PseudoSolution};
pub use sparsify::{solve, solve_with, SolveOptions};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/bipoint.md")]
    mod bipoint {}
    #[doc = include_str!("../../../book/src/rounding.md")]
    mod rounding {}
    #[doc = include_str!("../../../book/src/sparsify.md")]
    mod sparsify {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
