//! Rounding a bi-point into an additive pseudo-solution.
//!
//! Three regimes, selected by the weight `a` on the small side `F1`:
//!
//! | `a`                                  | rounding                  | extra facilities |
//! |--------------------------------------|---------------------------|------------------|
//! | `(0, (√3-1)/4]`                      | [`round_knapsack`]        | 2                |
//! | `((√3-1)/4, 2/(1+√3)]`               | [`round_grouped`]         | `3⌈2/(abη)⌉`     |
//! | `(2/(1+√3), 1]`                      | [`round_open_f1`]         | 0                |
//!
//! Every regime keeps the star-closure property: a star whose center is
//! closed has all of its leaves open.

mod grouped;
mod knapsack;
mod stars;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bipoint::{bipoint_solve, BiPoint};
use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance};
use crate::tolerance::approx_le;

pub use grouped::{grouped_budget, large_star_threshold, round_grouped};
pub use knapsack::{round_knapsack, round_knapsack_with_lp, solve_knapsack_lp, KnapsackLp};
pub use stars::{build_stars, ClientStar, Star, StarDecomposition};

/// Default number of seeded grouped-rounding runs kept best-of.
pub const DEFAULT_TRIALS: usize = 32;

/// `(√3 - 1) / 4`: at or below, knapsack rounding applies.
pub fn knapsack_limit() -> f64 {
    (3f64.sqrt() - 1.0) / 4.0
}

/// `2 / (1 + √3)`: above, opening `F1` alone is good enough.
pub fn open_f1_limit() -> f64 {
    2.0 / (1.0 + 3f64.sqrt())
}

/// `η = ε / (1 + √3)`.
pub fn eta_for(eps: f64) -> f64 {
    eps / (1.0 + 3f64.sqrt())
}

pub(crate) fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

pub(crate) fn floor_tol(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    OpenF1,
    Knapsack,
    GroupedRandom,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::OpenF1 => "open-F1",
            Regime::Knapsack => "knapsack",
            Regime::GroupedRandom => "grouped-random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingOutcome {
    pub open: FacilitySet,
    pub regime: Regime,
    /// Claimed bound on `|open| - k`.
    pub additive_budget: usize,
    pub seed: u64,
    pub trials: usize,
}

/// Opens every facility of `F1`.
pub fn round_open_f1(sd: &StarDecomposition) -> RoundingOutcome {
    RoundingOutcome {
        open: FacilitySet::from_ids(sd.centers()).expect("F1 is nonempty"),
        regime: Regime::OpenF1,
        additive_budget: 0,
        seed: 0,
        trials: 1,
    }
}

/// `min{d1, a·d1 + b(1+2a)·d2} <= ((1+√3)/2)(a·d1 + b·d2)`.
pub fn balancing_holds(a: f64, b: f64, d1: f64, d2: f64) -> bool {
    let lhs = d1.min(a * d1 + b * (1.0 + 2.0 * a) * d2);
    approx_le(lhs, (1.0 + 3f64.sqrt()) / 2.0 * (a * d1 + b * d2))
}

/// A pseudo-solution with the bi-point it was rounded from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoSolution {
    pub outcome: RoundingOutcome,
    pub bipoint: BiPoint,
    pub cost: f64,
}

/// Best of `trials` grouped roundings; ties keep the earliest trial.
pub fn best_grouped(
    inst: &Instance,
    sd: &StarDecomposition,
    eta: f64,
    seed: u64,
    trials: usize,
) -> Result<(RoundingOutcome, f64)> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials.max(1)).map(|_| master.next_u64()).collect();
    let runs = seeds
        .par_iter()
        .map(|&s| {
            let out = round_grouped(sd, eta, s)?;
            let cost = inst.cost(&out.open);
            Ok((out, cost))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut best, cost) = runs
        .into_iter()
        .reduce(|acc, x| if x.1 < acc.1 { x } else { acc })
        .expect("at least one trial");
    best.trials = trials.max(1);
    Ok((best, cost))
}

/// Bi-point construction followed by regime dispatch, balanced against opening `F1`.
pub fn pseudo_approx(inst: &Instance, eps: f64, seed: u64, trials: usize) -> Result<PseudoSolution> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let bp = bipoint_solve(inst)?;
    assert!(
        balancing_holds(bp.a, bp.b, bp.d1, bp.d2),
        "balancing inequality failed for a = {}, d1 = {}, d2 = {}",
        bp.a,
        bp.d1,
        bp.d2
    );
    if bp.is_degenerate() {
        let outcome = RoundingOutcome {
            open: bp.s1.clone(),
            regime: Regime::OpenF1,
            additive_budget: 0,
            seed,
            trials: 1,
        };
        let cost = bp.d1;
        return Ok(PseudoSolution {
            outcome,
            bipoint: bp,
            cost,
        });
    }
    let sd = build_stars(inst, &bp)?;
    let trivial = round_open_f1(&sd);
    let trivial_cost = bp.d1;

    let (outcome, cost) = if bp.d2 > bp.d1 || bp.a > open_f1_limit() {
        (trivial.clone(), trivial_cost)
    } else if bp.a <= knapsack_limit() {
        let out = round_knapsack(&sd, inst.k());
        let cost = inst.cost(&out.open);
        (out, cost)
    } else {
        best_grouped(inst, &sd, eta_for(eps), seed, trials)?
    };
    let (mut outcome, cost) = if trivial_cost < cost {
        (trivial, trivial_cost)
    } else {
        (outcome, cost)
    };
    if outcome.regime != Regime::GroupedRandom {
        outcome.seed = seed;
    }
    Ok(PseudoSolution {
        outcome,
        bipoint: bp,
        cost,
    })
}
