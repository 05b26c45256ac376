use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance};
use crate::rounding::{pseudo_approx, PseudoSolution, DEFAULT_TRIALS};

use super::{enumerate_residuals, select_params, transform, ResidualInstance, TransformPhase};

/// Largest number of residual instances [`solve`] will enumerate.
pub const RESIDUAL_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub eps: f64,
    pub seed: u64,
    pub trials: usize,
    /// Truncates the number of guessed pairs; the guarantee then only holds
    /// empirically.
    pub t_cap: Option<usize>,
}

impl SolveOptions {
    pub fn new(eps: f64) -> Self {
        SolveOptions {
            eps,
            seed: 0,
            trials: DEFAULT_TRIALS,
            t_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution: FacilitySet,
    pub cost: f64,
    /// Pseudo-solution of the full instance.
    pub base: Option<PseudoSolution>,
    /// Pair budget from the parameter choice on the full instance.
    pub t_full: usize,
    /// Pair budget actually enumerated.
    pub t_enum: usize,
    /// Whether `t_enum < t_full`.
    pub heuristic_t: bool,
    pub residuals_examined: usize,
    pub best_removed_by: Vec<(usize, usize)>,
    pub best_phase: Option<TransformPhase>,
}

/// `α` for which the transform parameters are selected.
pub fn pipeline_alpha(eps: f64) -> f64 {
    1.0 + 3f64.sqrt() + eps / 2.0
}

/// Runs [`solve_with`] and returns only the facilities.
pub fn solve(inst: &Instance, eps: f64, seed: u64, t_cap: Option<usize>) -> Result<FacilitySet> {
    let opts = SolveOptions {
        seed,
        t_cap,
        ..SolveOptions::new(eps)
    };
    Ok(solve_with(inst, &opts)?.solution)
}

struct Candidate {
    ids: Vec<usize>,
    cost: f64,
    phase: Option<TransformPhase>,
}

fn solve_residual(inst: &Instance, res: &ResidualInstance, opts: &SolveOptions) -> Result<Candidate> {
    let sub = res.instance(inst)?;
    if sub.n_facilities() <= sub.k() {
        let ids = res.remaining.clone();
        let cost = inst.cost_of_ids(&ids)?;
        return Ok(Candidate {
            ids,
            cost,
            phase: None,
        });
    }
    let pseudo = pseudo_approx(&sub, opts.eps / 2.0, opts.seed, opts.trials)?;
    let excess = pseudo.outcome.open.len().saturating_sub(sub.k());
    let params = select_params(pipeline_alpha(opts.eps), excess, opts.eps)?;
    let params = params.with_sparsity(pseudo.cost / params.t as f64);
    let out = transform(&sub, &pseudo.outcome.open, &params)?;
    let ids = out.solution.mapped(&res.remaining).ids().to_vec();
    Ok(Candidate {
        ids,
        cost: out.cost,
        phase: Some(out.phase),
    })
}

fn residual_count(n_facilities: usize, t: usize) -> u128 {
    let pairs = (n_facilities * n_facilities.saturating_sub(1)) as u128;
    let mut total = 0u128;
    let mut layer = 1u128;
    for _ in 0..=t {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(pairs);
    }
    total
}

/// Guesses residual instances, computes a pseudo-solution on each and
/// transforms it into at most `k` facilities; returns the cheapest.
///
/// Residuals with the same remaining facilities are solved once. Ties on cost
/// keep the lexicographically smallest set.
pub fn solve_with(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    if !opts.eps.is_finite() || opts.eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {}", opts.eps)));
    }
    let k = inst.k();
    if inst.n_facilities() <= k {
        let solution = FacilitySet::all(inst);
        let cost = inst.cost(&solution);
        return Ok(SolveReport {
            solution,
            cost,
            base: None,
            t_full: 0,
            t_enum: 0,
            heuristic_t: false,
            residuals_examined: 1,
            best_removed_by: Vec::new(),
            best_phase: None,
        });
    }

    let base = pseudo_approx(inst, opts.eps / 2.0, opts.seed, opts.trials)?;
    let excess = base.outcome.open.len().saturating_sub(k);
    let t_full = select_params(pipeline_alpha(opts.eps), excess, opts.eps)?.t;
    let t_enum = opts.t_cap.map_or(t_full, |cap| cap.min(t_full));
    let count = residual_count(inst.n_facilities(), t_enum);
    if count > RESIDUAL_GUARD {
        return Err(Error::GuardExceeded {
            count,
            limit: RESIDUAL_GUARD,
        });
    }

    let mut seen = BTreeSet::new();
    let residuals: Vec<ResidualInstance> = enumerate_residuals(inst, t_enum)
        .filter(|r| seen.insert(r.remaining.clone()))
        .collect();
    let results: Vec<Result<Candidate>> = residuals
        .par_iter()
        .map(|r| solve_residual(inst, r, opts))
        .collect();

    let mut best: Option<(Candidate, usize)> = None;
    for (idx, res) in results.into_iter().enumerate() {
        let cand = res?;
        let better = match &best {
            None => true,
            Some((b, _)) => cand.cost < b.cost || (cand.cost == b.cost && cand.ids < b.ids),
        };
        if better {
            best = Some((cand, idx));
        }
    }
    let (cand, idx) = best.expect("the full instance is always a residual");
    Ok(SolveReport {
        solution: FacilitySet::from_ids(cand.ids)?,
        cost: cand.cost,
        base: Some(base),
        t_full,
        t_enum,
        heuristic_t: t_enum < t_full,
        residuals_examined: residuals.len(),
        best_removed_by: residuals[idx].removed_by.clone(),
        best_phase: cand.phase,
    })
}
