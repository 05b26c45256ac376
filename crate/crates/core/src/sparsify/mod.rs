//! Sparse residual instances and the pseudo-solution to solution transform.
//!
//! A facility `i` is `A`-dense when the clients close to it pay a lot in the
//! optimum: `(1-ξ)·d(i,OPT)·|CBall(i, ξ·d(i,OPT))| > A` with `ξ = 1/3`.
//! Removing, for a few guessed pairs `(i, i')`, all facilities strictly closer
//! to `i` than `i'` yields residual instances; one of them keeps the optimum
//! and has no `opt/t`-dense facility. On such an instance a `c`-additive
//! pseudo-solution can be turned into `k` facilities at small extra cost.

mod pipeline;
mod transform;

pub use pipeline::{pipeline_alpha, solve, solve_with, SolveOptions, SolveReport, RESIDUAL_GUARD};
pub use transform::{select_params, transform, PipelineParams, Transformed, TransformPhase, TRANSFORM_GUARD};

use crate::error::Result;
use crate::instance::{FacilitySet, Instance, Point};

/// `ξ` in the sparsity condition.
pub const XI: f64 = 1.0 / 3.0;

/// `(1-ξ)·d(i,opt)·|CBall(i, ξ·d(i,opt))|`.
pub fn density(inst: &Instance, facility: usize, opt: &FacilitySet) -> f64 {
    let d = inst.facility_to_set(facility, opt.ids());
    if d == 0.0 {
        return 0.0;
    }
    let ball = inst.client_ball(Point::Facility(facility), XI * d);
    (1.0 - XI) * d * ball.len() as f64
}

/// Whether no facility is `A`-dense, with the facility of maximum density
/// (lowest index on ties) as witness.
pub fn is_sparse(inst: &Instance, level: f64, opt: &FacilitySet) -> (bool, usize) {
    let mut worst = (0, f64::NEG_INFINITY);
    for i in 0..inst.n_facilities() {
        let d = density(inst, i, opt);
        if d > worst.1 {
            worst = (i, d);
        }
    }
    (worst.1 <= level + 1e-12, worst.0)
}

/// Facilities removed by a sequence of guessed pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualInstance {
    /// Pairs `(i_z, i'_z)`; each removes `FBall(i_z, d(i_z, i'_z))`.
    pub removed_by: Vec<(usize, usize)>,
    /// Remaining facilities `F'`, ascending.
    pub remaining: Vec<usize>,
}

impl ResidualInstance {
    pub fn instance(&self, base: &Instance) -> Result<Instance> {
        base.restrict_facilities(&self.remaining)
    }
}

/// `F \ ∪_z FBall(i_z, d(i_z, i'_z))`.
pub fn remaining_after(inst: &Instance, pairs: &[(usize, usize)]) -> Vec<usize> {
    (0..inst.n_facilities())
        .filter(|&f| pairs.iter().all(|&(i, ip)| inst.ff(i, f) >= inst.ff(i, ip)))
        .collect()
}

/// Lazily enumerates the base instance and every ordered tuple of at most
/// `t` facility pairs `(i, i')`, `i != i'`, skipping empty residuals.
pub fn enumerate_residuals(inst: &Instance, t: usize) -> Residuals<'_> {
    let nf = inst.n_facilities();
    let pairs = (0..nf)
        .flat_map(|i| (0..nf).filter(move |&ip| ip != i).map(move |ip| (i, ip)))
        .collect();
    Residuals {
        inst,
        pairs,
        t,
        odometer: Vec::new(),
        started: false,
        done: false,
    }
}

pub struct Residuals<'a> {
    inst: &'a Instance,
    pairs: Vec<(usize, usize)>,
    t: usize,
    odometer: Vec<usize>,
    started: bool,
    done: bool,
}

impl Residuals<'_> {
    /// Advances the odometer; false once every tuple has been produced.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let p = self.pairs.len();
        for pos in (0..self.odometer.len()).rev() {
            self.odometer[pos] += 1;
            if self.odometer[pos] < p {
                return true;
            }
            self.odometer[pos] = 0;
        }
        // wrapped around: grow the tuple length
        if self.odometer.len() < self.t && p > 0 {
            self.odometer.push(0);
            self.odometer.iter_mut().for_each(|o| *o = 0);
            return true;
        }
        self.done = true;
        false
    }
}

impl Iterator for Residuals<'_> {
    type Item = ResidualInstance;

    fn next(&mut self) -> Option<ResidualInstance> {
        while self.advance() {
            let removed_by: Vec<(usize, usize)> = self.odometer.iter().map(|&o| self.pairs[o]).collect();
            let remaining = remaining_after(self.inst, &removed_by);
            if !remaining.is_empty() {
                return Some(ResidualInstance {
                    removed_by,
                    remaining,
                });
            }
        }
        None
    }
}

/// Greedy maximal sequence of dense pairs against a known optimum: repeatedly
/// take the lowest-index remaining facility that is `level`-dense, pair it
/// with its nearest optimum facility and remove the ball it spans.
pub fn dense_pair_sequence(inst: &Instance, opt: &FacilitySet, level: f64) -> ResidualInstance {
    let mut pairs = Vec::new();
    let mut remaining: Vec<usize> = (0..inst.n_facilities()).collect();
    while let Some(&i) = remaining
        .iter()
        .find(|&&i| density(inst, i, opt) > level + 1e-12)
    {
        let ip = *opt
            .ids()
            .iter()
            .min_by(|&&p, &&q| inst.ff(i, p).total_cmp(&inst.ff(i, q)).then(p.cmp(&q)))
            .expect("optimum is nonempty");
        pairs.push((i, ip));
        let radius = inst.ff(i, ip);
        remaining.retain(|&f| inst.ff(i, f) >= radius);
    }
    ResidualInstance {
        removed_by: pairs,
        remaining,
    }
}
