use serde::Serialize;

use crate::combinatorics::for_each_combination;
use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance, Point};
use crate::oracle::binomial;

use super::XI;

/// Largest number of `(D, V)` guesses [`transform`] will examine.
pub const TRANSFORM_GUARD: u128 = 50_000_000;

/// Constants of the transform for a `c`-additive `α`-approximate input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineParams {
    pub eps: f64,
    pub alpha: f64,
    pub c: usize,
    pub xi: f64,
    pub delta: f64,
    pub t: usize,
    /// Sparsity level `A`; bound when a pseudo-solution is known.
    pub sparsity: Option<f64>,
}

impl PipelineParams {
    /// `B = 2(A + cost(T)/t) / (δξ)`.
    pub fn removal_threshold(&self, pseudo_cost: f64) -> Result<f64> {
        let a = self.sparsity.ok_or_else(|| {
            Error::InvalidParameter("sparsity level A is not bound".into())
        })?;
        Ok(2.0 * (a + pseudo_cost / self.t as f64) / (self.delta * self.xi))
    }

    pub fn with_sparsity(mut self, level: f64) -> Self {
        self.sparsity = Some(level);
        self
    }

    /// `(1+3δ)/(1-3δ)`.
    pub fn guess_factor(&self) -> f64 {
        (1.0 + 3.0 * self.delta) / (1.0 - 3.0 * self.delta)
    }
}

/// Largest `δ < 1/8` with `(1+3δ)/(1-3δ) <= α`, and `t = ⌈4αc/(εξδ)⌉`
/// (raised to at least `⌈2c/(δξ)⌉` and 1).
pub fn select_params(alpha: f64, c: usize, eps: f64) -> Result<PipelineParams> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!("α must exceed 1, got {alpha}")));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let delta = (1.0f64 / 8.0 - 1e-9).min((alpha - 1.0) / (3.0 * (alpha + 1.0)));
    let c_f = c as f64;
    let t = (4.0 * alpha * c_f / (eps * XI * delta))
        .ceil()
        .max((2.0 * c_f / (delta * XI)).ceil())
        .max(1.0) as usize;
    Ok(PipelineParams {
        eps,
        alpha,
        c,
        xi: XI,
        delta,
        t,
        sparsity: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformPhase {
    /// Returned after dropping cheap facilities.
    Pruned,
    /// Returned the best `(D, V)` guess.
    Guessed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transformed {
    pub solution: FacilitySet,
    pub cost: f64,
    pub phase: TransformPhase,
    /// Removed facilities with the cost increase each removal caused.
    pub removals: Vec<(usize, f64)>,
    pub threshold: f64,
    pub guesses: u64,
}

/// Turns a `c`-additive pseudo-solution into at most `k` facilities.
///
/// First drops, one at a time, the facility whose removal increases the cost
/// least while that increase is at most `B`. If more than `k` remain, tries
/// every `D ⊆ T'` and `V ⊆ F` with `|D| + |V| = k`, `|V| < t`, replacing
/// each `i ∈ D` by the facility of `FBall(i, δ L_i)` that best serves
/// `CBall(i, L_i/3)` given `V`, where `L_i = d(i, T' \ {i})`.
pub fn transform(inst: &Instance, pseudo: &FacilitySet, params: &PipelineParams) -> Result<Transformed> {
    let k = inst.k();
    if pseudo.len() > k + params.c {
        return Err(Error::TooManyFacilities {
            size: pseudo.len(),
            limit: k + params.c,
        });
    }
    let base_cost = inst.cost(pseudo);
    let threshold = params.removal_threshold(base_cost)?;

    let mut current: Vec<usize> = pseudo.ids().to_vec();
    let mut current_cost = base_cost;
    let mut removals = Vec::new();
    while current.len() > k {
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..current.len() {
            let rest: Vec<usize> = current.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &f)| f).collect();
            let c = inst.cost_of_ids(&rest)?;
            if best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, pos));
            }
        }
        let (c, pos) = best.expect("more than k >= 1 facilities");
        if c > current_cost + threshold {
            break;
        }
        removals.push((current.remove(pos), c - current_cost));
        current_cost = c;
    }
    if current.len() <= k {
        return Ok(Transformed {
            solution: FacilitySet::from_ids(current)?,
            cost: current_cost,
            phase: TransformPhase::Pruned,
            removals,
            threshold,
            guesses: 0,
        });
    }

    let nf = inst.n_facilities();
    let max_v = k.min(params.t.saturating_sub(1));
    let total: u128 = (0..=max_v)
        .map(|v| binomial(current.len(), k - v).saturating_mul(binomial(nf, v)))
        .fold(0u128, |acc, x| acc.saturating_add(x));
    if total > TRANSFORM_GUARD {
        return Err(Error::GuardExceeded {
            count: total,
            limit: TRANSFORM_GUARD,
        });
    }

    struct Local {
        fball: Vec<usize>,
        care: Vec<usize>,
    }
    let locals: Vec<Local> = current
        .iter()
        .map(|&i| {
            let others: Vec<usize> = current.iter().copied().filter(|&o| o != i).collect();
            let l = inst.facility_to_set(i, &others);
            Local {
                fball: inst.facility_ball(Point::Facility(i), params.delta * l),
                care: inst.client_ball(Point::Facility(i), l / 3.0),
            }
        })
        .collect();

    let nc = inst.n_clients();
    let all: Vec<usize> = (0..nf).collect();
    let positions: Vec<usize> = (0..current.len()).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut guesses = 0u64;
    let mut to_v = vec![0.0; nc];
    let mut replacement = vec![0usize; current.len()];
    let mut served = vec![0.0; nc];
    for v in 0..=max_v {
        for_each_combination(&all, v, |vset| {
            for (j, slot) in to_v.iter_mut().enumerate() {
                *slot = inst.client_to_set(j, vset);
            }
            for (pos, local) in locals.iter().enumerate() {
                let mut pick = (current[pos], f64::INFINITY);
                for &f in &local.fball {
                    let s: f64 = local.care.iter().map(|&j| inst.fc(f, j).min(to_v[j])).sum();
                    if s < pick.1 {
                        pick = (f, s);
                    }
                }
                replacement[pos] = pick.0;
            }
            for_each_combination(&positions, k - v, |dset| {
                guesses += 1;
                served.copy_from_slice(&to_v);
                for &pos in dset {
                    let f = replacement[pos];
                    for (j, slot) in served.iter_mut().enumerate() {
                        *slot = slot.min(inst.fc(f, j));
                    }
                }
                let cost: f64 = served.iter().sum();
                let better = match &best {
                    None => true,
                    Some((bc, _)) => cost <= *bc,
                };
                if better {
                    let mut ids: Vec<usize> = vset.iter().copied().chain(dset.iter().map(|&p| replacement[p])).collect();
                    ids.sort_unstable();
                    ids.dedup();
                    if best.as_ref().is_none_or(|(bc, bids)| cost < *bc || ids < *bids) {
                        best = Some((cost, ids));
                    }
                }
            });
        });
    }
    let (cost, ids) = best.expect("k >= 1 gives at least one guess");
    Ok(Transformed {
        solution: FacilitySet::from_ids(ids)?,
        cost,
        phase: TransformPhase::Guessed,
        removals,
        threshold,
        guesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::{gen_euclidean, gen_gap};
    use crate::oracle::{best_additive, brute_force};
    use crate::sparsify::density;
    use crate::tolerance::approx_le;

    #[test]
    fn delta_selection() {
        let p = select_params(3.0, 1, 1.0).unwrap();
        assert_eq!(p.delta, 1.0 / 8.0 - 1e-9);
        let p = select_params(1.2, 1, 1.0).unwrap();
        assert!((p.delta - 0.2 / 6.6).abs() < 1e-15);
        assert!(p.guess_factor() <= 1.2 + 1e-12);
        assert!(select_params(1.0, 1, 1.0).is_err());
        assert!(select_params(2.0, 1, 0.0).is_err());
    }

    #[test]
    fn t_from_closed_form() {
        let alpha = (1.0 + 3f64.sqrt() + 0.1) / 2.0;
        let p = select_params(alpha, 4, 0.5).unwrap();
        let delta = (alpha - 1.0) / (3.0 * (alpha + 1.0));
        assert!((p.delta - delta).abs() < 1e-15);
        let t = (4.0 * alpha * 4.0 / (0.5 * (1.0 / 3.0) * delta)).ceil() as usize;
        assert_eq!(p.t, t);
        assert!(p.t as f64 >= 2.0 * 4.0 / (p.delta * XI));
    }

    #[test]
    fn small_input_is_returned_unchanged() {
        let g = gen_gap(3).unwrap();
        let t = FacilitySet::new(&g, [0, 2]).unwrap();
        let params = select_params(2.0, 1, 1.0).unwrap().with_sparsity(0.0);
        let out = transform(&g, &t, &params).unwrap();
        assert_eq!(out.solution, t);
        assert_eq!(out.phase, TransformPhase::Pruned);
    }

    #[test]
    fn errors() {
        let g = gen_gap(3).unwrap();
        let t = FacilitySet::new(&g, [0, 1, 2, 3, 4]).unwrap();
        let params = select_params(2.0, 1, 1.0).unwrap().with_sparsity(0.0);
        assert!(matches!(transform(&g, &t, &params), Err(Error::TooManyFacilities { .. })));
        let unbound = select_params(2.0, 2, 1.0).unwrap();
        assert!(transform(&g, &t, &unbound).is_err());
    }

    #[test]
    fn gap_residual_bound() {
        // keep the center, two leaves and one extra leaf: c = 1
        let g = gen_gap(3).unwrap();
        let opt = brute_force(&g, 3).unwrap();
        let t = FacilitySet::new(&g, [0, 1, 2, 3]).unwrap();
        let delta = 0.1;
        let mut params = select_params(2.0, 1, 1.0).unwrap();
        params.delta = delta;
        params.t = (2.0 / (delta * XI)).ceil() as usize;
        let level = (0..5).map(|i| density(&g, i, &opt.best)).fold(0.0, f64::max);
        let params = params.with_sparsity(level);
        let out = transform(&g, &t, &params).unwrap();
        assert!(out.solution.len() <= 3);
        let b = params.removal_threshold(g.cost(&t)).unwrap();
        let bound = (g.cost(&t) + b).max(params.guess_factor() * opt.cost);
        assert!(approx_le(out.cost, bound));
        assert_eq!(out.cost, g.cost(&out.solution));
    }

    #[test]
    fn removals_respect_threshold() {
        for seed in 0..20 {
            let inst = gen_euclidean(7, 8, 3, 2, seed).unwrap();
            let pseudo = best_additive(&inst, 2).unwrap().best;
            let params = select_params(2.0, 2, 1.0).unwrap();
            let params = params.with_sparsity(inst.cost(&pseudo) / params.t as f64);
            let out = transform(&inst, &pseudo, &params).unwrap();
            assert!(out.solution.len() <= 3);
            assert!(out.removals.len() <= 2);
            for &(_, inc) in &out.removals {
                assert!(inc <= out.threshold);
            }
            let opt = brute_force(&inst, 3).unwrap().cost;
            assert!(out.cost >= opt - 1e-9);
        }
    }

    #[test]
    fn guessing_with_large_t_is_exact() {
        // a huge t makes B tiny and lets V range over every k-subset
        for seed in 0..10 {
            let inst = gen_euclidean(7, 8, 2, 2, seed).unwrap();
            let pseudo = best_additive(&inst, 1).unwrap().best;
            let mut params = select_params(2.0, 1, 1.0).unwrap();
            params.t = 1_000_000;
            let params = params.with_sparsity(0.0);
            let out = transform(&inst, &pseudo, &params).unwrap();
            let opt = brute_force(&inst, 2).unwrap();
            if out.phase == TransformPhase::Guessed {
                assert_eq!(out.cost, opt.cost);
            }
            assert!(out.cost >= opt.cost);
        }
    }
}
