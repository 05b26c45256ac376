use crate::instance::FacilitySet;

use super::stars::StarDecomposition;
use super::{ceil_tol, Regime, RoundingOutcome};

/// Optimal solution of the star knapsack LP
/// `max Σ save_i x_i  s.t.  Σ x_i (|S_i| - 1) <= k - |F1|,  0 <= x <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackLp {
    /// `x_i` per star.
    pub x: Vec<f64>,
    pub value: f64,
    pub capacity: f64,
}

impl KnapsackLp {
    pub fn fractional_count(&self) -> usize {
        self.x.iter().filter(|&&x| x > 0.0 && x < 1.0).count()
    }
}

/// Greedy by saving-to-weight ratio. Stars with at most one leaf have
/// nonpositive weight and are taken outright, so at most one `x_i` ends up
/// strictly between 0 and 1.
pub fn solve_knapsack_lp(sd: &StarDecomposition, k: usize) -> KnapsackLp {
    let save = sd.star_savings();
    let capacity = k as f64 - sd.n_centers() as f64;
    let mut x = vec![0.0; sd.n_centers()];
    let mut room = capacity;
    let mut items = Vec::new();
    for (s, star) in sd.stars.iter().enumerate() {
        if star.leaves.len() <= 1 {
            x[s] = 1.0;
            room -= star.leaves.len() as f64 - 1.0;
        } else {
            items.push(s);
        }
    }
    items.sort_by(|&p, &q| {
        let rp = save[p] / (sd.stars[p].leaves.len() - 1) as f64;
        let rq = save[q] / (sd.stars[q].leaves.len() - 1) as f64;
        rq.total_cmp(&rp).then(p.cmp(&q))
    });
    for s in items {
        let w = (sd.stars[s].leaves.len() - 1) as f64;
        if room <= 0.0 {
            break;
        }
        if w <= room {
            x[s] = 1.0;
            room -= w;
        } else {
            x[s] = room / w;
            room = 0.0;
        }
    }
    let value = x.iter().zip(&save).map(|(x, s)| x * s).sum();
    KnapsackLp { x, value, capacity }
}

/// Opens all leaves of stars with `x_i = 1`, the centers of stars with
/// `x_i = 0`, and for the fractional star its center plus `⌈x_i |S_i|⌉`
/// leaves of largest saving.
pub fn round_knapsack(sd: &StarDecomposition, k: usize) -> RoundingOutcome {
    round_knapsack_with_lp(sd, k).0
}

/// [`round_knapsack`] together with the LP it rounded.
pub fn round_knapsack_with_lp(sd: &StarDecomposition, k: usize) -> (RoundingOutcome, KnapsackLp) {
    let lp = solve_knapsack_lp(sd, k);
    let mut open = Vec::new();
    for (star, &x) in sd.stars.iter().zip(&lp.x) {
        if x >= 1.0 {
            open.extend_from_slice(&star.leaves);
        } else if x <= 0.0 {
            open.push(star.center);
        } else {
            open.push(star.center);
            let take = ceil_tol(x * star.leaves.len() as f64).min(star.leaves.len());
            let mut leaves: Vec<(f64, usize)> =
                star.leaves.iter().map(|&l| (sd.leaf_saving(l), l)).collect();
            leaves.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
            open.extend(leaves.iter().take(take).map(|&(_, l)| l));
        }
    }
    let outcome = RoundingOutcome {
        open: FacilitySet::from_ids(open).expect("every star contributes a facility"),
        regime: Regime::Knapsack,
        additive_budget: 2,
        seed: 0,
        trials: 1,
    };
    (outcome, lp)
}
