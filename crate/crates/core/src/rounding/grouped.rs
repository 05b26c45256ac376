use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::FacilitySet;

use super::stars::StarDecomposition;
use super::{ceil_tol, floor_tol, Regime, RoundingOutcome};

/// Stars with at least this many leaves are large: `2 / (a b η)`.
pub fn large_star_threshold(a: f64, b: f64, eta: f64) -> f64 {
    2.0 / (a * b * eta)
}

/// `3 ⌈2 / (a b η)⌉`, the number of facilities grouped rounding may open beyond `k`.
pub fn grouped_budget(a: f64, b: f64, eta: f64) -> usize {
    3 * ceil_tol(large_star_threshold(a, b, eta))
}

/// Randomized rounding over groups of equal-size stars.
///
/// Large stars keep their center and `⌊b(|S_i| - 1)⌋` random leaves. Small
/// stars are grouped by leaf count; within a group of `m` stars a random
/// prefix of `min(⌈am⌉ + 1, m)` stars keeps its center, the rest open all
/// their leaves, and the prefix receives extra random leaves so the expected
/// number of open leaves in the group is `b·h·m`.
pub fn round_grouped(sd: &StarDecomposition, eta: f64, seed: u64) -> Result<RoundingOutcome> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidParameter(format!("η must be positive, got {eta}")));
    }
    let (a, b) = (sd.a, sd.b);
    if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grouped rounding needs a, b in (0, 1), got a = {a}, b = {b}"
        )));
    }
    let threshold = large_star_threshold(a, b, eta);
    let n_groups = ceil_tol(threshold);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut open = Vec::new();

    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_groups];
    for (s, star) in sd.stars.iter().enumerate() {
        let size = star.leaves.len();
        if size as f64 >= threshold {
            open.push(star.center);
            let take = floor_tol(b * (size as f64 - 1.0)).min(size);
            open.extend(index::sample(&mut rng, size, take).into_iter().map(|p| star.leaves[p]));
        } else {
            groups[size].push(s);
        }
    }

    for (h, group) in groups.iter_mut().enumerate() {
        if group.is_empty() {
            continue;
        }
        let m = group.len();
        group.shuffle(&mut rng);
        let with_center = (ceil_tol(a * m as f64) + 1).min(m);
        for &s in &group[with_center..] {
            open.extend_from_slice(&sd.stars[s].leaves);
        }
        let mut pool = Vec::new();
        for &s in &group[..with_center] {
            open.push(sd.stars[s].center);
            pool.extend_from_slice(&sd.stars[s].leaves);
        }
        let already = ((m - with_center) * h) as f64;
        let extra = (b * h as f64 * m as f64 - already).clamp(0.0, pool.len() as f64);
        let base = extra.floor();
        let draw: f64 = rng.gen();
        let count = (base as usize + usize::from(draw < extra - base)).min(pool.len());
        open.extend(index::sample(&mut rng, pool.len(), count).into_iter().map(|p| pool[p]));
    }

    Ok(RoundingOutcome {
        open: FacilitySet::from_ids(open).expect("every star keeps its center or its leaves"),
        regime: Regime::GroupedRandom,
        additive_budget: 3 * n_groups,
        seed,
        trials: 1,
    })
}
