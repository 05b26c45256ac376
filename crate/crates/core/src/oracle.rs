//! Exhaustive optimum over facility subsets of a fixed size.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance};

/// Largest number of subsets [`brute_force`] will examine.
pub const SUBSET_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub best: FacilitySet,
    pub cost: f64,
    pub enumerated: u64,
}

/// `C(n, r)` without overflow for the sizes we care about (saturates).
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Minimum-cost set of exactly `size` facilities; ties keep the
/// lexicographically smallest set.
pub fn brute_force(inst: &Instance, size: usize) -> Result<OracleResult> {
    let nf = inst.n_facilities();
    if size == 0 || size > nf {
        return Err(Error::InvalidParameter(format!(
            "subset size {size} must lie in 1..={nf}"
        )));
    }
    let count = binomial(nf, size);
    if count > SUBSET_GUARD {
        return Err(Error::GuardExceeded {
            count,
            limit: SUBSET_GUARD,
        });
    }

    let nc = inst.n_clients();
    let mut combo: Vec<usize> = (0..size).collect();
    // prefix[l][j] = distance of client j to combo[..l]
    let mut prefix = vec![vec![f64::INFINITY; nc]; size + 1];
    let mut dirty_from = 0;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0u64;
    loop {
        for l in dirty_from..size {
            let i = combo[l];
            let (head, tail) = prefix.split_at_mut(l + 1);
            for (j, slot) in tail[0].iter_mut().enumerate() {
                *slot = head[l][j].min(inst.fc(i, j));
            }
        }
        let cost: f64 = prefix[size].iter().sum();
        enumerated += 1;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, combo.clone()));
        }

        // next combination in lexicographic order
        let Some(pos) = (0..size).rev().find(|&p| combo[p] < nf - size + p) else {
            break;
        };
        combo[pos] += 1;
        for p in pos + 1..size {
            combo[p] = combo[p - 1] + 1;
        }
        dirty_from = pos;
    }
    let (_, ids) = best.expect("at least one subset");
    let best = FacilitySet::from_ids(ids)?;
    // recompute with the canonical summation order so callers can compare exactly
    let cost = inst.cost(&best);
    Ok(OracleResult {
        best,
        cost,
        enumerated,
    })
}

/// Optimum among `(k + c)`-facility pseudo-solutions.
pub fn best_additive(inst: &Instance, c: usize) -> Result<OracleResult> {
    brute_force(inst, inst.k() + c)
}
