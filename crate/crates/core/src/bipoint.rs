//! Bi-point fractional solutions from Lagrangian facility location.
//!
//! [`lmp_solve`] runs primal-dual ascent for uncapacitated facility location
//! with a uniform opening price `λ`, followed by conflict pruning. The
//! resulting facility set `S` and duals `α` satisfy the Lagrangian multiplier
//! preserving inequality `cost(S) + 3λ|S| <= 3 Σ_j α_j`. [`bipoint_solve`]
//! binary searches `λ` until it brackets `k` and combines the two bracketing
//! sets into `a·S1 + b·S2` with `a|S1| + b|S2| = k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance};

/// Upper bound on binary search probes.
pub const MAX_SEARCH_ITERATIONS: usize = 64;

/// Dual variables and bookkeeping of one ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda: f64,
    /// `α_j` per client.
    pub alpha: Vec<f64>,
    /// Tentatively open facilities with the time they became fully paid, in opening order.
    pub tentatively_open: Vec<(usize, f64)>,
    /// Facility that froze each client.
    pub witness: Vec<usize>,
}

impl DualState {
    /// Clipped payment `max(0, α_j - d(i,j))` of client `j` towards facility `i`.
    pub fn contribution(&self, inst: &Instance, facility: usize, client: usize) -> f64 {
        (self.alpha[client] - inst.fc(facility, client)).max(0.0)
    }

    /// Total payment received by a facility.
    pub fn payment(&self, inst: &Instance, facility: usize) -> f64 {
        (0..inst.n_clients())
            .map(|j| self.contribution(inst, facility, j))
            .sum()
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha.iter().sum()
    }
}

/// Time at which a closed facility becomes fully paid, or `None` if it never does.
///
/// `frozen_pay` is the fixed contribution of frozen clients and `unfrozen`
/// the ascending distances to still-growing clients.
fn opening_time(lambda: f64, now: f64, frozen_pay: f64, unfrozen: &[f64]) -> Option<f64> {
    let need = lambda - frozen_pay;
    let pay_now: f64 = unfrozen.iter().map(|&d| (now - d).max(0.0)).sum();
    if pay_now >= need {
        return Some(now);
    }
    let mut sum = 0.0;
    for (m, &d) in unfrozen.iter().enumerate() {
        sum += d;
        let t = (need + sum) / (m + 1) as f64;
        let next = unfrozen.get(m + 1).copied().unwrap_or(f64::INFINITY);
        if t <= next {
            return Some(t.max(now));
        }
    }
    None
}

/// Dual ascent with uniform facility price `λ`, then maximal independent set
/// pruning of the conflict graph by ascending facility index.
pub fn lmp_solve(inst: &Instance, lambda: f64) -> Result<(FacilitySet, DualState)> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "facility price must be a finite value >= 0, got {lambda}"
        )));
    }
    let nf = inst.n_facilities();
    let nc = inst.n_clients();

    // clients of each facility sorted by (distance, index)
    let by_distance: Vec<Vec<usize>> = (0..nf)
        .map(|i| {
            let mut cs: Vec<usize> = (0..nc).collect();
            cs.sort_by(|&a, &b| inst.fc(i, a).total_cmp(&inst.fc(i, b)).then(a.cmp(&b)));
            cs
        })
        .collect();

    let mut alpha = vec![0.0; nc];
    let mut frozen = vec![false; nc];
    let mut witness = vec![usize::MAX; nc];
    let mut is_open = vec![false; nf];
    let mut opened: Vec<(usize, f64)> = Vec::new();
    let mut remaining = nc;
    let mut now = 0.0_f64;
    let mut scratch = Vec::with_capacity(nc);

    while remaining > 0 {
        // earliest event: a facility gets paid, or a client reaches an open facility
        let mut open_times = vec![None; nf];
        let mut next = f64::INFINITY;
        for i in 0..nf {
            if is_open[i] {
                for &j in &by_distance[i] {
                    if !frozen[j] {
                        next = next.min(inst.fc(i, j).max(now));
                        break;
                    }
                }
                continue;
            }
            scratch.clear();
            let mut frozen_pay = 0.0;
            for &j in &by_distance[i] {
                if frozen[j] {
                    frozen_pay += (alpha[j] - inst.fc(i, j)).max(0.0);
                } else {
                    scratch.push(inst.fc(i, j));
                }
            }
            if let Some(t) = opening_time(lambda, now, frozen_pay, &scratch) {
                open_times[i] = Some(t);
                next = next.min(t);
            }
        }
        debug_assert!(next.is_finite(), "ascent stalled with unfrozen clients");
        now = next;
        for j in 0..nc {
            if !frozen[j] {
                alpha[j] = now;
            }
        }
        let eps = 1e-12 * now.abs().max(1.0);
        for i in 0..nf {
            if let Some(t) = open_times[i] {
                if t <= now + eps {
                    is_open[i] = true;
                    opened.push((i, now));
                }
            }
        }
        for j in 0..nc {
            if frozen[j] {
                continue;
            }
            // first facility in opening order that is tight for j
            if let Some(&(i, _)) = opened.iter().find(|&&(i, _)| inst.fc(i, j) <= now) {
                frozen[j] = true;
                witness[j] = i;
                remaining -= 1;
            }
        }
    }

    let state = DualState {
        lambda,
        alpha,
        tentatively_open: opened,
        witness,
    };

    let mut candidates: Vec<usize> = state.tentatively_open.iter().map(|&(i, _)| i).collect();
    candidates.sort_unstable();
    let mut chosen: Vec<usize> = Vec::new();
    for i in candidates {
        let conflicts = chosen.iter().any(|&o| {
            (0..nc).any(|j| state.alpha[j] > inst.fc(i, j) && state.alpha[j] > inst.fc(o, j))
        });
        if !conflicts {
            chosen.push(i);
        }
    }
    Ok((FacilitySet::from_ids(chosen)?, state))
}

/// One probe of the price search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub lambda: f64,
    pub opened: usize,
}

/// `a·S1 + b·S2` with `|S1| <= k < |S2|` (or `b = 0` when degenerate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiPoint {
    pub s1: FacilitySet,
    pub s2: FacilitySet,
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
    /// Prices that produced `s1` and `s2`.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Every `(λ, |open|)` probed, in search order.
    #[serde(skip)]
    pub trace: Vec<Probe>,
}

impl BiPoint {
    fn degenerate(inst: &Instance, s: FacilitySet, lambda: f64, trace: Vec<Probe>) -> Self {
        let d = inst.cost(&s);
        BiPoint {
            s2: s.clone(),
            s1: s,
            a: 1.0,
            b: 0.0,
            d1: d,
            d2: d,
            lambda1: lambda,
            lambda2: lambda,
            trace,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.b == 0.0
    }

    /// `a·d1 + b·d2`.
    pub fn fractional_cost(&self) -> f64 {
        self.a * self.d1 + self.b * self.d2
    }
}

/// Free-function form of [`BiPoint::fractional_cost`].
pub fn fractional_cost(bp: &BiPoint) -> f64 {
    bp.fractional_cost()
}

/// Searches the facility price until the opened counts bracket `k`.
pub fn bipoint_solve(inst: &Instance) -> Result<BiPoint> {
    let k = inst.k();
    if inst.n_facilities() <= k {
        return Ok(BiPoint::degenerate(inst, FacilitySet::all(inst), 0.0, Vec::new()));
    }
    let mut trace = Vec::new();
    let probe = |lambda: f64, trace: &mut Vec<Probe>| -> Result<FacilitySet> {
        let (open, _) = lmp_solve(inst, lambda)?;
        trace.push(Probe {
            lambda,
            opened: open.len(),
        });
        Ok(open)
    };

    let mut lo = 0.0;
    let mut lo_set = probe(lo, &mut trace)?;
    if lo_set.len() == k {
        return Ok(BiPoint::degenerate(inst, lo_set, lo, trace));
    }
    if lo_set.len() < k {
        // nothing to bracket: even free facilities do not reach k
        return Ok(BiPoint::degenerate(inst, lo_set, lo, trace));
    }

    let mut hi = inst.n_clients() as f64 * inst.max_distance();
    let mut hi_set = probe(hi, &mut trace)?;
    let mut widen = 0;
    while hi_set.len() > k {
        widen += 1;
        if widen > 64 {
            return Err(Error::InvalidInstance(
                "facility price search could not reach k open facilities".into(),
            ));
        }
        hi = if hi > 0.0 { hi * 2.0 } else { 1.0 };
        hi_set = probe(hi, &mut trace)?;
    }
    if hi_set.len() == k {
        return Ok(BiPoint::degenerate(inst, hi_set, hi, trace));
    }

    for _ in 0..MAX_SEARCH_ITERATIONS {
        if hi - lo <= 1e-9 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let set = probe(mid, &mut trace)?;
        match set.len().cmp(&k) {
            std::cmp::Ordering::Equal => return Ok(BiPoint::degenerate(inst, set, mid, trace)),
            std::cmp::Ordering::Greater => {
                lo = mid;
                lo_set = set;
            }
            std::cmp::Ordering::Less => {
                hi = mid;
                hi_set = set;
            }
        }
    }

    let (n1, n2) = (hi_set.len() as f64, lo_set.len() as f64);
    let a = (n2 - k as f64) / (n2 - n1);
    let b = 1.0 - a;
    Ok(BiPoint {
        d1: inst.cost(&hi_set),
        d2: inst.cost(&lo_set),
        s1: hi_set,
        s2: lo_set,
        a,
        b,
        lambda1: hi,
        lambda2: lo,
        trace,
    })
}
