//! Instance generators.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// The star instance with integrality gap `2 / (1 + 1/k)`.
///
/// Facility 0 is the center, facilities `1..=k+1` are leaves and client `j`
/// is colocated with leaf `j + 1`. Center-leaf edges have length 1, so leaves
/// are 2 apart. The LP optimum `1 + 1/k` is recorded as the LP reference.
pub fn gen_gap(k: usize) -> Result<Instance> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("gap instance needs k >= 2, got {k}")));
    }
    let nf = k + 2;
    // location of each point on the star: 0 = center, l = leaf l
    let loc = |p: usize| if p < nf { p } else { p - nf + 1 };
    let inst = Instance::from_fn(k, nf, k + 1, |p, q| {
        let (a, b) = (loc(p), loc(q));
        if a == b {
            0.0
        } else if a == 0 || b == 0 {
            1.0
        } else {
            2.0
        }
    })?;
    Ok(inst
        .with_name(format!("gap-{k}"))
        .with_lp_reference(1.0 + 1.0 / k as f64))
}

/// Uniform points in the unit cube of dimension `dim`, Euclidean distances.
/// Facilities are drawn first, then clients.
pub fn gen_euclidean(nf: usize, nc: usize, k: usize, dim: usize, seed: u64) -> Result<Instance> {
    if k == 0 || nf < k {
        return Err(Error::InvalidParameter(format!(
            "need nF >= k >= 1, got nF = {nf}, k = {k}"
        )));
    }
    if nc == 0 {
        return Err(Error::InvalidParameter("need at least one client".into()));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..nf + nc)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let inst = Instance::from_fn(k, nf, nc, |p, q| euclidean(&points[p], &points[q]))?;
    Ok(inst.with_name(format!("euclid-{nf}x{nc}-k{k}-d{dim}-s{seed}")))
}

/// `m` planar stars, 100 apart. Star `s` has a center facility and
/// `h_s ∈ 3..=max_leaves` leaf facilities evenly spaced on a circle of random
/// radius in `[0.5, 1.5)` with a random rotation; one client sits on each
/// leaf. `k = Σ (h_s - 1)`, so every star must lose a leaf or its center.
///
/// Unlike uniform random points, these instances have facility prices at
/// which the number of opened facilities jumps across `k`, which yields
/// non-degenerate bi-points.
pub fn gen_stars(m: usize, max_leaves: usize, seed: u64) -> Result<Instance> {
    if m == 0 || max_leaves < 3 {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 and max_leaves >= 3, got m = {m}, max_leaves = {max_leaves}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut facilities, mut clients, mut k) = (Vec::new(), Vec::new(), 0);
    for s in 0..m {
        let leaves = rng.gen_range(3..=max_leaves);
        let radius = rng.gen_range(0.5..1.5);
        let rotation = rng.gen_range(0.0..TAU);
        let origin = [100.0 * s as f64, 0.0];
        facilities.push(origin.to_vec());
        for l in 0..leaves {
            let theta = rotation + TAU * l as f64 / leaves as f64;
            let p = vec![origin[0] + radius * theta.cos(), origin[1] + radius * theta.sin()];
            facilities.push(p.clone());
            clients.push(p);
        }
        k += leaves - 1;
    }
    let (nf, nc) = (facilities.len(), clients.len());
    let points: Vec<Vec<f64>> = facilities.into_iter().chain(clients).collect();
    let inst = Instance::from_fn(k, nf, nc, |p, q| euclidean(&points[p], &points[q]))?;
    Ok(inst.with_name(format!("stars-m{m}-l{max_leaves}-s{seed}")))
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
