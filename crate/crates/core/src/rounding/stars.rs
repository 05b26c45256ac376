use crate::bipoint::BiPoint;
use crate::error::{Error, Result};
use crate::instance::{FacilitySet, Instance};

/// Per-client view of a bi-point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClientStar {
    /// Nearest facility of `F1`.
    pub i1: usize,
    /// Nearest facility of `F2`.
    pub i2: usize,
    pub d1: f64,
    pub d2: f64,
}

/// One star: a center of `F1` and the leaves of `F2` mapped to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

/// The stars of a bi-point `a·F1 + b·F2`.
///
/// Every leaf `i' ∈ F2` hangs off its nearest center `π(i') ∈ F1` (ties to
/// the smallest index). A client `j` whose `i2(j)` is a leaf of star `i`
/// satisfies `d(j, i) <= d1(j) + 2·d2(j)`, so keeping either the center or
/// all leaves of every star open bounds every connection.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    /// `(leaf, star index)` for every facility of `F2`, in id order.
    pub pi: Vec<(usize, usize)>,
    pub clients: Vec<ClientStar>,
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
    /// Star index owning each client through `i2(j)`.
    pub client_star: Vec<usize>,
}

impl StarDecomposition {
    pub fn centers(&self) -> impl Iterator<Item = usize> + '_ {
        self.stars.iter().map(|s| s.center)
    }

    pub fn n_centers(&self) -> usize {
        self.stars.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.stars.iter().map(|s| s.leaves.len()).sum()
    }

    /// `π(leaf)`, the center a leaf of `F2` hangs off.
    pub fn center_of(&self, leaf: usize) -> Option<usize> {
        self.pi.iter().find(|&&(l, _)| l == leaf).map(|&(_, s)| self.stars[s].center)
    }

    /// `Σ_{j : i2(j) ∈ S} (d1(j) + d2(j))` per star.
    pub fn star_savings(&self) -> Vec<f64> {
        let mut save = vec![0.0; self.stars.len()];
        for (c, &s) in self.clients.iter().zip(&self.client_star) {
            save[s] += c.d1 + c.d2;
        }
        save
    }

    /// `Σ_{j : i2(j) = leaf} (d1(j) + d2(j))` per facility id.
    pub(crate) fn leaf_saving(&self, leaf: usize) -> f64 {
        self.clients
            .iter()
            .filter(|c| c.i2 == leaf)
            .map(|c| c.d1 + c.d2)
            .sum()
    }

    /// Whether every star whose center is closed has all of its leaves open.
    pub fn star_closed(&self, open: &FacilitySet) -> bool {
        self.stars
            .iter()
            .all(|s| open.contains(s.center) || s.leaves.iter().all(|&l| open.contains(l)))
    }
}

/// Maps `F2` onto its nearest `F1` centers and records `(i1, i2, d1, d2)` per client.
pub fn build_stars(inst: &Instance, bp: &BiPoint) -> Result<StarDecomposition> {
    if bp.is_degenerate() || bp.s2.len() <= inst.k() || bp.s1.len() > inst.k() {
        return Err(Error::DegenerateBiPoint);
    }
    let f1 = bp.s1.ids();
    let mut stars: Vec<Star> = f1
        .iter()
        .map(|&center| Star {
            center,
            leaves: Vec::new(),
        })
        .collect();
    let mut pi = Vec::with_capacity(bp.s2.len());
    for &leaf in bp.s2.ids() {
        let mut best = (0, f64::INFINITY);
        for (s, &center) in f1.iter().enumerate() {
            let d = inst.ff(leaf, center);
            if d < best.1 {
                best = (s, d);
            }
        }
        stars[best.0].leaves.push(leaf);
        pi.push((leaf, best.0));
    }

    let mut clients = Vec::with_capacity(inst.n_clients());
    let mut client_star = Vec::with_capacity(inst.n_clients());
    for j in 0..inst.n_clients() {
        let (i1, d1) = inst.nearest_in(j, f1);
        let (i2, d2) = inst.nearest_in(j, bp.s2.ids());
        let star = pi.iter().find(|&&(l, _)| l == i2).expect("i2 is in F2").1;
        clients.push(ClientStar { i1, i2, d1, d2 });
        client_star.push(star);
    }
    Ok(StarDecomposition {
        stars,
        pi,
        clients,
        a: bp.a,
        b: bp.b,
        d1: bp.d1,
        d2: bp.d2,
        client_star,
    })
}
