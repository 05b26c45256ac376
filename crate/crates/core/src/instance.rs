//! Problem representation: points, distances, facility sets, costs and balls.
//!
//! An [`Instance`] stores one dense distance matrix over all points. Facilities
//! occupy point indices `0..n_facilities` and clients follow them, so the
//! facility `i` is point `i` and the client `j` is point `n_facilities + j`.
//! Facilities and clients may be colocated; identity is by index only.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A point of an instance, addressed by its side and its index on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Point {
    Facility(usize),
    Client(usize),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Facility(i) => write!(f, "f{i}"),
            Point::Client(j) => write!(f, "c{j}"),
        }
    }
}

/// Which side of the instance a ball query collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Facility,
    Client,
}

/// `{p on side : d(center, p) < radius}`.
#[derive(Debug, Clone, Copy)]
pub struct BallQuery {
    pub center: Point,
    pub radius: f64,
    pub side: Side,
}

/// A metric k-median instance `(k, F, C, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    k: usize,
    n_facilities: usize,
    n_clients: usize,
    dist: Vec<f64>,
    name: String,
    lp_reference: Option<f64>,
}

impl Instance {
    /// Builds an instance from a row-major `(nF + nC)²` matrix, facilities first.
    ///
    /// Only structural properties are checked here (sizes, `1 <= k <= nF`,
    /// `nC >= 1`, finite entries). Metric properties are reported by
    /// [`Instance::validate`].
    pub fn from_matrix(k: usize, n_facilities: usize, n_clients: usize, dist: Vec<f64>) -> Result<Self> {
        if n_facilities == 0 {
            return Err(Error::InvalidInstance("no facilities".into()));
        }
        if n_clients == 0 {
            return Err(Error::InvalidInstance("no clients".into()));
        }
        if k == 0 || k > n_facilities {
            return Err(Error::InvalidInstance(format!(
                "k = {k} must lie in 1..={n_facilities}"
            )));
        }
        let n = n_facilities + n_clients;
        if dist.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        if let Some(pos) = dist.iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "non-finite distance between points {} and {}",
                pos / n,
                pos % n
            )));
        }
        Ok(Instance {
            k,
            n_facilities,
            n_clients,
            dist,
            name: String::new(),
            lp_reference: None,
        })
    }

    /// Builds an instance with distances given by a function of point indices.
    pub fn from_fn(
        k: usize,
        n_facilities: usize,
        n_clients: usize,
        mut d: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let n = n_facilities + n_clients;
        let mut dist = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                dist.push(if p == q { 0.0 } else { d(p, q) });
            }
        }
        Self::from_matrix(k, n_facilities, n_clients, dist)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches a known optimum of the LP relaxation (recorded by generators).
    pub fn with_lp_reference(mut self, value: f64) -> Self {
        self.lp_reference = Some(value);
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_facilities(&self) -> usize {
        self.n_facilities
    }

    pub fn n_clients(&self) -> usize {
        self.n_clients
    }

    pub fn n_points(&self) -> usize {
        self.n_facilities + self.n_clients
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lp_reference(&self) -> Option<f64> {
        self.lp_reference
    }

    /// Row-major distance matrix over all points.
    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn point_index(&self, p: Point) -> usize {
        match p {
            Point::Facility(i) => i,
            Point::Client(j) => self.n_facilities + j,
        }
    }

    fn check_point(&self, p: Point) -> Result<()> {
        match p {
            Point::Facility(i) if i >= self.n_facilities => Err(Error::UnknownPoint {
                side: "facility",
                id: i,
                count: self.n_facilities,
            }),
            Point::Client(j) if j >= self.n_clients => Err(Error::UnknownPoint {
                side: "client",
                id: j,
                count: self.n_clients,
            }),
            _ => Ok(()),
        }
    }

    /// Distance between two raw point indices.
    #[inline]
    pub fn d(&self, p: usize, q: usize) -> f64 {
        self.dist[p * self.n_points() + q]
    }

    #[inline]
    pub fn dist(&self, p: Point, q: Point) -> f64 {
        self.d(self.point_index(p), self.point_index(q))
    }

    /// Facility-client distance.
    #[inline]
    pub fn fc(&self, facility: usize, client: usize) -> f64 {
        self.d(facility, self.n_facilities + client)
    }

    /// Facility-facility distance.
    #[inline]
    pub fn ff(&self, a: usize, b: usize) -> f64 {
        self.d(a, b)
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Nearest open facility to `client`; ties go to the smallest facility index.
    pub fn nearest(&self, client: usize, open: &FacilitySet) -> Result<(usize, f64)> {
        self.check_point(Point::Client(client))?;
        Ok(self.nearest_in(client, open.ids()))
    }

    /// Nearest facility of a nonempty id slice (ties: first smallest index).
    pub(crate) fn nearest_in(&self, client: usize, open: &[usize]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for &i in open {
            let d = self.fc(i, client);
            if d < best.1 || (d == best.1 && i < best.0) {
                best = (i, d);
            }
        }
        best
    }

    /// Distance from a client to an id set; `+inf` for the empty set.
    pub(crate) fn client_to_set(&self, client: usize, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.fc(i, client)).fold(f64::INFINITY, f64::min)
    }

    /// Distance from a facility to an id set; `+inf` for the empty set.
    pub(crate) fn facility_to_set(&self, facility: usize, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.ff(facility, i)).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_j min_{i ∈ open} d(j, i)`.
    pub fn cost(&self, open: &FacilitySet) -> f64 {
        self.cost_of_ids(open.ids())
            .expect("facility sets are nonempty by construction")
    }

    /// Cost of an arbitrary id slice. Fails on an empty slice.
    pub fn cost_of_ids(&self, open: &[usize]) -> Result<f64> {
        if open.is_empty() {
            return Err(Error::EmptyFacilitySet);
        }
        Ok((0..self.n_clients)
            .map(|j| self.client_to_set(j, open))
            .sum())
    }

    /// Points on the requested side strictly within `radius` of the center.
    pub fn ball(&self, q: BallQuery) -> Result<Vec<usize>> {
        self.check_point(q.center)?;
        let c = self.point_index(q.center);
        Ok(match q.side {
            Side::Facility => (0..self.n_facilities)
                .filter(|&i| self.d(c, i) < q.radius)
                .collect(),
            Side::Client => (0..self.n_clients)
                .filter(|&j| self.d(c, self.n_facilities + j) < q.radius)
                .collect(),
        })
    }

    pub fn facility_ball(&self, center: Point, radius: f64) -> Vec<usize> {
        self.ball(BallQuery {
            center,
            radius,
            side: Side::Facility,
        })
        .expect("center belongs to the instance")
    }

    pub fn client_ball(&self, center: Point, radius: f64) -> Vec<usize> {
        self.ball(BallQuery {
            center,
            radius,
            side: Side::Client,
        })
        .expect("center belongs to the instance")
    }

    /// Sub-instance keeping only the listed facilities (in the given order) and
    /// all clients. `k` is lowered to the number of kept facilities if needed.
    pub fn restrict_facilities(&self, keep: &[usize]) -> Result<Instance> {
        if keep.is_empty() {
            return Err(Error::InvalidInstance("residual has no facilities".into()));
        }
        for &i in keep {
            self.check_point(Point::Facility(i))?;
        }
        let nf = keep.len();
        let map = |p: usize| if p < nf { keep[p] } else { self.n_facilities + (p - nf) };
        let mut inst = Instance::from_fn(self.k.min(nf), nf, self.n_clients, |p, q| {
            self.d(map(p), map(q))
        })?;
        inst.name = self.name.clone();
        Ok(inst)
    }

    /// Lists every violated metric invariant.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n_points();
        let mut violations = Vec::new();
        for p in 0..n {
            if self.d(p, p) != 0.0 {
                violations.push(Violation::NonzeroSelfDistance {
                    point: self.point_of(p),
                    value: self.d(p, p),
                });
            }
            for q in 0..n {
                let d = self.d(p, q);
                if d < 0.0 {
                    violations.push(Violation::Negative {
                        p: self.point_of(p),
                        q: self.point_of(q),
                        value: d,
                    });
                }
                if q > p && d != self.d(q, p) {
                    violations.push(Violation::Asymmetric {
                        p: self.point_of(p),
                        q: self.point_of(q),
                        forward: d,
                        backward: self.d(q, p),
                    });
                }
            }
        }
        let slack = 1e-9 * self.max_distance();
        let mut worst: Option<(f64, usize, usize, usize)> = None;
        for r in 0..n {
            for p in 0..n {
                let dpr = self.d(p, r);
                for q in 0..n {
                    let excess = self.d(p, q) - (dpr + self.d(r, q));
                    if excess > slack && worst.is_none_or(|w| excess > w.0) {
                        worst = Some((excess, p, q, r));
                    }
                }
            }
        }
        if let Some((excess, p, q, r)) = worst {
            violations.push(Violation::Triangle {
                p: self.point_of(p),
                q: self.point_of(q),
                via: self.point_of(r),
                excess,
            });
        }
        ValidationReport { violations }
    }

    fn point_of(&self, index: usize) -> Point {
        if index < self.n_facilities {
            Point::Facility(index)
        } else {
            Point::Client(index - self.n_facilities)
        }
    }
}

/// A single failed metric check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    NonzeroSelfDistance { point: Point, value: f64 },
    Negative { p: Point, q: Point, value: f64 },
    Asymmetric { p: Point, q: Point, forward: f64, backward: f64 },
    /// The worst triple: `d(p,q) - d(p,via) - d(via,q) = excess`.
    Triangle { p: Point, q: Point, via: Point, excess: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroSelfDistance { point, value } => {
                write!(f, "d({point},{point}) = {value}, expected 0")
            }
            Violation::Negative { p, q, value } => write!(f, "negative distance d({p},{q}) = {value}"),
            Violation::Asymmetric {
                p,
                q,
                forward,
                backward,
            } => write!(f, "asymmetric: d({p},{q}) = {forward} but d({q},{p}) = {backward}"),
            Violation::Triangle { p, q, via, excess } => write!(
                f,
                "triangle inequality violated: d({p},{q}) exceeds d({p},{via}) + d({via},{q}) by {excess}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_asymmetry(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Asymmetric { .. } | Violation::NonzeroSelfDistance { .. } | Violation::Negative { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Whether a facility set is a true solution or a `c`-additive pseudo-solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Solution,
    Additive(usize),
}

/// A nonempty set of open facilities, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FacilitySet(Vec<usize>);

impl FacilitySet {
    pub fn new(inst: &Instance, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set = Self::from_ids(ids)?;
        if let Some(&last) = set.0.last() {
            inst.check_point(Point::Facility(last))?;
        }
        Ok(set)
    }

    /// Builds a set without checking membership in an instance.
    pub(crate) fn from_ids(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptyFacilitySet);
        }
        Ok(FacilitySet(v))
    }

    /// Every facility of the instance.
    pub fn all(inst: &Instance) -> Self {
        FacilitySet((0..inst.n_facilities()).collect())
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn kind(&self, k: usize) -> SetKind {
        if self.0.len() <= k {
            SetKind::Solution
        } else {
            SetKind::Additive(self.0.len() - k)
        }
    }

    /// Renumbers ids through `map` (e.g. from a sub-instance back to its parent).
    pub(crate) fn mapped(&self, map: &[usize]) -> Self {
        FacilitySet::from_ids(self.0.iter().map(|&i| map[i])).expect("nonempty")
    }
}

impl fmt::Display for FacilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "f{i}")?;
        }
        write!(f, "}}")
    }
}
