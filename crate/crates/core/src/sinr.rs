//! Interference sums, the reliability predicate and the active-count pruning bounds.
//!
//! Both threshold families are evaluated in their linearized form, with the
//! jamming power divided out:
//!
//! ```text
//! storage point s:  sum_{j active} |j - s|^-gamma  <=  P_T / (P_J * delta1)
//! fence point p:    sum_{j active} |j - p|^-gamma  >=  P_T * d(p,S)^-gamma / (P_J * delta2)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, distance_to_storage, Point, WorldModel};

/// Relative slack applied to both constraint families.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Legitimate transmit power.
    pub p_t: f64,
    /// Jamming power shared by all jammers.
    pub p_j: f64,
    /// Path-loss exponent.
    pub gamma: f64,
    /// SINR a legitimate receiver needs.
    pub delta1: f64,
    /// SINR below which an eavesdropper is jammed.
    pub delta2: f64,
    /// Energy units an active jammer spends per slot.
    pub c: u32,
    /// Boundary discretization step in meters.
    pub lambda: f64,
    /// Minimum jammer clearance from either boundary in meters.
    pub epsilon: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            p_t: 10.0,
            p_j: 1.0,
            gamma: 2.0,
            delta1: 2.0,
            delta2: 0.5,
            c: 10,
            lambda: 2.0,
            epsilon: 0.5,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("p_t", self.p_t),
            ("p_j", self.p_j),
            ("gamma", self.gamma),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in reals {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.c == 0 {
            return Err(Error::Parameter("c must be a positive integer".into()));
        }
        Ok(())
    }

    /// Right-hand side of every storage constraint.
    pub fn storage_limit(&self) -> f64 {
        self.p_t / (self.p_j * self.delta1)
    }

    /// Right-hand side of the fence constraint at a point `d` meters from the storage.
    pub fn fence_requirement(&self, d: f64) -> f64 {
        self.p_t * d.powf(-self.gamma) / (self.p_j * self.delta2)
    }
}

/// Total jamming power received at `point` from the active jammers.
pub fn interference_at(
    point: Point,
    active: &[usize],
    world: &WorldModel,
    cfg: &NetworkConfig,
) -> Result<f64> {
    let mut sum = 0.0;
    for &id in active {
        let j = world.jammer(id)?;
        sum += distance(j.position, point).powf(-cfg.gamma);
    }
    Ok(cfg.p_j * sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    pub reliable: bool,
    /// `limit - lhs` of the storage constraint, minimized over storage points.
    pub worst_storage_margin: f64,
    /// `lhs - requirement` of the fence constraint, minimized over fence points.
    pub worst_fence_margin: f64,
    /// First violated boundary point in walk order, storage before fence.
    pub violating_point: Option<Point>,
}

/// Gain tables for one world and configuration. Battery changes do not
/// invalidate it; moving jammers or changing the config does.
#[derive(Debug, Clone)]
pub struct ConstraintTable {
    n: usize,
    storage_points: Vec<Point>,
    fence_points: Vec<Point>,
    /// Row-major `[point][jammer]` values of `|j - p|^-gamma`.
    storage_gain: Vec<f64>,
    fence_gain: Vec<f64>,
    storage_limit: f64,
    fence_required: Vec<f64>,
}

impl ConstraintTable {
    pub fn new(world: &WorldModel, cfg: &NetworkConfig) -> Self {
        let n = world.len();
        let gains = |points: &[Point]| {
            let mut out = Vec::with_capacity(points.len() * n);
            for p in points {
                for j in &world.jammers {
                    out.push(distance(j.position, *p).powf(-cfg.gamma));
                }
            }
            out
        };
        let storage_points = world.storage_boundary.points.clone();
        let fence_points = world.fence_boundary.points.clone();
        let fence_required = fence_points
            .iter()
            .map(|p| cfg.fence_requirement(distance_to_storage(*p, &world.storage)))
            .collect();
        Self {
            n,
            storage_gain: gains(&storage_points),
            fence_gain: gains(&fence_points),
            storage_points,
            fence_points,
            storage_limit: cfg.storage_limit(),
            fence_required,
        }
    }

    pub fn jammer_count(&self) -> usize {
        self.n
    }

    pub fn storage_points(&self) -> &[Point] {
        &self.storage_points
    }

    pub fn fence_points(&self) -> &[Point] {
        &self.fence_points
    }

    pub fn storage_limit(&self) -> f64 {
        self.storage_limit
    }

    pub fn fence_required(&self) -> &[f64] {
        &self.fence_required
    }

    pub fn storage_row(&self, s: usize) -> &[f64] {
        &self.storage_gain[s * self.n..(s + 1) * self.n]
    }

    pub fn fence_row(&self, p: usize) -> &[f64] {
        &self.fence_gain[p * self.n..(p + 1) * self.n]
    }

    fn check_ids(&self, active: &[usize]) -> Result<()> {
        match active.iter().find(|&&id| id >= self.n) {
            Some(&id) => Err(Error::UnknownJammer(id)),
            None => Ok(()),
        }
    }

    pub fn report(&self, active: &[usize]) -> Result<ReliabilityReport> {
        self.check_ids(active)?;
        let mut violating = None;
        let mut storage_margin = f64::INFINITY;
        for s in 0..self.storage_points.len() {
            let row = self.storage_row(s);
            let lhs: f64 = active.iter().map(|&j| row[j]).sum();
            let margin = self.storage_limit - lhs;
            if !storage_ok(lhs, self.storage_limit) && violating.is_none() {
                violating = Some(self.storage_points[s]);
            }
            storage_margin = storage_margin.min(margin);
        }
        let mut fence_margin = f64::INFINITY;
        for p in 0..self.fence_points.len() {
            let row = self.fence_row(p);
            let lhs: f64 = active.iter().map(|&j| row[j]).sum();
            let req = self.fence_required[p];
            if !fence_ok(lhs, req) && violating.is_none() {
                violating = Some(self.fence_points[p]);
            }
            fence_margin = fence_margin.min(lhs - req);
        }
        Ok(ReliabilityReport {
            reliable: violating.is_none(),
            worst_storage_margin: storage_margin,
            worst_fence_margin: fence_margin,
            violating_point: violating,
        })
    }

    /// Reliability with early exit. Unknown ids are an error.
    pub fn is_reliable(&self, active: &[usize]) -> Result<bool> {
        self.check_ids(active)?;
        Ok(self.storage_holds(active) && self.fence_holds(active))
    }

    pub fn storage_holds(&self, active: &[usize]) -> bool {
        (0..self.storage_points.len()).all(|s| {
            let row = self.storage_row(s);
            storage_ok(active.iter().map(|&j| row[j]).sum(), self.storage_limit)
        })
    }

    pub fn fence_holds(&self, active: &[usize]) -> bool {
        (0..self.fence_points.len()).all(|p| {
            let row = self.fence_row(p);
            fence_ok(active.iter().map(|&j| row[j]).sum(), self.fence_required[p])
        })
    }

    /// Same predicate for a bitmask over the first 64 jammers.
    pub fn is_reliable_mask(&self, mask: u64) -> bool {
        let ids = mask_ids(mask);
        self.storage_holds(&ids) && self.fence_holds(&ids)
    }
}

pub(crate) fn mask_ids(mask: u64) -> Vec<usize> {
    let mut ids = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        ids.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    ids
}

fn storage_ok(lhs: f64, limit: f64) -> bool {
    lhs <= limit * (1.0 + TOLERANCE)
}

fn fence_ok(lhs: f64, required: f64) -> bool {
    lhs >= required * (1.0 - TOLERANCE)
}

pub fn is_reliable(active: &[usize], world: &WorldModel, cfg: &NetworkConfig) -> Result<ReliabilityReport> {
    ConstraintTable::new(world, cfg).report(active)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveCountBounds {
    pub lower: usize,
    pub upper: usize,
}

impl ActiveCountBounds {
    pub fn contains(&self, k: usize) -> bool {
        self.lower <= k && k <= self.upper
    }
}

/// Necessary cardinality range for any reliable set.
///
/// Every active jammer is at most `max_j |j - s|` from a storage point and at
/// least `min_j |j - p|` from a fence point, which turns each constraint into a
/// bound on the number of active jammers. Bounds are rounded outward so they
/// stay necessary under the reliability tolerance. `upper` saturates and may
/// exceed the jammer count; `lower` may exceed `upper`.
pub fn active_count_bounds(world: &WorldModel, cfg: &NetworkConfig) -> Result<ActiveCountBounds> {
    if world.is_empty() {
        return Err(Error::Parameter("active-count bounds need at least one jammer".into()));
    }
    let limit = cfg.storage_limit();
    let upper = world
        .storage_boundary
        .points
        .iter()
        .map(|s| {
            let far = world
                .jammers
                .iter()
                .map(|j| distance(j.position, *s))
                .fold(0.0, f64::max);
            limit * far.powf(cfg.gamma)
        })
        .fold(f64::INFINITY, f64::min);
    let lower = world
        .fence_boundary
        .points
        .iter()
        .map(|p| {
            let near = world
                .jammers
                .iter()
                .map(|j| distance(j.position, *p))
                .fold(f64::INFINITY, f64::min);
            cfg.fence_requirement(distance_to_storage(*p, &world.storage)) * near.powf(cfg.gamma)
        })
        .fold(0.0, f64::max);
    // float -> int casts saturate
    Ok(ActiveCountBounds {
        lower: (lower * (1.0 - 2.0 * TOLERANCE)).ceil().max(0.0) as usize,
        upper: (upper * (1.0 + 2.0 * TOLERANCE)).floor().max(0.0) as usize,
    })
}
