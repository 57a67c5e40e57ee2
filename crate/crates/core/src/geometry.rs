//! Storage/fence world: axis-aligned rectangles, boundary discretization,
//! distances and seeded jammer deployment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{Jammer, JammerKind};
use crate::error::{Error, Result};

/// Edge lengths within this many steps of an integer multiple are treated as exact.
const STEP_SNAP: f64 = 1e-9;

/// Rejection sampling gives up after `ATTEMPTS_PER_JAMMER * count + ATTEMPTS_BASE` draws.
const ATTEMPTS_PER_JAMMER: usize = 1000;
const ATTEMPTS_BASE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        let rect = Self {
            min_x,
            min_y,
            max_x,
            max_y,
        };
        rect.validate()?;
        Ok(rect)
    }

    /// Square of side `side` centered on `center`.
    pub fn centered_square(center: Point, side: f64) -> Result<Self> {
        let h = side / 2.0;
        Self::new(center.x - h, center.y - h, center.x + h, center.y + h)
    }

    pub fn validate(&self) -> Result<()> {
        let coords = [self.min_x, self.min_y, self.max_x, self.max_y];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("non-finite rectangle {self:?}")));
        }
        if self.min_x >= self.max_x || self.min_y >= self.max_y {
            return Err(Error::Parameter(format!("degenerate rectangle {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(
            (self.min_x + self.max_x) / 2.0,
            (self.min_y + self.max_y) / 2.0,
        )
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// `other` lies in the open interior of `self`.
    pub fn strictly_contains_rect(&self, other: &Rect) -> bool {
        other.min_x > self.min_x
            && other.min_y > self.min_y
            && other.max_x < self.max_x
            && other.max_y < self.max_y
    }

    /// Corners in boundary-walk order: counter-clockwise from (min_x, min_y).
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.min_x, self.min_y),
            Point::new(self.max_x, self.min_y),
            Point::new(self.max_x, self.max_y),
            Point::new(self.min_x, self.max_y),
        ]
    }

    /// Distance from a point to the rectangle's boundary, for points inside or outside.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        if self.contains(p) {
            let dx = (p.x - self.min_x).min(self.max_x - p.x);
            let dy = (p.y - self.min_y).min(self.max_y - p.y);
            dx.min(dy)
        } else {
            let cx = p.x.clamp(self.min_x, self.max_x);
            let cy = p.y.clamp(self.min_y, self.max_y);
            distance(p, Point::new(cx, cy))
        }
    }
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Minimum distance from `p` to the storage boundary, `d(p, S)`.
///
/// Callers pass points outside (or on) the storage, where this is the usual
/// clamp distance to the rectangle.
pub fn distance_to_storage(p: Point, storage: &Rect) -> f64 {
    storage.distance_to_boundary(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedBoundary {
    pub points: Vec<Point>,
    pub step: f64,
}

impl DiscretizedBoundary {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Walks the four edges counter-clockwise from the lower-left corner, emitting
/// the start corner of each edge and then a point every `step` meters. An edge
/// that is not a multiple of `step` ends with a shorter segment; its far
/// corner is emitted once, as the start of the next edge.
pub fn discretize_boundary(rect: &Rect, step: f64) -> Result<DiscretizedBoundary> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Parameter(format!(
            "discretization step must be positive, got {step}"
        )));
    }
    rect.validate()?;
    let corners = rect.corners();
    let mut points = Vec::new();
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let len = distance(a, b);
        let segments = ((len / step) - STEP_SNAP).ceil().max(1.0) as usize;
        points.push(a);
        for i in 1..segments {
            let t = (i as f64 * step) / len;
            points.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    Ok(DiscretizedBoundary { points, step })
}

/// The storage/fence world with its discretized boundaries and deployed jammers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldModel {
    pub storage: Rect,
    pub fence: Rect,
    pub storage_boundary: DiscretizedBoundary,
    pub fence_boundary: DiscretizedBoundary,
    pub jammers: Vec<Jammer>,
}

impl WorldModel {
    pub fn new(storage: Rect, fence: Rect, step: f64) -> Result<Self> {
        storage.validate()?;
        fence.validate()?;
        if !fence.strictly_contains_rect(&storage) {
            return Err(Error::Parameter(
                "storage must lie strictly inside the fence".into(),
            ));
        }
        Ok(Self {
            storage_boundary: discretize_boundary(&storage, step)?,
            fence_boundary: discretize_boundary(&fence, step)?,
            storage,
            fence,
            jammers: Vec::new(),
        })
    }

    /// Replaces the jammer list. Ids must equal list positions, every jammer
    /// must sit in `F \ S`, and batteries must respect capacities.
    pub fn with_jammers(mut self, jammers: Vec<Jammer>) -> Result<Self> {
        for (i, j) in jammers.iter().enumerate() {
            if j.id != i {
                return Err(Error::Parameter(format!(
                    "jammer at index {i} has id {}; ids must be 0..n in order",
                    j.id
                )));
            }
            if !self.fence.contains(j.position) || self.storage.contains(j.position) {
                return Err(Error::Parameter(format!(
                    "jammer {i} at ({}, {}) is not in F \\ S",
                    j.position.x, j.position.y
                )));
            }
            j.validate()?;
        }
        self.jammers = jammers;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.jammers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jammers.is_empty()
    }

    pub fn jammer(&self, id: usize) -> Result<&Jammer> {
        self.jammers.get(id).ok_or(Error::UnknownJammer(id))
    }

    /// Smallest distance from any jammer to either boundary.
    pub fn min_clearance(&self) -> Option<f64> {
        self.jammers
            .iter()
            .map(|j| clearance(j.position, &self.storage, &self.fence))
            .min_by(f64::total_cmp)
    }

    pub fn check_clearance(&self, epsilon: f64) -> Result<()> {
        match self.min_clearance() {
            Some(c) if c < epsilon => Err(Error::Parameter(format!(
                "a jammer is {c} m from a boundary, below the {epsilon} m clearance"
            ))),
            _ => Ok(()),
        }
    }
}

fn clearance(p: Point, storage: &Rect, fence: &Rect) -> f64 {
    distance_to_storage(p, storage).min(fence.distance_to_boundary(p))
}

fn admissible(p: Point, storage: &Rect, fence: &Rect, epsilon: f64) -> bool {
    fence.contains(p) && !storage.contains(p) && clearance(p, storage, fence) >= epsilon
}

/// Uniform positions in `F \ S` with `epsilon` clearance, by rejection sampling.
/// Returns the positions and the number of draws it took.
pub fn sample_positions(
    storage: &Rect,
    fence: &Rect,
    count: usize,
    seed: u64,
    epsilon: f64,
) -> Result<(Vec<Point>, usize)> {
    if count == 0 {
        return Err(Error::Parameter("jammer count must be at least 1".into()));
    }
    let budget = ATTEMPTS_PER_JAMMER * count + ATTEMPTS_BASE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= budget {
            return Err(Error::Deployment {
                requested: count,
                accepted: out.len(),
                attempts,
            });
        }
        attempts += 1;
        let p = Point::new(
            rng.gen_range(fence.min_x..fence.max_x),
            rng.gen_range(fence.min_y..fence.max_y),
        );
        if admissible(p, storage, fence, epsilon) {
            out.push(p);
        }
    }
    Ok((out, attempts))
}

/// Deploys `count` full unrechargeable jammers with the given battery capacity,
/// replacing any existing jammers.
pub fn deploy_jammers(
    world: &WorldModel,
    count: usize,
    seed: u64,
    epsilon: f64,
    capacity: u32,
) -> Result<WorldModel> {
    let (positions, _) = sample_positions(&world.storage, &world.fence, count, seed, epsilon)?;
    let jammers = positions
        .into_iter()
        .enumerate()
        .map(|(id, position)| Jammer::new(id, position, JammerKind::Unrechargeable, capacity))
        .collect();
    world.clone().with_jammers(jammers)
}
