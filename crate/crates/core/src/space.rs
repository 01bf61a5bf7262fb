//! Continuous state space, box obstacles and discretised edge validation.
//!
//! Every edge is validated on a fixed grid of `ceil(length / resolution) + 1`
//! evenly spaced points that includes both endpoints. One point evaluation is
//! the unit of validation effort, so all effort figures in the planner are
//! exact integers that can be audited against the number of points checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SpaceError;

/// Identifier of a state inside a planning session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A point in the search space together with its session identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub id: StateId,
    pub coords: Vec<f64>,
}

impl State {
    pub fn new(id: StateId, coords: Vec<f64>) -> Self {
        State { id, coords }
    }
}

/// Closed interval `[lo, hi]` on one axis.
pub type Interval = [f64; 2];

/// Raw JSON form of a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioDoc {
    dim: usize,
    bounds: Vec<Interval>,
    obstacles: Vec<Vec<Interval>>,
    resolution: f64,
}

/// Bounded axis-aligned search space with hyperrectangle obstacles.
///
/// A point is in collision only if it lies strictly inside an obstacle, so
/// obstacle faces belong to free space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct Scenario {
    dim: usize,
    bounds: Vec<Interval>,
    obstacles: Vec<Vec<Interval>>,
    resolution: f64,
    // obstacle k, axis d: lo at [2*(k*dim+d)], hi at [2*(k*dim+d)+1]
    flat: Vec<f64>,
}

impl TryFrom<ScenarioDoc> for Scenario {
    type Error = SpaceError;

    fn try_from(doc: ScenarioDoc) -> Result<Self, Self::Error> {
        Scenario::new(doc.dim, doc.bounds, doc.obstacles, doc.resolution)
    }
}

impl From<Scenario> for ScenarioDoc {
    fn from(s: Scenario) -> Self {
        ScenarioDoc {
            dim: s.dim,
            bounds: s.bounds,
            obstacles: s.obstacles,
            resolution: s.resolution,
        }
    }
}

fn check_interval(iv: &Interval) -> bool {
    iv[0].is_finite() && iv[1].is_finite() && iv[0] < iv[1]
}

impl Scenario {
    pub fn new(
        dim: usize,
        bounds: Vec<Interval>,
        obstacles: Vec<Vec<Interval>>,
        resolution: f64,
    ) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::InvalidScenario("dimension must be positive".into()));
        }
        if bounds.len() != dim {
            return Err(SpaceError::InvalidScenario(format!(
                "expected {dim} bound intervals, got {}",
                bounds.len()
            )));
        }
        if !bounds.iter().all(check_interval) {
            return Err(SpaceError::InvalidScenario("bounds need lo < hi on every axis".into()));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(SpaceError::InvalidScenario(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        let mut flat = Vec::with_capacity(obstacles.len() * dim * 2);
        for (k, obstacle) in obstacles.iter().enumerate() {
            if obstacle.len() != dim {
                return Err(SpaceError::InvalidScenario(format!(
                    "obstacle {k} has {} intervals, expected {dim}",
                    obstacle.len()
                )));
            }
            for (d, iv) in obstacle.iter().enumerate() {
                if !check_interval(iv) {
                    return Err(SpaceError::InvalidScenario(format!(
                        "obstacle {k} needs lo < hi on axis {d}"
                    )));
                }
                if iv[1] <= bounds[d][0] || iv[0] >= bounds[d][1] {
                    return Err(SpaceError::InvalidScenario(format!(
                        "obstacle {k} does not intersect the bounds on axis {d}"
                    )));
                }
                flat.push(iv[0]);
                flat.push(iv[1]);
            }
        }
        Ok(Scenario {
            dim,
            bounds,
            obstacles,
            resolution,
            flat,
        })
    }

    /// Obstacle-free box `[lo, hi]^dim`.
    pub fn empty(dim: usize, lo: f64, hi: f64, resolution: f64) -> Result<Self, SpaceError> {
        Scenario::new(dim, vec![[lo, hi]; dim], Vec::new(), resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Vec<Interval>] {
        &self.obstacles
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn from_json(text: &str) -> Result<Self, SpaceError> {
        serde_json::from_str(text).map_err(|e| SpaceError::InvalidScenario(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn in_bounds(&self, coords: &[f64]) -> bool {
        coords
            .iter()
            .zip(&self.bounds)
            .all(|(x, b)| *x >= b[0] && *x <= b[1])
    }

    /// Membership in free space: inside the bounds and not strictly inside any obstacle.
    pub fn is_state_valid(&self, coords: &[f64]) -> Result<bool, SpaceError> {
        if coords.len() != self.dim {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        Ok(self.in_bounds(coords) && self.point_free(coords))
    }

    /// Obstacle test without dimension or bounds checks.
    #[inline]
    pub fn point_free(&self, p: &[f64]) -> bool {
        let n = self.dim;
        'obstacles: for ob in self.flat.chunks_exact(2 * n) {
            for d in 0..n {
                let x = p[d];
                if !(x > ob[2 * d] && x < ob[2 * d + 1]) {
                    continue 'obstacles;
                }
            }
            return false;
        }
        true
    }

    /// Number of segments of the full-resolution grid of an edge.
    #[inline]
    pub fn grid_segments(&self, length: f64) -> u64 {
        grid_segments(length, self.resolution)
    }

    /// Full-resolution validation of the segment `a -> b`.
    ///
    /// `a` and `b` must be given in canonical edge order so that the grid is
    /// identical no matter which direction the edge is traversed in. Points
    /// already certified by `status` are skipped; the returned count is the
    /// number of point evaluations performed by this call.
    pub fn check_edge_full(
        &self,
        a: &[f64],
        b: &[f64],
        status: ValidationStatus,
    ) -> (ValidationStatus, u64) {
        let certified = match status {
            ValidationStatus::Valid | ValidationStatus::Invalid => return (status, 0),
            ValidationStatus::Unknown => 0,
            ValidationStatus::SparseValid(k) => k,
        };
        let segments = self.grid_segments(distance(a, b));
        let layout = Layout::new(segments, certified);
        let mut point = vec![0.0; self.dim];
        let mut checks = 0;
        for i in 0..=segments {
            if layout.contains(i) {
                continue;
            }
            grid_point(a, b, i, segments, &mut point);
            checks += 1;
            if !self.point_free(&point) {
                return (ValidationStatus::Invalid, checks);
            }
        }
        (ValidationStatus::Valid, checks)
    }

    /// Coarse validation at `sparse_factor` times the full resolution.
    ///
    /// The sparse points are a subset of the full-resolution grid, so a pass
    /// certifies them for the later full check. A sparse collision is a real
    /// collision.
    pub fn check_edge_sparse(
        &self,
        a: &[f64],
        b: &[f64],
        status: ValidationStatus,
        sparse_factor: u32,
    ) -> (ValidationStatus, u64) {
        assert!(sparse_factor >= 1, "sparse factor must be at least 1");
        let previous = match status {
            ValidationStatus::Valid | ValidationStatus::Invalid => return (status, 0),
            ValidationStatus::Unknown => 0,
            ValidationStatus::SparseValid(k) => k,
        };
        let length = distance(a, b);
        let segments = self.grid_segments(length);
        let count = sparse_point_count(length, self.resolution, sparse_factor, segments);
        if previous >= count {
            return (status, 0);
        }
        let old = Layout::new(segments, previous);
        let new = Layout::new(segments, count);
        let mut point = vec![0.0; self.dim];
        let mut checks = 0;
        for j in 0..count {
            let i = new.index(j);
            if old.contains(i) {
                continue;
            }
            grid_point(a, b, i, segments, &mut point);
            checks += 1;
            if !self.point_free(&point) {
                return (ValidationStatus::Invalid, checks);
            }
        }
        (ValidationStatus::SparseValid(count), checks)
    }
}

/// Validation state of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationStatus {
    #[default]
    Unknown,
    /// The given number of evenly spaced grid points (endpoints included) passed.
    SparseValid(u64),
    Valid,
    Invalid,
}

impl ValidationStatus {
    pub fn is_valid(self) -> bool {
        self == ValidationStatus::Valid
    }

    pub fn is_invalid(self) -> bool {
        self == ValidationStatus::Invalid
    }

    pub fn certified_points(self) -> u64 {
        match self {
            ValidationStatus::SparseValid(k) => k,
            _ => 0,
        }
    }
}

/// Unordered edge between two states, stored as `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: StateId,
    pub b: StateId,
    pub length: f64,
}

impl Edge {
    /// Builds the canonical edge; `None` for self-loops.
    pub fn new(x: &State, y: &State) -> Option<Self> {
        if x.id == y.id {
            return None;
        }
        let length = distance(&x.coords, &y.coords);
        let (a, b) = if x.id < y.id { (x.id, y.id) } else { (y.id, x.id) };
        Some(Edge { a, b, length })
    }

    pub fn key(&self) -> (StateId, StateId) {
        (self.a, self.b)
    }
}

/// Canonical `(min, max)` pair of two distinct ids.
#[inline]
pub fn canonical(x: StateId, y: StateId) -> (StateId, StateId) {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean edge cost between two states.
pub fn edge_cost(a: &State, b: &State) -> Result<f64, SpaceError> {
    if a.coords.len() != b.coords.len() {
        return Err(SpaceError::DimensionMismatch {
            expected: a.coords.len(),
            got: b.coords.len(),
        });
    }
    Ok(distance(&a.coords, &b.coords))
}

#[inline]
pub fn grid_segments(length: f64, resolution: f64) -> u64 {
    (length / resolution).ceil() as u64
}

/// Total number of full-resolution check points on an edge.
#[inline]
pub fn grid_points(length: f64, resolution: f64) -> u64 {
    grid_segments(length, resolution) + 1
}

fn sparse_point_count(length: f64, resolution: f64, sparse_factor: u32, segments: u64) -> u64 {
    let sparse_segments = (length / (resolution * f64::from(sparse_factor))).ceil() as u64;
    sparse_segments.min(segments) + 1
}

/// Remaining validation effort of an edge in point evaluations.
///
/// # Panics
///
/// Invalid edges have no meaningful effort and must never be asked for one.
pub fn edge_effort_estimate(length: f64, status: ValidationStatus, resolution: f64) -> u64 {
    remaining_effort(grid_points(length, resolution), status)
}

/// Same as [`edge_effort_estimate`] with a precomputed grid point count.
#[inline]
pub fn remaining_effort(points: u64, status: ValidationStatus) -> u64 {
    match status {
        ValidationStatus::Valid => 0,
        ValidationStatus::Unknown => points,
        ValidationStatus::SparseValid(k) => points.saturating_sub(k),
        ValidationStatus::Invalid => panic!("effort requested for an invalid edge"),
    }
}

/// Grid point `i` of `segments` on `a -> b`, exact at both endpoints.
#[inline]
pub fn grid_point(a: &[f64], b: &[f64], i: u64, segments: u64, out: &mut [f64]) {
    if i == 0 {
        out.copy_from_slice(a);
    } else if i >= segments {
        out.copy_from_slice(b);
    } else {
        let t = i as f64 / segments as f64;
        for d in 0..out.len() {
            out[d] = (1.0 - t) * a[d] + t * b[d];
        }
    }
}

/// Evenly spread subset of `count` grid indices out of `0..=segments`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    segments: u64,
    count: u64,
}

impl Layout {
    fn new(segments: u64, count: u64) -> Self {
        Layout {
            segments,
            count: count.min(segments + 1),
        }
    }

    fn index(&self, j: u64) -> u64 {
        if self.count <= 1 {
            0
        } else {
            (u128::from(j) * u128::from(self.segments) / u128::from(self.count - 1)) as u64
        }
    }

    fn contains(&self, i: u64) -> bool {
        match self.count {
            0 => false,
            1 => i == 0,
            _ => {
                let span = u128::from(self.count - 1);
                let segs = u128::from(self.segments);
                // smallest j with index(j) >= i
                let j = (u128::from(i) * span).div_ceil(segs.max(1));
                j <= span && (j * segs / span) as u64 == i
            }
        }
    }
}
