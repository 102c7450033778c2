//! Unbounded, locally finite rooted spaces, enumerated lazily by length.
//!
//! Every result in this crate depends on a point only through its length
//! (the distance from the root), so a space is fully described by how many
//! points occupy each integer length. Three builders cover everything the
//! engine needs:
//!
//! * [`Space::path`] — one point per length,
//! * [`Space::homogeneous_tree`] — `arity^n` points at length `n`,
//! * [`Space::table`] — an explicit head of per-length counts followed by a
//!   cyclic tail profile, which permits gaps while staying unbounded.
//!
//! All enumerations are guarded by a point budget; exceeding it is an
//! explicit [`Error::PointBudgetExceeded`], never a silent truncation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of points any single enumeration may produce.
pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000;

/// A point of a space: its length (distance from the root) and its rank
/// within that length level. The pair is the point's identity token, and the
/// derived ordering by `(length, index)` is the deterministic tie-break used
/// throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point {
    length: u64,
    index: u64,
}

impl Point {
    pub fn new(length: u64, index: u64) -> Point {
        Point { length, index }
    }

    /// Distance from the root.
    pub fn length(&self) -> u64 {
        self.length
    }

    /// Rank of the point within its length level.
    pub fn index(&self) -> u64 {
        self.index
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.length, self.index)
    }
}

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Point, String> {
        let (len, idx) = s
            .split_once(':')
            .ok_or_else(|| format!("malformed point literal `{s}`: expected `length:index`"))?;
        let length = len
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("malformed point literal `{s}`: bad length `{len}`"))?;
        let index = idx
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("malformed point literal `{s}`: bad index `{idx}`"))?;
        Ok(Point { length, index })
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Point, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Builder descriptor of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// One point per length.
    Path,
    /// `arity^n` points at length `n`.
    HomogeneousTree { arity: u32 },
    /// Explicit per-length counts (`head`), then `cycle` repeated forever.
    /// Zero counts are allowed and model lengths with no points.
    Table { head: Vec<u64>, cycle: Vec<u64> },
}

/// An unbounded, locally finite rooted space.
///
/// Immutable after construction; all operations are pure. Two spaces compare
/// equal when their builder descriptors are equal — the point budget is
/// operational configuration, not part of the space's identity.
#[derive(Clone, Debug)]
pub struct Space {
    kind: SpaceKind,
    point_budget: u64,
}

impl PartialEq for Space {
    fn eq(&self, other: &Space) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Space {}

impl Space {
    pub fn path() -> Space {
        Space {
            kind: SpaceKind::Path,
            point_budget: DEFAULT_POINT_BUDGET,
        }
    }

    pub fn homogeneous_tree(arity: u32) -> Result<Space> {
        if arity < 2 {
            return Err(Error::InvalidSpace(format!(
                "homogeneous tree arity must be at least 2, got {arity}"
            )));
        }
        Ok(Space {
            kind: SpaceKind::HomogeneousTree { arity },
            point_budget: DEFAULT_POINT_BUDGET,
        })
    }

    /// A space with `head[n]` points at length `n`, then the `cycle` profile
    /// repeated forever. `head[0]` must be 1 (the root is the unique point of
    /// length 0) and the cycle must contain a positive entry so the space
    /// stays unbounded.
    pub fn table(head: Vec<u64>, cycle: Vec<u64>) -> Result<Space> {
        if head.is_empty() {
            return Err(Error::InvalidSpace("table head must be nonempty".into()));
        }
        if head[0] != 1 {
            return Err(Error::InvalidSpace(format!(
                "table head must start with exactly one root point, got {}",
                head[0]
            )));
        }
        if cycle.is_empty() {
            return Err(Error::InvalidSpace("table cycle must be nonempty".into()));
        }
        if cycle.iter().all(|&c| c == 0) {
            return Err(Error::InvalidSpace(
                "table cycle must contain a positive count, or the space would be bounded".into(),
            ));
        }
        Ok(Space {
            kind: SpaceKind::Table { head, cycle },
            point_budget: DEFAULT_POINT_BUDGET,
        })
    }

    pub fn with_point_budget(mut self, budget: u64) -> Space {
        self.point_budget = budget;
        self
    }

    pub fn point_budget(&self) -> u64 {
        self.point_budget
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Number of points at the given length. Saturates at `u64::MAX` for
    /// levels too large to count exactly; every index fits below a saturated
    /// count, so membership tests stay correct.
    pub fn level_count(&self, length: u64) -> u64 {
        match &self.kind {
            SpaceKind::Path => 1,
            SpaceKind::HomogeneousTree { arity } => {
                let exp = u32::try_from(length).unwrap_or(u32::MAX);
                (*arity as u64).checked_pow(exp).unwrap_or(u64::MAX)
            }
            SpaceKind::Table { head, cycle } => {
                let n = length as usize;
                if n < head.len() {
                    head[n]
                } else {
                    cycle[(n - head.len()) % cycle.len()]
                }
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.index < self.level_count(p.length)
    }

    /// Membership plus the budget guard: reaching the point by lazy
    /// enumeration must not exceed the point budget.
    pub fn validate_point(&self, p: Point) -> Result<()> {
        if !self.contains(p) {
            return Err(Error::ForeignPoint { point: p });
        }
        self.count_up_to(p.length)?;
        Ok(())
    }

    /// The unique point of length 0.
    pub fn root(&self) -> Point {
        Point::new(0, 0)
    }

    /// Total number of points with length at most `max_length`, or an error
    /// if that total exceeds the point budget.
    pub fn count_up_to(&self, max_length: u64) -> Result<u64> {
        let budget = self.point_budget;
        let mut total: u64 = 0;
        let mut length: u64 = 0;
        loop {
            total = total.saturating_add(self.level_count(length));
            if total > budget {
                return Err(Error::PointBudgetExceeded { budget });
            }
            if length == max_length {
                return Ok(total);
            }
            length += 1;
        }
    }

    /// All points with length at most `max_length`, sorted by
    /// `(length, index)`. Deterministic across calls.
    pub fn points_up_to(&self, max_length: u64) -> Result<Vec<Point>> {
        let total = self.count_up_to(max_length)?;
        let mut out = Vec::with_capacity(total as usize);
        for length in 0..=max_length {
            for index in 0..self.level_count(length) {
                out.push(Point::new(length, index));
            }
        }
        Ok(out)
    }

    /// The largest radius `m <= want` whose enumeration stays within the
    /// point budget. Probes use this to pick feasible evaluation sets.
    pub fn clamped_radius(&self, want: u64) -> u64 {
        let budget = self.point_budget;
        let mut total: u64 = 0;
        let mut best: u64 = 0;
        for length in 0..=want {
            total = total.saturating_add(self.level_count(length));
            if total > budget {
                break;
            }
            best = length;
        }
        best
    }

    /// Smallest occupied length strictly greater than `after`.
    fn next_occupied_length(&self, after: u64) -> u64 {
        let mut length = after + 1;
        loop {
            if self.level_count(length) > 0 {
                return length;
            }
            length += 1;
        }
    }

    /// The canonical strictly increasing ray: step 0 is the root, and each
    /// later step is the index-0 point at the next occupied length. Injective
    /// with strictly increasing lengths.
    pub fn canonical_ray(&self, step: u64) -> Result<Point> {
        if step >= self.point_budget {
            return Err(Error::PointBudgetExceeded {
                budget: self.point_budget,
            });
        }
        let mut length = 0;
        for _ in 0..step {
            length = self.next_occupied_length(length);
        }
        Ok(Point::new(length, 0))
    }

    /// The ray step whose point sits at `length`, if any. Inverse of
    /// [`Space::canonical_ray`] on index-0 points at occupied lengths.
    pub fn ray_step_at_length(&self, length: u64) -> Option<u64> {
        if self.level_count(length) == 0 {
            return None;
        }
        let mut step = 0;
        let mut at = 0;
        while at < length {
            at = self.next_occupied_length(at);
            step += 1;
        }
        (at == length).then_some(step)
    }

    /// Iterator over all points in `(length, index)` order. Unbounded;
    /// callers enforce their own budget.
    pub fn points(&self) -> PointIter<'_> {
        PointIter {
            space: self,
            length: 0,
            index: 0,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn counts(values: &[u64]) -> String {
            values
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        match &self.kind {
            SpaceKind::Path => write!(f, "path"),
            SpaceKind::HomogeneousTree { arity } => write!(f, "tree {arity}"),
            SpaceKind::Table { head, cycle } => {
                write!(f, "table head {} cycle {}", counts(head), counts(cycle))
            }
        }
    }
}

pub struct PointIter<'a> {
    space: &'a Space,
    length: u64,
    index: u64,
}

impl Iterator for PointIter<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        while self.index >= self.space.level_count(self.length) {
            self.length += 1;
            self.index = 0;
        }
        let p = Point::new(self.length, self.index);
        self.index += 1;
        Some(p)
    }
}
