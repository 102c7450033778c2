//! Symbolic self-maps of a space.
//!
//! A self-map is a decidable tail rule plus a finite override table. The tail
//! rules are chosen so that the two questions every classification reduces to
//! — is the range finite, and is the deviation set of a pair finite — are
//! decided exactly:
//!
//! * `Identity` and `RayAdvance` have infinite range on any space in scope,
//!   `Constant` has a singleton tail range; a finite override table cannot
//!   change which side of that split a map falls on.
//! * For two tails the set of points where they agree is empty, a single
//!   point, a single length level, or everything, so the deviation set of a
//!   pair is finite exactly when the tails are identical, and the finite
//!   override tables then decide it pointwise.
//!
//! Maps are kept in normal form: an override whose value equals the tail's
//! value at that key is dropped, so structural equality coincides with
//! equality as functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::space::{Point, Space};

/// The behavior of a self-map away from its finitely many overrides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// `v -> v`.
    Identity,
    /// `v -> w` for a fixed point `w`.
    Constant(Point),
    /// `v -> ray(|v| + k)` along the canonical ray, `k >= 1`. Since ray
    /// lengths strictly increase, the image of `v` is strictly longer than
    /// `v`, which is what makes this tail disjoint from the identity.
    RayAdvance(u64),
}

/// A symbolic self-map: a tail rule plus a normalized finite override table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfMap {
    space: Space,
    tail: TailRule,
    overrides: BTreeMap<Point, Point>,
}

/// The set of points where two maps differ.
#[derive(Clone, Debug)]
pub enum Deviation {
    /// The exact deviation set, sorted by `(length, index)`.
    Finite(Vec<Point>),
    /// An infinite deviation set, carried as a generator of deviation points
    /// with strictly increasing lengths.
    Infinite(DeviationWitness),
}

impl Deviation {
    pub fn is_finite(&self) -> bool {
        matches!(self, Deviation::Finite(_))
    }

    pub fn finite_points(&self) -> Option<&[Point]> {
        match self {
            Deviation::Finite(pts) => Some(pts),
            Deviation::Infinite(_) => None,
        }
    }
}

/// Generator of deviation points of strictly increasing length. Scans length
/// levels upward and takes the smallest deviating index at each level.
#[derive(Clone, Debug)]
pub struct DeviationWitness {
    a: SelfMap,
    b: SelfMap,
}

impl DeviationWitness {
    /// The first `n` entries of the witness sequence: points of strictly
    /// increasing length on which the two maps differ, deterministic.
    pub fn take(&self, n: usize) -> Result<Vec<Point>> {
        let space = &self.a.space;
        let budget = space.point_budget();
        let mut out = Vec::with_capacity(n);
        let mut length = 0u64;
        let mut scanned = 0u64;
        while out.len() < n {
            if scanned > budget {
                return Err(Error::PointBudgetExceeded { budget });
            }
            scanned += 1;
            if let Some(v) = smallest_deviation_at_level(&self.a, &self.b, length)? {
                out.push(v);
            }
            length += 1;
        }
        Ok(out)
    }
}

/// How the two tail rules relate on one whole length level, ignoring
/// overrides.
enum LevelTailAgreement {
    /// The tails disagree at every point of the level.
    Nowhere,
    /// The tails agree at exactly one point of the level.
    SinglePoint,
    /// The tails agree at every point of the level.
    Everywhere,
}

fn tail_agreement_on_level(a: &SelfMap, b: &SelfMap, length: u64) -> LevelTailAgreement {
    use LevelTailAgreement::*;
    use TailRule::*;
    match (a.tail, b.tail) {
        (Identity, Identity) => Everywhere,
        (Constant(w1), Constant(w2)) => {
            if w1 == w2 {
                Everywhere
            } else {
                Nowhere
            }
        }
        (RayAdvance(j), RayAdvance(k)) => {
            if j == k {
                Everywhere
            } else {
                // the canonical ray is injective, so distinct advances differ
                Nowhere
            }
        }
        (Identity, Constant(w)) | (Constant(w), Identity) => {
            if w.length() == length {
                SinglePoint
            } else {
                Nowhere
            }
        }
        // ray images are strictly longer than their arguments, so they never
        // meet the identity
        (Identity, RayAdvance(_)) | (RayAdvance(_), Identity) => Nowhere,
        (Constant(w), RayAdvance(k)) | (RayAdvance(k), Constant(w)) => {
            if w.index() == 0 && a.space.ray_step_at_length(w.length()) == length.checked_add(k) {
                Everywhere
            } else {
                Nowhere
            }
        }
    }
}

/// Smallest-index point at the given level where the two maps differ, if any.
///
/// When the tails agree on the whole level only overridden points can
/// deviate; otherwise at most `1 + overrides-at-level` points can agree, so a
/// scan from index 0 terminates within that bound.
fn smallest_deviation_at_level(a: &SelfMap, b: &SelfMap, length: u64) -> Result<Option<Point>> {
    let count = a.space.level_count(length);
    if count == 0 {
        return Ok(None);
    }
    let override_indices: BTreeSet<u64> = a
        .overrides
        .keys()
        .chain(b.overrides.keys())
        .filter(|p| p.length() == length)
        .map(|p| p.index())
        .collect();
    match tail_agreement_on_level(a, b, length) {
        LevelTailAgreement::Everywhere => {
            for &idx in &override_indices {
                let v = Point::new(length, idx);
                if a.apply_raw(v)? != b.apply_raw(v)? {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
        LevelTailAgreement::SinglePoint | LevelTailAgreement::Nowhere => {
            let cap = override_indices.len() as u64 + 2;
            for idx in 0..count.min(cap) {
                let v = Point::new(length, idx);
                if a.apply_raw(v)? != b.apply_raw(v)? {
                    return Ok(Some(v));
                }
            }
            if count <= cap {
                Ok(None)
            } else {
                Err(Error::Internal(
                    "level scan exhausted its agreement bound without finding a deviation".into(),
                ))
            }
        }
    }
}

impl SelfMap {
    pub fn identity(space: &Space) -> SelfMap {
        SelfMap {
            space: space.clone(),
            tail: TailRule::Identity,
            overrides: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Space, value: Point) -> Result<SelfMap> {
        space.validate_point(value)?;
        Ok(SelfMap {
            space: space.clone(),
            tail: TailRule::Constant(value),
            overrides: BTreeMap::new(),
        })
    }

    /// `v -> ray(|v| + advance)`. A zero advance is rejected: on a space
    /// whose only points lie on the ray it would coincide with the identity
    /// and poison the tail-pair deviation table.
    pub fn ray_advance(space: &Space, advance: u64) -> Result<SelfMap> {
        if advance == 0 {
            return Err(Error::InvalidMap(
                "ray advance must be at least 1; use the identity instead".into(),
            ));
        }
        Ok(SelfMap {
            space: space.clone(),
            tail: TailRule::RayAdvance(advance),
            overrides: BTreeMap::new(),
        })
    }

    /// Adds one override, validating both points and keeping the table in
    /// normal form (an entry that matches the tail value is dropped).
    pub fn with_override(mut self, from: Point, to: Point) -> Result<SelfMap> {
        self.space.validate_point(from)?;
        self.space.validate_point(to)?;
        if self.tail_value(from)? == to {
            self.overrides.remove(&from);
        } else {
            self.overrides.insert(from, to);
        }
        Ok(self)
    }

    pub fn with_overrides<I>(mut self, entries: I) -> Result<SelfMap>
    where
        I: IntoIterator<Item = (Point, Point)>,
    {
        for (from, to) in entries {
            self = self.with_override(from, to)?;
        }
        Ok(self)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    pub fn overrides(&self) -> &BTreeMap<Point, Point> {
        &self.overrides
    }

    pub(crate) fn same_space(&self, other: &SelfMap) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn tail_value(&self, v: Point) -> Result<Point> {
        match self.tail {
            TailRule::Identity => Ok(v),
            TailRule::Constant(w) => Ok(w),
            TailRule::RayAdvance(k) => {
                let step = v.length().checked_add(k).ok_or(Error::PointBudgetExceeded {
                    budget: self.space.point_budget(),
                })?;
                self.space.canonical_ray(step)
            }
        }
    }

    /// Evaluation without the membership check; callers must pass points of
    /// the space.
    pub(crate) fn apply_raw(&self, v: Point) -> Result<Point> {
        if let Some(&to) = self.overrides.get(&v) {
            return Ok(to);
        }
        self.tail_value(v)
    }

    /// The image of `v`: the override value if present, else the tail value.
    pub fn apply(&self, v: Point) -> Result<Point> {
        self.space.validate_point(v)?;
        self.apply_raw(v)
    }

    /// Whether the map's range is finite. Decided symbolically: a constant
    /// tail gives a finite range; the identity and ray-advance tails have
    /// infinite range on every unbounded space, and a finite override table
    /// cannot change that.
    pub fn range_is_finite(&self) -> bool {
        matches!(self.tail, TailRule::Constant(_))
    }

    /// The exact range when it is finite: the tail constant (attained at the
    /// infinitely many non-overridden points) together with the override
    /// values.
    pub fn exact_finite_range(&self) -> Option<BTreeSet<Point>> {
        match self.tail {
            TailRule::Constant(w) => {
                let mut range: BTreeSet<Point> = self.overrides.values().copied().collect();
                range.insert(w);
                Some(range)
            }
            _ => None,
        }
    }

    /// The set of points where `self` and `other` differ.
    pub fn deviation(&self, other: &SelfMap) -> Result<Deviation> {
        self.same_space(other)?;
        let tails_equal = match (self.tail, other.tail) {
            (TailRule::Identity, TailRule::Identity) => true,
            (TailRule::Constant(a), TailRule::Constant(b)) => a == b,
            (TailRule::RayAdvance(j), TailRule::RayAdvance(k)) => j == k,
            _ => false,
        };
        if tails_equal {
            // the maps can differ only where an override differs
            let mut points = BTreeSet::new();
            for key in self.overrides.keys().chain(other.overrides.keys()) {
                if self.apply_raw(*key)? != other.apply_raw(*key)? {
                    points.insert(*key);
                }
            }
            Ok(Deviation::Finite(points.into_iter().collect()))
        } else {
            // distinct tails agree on at most one point or one length level,
            // so no finite override table can make the deviation finite
            Ok(Deviation::Infinite(DeviationWitness {
                a: self.clone(),
                b: other.clone(),
            }))
        }
    }

    /// The first `n` points of a strictly length-increasing sequence inside
    /// the deviation set. Errors when the deviation set is finite.
    pub fn increasing_deviation_sequence(&self, other: &SelfMap, n: usize) -> Result<Vec<Point>> {
        match self.deviation(other)? {
            Deviation::Finite(_) => Err(Error::FiniteDeviation),
            Deviation::Infinite(witness) => witness.take(n),
        }
    }

    /// `n` points of strictly increasing length whose images also have
    /// strictly increasing lengths. Errors on finite-range maps. At each
    /// step the smallest `(length, index)` qualifying point is chosen.
    pub fn infinite_range_sequence(&self, n: usize) -> Result<Vec<Point>> {
        self.escaping_sequence(n, None)
    }

    /// Like [`SelfMap::infinite_range_sequence`], additionally requiring
    /// every image to avoid the given finite set.
    pub(crate) fn escaping_sequence(
        &self,
        n: usize,
        avoid: Option<&BTreeSet<Point>>,
    ) -> Result<Vec<Point>> {
        if self.range_is_finite() {
            return Err(Error::FiniteRange);
        }
        let budget = self.space.point_budget();
        let mut out = Vec::with_capacity(n);
        let mut last_image_length: Option<u64> = None;
        let mut length = 0u64;
        let mut scanned = 0u64;
        while out.len() < n {
            if scanned > budget {
                return Err(Error::PointBudgetExceeded { budget });
            }
            scanned += 1;
            if let Some(v) = self.smallest_escaping_at_level(length, last_image_length, avoid)? {
                last_image_length = Some(self.apply_raw(v)?.length());
                out.push(v);
            }
            length += 1;
        }
        Ok(out)
    }

    /// Smallest-index point at the level whose image is strictly longer than
    /// `floor` and avoids `avoid`.
    fn smallest_escaping_at_level(
        &self,
        length: u64,
        floor: Option<u64>,
        avoid: Option<&BTreeSet<Point>>,
    ) -> Result<Option<Point>> {
        let count = self.space.level_count(length);
        if count == 0 {
            return Ok(None);
        }
        let qualifies = |img: Point| {
            floor.is_none_or(|f| img.length() > f)
                && avoid.is_none_or(|set| !set.contains(&img))
        };
        let mut best: Option<u64> = None;
        let mut consider = |idx: u64| {
            best = Some(best.map_or(idx, |b: u64| b.min(idx)));
        };
        let overridden: BTreeSet<u64> = self
            .overrides
            .keys()
            .filter(|p| p.length() == length)
            .map(|p| p.index())
            .collect();
        for &idx in &overridden {
            if qualifies(self.overrides[&Point::new(length, idx)]) {
                consider(idx);
            }
        }
        // non-overridden candidates
        match self.tail {
            TailRule::Identity => {
                // image is the point itself; at most |overrides| + |avoid|
                // indices at the level can fail, so a bounded scan is exact
                if floor.is_none_or(|f| length > f) {
                    let cap = overridden.len() as u64 + avoid.map_or(0, |s| s.len() as u64) + 2;
                    for idx in 0..count.min(cap) {
                        let v = Point::new(length, idx);
                        if !overridden.contains(&idx) && qualifies(v) {
                            consider(idx);
                            break;
                        }
                    }
                }
            }
            TailRule::Constant(_) | TailRule::RayAdvance(_) => {
                // image is the same for every non-overridden point of the level
                if let Some(first_free) = (0..count).find(|idx| !overridden.contains(idx)) {
                    if qualifies(self.tail_value(Point::new(length, first_free))?) {
                        consider(first_free);
                    }
                }
            }
        }
        Ok(best.map(|idx| Point::new(length, idx)))
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tail {
            TailRule::Identity => write!(f, "identity")?,
            TailRule::Constant(w) => write!(f, "constant {w}")?,
            TailRule::RayAdvance(k) => write!(f, "ray-advance {k}")?,
        }
        if !self.overrides.is_empty() {
            write!(f, " with ")?;
            for (i, (from, to)) in self.overrides.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{from} -> {to}")?;
            }
        }
        Ok(())
    }
}
