//! Brute-force cross-validation of the closed-form answers.
//!
//! Nothing in this module trusts a norm formula. The restricted difference
//! norm is maximized two independent ways over a finite truncation — a
//! combinatorial scan and an exhaustive search over sign patterns on the
//! needed image points — and the two must agree. Essential-norm lower bounds
//! are certified by explicit unit-norm witness families evaluated pointwise,
//! and compactness is probed along the canonical pointwise-null family. Caps
//! are explicit: exceeding one yields an error or an inconclusive verdict,
//! never a silent answer.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::Serialize;

use crate::analysis::{
    classify, essential_witness_sequence, mixed_noncompact_witness, RelationClass,
};
use crate::error::{Error, Result};
use crate::funcspace::{difference_value, BoundedFunction};
use crate::selfmap::{Deviation, SelfMap};
use crate::space::Point;

/// Default truncation radius for restricted evaluations.
pub const DEFAULT_RADIUS: u64 = 64;
/// Default witness family size.
pub const DEFAULT_FAMILY: usize = 16;
/// Cap on the exhaustive sign-pattern search: 3^12 assignments.
pub const MAX_ASSIGNMENTS: u64 = 531_441;
const MAX_NEEDED_POINTS: usize = 12;

/// Result of the dual-route restricted norm computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedNorm {
    /// The agreed value, one of 0 or 2.
    pub value: u8,
    /// Value from the combinatorial route: 2 exactly when some point of the
    /// truncation separates the two maps.
    pub combinatorial: u8,
    /// Value from the exhaustive route: the maximum over all functions with
    /// values in {-1, 0, +1} on the needed image points.
    pub exhaustive: u8,
    /// Number of distinct image points the exhaustive search ranged over.
    pub needed_points: usize,
    /// Number of sign patterns actually evaluated.
    pub assignments_searched: u64,
}

/// The exact supremum of the difference operator's image moduli over points
/// of length at most `max_length`, over the unit ball of functions supported
/// on the needed image points.
///
/// Computed twice: combinatorially, and by exhausting all assignments of
/// {-1, 0, +1} to the needed points (sufficient, since the supremum is
/// attained on such a function). Disagreement is an internal error.
pub fn restricted_difference_norm(
    phi: &SelfMap,
    psi: &SelfMap,
    max_length: u64,
) -> Result<RestrictedNorm> {
    phi.same_space(psi)?;
    let points = phi.space().points_up_to(max_length)?;

    let mut combinatorial = 0u8;
    let mut image_pairs: BTreeSet<(Point, Point)> = BTreeSet::new();
    for &v in &points {
        let a = phi.apply_raw(v)?;
        let b = psi.apply_raw(v)?;
        if a != b {
            combinatorial = 2;
        }
        image_pairs.insert((a, b));
    }

    let needed: Vec<Point> = image_pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if needed.len() > MAX_NEEDED_POINTS {
        return Err(Error::OracleBudgetExceeded(format!(
            "{} needed image points exceed the sign-pattern cap of {MAX_NEEDED_POINTS}",
            needed.len()
        )));
    }
    let slot: BTreeMap<Point, usize> = needed
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let slot_pairs: Vec<(usize, usize)> = image_pairs
        .iter()
        .map(|(a, b)| (slot[a], slot[b]))
        .collect();

    let total = 3u64.pow(needed.len() as u32);
    debug_assert!(total <= MAX_ASSIGNMENTS);
    let mut exhaustive = 0u8;
    let mut assignments_searched = 0u64;
    let mut values = vec![-1i8; needed.len()];
    for code in 0..total {
        let mut c = code;
        for v in values.iter_mut() {
            *v = (c % 3) as i8 - 1;
            c /= 3;
        }
        assignments_searched += 1;
        for &(a, b) in &slot_pairs {
            let diff = (values[a] - values[b]).unsigned_abs();
            if diff > exhaustive {
                exhaustive = diff;
            }
        }
        if exhaustive == 2 {
            // 2 is the global upper bound; nothing larger can appear
            break;
        }
    }

    if combinatorial != exhaustive {
        return Err(Error::Internal(format!(
            "restricted norm routes disagree: combinatorial {combinatorial}, exhaustive {exhaustive}"
        )));
    }
    Ok(RestrictedNorm {
        value: combinatorial,
        combinatorial,
        exhaustive,
        needed_points: needed.len(),
        assignments_searched,
    })
}

/// Which explicit family certified an essential-norm lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeFamily {
    /// Characteristic-difference functions along a deviation sequence.
    ChiDifference,
    /// Characteristic functions of escaping images of the infinite-range map.
    ChiImage,
    /// No family needed: zero is the exact essential norm for the class.
    Empty,
}

/// Certified essential-norm lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundProbe {
    /// The certified value: 0, 1, or 2. Never exceeds the closed-form
    /// essential norm.
    pub certified: u8,
    /// False when a family could not be produced within budget and the
    /// returned 0 is merely a fallback.
    pub conclusive: bool,
    pub family: ProbeFamily,
    pub family_size: usize,
}

fn is_budget_error(e: &Error) -> bool {
    matches!(
        e,
        Error::PointBudgetExceeded { .. } | Error::OracleBudgetExceeded(_)
    )
}

/// Certifies the largest essential-norm lower bound an explicit pointwise
/// null unit family establishes for the pair: 2 from a characteristic
/// difference family on an infinite-deviation pair, 1 from escaping
/// characteristic functions on a mixed pair, 0 (exactly) for the two compact
/// classes. Budget failures degrade to an inconclusive 0.
pub fn essential_lower_bound_probe(
    phi: &SelfMap,
    psi: &SelfMap,
    family_size: usize,
) -> Result<LowerBoundProbe> {
    let c = classify(phi, psi)?;
    let inconclusive = |e: Error| {
        if is_budget_error(&e) {
            Ok(LowerBoundProbe {
                certified: 0,
                conclusive: false,
                family: ProbeFamily::Empty,
                family_size: 0,
            })
        } else {
            Err(e)
        }
    };
    match c.class {
        RelationClass::BothInfiniteInfiniteDeviation => {
            match essential_witness_sequence(phi, psi, family_size) {
                Ok(family) => Ok(LowerBoundProbe {
                    certified: 2,
                    conclusive: true,
                    family: ProbeFamily::ChiDifference,
                    family_size: family.len(),
                }),
                Err(e) => inconclusive(e),
            }
        }
        RelationClass::Mixed => {
            let infinite = if phi.range_is_finite() { psi } else { phi };
            let finite = if phi.range_is_finite() { phi } else { psi };
            let escape_bound = finite
                .exact_finite_range()
                .and_then(|r| r.iter().map(|p| p.length()).max())
                .unwrap_or(0);
            let radius = phi.space().clamped_radius(DEFAULT_RADIUS);
            let escaped = matches!(
                range_escape_probe(infinite, radius, escape_bound)?,
                RangeEscape::Escaped(_)
            );
            match mixed_noncompact_witness(phi, psi, family_size) {
                Ok(family) if escaped => Ok(LowerBoundProbe {
                    certified: 1,
                    conclusive: true,
                    family: ProbeFamily::ChiImage,
                    family_size: family.len(),
                }),
                Ok(_) => Ok(LowerBoundProbe {
                    certified: 0,
                    conclusive: false,
                    family: ProbeFamily::Empty,
                    family_size: 0,
                }),
                Err(e) => inconclusive(e),
            }
        }
        RelationClass::BothFiniteRange | RelationClass::BothInfiniteFiniteDeviation => {
            Ok(LowerBoundProbe {
                certified: 0,
                conclusive: true,
                family: ProbeFamily::Empty,
                family_size: 0,
            })
        }
    }
}

/// Verdict of a compactness probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithCompact,
    WitnessAgainstCompact,
    Inconclusive,
}

/// Trace of difference-norm evaluations along a pointwise-null family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompactnessProbe {
    /// Exact norm values along the family, each 0, 1, or 2.
    pub trace: Vec<u8>,
    pub verdict: Verdict,
    /// For compact verdicts: the first index from which the trace is
    /// certified to stay 0, because the ray has escaped every image of the
    /// evaluation set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_index: Option<usize>,
}

/// Probes compactness of the difference along an explicit family.
///
/// For the two compact classes the family is the canonical one of
/// characteristic functions along the ray, and the trace is the exact norm
/// over the finitely many points that can contribute; the verdict is
/// consistent-with-compact once the ray has escaped every image length. For
/// a mixed or infinite-deviation pair the family is the respective witness
/// family, whose evaluated norms stay at 1 resp. 2.
pub fn compactness_probe(
    phi: &SelfMap,
    psi: &SelfMap,
    family_size: usize,
    max_length: u64,
) -> Result<CompactnessProbe> {
    let c = classify(phi, psi)?;
    let result = match c.class {
        RelationClass::BothFiniteRange | RelationClass::BothInfiniteFiniteDeviation => {
            compact_side_probe(phi, psi, family_size)
        }
        RelationClass::Mixed => {
            witness_side_probe(phi, psi, family_size, max_length, 1, ProbeKind::Mixed)
        }
        RelationClass::BothInfiniteInfiniteDeviation => {
            witness_side_probe(phi, psi, family_size, max_length, 2, ProbeKind::InfiniteDeviation)
        }
    };
    match result {
        Ok(probe) => Ok(probe),
        Err(e) if is_budget_error(&e) => Ok(CompactnessProbe {
            trace: Vec::new(),
            verdict: Verdict::Inconclusive,
            escape_index: None,
        }),
        Err(e) => Err(e),
    }
}

/// Points whose values determine the norm of the difference image exactly,
/// for a pair whose difference is supported on finitely many behaviors:
/// the finite deviation set when there is one, else the override keys plus
/// one representative of the (constant) tail behavior.
fn difference_support_points(phi: &SelfMap, psi: &SelfMap) -> Result<Vec<Point>> {
    match phi.deviation(psi)? {
        Deviation::Finite(points) => Ok(points),
        Deviation::Infinite(_) => {
            let mut keys: BTreeSet<Point> = phi.overrides().keys().copied().collect();
            keys.extend(psi.overrides().keys().copied());
            let representative = phi
                .space()
                .points()
                .take(keys.len() + 1)
                .find(|p| !keys.contains(p))
                .expect("a scan one longer than the key set must find a free point");
            let mut out: Vec<Point> = keys.into_iter().collect();
            out.push(representative);
            out.sort();
            Ok(out)
        }
    }
}

fn compact_side_probe(phi: &SelfMap, psi: &SelfMap, family_size: usize) -> Result<CompactnessProbe> {
    let space = phi.space();
    let eval = difference_support_points(phi, psi)?;
    let mut images: BTreeSet<Point> = BTreeSet::new();
    for &v in &eval {
        images.insert(phi.apply_raw(v)?);
        images.insert(psi.apply_raw(v)?);
    }
    let max_image_length = images.iter().map(|p| p.length()).max();

    let mut trace = Vec::with_capacity(family_size);
    let mut escape_index = None;
    for k in 0..family_size {
        let ray_point = space.canonical_ray(k as u64)?;
        if escape_index.is_none()
            && max_image_length.is_none_or(|m| ray_point.length() > m)
        {
            escape_index = Some(k);
        }
        let mut max_value = 0u8;
        for &v in &eval {
            let hit_phi = phi.apply_raw(v)? == ray_point;
            let hit_psi = psi.apply_raw(v)? == ray_point;
            let value = (hit_phi as i8 - hit_psi as i8).unsigned_abs();
            max_value = max_value.max(value);
        }
        trace.push(max_value);
    }

    let verdict = match escape_index {
        Some(k) if trace[k..].iter().all(|&t| t == 0) => Verdict::ConsistentWithCompact,
        _ => Verdict::Inconclusive,
    };
    Ok(CompactnessProbe {
        trace,
        verdict,
        escape_index,
    })
}

enum ProbeKind {
    Mixed,
    InfiniteDeviation,
}

fn witness_side_probe(
    phi: &SelfMap,
    psi: &SelfMap,
    family_size: usize,
    max_length: u64,
    floor: u8,
    kind: ProbeKind,
) -> Result<CompactnessProbe> {
    let space = phi.space();
    let (bases, family): (Vec<Point>, Vec<BoundedFunction>) = match kind {
        ProbeKind::Mixed => {
            let (infinite, finite) = if phi.range_is_finite() { (psi, phi) } else { (phi, psi) };
            let avoid = finite.exact_finite_range().ok_or_else(|| {
                Error::Internal("mixed pair must have a finite-range member".into())
            })?;
            let bases = infinite.escaping_sequence(family_size, Some(&avoid))?;
            let family = mixed_noncompact_witness(phi, psi, family_size)?;
            (bases, family)
        }
        ProbeKind::InfiniteDeviation => {
            let bases = phi.increasing_deviation_sequence(psi, family_size)?;
            let family = essential_witness_sequence(phi, psi, family_size)?;
            (bases, family)
        }
    };

    let four = BigRational::from_integer(4.into());
    let one = BigRational::from_integer(1.into());
    let mut trace = Vec::with_capacity(family.len());
    for (base, f) in bases.iter().zip(&family) {
        let radius = space.clamped_radius(max_length.min(base.length()));
        let mut max_sq = BigRational::from_integer(0.into());
        for v in space.points_up_to(radius)? {
            max_sq = max_sq.max(difference_value(phi, psi, f, v)?.modulus_squared());
        }
        max_sq = max_sq.max(difference_value(phi, psi, f, *base)?.modulus_squared());
        let value = if max_sq == four {
            2
        } else if max_sq == one {
            1
        } else if num_traits::Zero::is_zero(&max_sq) {
            0
        } else {
            return Err(Error::Internal(
                "witness evaluation produced a modulus outside {0, 1, 2}".into(),
            ));
        };
        trace.push(value);
    }

    let verdict = if trace.iter().all(|&t| t >= floor) {
        Verdict::WitnessAgainstCompact
    } else {
        Verdict::Inconclusive
    };
    Ok(CompactnessProbe {
        trace,
        verdict,
        escape_index: None,
    })
}

/// Outcome of a range escape scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeEscape {
    /// A point within the scanned radius whose image is longer than the
    /// bound.
    Escaped(Point),
    /// No image exceeded the bound among points up to the reported radius
    /// (the requested radius clamped to the point budget).
    NotEscapedWithin(u64),
}

/// Scans points of length at most `max_length` (clamped to the point budget)
/// in `(length, index)` order for one whose image length exceeds
/// `range_bound`. A finite-range map never escapes its own exact bound.
pub fn range_escape_probe(
    phi: &SelfMap,
    max_length: u64,
    range_bound: u64,
) -> Result<RangeEscape> {
    let radius = phi.space().clamped_radius(max_length);
    for v in phi.space().points_up_to(radius)? {
        if phi.apply_raw(v)?.length() > range_bound {
            return Ok(RangeEscape::Escaped(v));
        }
    }
    Ok(RangeEscape::NotEscapedWithin(radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn pt(length: u64, index: u64) -> Point {
        Point::new(length, index)
    }

    fn path() -> Space {
        Space::path()
    }

    #[test]
    fn restricted_norm_detects_override_deviation() {
        let s = path();
        let id = SelfMap::identity(&s);
        let idp = SelfMap::identity(&s).with_override(pt(0, 0), pt(5, 0)).unwrap();
        let r = restricted_difference_norm(&id, &idp, 3).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.combinatorial, r.exhaustive);
    }

    #[test]
    fn restricted_norm_of_equal_maps_is_zero() {
        let s = path();
        let id = SelfMap::identity(&s);
        let r = restricted_difference_norm(&id, &id, 5).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.exhaustive, 0);
    }

    #[test]
    fn restricted_norm_sees_deviation_only_past_its_length() {
        let s = path();
        let id = SelfMap::identity(&s);
        let deep = SelfMap::identity(&s).with_override(pt(7, 0), pt(0, 0)).unwrap();
        assert_eq!(restricted_difference_norm(&id, &deep, 3).unwrap().value, 0);
        assert_eq!(restricted_difference_norm(&id, &deep, 7).unwrap().value, 2);
    }

    #[test]
    fn restricted_norm_is_monotone_in_radius() {
        let s = path();
        let a = SelfMap::identity(&s).with_override(pt(4, 0), pt(1, 0)).unwrap();
        let b = SelfMap::identity(&s);
        let mut last = 0;
        for m in 0..8 {
            let v = restricted_difference_norm(&a, &b, m).unwrap().value;
            assert!(v >= last);
            last = v;
        }
        assert_eq!(last, 2);
    }

    #[test]
    fn restricted_norm_caps_needed_points() {
        let s = path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        // radius 20 needs 22 image points, beyond the sign-pattern cap
        assert!(matches!(
            restricted_difference_norm(&id, &shift, 20),
            Err(Error::OracleBudgetExceeded(_))
        ));
    }

    #[test]
    fn lower_bound_probe_matches_class() {
        let s = path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let c1 = SelfMap::constant(&s, pt(1, 0)).unwrap();

        let p = essential_lower_bound_probe(&id, &shift, 8).unwrap();
        assert_eq!((p.certified, p.conclusive), (2, true));
        assert_eq!(p.family, ProbeFamily::ChiDifference);

        let p = essential_lower_bound_probe(&id, &c0, 8).unwrap();
        assert_eq!((p.certified, p.conclusive), (1, true));
        assert_eq!(p.family, ProbeFamily::ChiImage);

        let p = essential_lower_bound_probe(&c0, &c1, 8).unwrap();
        assert_eq!((p.certified, p.conclusive), (0, true));
    }

    #[test]
    fn compactness_probe_for_finite_deviation_pair() {
        let s = path();
        let id = SelfMap::identity(&s);
        let idp = SelfMap::identity(&s).with_override(pt(0, 0), pt(5, 0)).unwrap();
        let probe = compactness_probe(&id, &idp, 10, 16).unwrap();
        assert_eq!(probe.verdict, Verdict::ConsistentWithCompact);
        // images of the single deviation point are 0 and 5: the ray meets
        // them at steps 0 and 5 and nowhere else
        assert_eq!(probe.trace, vec![1, 0, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(probe.escape_index, Some(6));
    }

    #[test]
    fn compactness_probe_for_mixed_pair() {
        let s = path();
        let id = SelfMap::identity(&s);
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let probe = compactness_probe(&id, &c0, 10, 16).unwrap();
        assert_eq!(probe.verdict, Verdict::WitnessAgainstCompact);
        assert!(probe.trace.iter().all(|&t| t >= 1));
    }

    #[test]
    fn compactness_probe_for_infinite_deviation_pair() {
        let s = path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let probe = compactness_probe(&id, &shift, 10, 16).unwrap();
        assert_eq!(probe.verdict, Verdict::WitnessAgainstCompact);
        assert!(probe.trace.iter().all(|&t| t == 2));
    }

    #[test]
    fn compactness_probe_for_distinct_constants() {
        let s = path();
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let c1 = SelfMap::constant(&s, pt(1, 0)).unwrap();
        let probe = compactness_probe(&c0, &c1, 8, 16).unwrap();
        assert_eq!(probe.verdict, Verdict::ConsistentWithCompact);
        // the constants occupy ray steps 0 and 1; from step 2 on the trace
        // is identically zero
        assert_eq!(probe.trace, vec![1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(probe.escape_index, Some(2));
    }

    #[test]
    fn range_escape_examples() {
        let s = path();
        let id = SelfMap::identity(&s);
        match range_escape_probe(&id, 100, 50).unwrap() {
            RangeEscape::Escaped(v) => assert_eq!(v.length(), 51),
            other => panic!("identity must escape bound 50, got {other:?}"),
        }

        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        assert!(matches!(
            range_escape_probe(&c0, 200, 0).unwrap(),
            RangeEscape::NotEscapedWithin(200)
        ));

        let r = SelfMap::ray_advance(&s, 1)
            .unwrap()
            .with_override(pt(0, 0), pt(0, 0))
            .unwrap();
        match range_escape_probe(&r, 10, 5).unwrap() {
            RangeEscape::Escaped(v) => assert_eq!(v, pt(5, 0)),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn finite_range_never_escapes_its_exact_bound() {
        let s = path();
        let c = SelfMap::constant(&s, pt(2, 0))
            .unwrap()
            .with_override(pt(1, 0), pt(6, 0))
            .unwrap();
        let bound = c
            .exact_finite_range()
            .unwrap()
            .iter()
            .map(|p| p.length())
            .max()
            .unwrap();
        assert_eq!(bound, 6);
        assert!(matches!(
            range_escape_probe(&c, 50, bound).unwrap(),
            RangeEscape::NotEscapedWithin(_)
        ));
        assert!(matches!(
            range_escape_probe(&c, 50, bound - 1).unwrap(),
            RangeEscape::Escaped(_)
        ));
    }
}
