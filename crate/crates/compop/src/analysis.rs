//! Exact classification of map pairs and the closed-form operator results
//! built on it: norms and essential norms of composition operators and their
//! differences, compactness, and the constructive witnesses behind each
//! value.
//!
//! Everything here is a total decision procedure over the symbolic map
//! family. Essential norms come from the relation class, never from any
//! optimization over compact operators; the [`crate::oracle`] module
//! independently certifies the same values from below with explicit witness
//! families.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{difference_value, difference_witness, BoundedFunction};
use crate::selfmap::{Deviation, SelfMap, TailRule};
use crate::space::Point;

/// Which of the four range/deviation relations holds for a pair of maps.
/// Exactly one variant applies to any pair on a common space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RelationClass {
    /// Both maps have finite range.
    #[serde(rename = "both-finite-range")]
    BothFiniteRange,
    /// Exactly one map has finite range.
    #[serde(rename = "mixed-range")]
    Mixed,
    /// Both have infinite range and the deviation set is finite.
    #[serde(rename = "finite-deviation")]
    BothInfiniteFiniteDeviation,
    /// Both have infinite range and the deviation set is infinite.
    #[serde(rename = "infinite-deviation")]
    BothInfiniteInfiniteDeviation,
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RelationClass::BothFiniteRange => "both-finite-range",
            RelationClass::Mixed => "mixed-range",
            RelationClass::BothInfiniteFiniteDeviation => "finite-deviation",
            RelationClass::BothInfiniteInfiniteDeviation => "infinite-deviation",
        };
        write!(f, "{name}")
    }
}

/// A relation class together with whether the two maps are equal as maps.
/// Equality is only possible in the two classes whose deviation set is
/// finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: RelationClass,
    pub equal: bool,
}

/// Operator norm, essential norm, and compactness of a composition operator
/// or of a difference of two. All values are exact small integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormReport {
    pub operator_norm: u8,
    pub essential_norm: u8,
    pub compact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Classification>,
}

/// Decides which relation holds for the pair, plus map equality.
pub fn classify(phi: &SelfMap, psi: &SelfMap) -> Result<Classification> {
    phi.same_space(psi)?;
    let class = match (phi.range_is_finite(), psi.range_is_finite()) {
        (true, true) => RelationClass::BothFiniteRange,
        (true, false) | (false, true) => RelationClass::Mixed,
        (false, false) => {
            if phi.deviation(psi)?.is_finite() {
                RelationClass::BothInfiniteFiniteDeviation
            } else {
                RelationClass::BothInfiniteInfiniteDeviation
            }
        }
    };
    Ok(Classification {
        class,
        equal: phi == psi,
    })
}

/// Norms of a single composition operator: the operator norm is always 1,
/// and the operator is compact exactly when the symbol has finite range.
pub fn single_norms(phi: &SelfMap) -> NormReport {
    let finite = phi.range_is_finite();
    NormReport {
        operator_norm: 1,
        essential_norm: if finite { 0 } else { 1 },
        compact: finite,
        relation: None,
    }
}

/// Norms of the difference of two composition operators. The operator norm
/// is 0 for equal symbols and exactly 2 otherwise; the essential norm is 2,
/// 1, or 0 according to the relation class; the difference is compact
/// exactly when the essential norm vanishes.
pub fn difference_norms(phi: &SelfMap, psi: &SelfMap) -> Result<NormReport> {
    let c = classify(phi, psi)?;
    let essential_norm = match c.class {
        RelationClass::BothInfiniteInfiniteDeviation => 2,
        RelationClass::Mixed => 1,
        RelationClass::BothFiniteRange | RelationClass::BothInfiniteFiniteDeviation => 0,
    };
    Ok(NormReport {
        operator_norm: if c.equal { 0 } else { 2 },
        essential_norm,
        compact: essential_norm == 0,
        relation: Some(c),
    })
}

/// The smallest `(length, index)` point where the two maps differ, if any.
pub fn smallest_deviation_point(phi: &SelfMap, psi: &SelfMap) -> Result<Option<Point>> {
    match phi.deviation(psi)? {
        Deviation::Finite(points) => Ok(points.first().copied()),
        Deviation::Infinite(witness) => Ok(Some(witness.take(1)?[0])),
    }
}

/// A unit-norm function on which the difference operator attains its norm.
#[derive(Clone, Debug)]
pub struct AttainmentWitness {
    /// The smallest point where the maps differ.
    pub base: Point,
    /// The characteristic-difference function built at the base point.
    pub witness: BoundedFunction,
    /// The exactly attained value; always 2.
    pub attained: u8,
}

/// Builds the norm-attaining witness for a pair of distinct maps and checks
/// by direct evaluation that its norm is 1 and the difference image reaches
/// modulus 2 at the base point.
pub fn norm_attainment_witness(phi: &SelfMap, psi: &SelfMap) -> Result<AttainmentWitness> {
    let base = smallest_deviation_point(phi, psi)?.ok_or(Error::EqualMaps)?;
    let witness = difference_witness(phi, psi, base)?;
    if witness.sup_norm_squared() != BigRational::from_integer(1.into()) {
        return Err(Error::Internal(
            "attainment witness must have supremum norm exactly 1".into(),
        ));
    }
    let attained_sq = difference_value(phi, psi, &witness, base)?.modulus_squared();
    if attained_sq != BigRational::from_integer(4.into()) {
        return Err(Error::Internal(
            "difference image of the attainment witness must have modulus 2 at the base".into(),
        ));
    }
    Ok(AttainmentWitness {
        base,
        witness,
        attained: 2,
    })
}

fn require_class(found: Classification, expected: RelationClass) -> Result<()> {
    if found.class == expected {
        Ok(())
    } else {
        Err(Error::WrongRelationClass {
            expected,
            found: found.class,
        })
    }
}

/// For a pair with infinite deviation, the family of characteristic
/// difference functions along the deviation sequence. Each member has
/// supremum norm 1 and difference image of modulus 2 at its base point, and
/// the family is pointwise null: across the generated prefix no point
/// appears in more supports than the override tables plus the two tail
/// occurrences allow.
pub fn essential_witness_sequence(
    phi: &SelfMap,
    psi: &SelfMap,
    n: usize,
) -> Result<Vec<BoundedFunction>> {
    require_class(classify(phi, psi)?, RelationClass::BothInfiniteInfiniteDeviation)?;
    let bases = phi.increasing_deviation_sequence(psi, n)?;
    let mut family = Vec::with_capacity(n);
    for &base in &bases {
        let f = difference_witness(phi, psi, base)?;
        if f.sup_norm_squared() != BigRational::from_integer(1.into()) {
            return Err(Error::Internal(
                "essential witness must have supremum norm exactly 1".into(),
            ));
        }
        let attained = difference_value(phi, psi, &f, base)?.modulus_squared();
        if attained != BigRational::from_integer(4.into()) {
            return Err(Error::Internal(
                "essential witness must reach modulus 2 at its base point".into(),
            ));
        }
        family.push(f);
    }
    // pointwise-null check on the generated prefix: a fixed point can occur
    // as a tail image at most once per map along a strictly increasing base
    // sequence, plus once per override entry
    let bound = phi.overrides().len() + psi.overrides().len() + 2;
    let mut occurrences: BTreeMap<Point, usize> = BTreeMap::new();
    for f in &family {
        for (p, _) in f.support() {
            *occurrences.entry(*p).or_insert(0) += 1;
        }
    }
    if occurrences.values().any(|&c| c > bound) {
        return Err(Error::Internal(
            "essential witness family is not pointwise null on the generated prefix".into(),
        ));
    }
    Ok(family)
}

/// For a mixed pair, characteristic functions of escaping images of the
/// infinite-range map, chosen outside the exact finite range of the other
/// map. The difference operator sends each member to a function of modulus
/// 1 at the member's base point.
pub fn mixed_noncompact_witness(
    phi: &SelfMap,
    psi: &SelfMap,
    n: usize,
) -> Result<Vec<BoundedFunction>> {
    require_class(classify(phi, psi)?, RelationClass::Mixed)?;
    let (infinite, finite) = if phi.range_is_finite() {
        (psi, phi)
    } else {
        (phi, psi)
    };
    let avoid = finite
        .exact_finite_range()
        .ok_or_else(|| Error::Internal("mixed pair must have a finite-range member".into()))?;
    let bases = infinite.escaping_sequence(n, Some(&avoid))?;
    let mut family = Vec::with_capacity(n);
    for &base in &bases {
        let image = infinite.apply(base)?;
        let f = BoundedFunction::chi(image);
        let value = difference_value(phi, psi, &f, base)?;
        if value.modulus_squared() != BigRational::from_integer(1.into()) {
            return Err(Error::Internal(
                "mixed witness must reach modulus 1 at its base point".into(),
            ));
        }
        family.push(f);
    }
    Ok(family)
}

/// Two certified companions of a map: one related to it within its own
/// class (and distinct from it), one across the range split.
#[derive(Clone, Debug)]
pub struct ClassRepresentatives {
    /// Distinct map in the same class: both-finite-range for a finite-range
    /// input, finite-deviation for an infinite-range input.
    pub same_class: SelfMap,
    pub same_class_relation: Classification,
    /// Map across the split: mixed-range for a finite-range input,
    /// infinite-deviation for an infinite-range input.
    pub cross_class: SelfMap,
    pub cross_class_relation: Classification,
}

/// Produces the two companions and certifies both relations by running the
/// classifier on the results.
pub fn class_representatives(phi: &SelfMap) -> Result<ClassRepresentatives> {
    let space = phi.space();
    let (same_class, expected_same, cross_class, expected_cross) = if phi.range_is_finite() {
        let constant_root = SelfMap::constant(space, space.root())?;
        let same = if *phi == constant_root {
            SelfMap::constant(space, space.canonical_ray(1)?)?
        } else {
            constant_root
        };
        (
            same,
            RelationClass::BothFiniteRange,
            SelfMap::identity(space),
            RelationClass::Mixed,
        )
    } else {
        // perturb at the root toward the smallest point other than the
        // root's current image
        let image_of_root = phi.apply(space.root())?;
        let target = space
            .points()
            .find(|&p| p != image_of_root)
            .expect("an unbounded space has more than one point");
        let same = phi.clone().with_override(space.root(), target)?;
        let cross = match phi.tail() {
            TailRule::RayAdvance(1) => SelfMap::ray_advance(space, 2)?,
            _ => SelfMap::ray_advance(space, 1)?,
        };
        (
            same,
            RelationClass::BothInfiniteFiniteDeviation,
            cross,
            RelationClass::BothInfiniteInfiniteDeviation,
        )
    };
    let same_class_relation = classify(phi, &same_class)?;
    let cross_class_relation = classify(phi, &cross_class)?;
    if same_class_relation.class != expected_same || same_class_relation.equal {
        return Err(Error::Internal(format!(
            "same-class representative certification failed: got {:?}",
            same_class_relation
        )));
    }
    if cross_class_relation.class != expected_cross || cross_class_relation.equal {
        return Err(Error::Internal(format!(
            "cross-class representative certification failed: got {:?}",
            cross_class_relation
        )));
    }
    Ok(ClassRepresentatives {
        same_class,
        same_class_relation,
        cross_class,
        cross_class_relation,
    })
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
    fn classify_covers_all_four_classes() {
        let s = path();
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let c5 = SelfMap::constant(&s, s.canonical_ray(5).unwrap()).unwrap();
        let id = SelfMap::identity(&s);
        let idp = SelfMap::identity(&s).with_override(pt(0, 0), pt(5, 0)).unwrap();
        let shift = SelfMap::ray_advance(&s, 1).unwrap();

        let both_finite = classify(&c0, &c5).unwrap();
        assert_eq!(both_finite.class, RelationClass::BothFiniteRange);
        assert!(!both_finite.equal);

        assert_eq!(classify(&id, &c0).unwrap().class, RelationClass::Mixed);
        assert_eq!(
            classify(&id, &idp).unwrap().class,
            RelationClass::BothInfiniteFiniteDeviation
        );
        assert_eq!(
            classify(&id, &shift).unwrap().class,
            RelationClass::BothInfiniteInfiniteDeviation
        );
    }

    #[test]
    fn classify_equal_flag_only_in_deviation_free_classes() {
        let s = path();
        let id = SelfMap::identity(&s);
        let c = classify(&id, &id).unwrap();
        assert!(c.equal);
        assert_eq!(c.class, RelationClass::BothInfiniteFiniteDeviation);
        let k = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let ck = classify(&k, &k).unwrap();
        assert!(ck.equal);
        assert_eq!(ck.class, RelationClass::BothFiniteRange);
    }

    #[test]
    fn single_norm_values() {
        let s = path();
        let id = single_norms(&SelfMap::identity(&s));
        assert_eq!((id.operator_norm, id.essential_norm, id.compact), (1, 1, false));

        let c = single_norms(&SelfMap::constant(&s, pt(0, 0)).unwrap());
        assert_eq!((c.operator_norm, c.essential_norm, c.compact), (1, 0, true));

        let r = SelfMap::ray_advance(&s, 3)
            .unwrap()
            .with_override(pt(0, 0), pt(0, 0))
            .unwrap();
        let rn = single_norms(&r);
        assert_eq!((rn.operator_norm, rn.essential_norm, rn.compact), (1, 1, false));
    }

    #[test]
    fn difference_norm_values_by_class() {
        let s = path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let idp = SelfMap::identity(&s)
            .with_override(pt(0, 0), s.canonical_ray(5).unwrap())
            .unwrap();

        let r = difference_norms(&id, &shift).unwrap();
        assert_eq!((r.operator_norm, r.essential_norm, r.compact), (2, 2, false));

        let r = difference_norms(&id, &c0).unwrap();
        assert_eq!((r.operator_norm, r.essential_norm, r.compact), (2, 1, false));

        let r = difference_norms(&id, &idp).unwrap();
        assert_eq!((r.operator_norm, r.essential_norm, r.compact), (2, 0, true));

        let r = difference_norms(&id, &id).unwrap();
        assert_eq!((r.operator_norm, r.essential_norm, r.compact), (0, 0, true));
    }

    #[test]
    fn essential_norm_never_exceeds_operator_norm() {
        let s = path();
        let maps = [
            SelfMap::identity(&s),
            SelfMap::constant(&s, pt(0, 0)).unwrap(),
            SelfMap::ray_advance(&s, 2).unwrap(),
            SelfMap::identity(&s).with_override(pt(1, 0), pt(3, 0)).unwrap(),
        ];
        for m in &maps {
            let r = single_norms(m);
            assert!(r.essential_norm <= r.operator_norm);
            for other in &maps {
                let d = difference_norms(m, other).unwrap();
                assert!(d.essential_norm <= d.operator_norm);
                assert_eq!(d.compact, d.essential_norm == 0);
            }
        }
    }

    #[test]
    fn attainment_witness_examples() {
        let s = path();
        let id = SelfMap::identity(&s);
        let idp = SelfMap::identity(&s).with_override(pt(0, 0), pt(5, 0)).unwrap();
        let w = norm_attainment_witness(&id, &idp).unwrap();
        assert_eq!(w.base, pt(0, 0));
        assert_eq!(w.attained, 2);
        assert_eq!(w.witness.value_at(pt(0, 0)), crate::funcspace::ComplexRational::one());
        assert_eq!(
            w.witness.value_at(pt(5, 0)),
            crate::funcspace::ComplexRational::from_integer(-1)
        );

        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let w = norm_attainment_witness(&id, &shift).unwrap();
        assert_eq!(w.base, pt(0, 0));
        assert_eq!(w.witness.support_len(), 2);

        assert!(matches!(norm_attainment_witness(&id, &id), Err(Error::EqualMaps)));
    }

    #[test]
    fn essential_witness_sequence_example() {
        let s = path();
        let id = SelfMap::identity(&s);
        let shift = SelfMap::ray_advance(&s, 1).unwrap();
        let fam = essential_witness_sequence(&id, &shift, 2).unwrap();
        assert_eq!(fam.len(), 2);
        // chi_0 - chi_1 then chi_1 - chi_2
        assert_eq!(fam[0], BoundedFunction::chi(pt(0, 0)) - BoundedFunction::chi(pt(1, 0)));
        assert_eq!(fam[1], BoundedFunction::chi(pt(1, 0)) - BoundedFunction::chi(pt(2, 0)));
        for f in &fam {
            assert_eq!(f.sup_norm_squared(), BigRational::from_integer(1.into()));
        }

        let idp = SelfMap::identity(&s).with_override(pt(0, 0), pt(5, 0)).unwrap();
        assert!(matches!(
            essential_witness_sequence(&id, &idp, 2),
            Err(Error::WrongRelationClass { .. })
        ));
    }

    #[test]
    fn mixed_witness_example() {
        let s = path();
        let id = SelfMap::identity(&s);
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let fam = mixed_noncompact_witness(&id, &c0, 2).unwrap();
        // the image 0 lies in the constant map's range, so bases start at 1
        assert_eq!(fam[0], BoundedFunction::chi(pt(1, 0)));
        assert_eq!(fam[1], BoundedFunction::chi(pt(2, 0)));

        let c5 = SelfMap::constant(&s, pt(5, 0)).unwrap();
        assert!(matches!(
            mixed_noncompact_witness(&c0, &c5, 2),
            Err(Error::WrongRelationClass { .. })
        ));
    }

    #[test]
    fn mixed_witness_avoids_override_range_points() {
        let s = path();
        let id = SelfMap::identity(&s);
        let c = SelfMap::constant(&s, pt(0, 0))
            .unwrap()
            .with_override(pt(0, 0), pt(2, 0))
            .unwrap();
        // range of c is {0, 2}; identity images must skip both
        let fam = mixed_noncompact_witness(&id, &c, 2).unwrap();
        assert_eq!(fam[0], BoundedFunction::chi(pt(1, 0)));
        assert_eq!(fam[1], BoundedFunction::chi(pt(3, 0)));
    }

    #[test]
    fn class_representatives_for_constant_root() {
        let s = path();
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        let reps = class_representatives(&c0).unwrap();
        assert_eq!(reps.same_class, SelfMap::constant(&s, pt(1, 0)).unwrap());
        assert_eq!(reps.cross_class, SelfMap::identity(&s));
        assert_eq!(reps.same_class_relation.class, RelationClass::BothFiniteRange);
        assert_eq!(reps.cross_class_relation.class, RelationClass::Mixed);
    }

    #[test]
    fn class_representatives_for_identity() {
        let s = path();
        let id = SelfMap::identity(&s);
        let reps = class_representatives(&id).unwrap();
        assert_eq!(
            reps.same_class,
            SelfMap::identity(&s).with_override(pt(0, 0), pt(1, 0)).unwrap()
        );
        assert_eq!(reps.cross_class, SelfMap::ray_advance(&s, 1).unwrap());
        assert_eq!(
            reps.same_class_relation.class,
            RelationClass::BothInfiniteFiniteDeviation
        );
        assert!(!reps.same_class_relation.equal);
        assert_eq!(
            reps.cross_class_relation.class,
            RelationClass::BothInfiniteInfiniteDeviation
        );
    }

    #[test]
    fn class_representatives_avoid_the_input_map() {
        let s = path();
        // constant at the root already: companion moves to the next point
        let c0 = SelfMap::constant(&s, pt(0, 0)).unwrap();
        assert_ne!(class_representatives(&c0).unwrap().same_class, c0);
        // ray-advance 1: the infinite-deviation companion must not be itself
        let r1 = SelfMap::ray_advance(&s, 1).unwrap();
        let reps = class_representatives(&r1).unwrap();
        assert_ne!(reps.cross_class, r1);
        assert_eq!(
            reps.cross_class_relation.class,
            RelationClass::BothInfiniteInfiniteDeviation
        );
    }

    #[test]
    fn classification_is_symmetric() {
        let s = path();
        let maps = [
            SelfMap::identity(&s),
            SelfMap::constant(&s, pt(0, 0)).unwrap(),
            SelfMap::constant(&s, pt(3, 0)).unwrap(),
            SelfMap::ray_advance(&s, 1).unwrap(),
            SelfMap::identity(&s).with_override(pt(2, 0), pt(0, 0)).unwrap(),
        ];
        for a in &maps {
            for b in &maps {
                assert_eq!(
                    classify(a, b).unwrap().class,
                    classify(b, a).unwrap().class
                );
            }
        }
    }
}
