//! The space of composition operators under the uniform (operator-norm)
//! metric and the essential pseudo-metric.
//!
//! An operator is identified with its symbol: characteristic functions
//! separate points, so distinct symbols give distinct operators. Distances
//! only take the values 0, 1, 2, so every ball is one of four symbolic
//! shapes, returned as a descriptor whose membership predicate is decidable.
//! The structural facts — no Hausdorff separation, no essentially isolated
//! points, components equal to the compact class and the finite-deviation
//! classes — are all surfaced as certificate-producing checks.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::analysis::{class_representatives, classify, difference_norms, RelationClass};
use crate::error::{Error, Result};
use crate::selfmap::SelfMap;
use crate::space::Space;

/// A composition operator, identified with its symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorPoint {
    symbol: SelfMap,
}

impl OperatorPoint {
    pub fn new(symbol: SelfMap) -> OperatorPoint {
        OperatorPoint { symbol }
    }

    pub fn symbol(&self) -> &SelfMap {
        &self.symbol
    }

    pub fn is_compact(&self) -> bool {
        self.symbol.range_is_finite()
    }
}

impl fmt::Display for OperatorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)
    }
}

/// Which of the two metrics a query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Uniform,
    Essential,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Uniform => write!(f, "uniform"),
            Topology::Essential => write!(f, "essential"),
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Topology, String> {
        match s {
            "uniform" => Ok(Topology::Uniform),
            "essential" => Ok(Topology::Essential),
            other => Err(format!("unknown topology `{other}`; expected `uniform` or `essential`")),
        }
    }
}

/// Symbolic shape of an essential ball. The classes are infinite, so balls
/// are never enumerated; membership is the computable interface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BallDescriptor {
    /// All compact composition operators.
    CompactClass,
    /// The finite-deviation class of the (non-compact) center.
    DotClass(SelfMap),
    /// The finite-deviation class of the center together with all compacts.
    DotClassPlusCompacts(SelfMap),
    /// Every composition operator.
    All,
}

impl BallDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            BallDescriptor::CompactClass => "compact-class",
            BallDescriptor::DotClass(_) => "dot-class",
            BallDescriptor::DotClassPlusCompacts(_) => "dot-class-plus-compacts",
            BallDescriptor::All => "all",
        }
    }
}

/// The operator-norm distance between two composition operators: 0 for equal
/// symbols and exactly 2 otherwise.
pub fn uniform_distance(x: &OperatorPoint, y: &OperatorPoint) -> Result<u8> {
    let c = classify(&x.symbol, &y.symbol)?;
    Ok(if c.equal { 0 } else { 2 })
}

/// The essential-norm distance between two composition operators: 2 for an
/// infinite-deviation pair, 1 for a mixed pair, 0 otherwise.
pub fn essential_distance(x: &OperatorPoint, y: &OperatorPoint) -> Result<u8> {
    Ok(difference_norms(&x.symbol, &y.symbol)?.essential_norm)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// The essential ball around a center as a symbolic descriptor.
///
/// For a compact center the ball is the compact class up to radius 1 and
/// everything beyond; for a non-compact center it is the center's
/// finite-deviation class up to radius 1, that class plus the compacts up to
/// radius 2, and everything beyond.
pub fn essential_ball(center: &OperatorPoint, epsilon: &BigRational) -> Result<BallDescriptor> {
    if *epsilon <= BigRational::zero() {
        return Err(Error::NonpositiveEpsilon);
    }
    let desc = if center.is_compact() {
        if *epsilon <= int(1) {
            BallDescriptor::CompactClass
        } else {
            BallDescriptor::All
        }
    } else if *epsilon <= int(1) {
        BallDescriptor::DotClass(center.symbol.clone())
    } else if *epsilon <= int(2) {
        BallDescriptor::DotClassPlusCompacts(center.symbol.clone())
    } else {
        BallDescriptor::All
    };
    Ok(desc)
}

/// Membership in a ball descriptor, decided through the classifier.
pub fn descriptor_contains(descriptor: &BallDescriptor, candidate: &OperatorPoint) -> Result<bool> {
    match descriptor {
        BallDescriptor::CompactClass => Ok(candidate.is_compact()),
        BallDescriptor::DotClass(center) => Ok(classify(center, &candidate.symbol)?.class
            == RelationClass::BothInfiniteFiniteDeviation),
        BallDescriptor::DotClassPlusCompacts(center) => Ok(candidate.is_compact()
            || classify(center, &candidate.symbol)?.class
                == RelationClass::BothInfiniteFiniteDeviation),
        BallDescriptor::All => Ok(true),
    }
}

/// Whether the candidate lies in the open essential ball, i.e. the essential
/// distance to the center is strictly below `epsilon`. Also checks the
/// descriptor route and demands agreement.
pub fn ball_contains(
    center: &OperatorPoint,
    epsilon: &BigRational,
    candidate: &OperatorPoint,
) -> Result<bool> {
    if *epsilon <= BigRational::zero() {
        return Err(Error::NonpositiveEpsilon);
    }
    let by_distance = int(essential_distance(center, candidate)? as i64) < *epsilon;
    let by_descriptor = descriptor_contains(&essential_ball(center, epsilon)?, candidate)?;
    if by_distance != by_descriptor {
        return Err(Error::Internal(format!(
            "ball membership disagrees with its descriptor for {candidate} at radius {epsilon}"
        )));
    }
    Ok(by_distance)
}

/// Whether two operators lie in the same component. The uniform topology is
/// discrete, so components are singletons; the essential components are the
/// compact class and the finite-deviation classes, i.e. the pairs whose
/// difference is compact.
pub fn same_component(x: &OperatorPoint, y: &OperatorPoint, topology: Topology) -> Result<bool> {
    let c = classify(&x.symbol, &y.symbol)?;
    Ok(match topology {
        Topology::Uniform => c.equal,
        Topology::Essential => matches!(
            c.class,
            RelationClass::BothFiniteRange | RelationClass::BothInfiniteFiniteDeviation
        ),
    })
}

/// Outcome of an isolation query.
#[derive(Clone, Debug)]
pub enum Isolation {
    Isolated,
    /// Not isolated, with a distinct operator lying in every neighborhood of
    /// the queried one.
    NotIsolated { witness: OperatorPoint },
}

impl Isolation {
    pub fn is_isolated(&self) -> bool {
        matches!(self, Isolation::Isolated)
    }
}

/// Whether the operator is an isolated point. Every operator is isolated in
/// the uniform topology; none is in the essential topology, and in that case
/// a distinct same-class companion at essential distance 0 is returned as
/// the witness.
pub fn is_isolated(x: &OperatorPoint, topology: Topology) -> Result<Isolation> {
    match topology {
        Topology::Uniform => Ok(Isolation::Isolated),
        Topology::Essential => {
            let witness = OperatorPoint::new(class_representatives(&x.symbol)?.same_class);
            if essential_distance(x, &witness)? != 0 {
                return Err(Error::Internal(
                    "isolation witness must sit at essential distance 0".into(),
                ));
            }
            Ok(Isolation::NotIsolated { witness })
        }
    }
}

/// Two distinct operators that no pair of essential neighborhoods can
/// separate: two distinct constant symbols. Certified by mutual membership
/// in the radius-1/2 balls.
pub fn hausdorff_counterexample(space: &Space) -> Result<(OperatorPoint, OperatorPoint)> {
    let x = OperatorPoint::new(SelfMap::constant(space, space.root())?);
    let y = OperatorPoint::new(SelfMap::constant(space, space.canonical_ray(1)?)?);
    let radius = BigRational::new(1.into(), 2.into());
    if !(ball_contains(&x, &radius, &y)? && ball_contains(&y, &radius, &x)?) {
        return Err(Error::Internal(
            "hausdorff counterexample pair must contain each other's radius-1/2 balls".into(),
        ));
    }
    Ok((x, y))
}

/// The interval of `[0, 1]` a ball pulls back to along the two-piece path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreimageKind {
    /// `[0, 1]` — both endpoints inside.
    FullInterval,
    /// `[0, 1)` — start inside, end outside.
    HalfOpen,
    /// `{1}` — end inside, start outside. Not open; never realizable when
    /// the endpoints share a component.
    EndpointOnly,
    /// The empty set.
    Empty,
}

impl PreimageKind {
    pub fn is_open(&self) -> bool {
        !matches!(self, PreimageKind::EndpointOnly)
    }
}

/// One case of the continuity analysis: a descriptor-distinct ball around
/// one of the two endpoints and the shape of its preimage under the path.
#[derive(Clone, Debug, Serialize)]
pub struct BallCase {
    /// Which endpoint the ball is centered at: "start" or "end".
    pub center: &'static str,
    /// Radius representative of the descriptor bucket, as a rational string.
    pub epsilon: String,
    pub descriptor: &'static str,
    pub contains_start: bool,
    pub contains_end: bool,
    pub preimage: PreimageKind,
    pub preimage_open: bool,
}

/// A certified step path between two operators of one essential component:
/// constant at the start on `[0, 1)`, jumping to the end at `1`. The
/// certificate enumerates every descriptor-distinct ball around either
/// endpoint and confirms each preimage is open.
#[derive(Clone, Debug)]
pub struct PathCertificate {
    pub start: OperatorPoint,
    pub end: OperatorPoint,
    pub cases: Vec<BallCase>,
    pub continuous: bool,
}

/// Builds the step path and its continuity certificate. Errors when the two
/// operators lie in different essential components.
pub fn path_certificate(x: &OperatorPoint, y: &OperatorPoint) -> Result<PathCertificate> {
    if !same_component(x, y, Topology::Essential)? {
        return Err(Error::DifferentComponents);
    }
    let mut cases = Vec::new();
    for (tag, center) in [("start", x), ("end", y)] {
        let radii: &[(i64, i64)] = if center.is_compact() {
            &[(1, 2), (3, 2)]
        } else {
            &[(1, 2), (3, 2), (5, 2)]
        };
        for &(numer, denom) in radii {
            let epsilon = BigRational::new(numer.into(), denom.into());
            let descriptor = essential_ball(center, &epsilon)?;
            let contains_start = descriptor_contains(&descriptor, x)?;
            let contains_end = descriptor_contains(&descriptor, y)?;
            let preimage = match (contains_start, contains_end) {
                (true, true) => PreimageKind::FullInterval,
                (true, false) => PreimageKind::HalfOpen,
                (false, true) => PreimageKind::EndpointOnly,
                (false, false) => PreimageKind::Empty,
            };
            cases.push(BallCase {
                center: tag,
                epsilon: format!("{}/{}", numer, denom),
                descriptor: descriptor.kind(),
                contains_start,
                contains_end,
                preimage,
                preimage_open: preimage.is_open(),
            });
        }
    }
    let continuous = cases.iter().all(|c| c.preimage_open);
    if !continuous {
        return Err(Error::Internal(
            "step path between operators of one component must have open preimages".into(),
        ));
    }
    Ok(PathCertificate {
        start: x.clone(),
        end: y.clone(),
        cases,
        continuous,
    })
}
