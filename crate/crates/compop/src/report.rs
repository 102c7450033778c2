//! Executes a scenario's queries and assembles a deterministic,
//! machine-readable report.
//!
//! Every record echoes its query, carries the symbolic answer (including the
//! relation class wherever one was used), and optionally an oracle
//! cross-check. A cross-check status is always `agree` or `inconclusive`; a
//! disagreement is an implementation bug and aborts the run with a
//! diagnostic instead of being recorded.

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    classify, difference_norms, norm_attainment_witness, single_norms, smallest_deviation_point,
    RelationClass,
};
use crate::error::{Error, Result};
use crate::funcspace::BoundedFunction;
use crate::oracle::{
    compactness_probe, essential_lower_bound_probe, range_escape_probe,
    restricted_difference_norm, RangeEscape, RestrictedNorm, Verdict,
};
use crate::scenario::{Budgets, Query, QueryKind, Scenario};
use crate::selfmap::{Deviation, SelfMap};
use crate::topology::{
    ball_contains, essential_ball, essential_distance, hausdorff_counterexample, is_isolated,
    path_certificate, same_component, uniform_distance, Isolation, OperatorPoint, Topology,
};

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: ScenarioEcho,
    pub records: Vec<Record>,
    pub summary: Summary,
}

#[derive(Debug, Serialize)]
pub struct ScenarioEcho {
    pub space: String,
    pub budgets: BudgetsEcho,
    pub maps: Vec<MapEcho>,
}

#[derive(Debug, Serialize)]
pub struct BudgetsEcho {
    pub points: u64,
    pub radius: u64,
    pub family: usize,
}

#[derive(Debug, Serialize)]
pub struct MapEcho {
    pub name: String,
    pub definition: String,
}

#[derive(Debug, Serialize)]
pub struct Record {
    pub query: String,
    pub kind: &'static str,
    pub status: &'static str,
    /// Definitions of the maps the query references, so each record is
    /// self-contained and changes whenever a referenced definition does.
    #[serde(skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub maps: std::collections::BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Debug, Serialize)]
pub struct OracleCheck {
    /// `agree` or `inconclusive`; disagreement aborts the whole run.
    pub status: &'static str,
    pub details: Value,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub records: usize,
    pub errors: usize,
    pub oracle_agree: usize,
    pub oracle_inconclusive: usize,
    pub status: &'static str,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization is total");
        out.push('\n');
        out
    }
}

fn rat_str(r: &BigRational) -> String {
    if r.denom() == &num_bigint::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn function_value(f: &BoundedFunction) -> Value {
    let entries: Vec<Value> = f
        .support()
        .map(|(p, v)| json!([p.to_string(), v.to_string()]))
        .collect();
    Value::Array(entries)
}

/// Runs all queries of a scenario in order. Per-query failures (for example
/// budget exhaustion) are recorded in their records; an internal consistency
/// disagreement aborts the run.
pub fn run(scenario: &Scenario, validate_all: bool) -> Result<Report> {
    let mut records = Vec::with_capacity(scenario.queries.len());
    let mut errors = 0usize;
    let mut oracle_agree = 0usize;
    let mut oracle_inconclusive = 0usize;

    for query in &scenario.queries {
        let referenced: std::collections::BTreeMap<String, String> = query
            .kind
            .referenced_maps()
            .into_iter()
            .filter_map(|name| {
                scenario
                    .map(name)
                    .map(|m| (name.to_string(), m.to_string()))
            })
            .collect();
        match run_query(scenario, query, validate_all) {
            Ok((result, oracle)) => {
                if let Some(check) = &oracle {
                    match check.status {
                        "agree" => oracle_agree += 1,
                        _ => oracle_inconclusive += 1,
                    }
                }
                records.push(Record {
                    query: query.text.clone(),
                    kind: query.kind.kind_name(),
                    status: "ok",
                    maps: referenced,
                    result: Some(result),
                    error: None,
                    oracle,
                });
            }
            Err(e @ Error::Internal(_)) => return Err(e),
            Err(e) => {
                errors += 1;
                records.push(Record {
                    query: query.text.clone(),
                    kind: query.kind.kind_name(),
                    status: "error",
                    maps: referenced,
                    result: None,
                    error: Some(e.to_string()),
                    oracle: None,
                });
            }
        }
    }

    let status = if errors == 0 { "pass" } else { "partial" };
    Ok(Report {
        scenario: ScenarioEcho {
            space: scenario.space.to_string(),
            budgets: BudgetsEcho {
                points: scenario.budgets.points,
                radius: scenario.budgets.radius,
                family: scenario.budgets.family,
            },
            maps: scenario
                .maps
                .iter()
                .map(|(name, map)| MapEcho {
                    name: name.clone(),
                    definition: map.to_string(),
                })
                .collect(),
        },
        summary: Summary {
            records: records.len(),
            errors,
            oracle_agree,
            oracle_inconclusive,
            status,
        },
        records,
    })
}

fn lookup<'a>(scenario: &'a Scenario, name: &str) -> Result<&'a SelfMap> {
    scenario
        .map(name)
        .ok_or_else(|| Error::Internal(format!("validated scenario lost map `{name}`")))
}

fn run_query(
    scenario: &Scenario,
    query: &Query,
    validate_all: bool,
) -> Result<(Value, Option<OracleCheck>)> {
    let budgets = &scenario.budgets;
    match &query.kind {
        QueryKind::Classify { a, b } => {
            let (ma, mb) = (lookup(scenario, a)?, lookup(scenario, b)?);
            let c = classify(ma, mb)?;
            let deviation = match ma.deviation(mb)? {
                Deviation::Finite(points) => json!({
                    "kind": "finite",
                    "points": points,
                }),
                Deviation::Infinite(witness) => json!({
                    "kind": "infinite",
                    "witness_prefix": witness.take(4)?,
                }),
            };
            let result = json!({
                "class": c.class,
                "equal": c.equal,
                "deviation": deviation,
            });
            let oracle = validate_all
                .then(|| pair_cross_check(ma, mb, budgets))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::SingleNorms { map } => {
            let m = lookup(scenario, map)?;
            let report = single_norms(m);
            let result = json!({
                "operator_norm": report.operator_norm,
                "essential_norm": report.essential_norm,
                "compact": report.compact,
                "range": if m.range_is_finite() { "finite" } else { "infinite" },
            });
            let oracle = validate_all
                .then(|| single_cross_check(m, budgets))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::DifferenceNorms { a, b } => {
            let (ma, mb) = (lookup(scenario, a)?, lookup(scenario, b)?);
            let report = difference_norms(ma, mb)?;
            let result = json!({
                "operator_norm": report.operator_norm,
                "essential_norm": report.essential_norm,
                "compact": report.compact,
                "relation": report.relation,
            });
            let oracle = validate_all
                .then(|| pair_cross_check(ma, mb, budgets))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::Witness { a, b } => {
            let (ma, mb) = (lookup(scenario, a)?, lookup(scenario, b)?);
            let witness = norm_attainment_witness(ma, mb)?;
            let result = json!({
                "base": witness.base,
                "attained": witness.attained,
                "sup_norm": witness.witness.sup_norm().to_string(),
                "function": function_value(&witness.witness),
                "relation": classify(ma, mb)?,
            });
            let oracle = validate_all
                .then(|| witness_cross_check(ma, mb, budgets))
                .transpose()?
                .flatten();
            Ok((result, oracle))
        }
        QueryKind::Ball { center, epsilon } => {
            let m = lookup(scenario, center)?;
            let op = OperatorPoint::new(m.clone());
            let descriptor = essential_ball(&op, epsilon)?;
            let result = json!({
                "center": center,
                "epsilon": rat_str(epsilon),
                "descriptor": descriptor.kind(),
            });
            let oracle = validate_all
                .then(|| ball_cross_check(scenario, &op, epsilon))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::BallContains {
            center,
            epsilon,
            candidate,
        } => {
            let c = OperatorPoint::new(lookup(scenario, center)?.clone());
            let x = OperatorPoint::new(lookup(scenario, candidate)?.clone());
            let member = ball_contains(&c, epsilon, &x)?;
            let result = json!({
                "center": center,
                "epsilon": rat_str(epsilon),
                "candidate": candidate,
                "member": member,
                "essential_distance": essential_distance(&c, &x)?,
                "relation": classify(c.symbol(), x.symbol())?,
            });
            // membership already checks the descriptor route internally
            let oracle = validate_all.then(|| OracleCheck {
                status: "agree",
                details: json!({"check": "distance and descriptor routes agree"}),
            });
            Ok((result, oracle))
        }
        QueryKind::Component { topology, a, b } => {
            let x = OperatorPoint::new(lookup(scenario, a)?.clone());
            let y = OperatorPoint::new(lookup(scenario, b)?.clone());
            let same = same_component(&x, &y, *topology)?;
            let result = json!({
                "topology": topology,
                "same_component": same,
                "relation": classify(x.symbol(), y.symbol())?,
            });
            let oracle = validate_all
                .then(|| component_cross_check(&x, &y, *topology, same))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::Isolated { topology, map } => {
            let m = lookup(scenario, map)?;
            let op = OperatorPoint::new(m.clone());
            let isolation = is_isolated(&op, *topology)?;
            let result = match &isolation {
                Isolation::Isolated => json!({
                    "topology": topology,
                    "isolated": true,
                }),
                Isolation::NotIsolated { witness } => json!({
                    "topology": topology,
                    "isolated": false,
                    "witness": witness.symbol().to_string(),
                }),
            };
            let oracle = validate_all
                .then(|| isolated_cross_check(scenario, &op, *topology, &isolation))
                .transpose()?;
            Ok((result, oracle))
        }
        QueryKind::Path { a, b } => {
            let x = OperatorPoint::new(lookup(scenario, a)?.clone());
            let y = OperatorPoint::new(lookup(scenario, b)?.clone());
            let cert = path_certificate(&x, &y)?;
            let result = json!({
                "continuous": cert.continuous,
                "cases": cert.cases,
                "relation": classify(x.symbol(), y.symbol())?,
            });
            let oracle = validate_all.then(|| OracleCheck {
                status: "agree",
                details: json!({"check": "all ball preimages open", "cases": cert.cases.len()}),
            });
            Ok((result, oracle))
        }
        QueryKind::Hausdorff => {
            let (x, y) = hausdorff_counterexample(&scenario.space)?;
            let result = json!({
                "first": x.symbol().to_string(),
                "second": y.symbol().to_string(),
                "uniform_distance": uniform_distance(&x, &y)?,
                "essential_distance": essential_distance(&x, &y)?,
                "mutual_containment_radius": "1/2",
            });
            let oracle = validate_all.then(|| OracleCheck {
                status: "agree",
                details: json!({"check": "mutual radius-1/2 ball membership certified"}),
            });
            Ok((result, oracle))
        }
        QueryKind::OracleValidate { a, b } => {
            let (ma, mb) = (lookup(scenario, a)?, lookup(scenario, b)?);
            let c = classify(ma, mb)?;
            let pair = pair_cross_check(ma, mb, budgets)?;
            let restricted = witness_restricted_norm(ma, mb, budgets)?;
            let mut status = pair.status;
            let restricted_value = match &restricted {
                Some(r) => serde_json::to_value(r).expect("serializable"),
                None => {
                    status = "inconclusive";
                    Value::Null
                }
            };
            let result = json!({
                "relation": c,
                "restricted_norm": restricted_value,
            });
            let oracle = Some(OracleCheck {
                status,
                details: pair.details,
            });
            Ok((result, oracle))
        }
    }
}

/// Lower-bound and compactness cross-check for a pair. The probes must never
/// contradict the closed-form values; a conclusive probe must match exactly.
fn pair_cross_check(a: &SelfMap, b: &SelfMap, budgets: &Budgets) -> Result<OracleCheck> {
    let norms = difference_norms(a, b)?;
    let lower = essential_lower_bound_probe(a, b, budgets.family)?;
    if lower.certified > norms.essential_norm {
        return Err(Error::Internal(format!(
            "lower-bound probe certified {} above the essential norm {}",
            lower.certified, norms.essential_norm
        )));
    }
    if lower.conclusive && lower.certified != norms.essential_norm {
        return Err(Error::Internal(format!(
            "conclusive lower-bound probe {} disagrees with essential norm {}",
            lower.certified, norms.essential_norm
        )));
    }
    let probe = compactness_probe(a, b, budgets.family, budgets.radius)?;
    let verdict_consistent = match probe.verdict {
        Verdict::ConsistentWithCompact => norms.compact,
        Verdict::WitnessAgainstCompact => !norms.compact,
        Verdict::Inconclusive => true,
    };
    if !verdict_consistent {
        return Err(Error::Internal(format!(
            "compactness probe verdict {:?} disagrees with compact = {}",
            probe.verdict, norms.compact
        )));
    }
    let conclusive = lower.conclusive && !matches!(probe.verdict, Verdict::Inconclusive);
    Ok(OracleCheck {
        status: if conclusive { "agree" } else { "inconclusive" },
        details: json!({
            "essential_norm": norms.essential_norm,
            "lower_bound": lower,
            "compactness": probe,
        }),
    })
}

/// Range-escape consistency for a single map: a finite-range map must never
/// escape its exact range bound; an infinite-range map is expected to escape
/// a modest bound within the scan radius.
fn single_cross_check(m: &SelfMap, budgets: &Budgets) -> Result<OracleCheck> {
    let radius = m.space().clamped_radius(budgets.radius);
    if let Some(range) = m.exact_finite_range() {
        let bound = range.iter().map(|p| p.length()).max().unwrap_or(0);
        match range_escape_probe(m, radius, bound)? {
            RangeEscape::Escaped(point) => Err(Error::Internal(format!(
                "finite-range map escaped its exact bound {bound} at {point}"
            ))),
            RangeEscape::NotEscapedWithin(scanned) => Ok(OracleCheck {
                status: "agree",
                details: json!({
                    "check": "no escape above the exact range bound",
                    "bound": bound,
                    "scanned_radius": scanned,
                }),
            }),
        }
    } else {
        let bound = radius / 2;
        match range_escape_probe(m, radius, bound)? {
            RangeEscape::Escaped(point) => Ok(OracleCheck {
                status: "agree",
                details: json!({
                    "check": "image length escaped the probe bound",
                    "bound": bound,
                    "witness": point,
                }),
            }),
            RangeEscape::NotEscapedWithin(scanned) => Ok(OracleCheck {
                status: "inconclusive",
                details: json!({
                    "check": "no escape found within the scan radius",
                    "bound": bound,
                    "scanned_radius": scanned,
                }),
            }),
        }
    }
}

/// Re-derives the attained difference norm through the dual-route restricted
/// maximization, when the needed-point cap allows it.
fn witness_restricted_norm(
    a: &SelfMap,
    b: &SelfMap,
    budgets: &Budgets,
) -> Result<Option<RestrictedNorm>> {
    let expected = match smallest_deviation_point(a, b)? {
        Some(point) => {
            if point.length() > budgets.radius {
                return Ok(None);
            }
            Some((point.length(), 2u8))
        }
        None => None,
    };
    let (radius, expected_value) = match expected {
        Some((l, v)) => (l, v),
        None => (budgets.radius.min(4), 0),
    };
    match restricted_difference_norm(a, b, radius) {
        Ok(r) => {
            if r.value != expected_value {
                return Err(Error::Internal(format!(
                    "restricted norm {} at radius {radius} disagrees with expected {expected_value}",
                    r.value
                )));
            }
            Ok(Some(r))
        }
        Err(Error::OracleBudgetExceeded(_)) | Err(Error::PointBudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn witness_cross_check(
    a: &SelfMap,
    b: &SelfMap,
    budgets: &Budgets,
) -> Result<Option<OracleCheck>> {
    Ok(witness_restricted_norm(a, b, budgets)?.map(|r| OracleCheck {
        status: "agree",
        details: json!({
            "check": "dual-route restricted norm reproduces the attained value",
            "restricted_norm": r,
        }),
    }))
}

/// Checks descriptor membership against the distance route for every map in
/// the scenario.
fn ball_cross_check(
    scenario: &Scenario,
    center: &OperatorPoint,
    epsilon: &BigRational,
) -> Result<OracleCheck> {
    let mut members = 0usize;
    for (_, m) in &scenario.maps {
        // ball_contains verifies the two routes against each other
        if ball_contains(center, epsilon, &OperatorPoint::new(m.clone()))? {
            members += 1;
        }
    }
    Ok(OracleCheck {
        status: "agree",
        details: json!({
            "check": "descriptor membership matches distances for all scenario maps",
            "candidates": scenario.maps.len(),
            "members": members,
        }),
    })
}

/// The component answer must match zero essential distance and compactness
/// of the difference (essential topology), or map equality (uniform).
fn component_cross_check(
    x: &OperatorPoint,
    y: &OperatorPoint,
    topology: Topology,
    same: bool,
) -> Result<OracleCheck> {
    let consistent = match topology {
        Topology::Essential => {
            let zero_distance = essential_distance(x, y)? == 0;
            let compact = difference_norms(x.symbol(), y.symbol())?.compact;
            same == zero_distance && same == compact
        }
        Topology::Uniform => {
            let zero_distance = uniform_distance(x, y)? == 0;
            same == zero_distance
        }
    };
    if !consistent {
        return Err(Error::Internal(
            "component answer disagrees with the distance and compactness routes".into(),
        ));
    }
    Ok(OracleCheck {
        status: "agree",
        details: json!({"check": "component, distance, and compactness routes agree"}),
    })
}

fn isolated_cross_check(
    scenario: &Scenario,
    op: &OperatorPoint,
    topology: Topology,
    isolation: &Isolation,
) -> Result<OracleCheck> {
    match (topology, isolation) {
        (Topology::Uniform, Isolation::Isolated) => {
            let mut distinct = 0usize;
            for (_, m) in &scenario.maps {
                let other = OperatorPoint::new(m.clone());
                if other != *op {
                    if uniform_distance(op, &other)? != 2 {
                        return Err(Error::Internal(
                            "a distinct operator sits at uniform distance below 2".into(),
                        ));
                    }
                    distinct += 1;
                }
            }
            Ok(OracleCheck {
                status: "agree",
                details: json!({
                    "check": "every distinct scenario operator sits at uniform distance 2",
                    "distinct_checked": distinct,
                }),
            })
        }
        (Topology::Essential, Isolation::NotIsolated { witness }) => {
            let c = classify(op.symbol(), witness.symbol())?;
            let same_class = matches!(
                c.class,
                RelationClass::BothFiniteRange | RelationClass::BothInfiniteFiniteDeviation
            );
            if !same_class || c.equal {
                return Err(Error::Internal(
                    "essential isolation witness failed its classification certificate".into(),
                ));
            }
            Ok(OracleCheck {
                status: "agree",
                details: json!({
                    "check": "witness is distinct and classified into the center's component",
                    "witness_class": c.class,
                }),
            })
        }
        _ => Err(Error::Internal(
            "isolation outcome contradicts the topology's structure".into(),
        )),
    }
}
