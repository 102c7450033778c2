//! Scenario documents: a line-oriented text format defining a space, named
//! self-maps, budgets, and a list of queries to run against them.
//!
//! The format has four sections. Blank lines and `#` comments are ignored.
//!
//! ```text
//! [space]
//! kind = path                      # or: tree 2 | table head 1,2,0 cycle 2
//!
//! [budgets]                        # optional
//! points = 1000000
//! radius = 64
//! family = 16
//!
//! [maps]
//! id    = identity
//! shift = ray-advance 1
//! c0    = constant 0:0
//! idp   = identity with 0:0 -> 5:0
//!
//! [queries]
//! classify id shift
//! difference-norms id shift
//! ball id 3/2
//! ```
//!
//! Points are written as `length:index` pairs resolved against the space's
//! per-length ordering. Parsing either yields a validated [`Scenario`] or the
//! full list of positioned errors.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::oracle::{DEFAULT_FAMILY, DEFAULT_RADIUS};
use crate::selfmap::SelfMap;
use crate::space::{Point, Space, DEFAULT_POINT_BUDGET};
use crate::topology::Topology;

/// A parse or validation problem, positioned at its 1-based source line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Operational budgets for a scenario run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Point cap for space enumerations.
    pub points: u64,
    /// Truncation radius for restricted evaluations.
    pub radius: u64,
    /// Witness family size.
    pub family: usize,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            points: DEFAULT_POINT_BUDGET,
            radius: DEFAULT_RADIUS,
            family: DEFAULT_FAMILY,
        }
    }
}

/// Command-line overrides applied on top of a document's budget section.
#[derive(Clone, Copy, Debug, Default)]
pub struct BudgetOverrides {
    pub points: Option<u64>,
    pub radius: Option<u64>,
    pub family: Option<usize>,
}

/// One query of a scenario, retaining its source text for the report echo.
#[derive(Clone, Debug)]
pub struct Query {
    pub line: usize,
    pub text: String,
    pub kind: QueryKind,
}

#[derive(Clone, Debug)]
pub enum QueryKind {
    Classify { a: String, b: String },
    SingleNorms { map: String },
    DifferenceNorms { a: String, b: String },
    Witness { a: String, b: String },
    Ball { center: String, epsilon: BigRational },
    BallContains { center: String, epsilon: BigRational, candidate: String },
    Component { topology: Topology, a: String, b: String },
    Isolated { topology: Topology, map: String },
    Path { a: String, b: String },
    Hausdorff,
    OracleValidate { a: String, b: String },
}

impl QueryKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            QueryKind::Classify { .. } => "classify",
            QueryKind::SingleNorms { .. } => "single-norms",
            QueryKind::DifferenceNorms { .. } => "difference-norms",
            QueryKind::Witness { .. } => "witness",
            QueryKind::Ball { .. } => "ball",
            QueryKind::BallContains { .. } => "ball-contains",
            QueryKind::Component { .. } => "component",
            QueryKind::Isolated { .. } => "isolated",
            QueryKind::Path { .. } => "path",
            QueryKind::Hausdorff => "hausdorff",
            QueryKind::OracleValidate { .. } => "oracle-validate",
        }
    }

    /// Names of the maps the query depends on.
    pub fn referenced_maps(&self) -> Vec<&str> {
        match self {
            QueryKind::Classify { a, b }
            | QueryKind::DifferenceNorms { a, b }
            | QueryKind::Witness { a, b }
            | QueryKind::Component { a, b, .. }
            | QueryKind::Path { a, b }
            | QueryKind::OracleValidate { a, b } => vec![a, b],
            QueryKind::SingleNorms { map } | QueryKind::Isolated { map, .. } => vec![map],
            QueryKind::Ball { center, .. } => vec![center],
            QueryKind::BallContains { center, candidate, .. } => vec![center, candidate],
            QueryKind::Hausdorff => vec![],
        }
    }
}

/// A validated scenario: the space, the named maps, and the query list.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub space: Space,
    pub maps: Vec<(String, SelfMap)>,
    pub queries: Vec<Query>,
    pub budgets: Budgets,
}

impl Scenario {
    pub fn map(&self, name: &str) -> Option<&SelfMap> {
        self.maps
            .iter()
            .find_map(|(n, m)| (n == name).then_some(m))
    }
}

/// Parses a scenario document with default budget overrides.
pub fn parse_scenario(document: &str) -> Result<Scenario, Vec<ScenarioError>> {
    parse_scenario_with(document, BudgetOverrides::default())
}

/// Parses a scenario document, applying command-line budget overrides before
/// any point validation happens.
pub fn parse_scenario_with(
    document: &str,
    overrides: BudgetOverrides,
) -> Result<Scenario, Vec<ScenarioError>> {
    let mut errors: Vec<ScenarioError> = Vec::new();
    let mut section: Option<&str> = None;
    let mut space_lines: Vec<(usize, String)> = Vec::new();
    let mut budget_lines: Vec<(usize, String)> = Vec::new();
    let mut map_lines: Vec<(usize, String)> = Vec::new();
    let mut query_lines: Vec<(usize, String)> = Vec::new();

    for (i, raw) in document.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim().to_string();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            match name.trim() {
                "space" => section = Some("space"),
                "budgets" => section = Some("budgets"),
                "maps" => section = Some("maps"),
                "queries" => section = Some("queries"),
                other => {
                    errors.push(err(line_no, format!("unknown section `[{other}]`")));
                    section = None;
                }
            }
            continue;
        }
        match section {
            Some("space") => space_lines.push((line_no, line)),
            Some("budgets") => budget_lines.push((line_no, line)),
            Some("maps") => map_lines.push((line_no, line)),
            Some("queries") => query_lines.push((line_no, line)),
            _ => errors.push(err(line_no, "content before any section header".into())),
        }
    }

    let mut budgets = Budgets::default();
    for (line_no, line) in &budget_lines {
        match parse_key_value(line) {
            Some(("points", v)) => match v.parse::<u64>() {
                Ok(n) => budgets.points = n,
                Err(_) => errors.push(err(*line_no, format!("bad point budget `{v}`"))),
            },
            Some(("radius", v)) => match v.parse::<u64>() {
                Ok(n) => budgets.radius = n,
                Err(_) => errors.push(err(*line_no, format!("bad radius `{v}`"))),
            },
            Some(("family", v)) => match v.parse::<usize>() {
                Ok(n) => budgets.family = n,
                Err(_) => errors.push(err(*line_no, format!("bad family size `{v}`"))),
            },
            Some((key, _)) => errors.push(err(*line_no, format!("unknown budget key `{key}`"))),
            None => errors.push(err(*line_no, "expected `key = value`".into())),
        }
    }
    if let Some(points) = overrides.points {
        budgets.points = points;
    }
    if let Some(radius) = overrides.radius {
        budgets.radius = radius;
    }
    if let Some(family) = overrides.family {
        budgets.family = family;
    }

    let mut space: Option<Space> = None;
    if space_lines.is_empty() {
        errors.push(err(0, "missing `[space]` section with a `kind = ...` line".into()));
    }
    for (line_no, line) in &space_lines {
        match parse_key_value(line) {
            Some(("kind", v)) => {
                if space.is_some() {
                    errors.push(err(*line_no, "space kind defined twice".into()));
                    continue;
                }
                match parse_space_kind(v) {
                    Ok(s) => space = Some(s.with_point_budget(budgets.points)),
                    Err(msg) => errors.push(err(*line_no, msg)),
                }
            }
            Some((key, _)) => errors.push(err(*line_no, format!("unknown space key `{key}`"))),
            None => errors.push(err(*line_no, "expected `kind = ...`".into())),
        }
    }
    let Some(space) = space else {
        if !space_lines.is_empty() {
            errors.push(err(space_lines[0].0, "no valid space kind defined".into()));
        }
        return Err(errors);
    };

    let mut maps: Vec<(String, SelfMap)> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (line_no, line) in &map_lines {
        let Some((name, definition)) = parse_key_value(line) else {
            errors.push(err(*line_no, "expected `name = definition`".into()));
            continue;
        };
        if !is_identifier(name) {
            errors.push(err(*line_no, format!("bad map name `{name}`")));
            continue;
        }
        if let Some(first) = seen.get(name) {
            errors.push(err(
                *line_no,
                format!("duplicate map name `{name}` (first defined on line {first})"),
            ));
            continue;
        }
        seen.insert(name.to_string(), *line_no);
        match parse_map(&space, definition) {
            Ok(map) => maps.push((name.to_string(), map)),
            Err(msg) => errors.push(err(*line_no, msg)),
        }
    }

    let mut queries: Vec<Query> = Vec::new();
    for (line_no, line) in &query_lines {
        match parse_query(line) {
            Ok(kind) => {
                for name in kind.referenced_maps() {
                    if !seen.contains_key(name) {
                        errors.push(err(
                            *line_no,
                            format!("query references undefined map `{name}`"),
                        ));
                    }
                }
                queries.push(Query {
                    line: *line_no,
                    text: line.clone(),
                    kind,
                });
            }
            Err(msg) => errors.push(err(*line_no, msg)),
        }
    }

    if errors.is_empty() {
        Ok(Scenario {
            space,
            maps,
            queries,
            budgets,
        })
    } else {
        Err(errors)
    }
}

fn err(line: usize, message: String) -> ScenarioError {
    ScenarioError { line, message }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_key_value(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once('=')?;
    Some((key.trim(), value.trim()))
}

fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn parse_space_kind(text: &str) -> Result<Space, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    match tokens.as_slice() {
        ["path"] => Ok(Space::path()),
        ["tree", arity] => {
            let arity: u32 = arity
                .parse()
                .map_err(|_| format!("bad tree arity `{arity}`"))?;
            Space::homogeneous_tree(arity).map_err(|e| e.to_string())
        }
        ["table", "head", head, "cycle", cycle] => {
            let head = parse_counts(head)?;
            let cycle = parse_counts(cycle)?;
            Space::table(head, cycle).map_err(|e| e.to_string())
        }
        _ => Err(format!(
            "unknown space kind `{text}`; expected `path`, `tree <arity>`, or `table head <counts> cycle <counts>`"
        )),
    }
}

fn parse_counts(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad level count `{t}`"))
        })
        .collect()
}

fn parse_point(space: &Space, text: &str) -> Result<Point, String> {
    let point: Point = text.parse()?;
    space
        .validate_point(point)
        .map_err(|e| format!("point {point}: {e}"))?;
    Ok(point)
}

fn parse_map(space: &Space, definition: &str) -> Result<SelfMap, String> {
    let (tail_text, override_text) = match definition.split_once(" with ") {
        Some((t, o)) => (t.trim(), Some(o.trim())),
        None => (definition.trim(), None),
    };
    let tokens: Vec<&str> = tail_text.split_whitespace().collect();
    let mut map = match tokens.as_slice() {
        ["identity"] => SelfMap::identity(space),
        ["constant", point] => {
            SelfMap::constant(space, parse_point(space, point)?).map_err(|e| e.to_string())?
        }
        ["ray-advance", k] => {
            let k: u64 = k.parse().map_err(|_| format!("bad ray advance `{k}`"))?;
            SelfMap::ray_advance(space, k).map_err(|e| e.to_string())?
        }
        _ => {
            return Err(format!(
                "unknown tail rule `{tail_text}`; expected `identity`, `constant <point>`, or `ray-advance <k>`"
            ))
        }
    };
    if let Some(override_text) = override_text {
        for entry in override_text.split(',') {
            let entry = entry.trim();
            let (from, to) = entry
                .split_once("->")
                .ok_or_else(|| format!("bad override `{entry}`; expected `<point> -> <point>`"))?;
            let from = parse_point(space, from.trim())?;
            let to = parse_point(space, to.trim())?;
            map = map.with_override(from, to).map_err(|e| e.to_string())?;
        }
    }
    Ok(map)
}

/// Parses a positive rational radius like `2` or `3/2`.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let value = match text.split_once('/') {
        Some((n, d)) => {
            let numer: i64 = n
                .trim()
                .parse()
                .map_err(|_| format!("bad rational `{text}`"))?;
            let denom: i64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad rational `{text}`"))?;
            if denom == 0 {
                return Err(format!("bad rational `{text}`: zero denominator"));
            }
            BigRational::new(numer.into(), denom.into())
        }
        None => {
            let n: i64 = text
                .trim()
                .parse()
                .map_err(|_| format!("bad rational `{text}`"))?;
            BigRational::from_integer(n.into())
        }
    };
    if value <= BigRational::zero() {
        return Err(format!("radius `{text}` must be positive"));
    }
    Ok(value)
}

fn parse_query(line: &str) -> Result<QueryKind, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let kind = match tokens.as_slice() {
        ["classify", a, b] => QueryKind::Classify {
            a: a.to_string(),
            b: b.to_string(),
        },
        ["single-norms", m] => QueryKind::SingleNorms { map: m.to_string() },
        ["difference-norms", a, b] => QueryKind::DifferenceNorms {
            a: a.to_string(),
            b: b.to_string(),
        },
        ["witness", a, b] => QueryKind::Witness {
            a: a.to_string(),
            b: b.to_string(),
        },
        ["ball", center, eps] => QueryKind::Ball {
            center: center.to_string(),
            epsilon: parse_rational(eps)?,
        },
        ["ball-contains", center, eps, candidate] => QueryKind::BallContains {
            center: center.to_string(),
            epsilon: parse_rational(eps)?,
            candidate: candidate.to_string(),
        },
        ["component", topology, a, b] => QueryKind::Component {
            topology: topology.parse()?,
            a: a.to_string(),
            b: b.to_string(),
        },
        ["isolated", topology, m] => QueryKind::Isolated {
            topology: topology.parse()?,
            map: m.to_string(),
        },
        ["path", a, b] => QueryKind::Path {
            a: a.to_string(),
            b: b.to_string(),
        },
        ["hausdorff"] => QueryKind::Hausdorff,
        ["oracle-validate", a, b] => QueryKind::OracleValidate {
            a: a.to_string(),
            b: b.to_string(),
        },
        _ => return Err(format!("unknown query `{line}`")),
    };
    Ok(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[space]
kind = path

[maps]
id = identity
shift = ray-advance 1

[queries]
classify id shift
";

    #[test]
    fn minimal_document_parses() {
        let scenario = parse_scenario(MINIMAL).unwrap();
        assert_eq!(scenario.space, Space::path());
        assert_eq!(scenario.maps.len(), 2);
        assert_eq!(scenario.queries.len(), 1);
        assert_eq!(scenario.queries[0].kind.kind_name(), "classify");
    }

    #[test]
    fn duplicate_map_name_is_positioned() {
        let doc = "
[space]
kind = path

[maps]
id = identity
id = ray-advance 1
";
        let errors = parse_scenario(doc).unwrap_err();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, 7);
        assert!(errors[0].message.contains("duplicate map name `id`"));
    }

    #[test]
    fn dangling_reference_is_reported() {
        let doc = "
[space]
kind = path

[maps]
id = identity

[queries]
classify id ghost
";
        let errors = parse_scenario(doc).unwrap_err();
        assert!(errors[0].message.contains("undefined map `ghost`"));
    }

    #[test]
    fn malformed_point_literal_is_reported() {
        let doc = "
[space]
kind = path

[maps]
c = constant 5
";
        let errors = parse_scenario(doc).unwrap_err();
        assert!(errors[0].message.contains("malformed point literal"));
    }

    #[test]
    fn override_beyond_point_budget_is_a_validation_error() {
        let doc = "
[space]
kind = path

[budgets]
points = 100

[maps]
m = identity with 5000:0 -> 0:0
";
        let errors = parse_scenario(doc).unwrap_err();
        assert_eq!(errors[0].line, 9);
        assert!(errors[0].message.contains("budget"));
    }

    #[test]
    fn foreign_override_point_is_a_validation_error() {
        let doc = "
[space]
kind = path

[maps]
m = identity with 3:1 -> 0:0
";
        let errors = parse_scenario(doc).unwrap_err();
        assert!(errors[0].message.contains("does not belong"));
    }

    #[test]
    fn budget_overrides_win_over_document() {
        let doc = "
[space]
kind = path

[budgets]
points = 100
radius = 10
";
        let scenario = parse_scenario_with(
            doc,
            BudgetOverrides {
                points: Some(7),
                radius: None,
                family: Some(3),
            },
        )
        .unwrap();
        assert_eq!(scenario.budgets.points, 7);
        assert_eq!(scenario.budgets.radius, 10);
        assert_eq!(scenario.budgets.family, 3);
        assert_eq!(scenario.space.point_budget(), 7);
    }

    #[test]
    fn table_space_and_rationals_parse() {
        let doc = "
[space]
kind = table head 1,0,2 cycle 3,0

[maps]
id = identity
c = constant 2:1

[queries]
ball id 3/2
ball-contains id 1 c
isolated essential id
component uniform id c
";
        let scenario = parse_scenario(doc).unwrap();
        assert_eq!(scenario.queries.len(), 4);
        match &scenario.queries[0].kind {
            QueryKind::Ball { epsilon, .. } => {
                assert_eq!(*epsilon, BigRational::new(3.into(), 2.into()));
            }
            other => panic!("expected ball query, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_epsilon_rejected_at_parse() {
        let doc = "
[space]
kind = path

[maps]
id = identity

[queries]
ball id 0
";
        let errors = parse_scenario(doc).unwrap_err();
        assert!(errors[0].message.contains("positive"));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let doc = "
# a scenario
[space]
kind = path   # the simplest space

[maps]
id = identity

[queries]
single-norms id
hausdorff
";
        let scenario = parse_scenario(doc).unwrap();
        assert_eq!(scenario.queries.len(), 2);
    }
}
