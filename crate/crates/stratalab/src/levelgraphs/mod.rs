//! Enhanced level graphs: vertices with genus and level, edges with
//! enhancements, and labelled legs carrying the marked orders.
//!
//! Text format, one item per line:
//!
//! ```text
//! V <id> <genus> <level>
//! E <id1> <id2> <kappa>
//! L <vertex> <order> <label>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored when parsing.
//! Serialization writes vertices, then edges, then legs, in stored order.

mod degenerations;
mod symmetry;
mod witness;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use degenerations::{
    canonical_id, normal_bundle_class, releveling_degenerations, undegenerate, DivisorSymbol, FormalDivisorClass,
    NormalBundle,
};
pub use symmetry::{automorphism_order, is_isomorphic, MAX_BRUTE_FORCE_VERTICES};
pub use witness::{
    build_h3_witness, build_h4_witness, build_h6_witness, h3_dimension_lower_bound, residueless_at,
    theorem_applicability, H3Bound, ResiduelessLevel, Theorem, WitnessCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(u32),
    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),
    #[error("duplicate leg label {0:?}")]
    DuplicateLabel(String),
    #[error("invalid leg label {0:?}")]
    BadLabel(String),
    #[error("{vertices} vertices exceed the brute-force cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("edge {0} is horizontal")]
    HorizontalEdge(usize),
    #[error("no edge with index {0}")]
    NoSuchEdge(usize),
    #[error("no level passage {0}")]
    NoSuchPassage(usize),
    #[error("unrealizable: {0}")]
    Unrealizable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Violation {
    NoVertices,
    PositiveLevel { vertex: u32, level: i32 },
    MissingLevel(i32),
    HorizontalWithKappa { edge: usize, kappa: u32 },
    VerticalWithoutKappa { edge: usize },
    Balance { vertex: u32, lhs: i64, rhs: i64 },
    Disconnected,
    OddLegSum(i64),
    GenusMismatch { graph: i64, ambient: i64 },
    Unstable { vertex: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => f.write_str("graph has no vertices"),
            Violation::PositiveLevel { vertex, level } => write!(f, "vertex {vertex} has positive level {level}"),
            Violation::MissingLevel(l) => write!(f, "level {l} has no vertex"),
            Violation::HorizontalWithKappa { edge, kappa } => {
                write!(f, "horizontal edge {edge} has enhancement {kappa}")
            }
            Violation::VerticalWithoutKappa { edge } => write!(f, "vertical edge {edge} has enhancement 0"),
            Violation::Balance { vertex, lhs, rhs } => {
                write!(f, "vertex {vertex}: orders sum to {lhs}, expected {rhs}")
            }
            Violation::Disconnected => f.write_str("graph is disconnected"),
            Violation::OddLegSum(s) => write!(f, "leg orders sum to odd {s}"),
            Violation::GenusMismatch { graph, ambient } => {
                write!(f, "graph genus {graph} differs from ambient genus {ambient}")
            }
            Violation::Unstable { vertex } => write!(f, "vertex {vertex} is unstable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: u32,
    pub genus: u32,
    pub level: i32,
}

/// An edge between two vertices; which end is upper follows from levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub kappa: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Leg {
    pub vertex: u32,
    pub order: i64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancedLevelGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    index: HashMap<u32, usize>,
}

impl EnhancedLevelGraph {
    /// Checks referential integrity only; see [`validate`] for the rest.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, legs: Vec<Leg>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(GraphError::DuplicateVertex(v.id));
            }
        }
        for e in &edges {
            for id in [e.a, e.b] {
                if !index.contains_key(&id) {
                    return Err(GraphError::UnknownVertex(id));
                }
            }
        }
        let mut labels = BTreeSet::new();
        for leg in &legs {
            if !index.contains_key(&leg.vertex) {
                return Err(GraphError::UnknownVertex(leg.vertex));
            }
            if leg.label.is_empty() || leg.label.chars().any(char::is_whitespace) {
                return Err(GraphError::BadLabel(leg.label.clone()));
            }
            if !labels.insert(leg.label.as_str()) {
                return Err(GraphError::DuplicateLabel(leg.label.clone()));
            }
        }
        Ok(Self {
            vertices,
            edges,
            legs,
            index,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex(&self, id: u32) -> Option<&Vertex> {
        self.index.get(&id).map(|&i| &self.vertices[i])
    }

    pub(crate) fn position(&self, id: u32) -> usize {
        self.index[&id]
    }

    pub fn level_of(&self, id: u32) -> i32 {
        self.vertices[self.position(id)].level
    }

    /// `L`, where levels run over `0, -1, ..., -L`.
    pub fn depth(&self) -> usize {
        self.vertices.iter().map(|v| -v.level).max().unwrap_or(0).max(0) as usize
    }

    pub fn is_horizontal(&self, edge: &Edge) -> bool {
        self.level_of(edge.a) == self.level_of(edge.b)
    }

    /// `(upper, lower)` endpoints of a vertical edge.
    pub fn ends(&self, edge: &Edge) -> Option<(u32, u32)> {
        let (la, lb) = (self.level_of(edge.a), self.level_of(edge.b));
        match la.cmp(&lb) {
            std::cmp::Ordering::Greater => Some((edge.a, edge.b)),
            std::cmp::Ordering::Less => Some((edge.b, edge.a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Orders of the differential at all special points of a vertex: its
    /// legs, then one entry per incident half-edge.
    pub fn vertex_orders(&self, id: u32) -> Vec<i64> {
        let mut orders: Vec<i64> = self.legs.iter().filter(|l| l.vertex == id).map(|l| l.order).collect();
        for e in &self.edges {
            let kappa = e.kappa as i64;
            match self.ends(e) {
                Some((up, _)) if up == id => orders.push(kappa - 1),
                Some((_, down)) if down == id => orders.push(-kappa - 1),
                Some(_) => {}
                None => {
                    if e.a == id {
                        orders.push(-1);
                    }
                    if e.b == id {
                        orders.push(-1);
                    }
                }
            }
        }
        orders
    }

    /// Genus determined by the leg orders, if their sum is even.
    pub fn ambient_genus(&self) -> Option<i64> {
        let sum: i64 = self.legs.iter().map(|l| l.order).sum();
        (sum % 2 == 0).then_some(sum / 2 + 1)
    }

    /// Copy with new levels, in vertex order.
    pub(crate) fn with_levels(&self, levels: &[i32]) -> Self {
        let mut out = self.clone();
        for (v, &l) in out.vertices.iter_mut().zip(levels) {
            v.level = l;
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            let id = self.vertices[i].id;
            for e in &self.edges {
                let other = if e.a == id {
                    e.b
                } else if e.b == id {
                    e.a
                } else {
                    continue;
                };
                let j = self.position(other);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Checks surjectivity of levels, enhancements, balance, genus and stability.
pub fn validate(graph: &EnhancedLevelGraph) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if graph.vertices.is_empty() {
        return Err(vec![Violation::NoVertices]);
    }
    for v in &graph.vertices {
        if v.level > 0 {
            out.push(Violation::PositiveLevel {
                vertex: v.id,
                level: v.level,
            });
        }
    }
    let present: BTreeSet<i32> = graph.vertices.iter().map(|v| v.level).collect();
    for l in -(graph.depth() as i32)..=0 {
        if !present.contains(&l) {
            out.push(Violation::MissingLevel(l));
        }
    }
    for (i, e) in graph.edges.iter().enumerate() {
        match (graph.is_horizontal(e), e.kappa) {
            (true, k) if k != 0 => out.push(Violation::HorizontalWithKappa { edge: i, kappa: k }),
            (false, 0) => out.push(Violation::VerticalWithoutKappa { edge: i }),
            _ => {}
        }
    }
    for v in &graph.vertices {
        let orders = graph.vertex_orders(v.id);
        let lhs: i64 = orders.iter().sum();
        let rhs = 2 * v.genus as i64 - 2;
        if lhs != rhs {
            out.push(Violation::Balance { vertex: v.id, lhs, rhs });
        }
        if rhs + orders.len() as i64 <= 0 {
            out.push(Violation::Unstable { vertex: v.id });
        }
    }
    let leg_sum: i64 = graph.legs.iter().map(|l| l.order).sum();
    if !graph.is_connected() {
        out.push(Violation::Disconnected);
    } else if let Some(ambient) = graph.ambient_genus() {
        let betti = graph.edges.len() as i64 - graph.vertices.len() as i64 + 1;
        let total = graph.vertices.iter().map(|v| v.genus as i64).sum::<i64>() + betti;
        if total != ambient {
            out.push(Violation::GenusMismatch { graph: total, ambient });
        }
    } else {
        out.push(Violation::OddLegSum(leg_sum));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// True iff no edge crosses more than one level passage.
pub fn ghost_trivial(graph: &EnhancedLevelGraph) -> bool {
    graph
        .edges
        .iter()
        .all(|e| (graph.level_of(e.a) - graph.level_of(e.b)).abs() <= 1)
}

/// Lcm of the enhancements of edges crossing passage `i` (between levels
/// `-(i-1)` and `-i`).
pub fn level_lcm(graph: &EnhancedLevelGraph, passage: usize) -> Result<u64, GraphError> {
    if passage == 0 || passage > graph.depth() {
        return Err(GraphError::NoSuchPassage(passage));
    }
    let upper = -(passage as i32 - 1);
    let mut acc = 1u64;
    for e in &graph.edges {
        if let Some((up, down)) = graph.ends(e) {
            if graph.level_of(up) >= upper && graph.level_of(down) < upper {
                acc = num_integer::lcm(acc, e.kappa as u64);
            }
        }
    }
    Ok(acc)
}

/// `1 / (|Aut| * l)` for a two-level graph without long edges.
pub fn degree_ratio(graph: &EnhancedLevelGraph) -> Result<crate::euler::Rational, GraphError> {
    if graph.depth() != 1 {
        return Err(GraphError::Unsupported(format!(
            "degree ratio needs exactly two levels, graph has {}",
            graph.depth() + 1
        )));
    }
    let aut = automorphism_order(graph)?;
    let ell = level_lcm(graph, 1)?;
    Ok(crate::euler::Rational::new(1.into(), (aut * ell).into()))
}

impl fmt::Display for EnhancedLevelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "V {} {} {}", v.id, v.genus, v.level)?;
        }
        for e in &self.edges {
            writeln!(f, "E {} {} {}", e.a, e.b, e.kappa)?;
        }
        for l in &self.legs {
            writeln!(f, "L {} {} {}", l.vertex, l.order, l.label)?;
        }
        Ok(())
    }
}

impl FromStr for EnhancedLevelGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

fn field<T: FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        msg: format!("invalid {what} {tok:?}"),
    })
}

/// Parses the line-oriented text format.
pub fn parse_graph(text: &str) -> Result<EnhancedLevelGraph, GraphError> {
    let (mut vertices, mut edges, mut legs) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        match kind {
            "V" => vertices.push(Vertex {
                id: field(toks.next(), "vertex id", line)?,
                genus: field(toks.next(), "genus", line)?,
                level: field(toks.next(), "level", line)?,
            }),
            "E" => edges.push(Edge {
                a: field(toks.next(), "vertex id", line)?,
                b: field(toks.next(), "vertex id", line)?,
                kappa: field(toks.next(), "enhancement", line)?,
            }),
            "L" => legs.push(Leg {
                vertex: field(toks.next(), "vertex id", line)?,
                order: field(toks.next(), "order", line)?,
                label: field(toks.next(), "label", line)?,
            }),
            other => {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("unknown record type {other:?}"),
                })
            }
        }
        if let Some(extra) = toks.next() {
            return Err(GraphError::Parse {
                line,
                msg: format!("trailing token {extra:?}"),
            });
        }
    }
    EnhancedLevelGraph::new(vertices, edges, legs)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn graph(text: &str) -> EnhancedLevelGraph {
        parse_graph(text).unwrap()
    }

    const TWO_LEVEL: &str = "V 0 1 0\nV 1 1 -1\nE 0 1 1\nL 1 10 z1\nL 1 -8 z2\n";

    #[test]
    fn balanced_two_level_graph() {
        assert_eq!(validate(&graph(TWO_LEVEL)), Ok(()));
    }

    #[test]
    fn perturbed_enhancement_breaks_balance() {
        let g = graph(&TWO_LEVEL.replace("E 0 1 1", "E 0 1 2"));
        let v = validate(&g).unwrap_err();
        let unbalanced: Vec<u32> = v
            .iter()
            .filter_map(|x| match x {
                Violation::Balance { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect();
        assert_eq!(unbalanced, vec![0, 1]);
    }

    #[test]
    fn missing_level_is_reported() {
        let g = graph(&TWO_LEVEL.replace("V 1 1 -1", "V 1 1 -2"));
        assert!(validate(&g).unwrap_err().contains(&Violation::MissingLevel(-1)));
    }

    #[test]
    fn enhancement_must_match_horizontality() {
        let g = graph("V 0 0 0\nV 1 0 0\nE 0 1 0\nE 0 1 0\nE 0 1 3\nL 0 1 z1\nL 1 1 z2\n");
        let v = validate(&g).unwrap_err();
        assert!(v.contains(&Violation::HorizontalWithKappa { edge: 2, kappa: 3 }));
        let g = graph("V 0 1 0\nV 1 1 -1\nE 0 1 0\nL 1 0 z1\n");
        assert!(validate(&g)
            .unwrap_err()
            .contains(&Violation::VerticalWithoutKappa { edge: 0 }));
    }

    #[test]
    fn stability_and_connectivity() {
        let g = graph("V 0 0 0\nL 0 -2 z1\n");
        assert!(validate(&g).unwrap_err().contains(&Violation::Unstable { vertex: 0 }));
        let g = graph("V 0 1 0\nV 1 1 0\nL 0 0 z1\nL 1 0 z2\n");
        assert!(validate(&g).unwrap_err().contains(&Violation::Disconnected));
    }

    #[test]
    fn genus_from_loops() {
        // a genus-0 vertex with one horizontal self-loop has total genus 1
        let g = graph("V 0 0 0\nE 0 0 0\nL 0 0 z1\n");
        assert_eq!(validate(&g), Ok(()));
    }

    #[test]
    fn text_round_trip() {
        let g = graph(TWO_LEVEL);
        assert_eq!(g.to_string(), TWO_LEVEL);
        assert_eq!(graph(&g.to_string()), g);
        let commented = format!("# comment\n\n{TWO_LEVEL}");
        assert_eq!(graph(&commented), g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_graph("X 1"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("V 0 1"), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph("V 0 1 0 5"), Err(GraphError::Parse { .. })));
        assert!(matches!(
            parse_graph("V 0 1 0\nV 0 1 0"),
            Err(GraphError::DuplicateVertex(0))
        ));
        assert!(matches!(
            parse_graph("V 0 1 0\nE 0 1 1"),
            Err(GraphError::UnknownVertex(1))
        ));
        assert!(matches!(
            parse_graph("V 0 1 0\nL 0 1 z\nL 0 -1 z"),
            Err(GraphError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn ghost_and_lcm() {
        let g = graph(TWO_LEVEL);
        assert!(ghost_trivial(&g));
        assert_eq!(level_lcm(&g, 1), Ok(1));
        assert!(level_lcm(&g, 2).is_err());
        let g = graph("V 0 0 0\nV 1 1 -1\nV 2 1 -2\nE 0 1 2\nE 0 1 3\nE 1 2 5\nE 0 2 1\nL 2 4 z1\n");
        assert!(!ghost_trivial(&g));
        assert_eq!(level_lcm(&g, 1), Ok(6));
        assert_eq!(level_lcm(&g, 2), Ok(5));
    }

    #[test]
    fn degree_ratio_examples() {
        let single = graph("V 0 3 0\nV 1 1 -1\nE 0 1 5\nL 1 6 z1\nL 0 0 z2\n");
        assert_eq!(validate(&single), Ok(()));
        assert_eq!(degree_ratio(&single).unwrap(), crate::euler::ratio(1, 5));
        let twin = graph("V 0 1 0\nV 1 1 0\nV 2 1 -1\nE 0 2 1\nE 1 2 1\nL 2 4 z1\n");
        assert_eq!(validate(&twin), Ok(()));
        assert_eq!(degree_ratio(&twin).unwrap(), crate::euler::ratio(1, 2));
        let deep = graph("V 0 0 0\nV 1 1 -1\nV 2 1 -2\nE 0 1 1\nE 1 2 1\nL 2 2 z1\n");
        assert!(matches!(degree_ratio(&deep), Err(GraphError::Unsupported(_))));
    }
}
