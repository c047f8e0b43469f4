//! Re-leveling degenerations and formal normal-bundle classes of two-level graphs.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{is_isomorphic, level_lcm, validate, EnhancedLevelGraph, GraphError};
use crate::euler::Rational;

/// Stable identifier: the level of each vertex (sorted by id) followed by the
/// sorted edge list `(min id, max id, kappa)`.
pub fn canonical_id(graph: &EnhancedLevelGraph) -> String {
    let mut vertices: Vec<(u32, i32)> = graph.vertices().iter().map(|v| (v.id, v.level)).collect();
    vertices.sort_unstable();
    let mut edges: Vec<(u32, u32, u32)> = graph
        .edges()
        .iter()
        .map(|e| (e.a.min(e.b), e.a.max(e.b), e.kappa))
        .collect();
    edges.sort_unstable();
    let levels: Vec<String> = vertices.iter().map(|(id, l)| format!("{id}:{l}")).collect();
    let edges: Vec<String> = edges.iter().map(|(a, b, k)| format!("{a}-{b}:{k}")).collect();
    format!("L[{}]E[{}]", levels.join(","), edges.join(","))
}

/// A re-leveling of `level` together with its upper part.
pub(crate) struct Split {
    pub graph: EnhancedLevelGraph,
    pub upper: Vec<u32>,
}

/// Every split of `level` into nonempty upper and lower parts in which no
/// horizontal edge joins the two parts. Levels below drop by one.
pub(crate) fn splits(graph: &EnhancedLevelGraph, level: i32) -> Vec<Split> {
    let members: Vec<u32> = graph
        .vertices()
        .iter()
        .filter(|v| v.level == level)
        .map(|v| v.id)
        .collect();
    let k = members.len();
    if !(2..64).contains(&k) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 1u64..(1 << k) - 1 {
        let upper: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| members[i]).collect();
        let is_upper = |id: u32| upper.contains(&id);
        let cuts_horizontal = graph
            .edges()
            .iter()
            .any(|e| graph.level_of(e.a) == level && graph.level_of(e.b) == level && is_upper(e.a) != is_upper(e.b));
        if cuts_horizontal {
            continue;
        }
        let levels: Vec<i32> = graph
            .vertices()
            .iter()
            .map(|v| {
                if v.level < level || (v.level == level && !is_upper(v.id)) {
                    v.level - 1
                } else {
                    v.level
                }
            })
            .collect();
        let split = graph.with_levels(&levels);
        if validate(&split).is_ok() {
            out.push(Split { graph: split, upper });
        }
    }
    out
}

/// Three-or-more-level graphs obtained by splitting `level` (a value in
/// `0, -1, ..., -L`), up to isomorphism.
pub fn releveling_degenerations(graph: &EnhancedLevelGraph, level: i32) -> Vec<EnhancedLevelGraph> {
    let mut out: Vec<EnhancedLevelGraph> = Vec::new();
    for split in splits(graph, level) {
        let duplicate = out
            .iter()
            .any(|g| is_isomorphic(g, &split.graph).unwrap_or_else(|_| *g == split.graph));
        if !duplicate {
            out.push(split.graph);
        }
    }
    out
}

/// Merges the two levels adjacent to passage `i`, raising everything below.
pub fn undegenerate(graph: &EnhancedLevelGraph, passage: usize) -> Result<EnhancedLevelGraph, GraphError> {
    if passage == 0 || passage > graph.depth() {
        return Err(GraphError::NoSuchPassage(passage));
    }
    let boundary = -(passage as i32);
    let levels: Vec<i32> = graph
        .vertices()
        .iter()
        .map(|v| if v.level <= boundary { v.level + 1 } else { v.level })
        .collect();
    Ok(graph.with_levels(&levels))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DivisorSymbol {
    PsiUp(usize),
    PsiDown(usize),
    Boundary(String),
}

impl fmt::Display for DivisorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorSymbol::PsiUp(e) => write!(f, "psi+[{e}]"),
            DivisorSymbol::PsiDown(e) => write!(f, "psi-[{e}]"),
            DivisorSymbol::Boundary(id) => write!(f, "D[{id}]"),
        }
    }
}

/// Rational combination of divisor symbols; zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalDivisorClass {
    terms: BTreeMap<DivisorSymbol, Rational>,
    /// False when only part of the boundary terms was enumerated.
    pub complete: bool,
}

impl FormalDivisorClass {
    pub fn new(complete: bool) -> Self {
        Self {
            terms: BTreeMap::new(),
            complete,
        }
    }

    pub fn add(&mut self, symbol: DivisorSymbol, coeff: Rational) {
        let entry = self.terms.entry(symbol.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&symbol);
        }
    }

    pub fn coefficient(&self, symbol: &DivisorSymbol) -> Rational {
        self.terms.get(symbol).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> &BTreeMap<DivisorSymbol, Rational> {
        &self.terms
    }

    pub fn boundary_terms(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.terms.iter().filter_map(|(s, c)| match s {
            DivisorSymbol::Boundary(id) => Some((id, c)),
            _ => None,
        })
    }

    /// Sum of two classes; complete only if both are.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.complete = self.complete && other.complete;
        for (s, c) in &other.terms {
            out.add(s.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for FormalDivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("({c})*{s}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalBundle {
    pub nu: FormalDivisorClass,
    pub top: FormalDivisorClass,
    pub bottom: FormalDivisorClass,
    /// `l_Gamma`, the lcm of the enhancements.
    pub ell: u64,
}

/// `-(kappa_e / l) (psi+ + psi-) - (1 / l) sum_Delta l_{Delta,a} D_Delta`
/// over the re-levelings `Delta` in which `e` becomes long. Splits of the
/// top level contribute to the top part with `a = 2`, splits of the bottom
/// level to the bottom part with `a = 1`.
pub fn normal_bundle_class(graph: &EnhancedLevelGraph, edge: usize) -> Result<NormalBundle, GraphError> {
    if graph.depth() != 1 {
        return Err(GraphError::Unsupported(format!(
            "normal bundle needs exactly two levels, graph has {}",
            graph.depth() + 1
        )));
    }
    let e = graph.edges().get(edge).ok_or(GraphError::NoSuchEdge(edge))?;
    let (up, down) = graph.ends(e).ok_or(GraphError::HorizontalEdge(edge))?;
    let ell = level_lcm(graph, 1)?;
    let ell_q = Rational::from_integer(ell.into());
    let psi = -Rational::from_integer(e.kappa.into()) / &ell_q;

    let mut top = FormalDivisorClass::new(false);
    top.add(DivisorSymbol::PsiUp(edge), psi.clone());
    for split in splits(graph, 0) {
        if split.upper.contains(&up) {
            let l = level_lcm(&split.graph, 2)?;
            top.add(
                DivisorSymbol::Boundary(canonical_id(&split.graph)),
                -Rational::from_integer(l.into()) / &ell_q,
            );
        }
    }

    let mut bottom = FormalDivisorClass::new(false);
    bottom.add(DivisorSymbol::PsiDown(edge), psi);
    for split in splits(graph, -1) {
        if !split.upper.contains(&down) {
            let l = level_lcm(&split.graph, 1)?;
            bottom.add(
                DivisorSymbol::Boundary(canonical_id(&split.graph)),
                -Rational::from_integer(l.into()) / &ell_q,
            );
        }
    }

    Ok(NormalBundle {
        nu: top.plus(&bottom),
        top,
        bottom,
        ell,
    })
}
