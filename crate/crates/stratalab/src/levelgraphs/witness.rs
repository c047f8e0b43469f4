//! Witness graphs: boundary level graphs whose residueless levels have
//! positive genus and whose automorphism group is trivial.

use std::collections::BTreeSet;
use std::fmt;

use super::{
    automorphism_order, ghost_trivial, validate, Edge, EnhancedLevelGraph, GraphError, Leg, Vertex, Violation,
};
use crate::components::all_rational;
use crate::euler::{CalibratedCorrections, Mode};
use crate::partitions::enumerate_distinct;
use crate::signatures::{make_residueless, ResiduelessSignature, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    H3,
    H4,
    H5,
    H6,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::H3 => "H3",
            Theorem::H4 => "H4",
            Theorem::H5 => "H5",
            Theorem::H6 => "H6",
        })
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "h3" => Ok(Theorem::H3),
            "h4" => Ok(Theorem::H4),
            "h5" => Ok(Theorem::H5),
            "h6" => Ok(Theorem::H6),
            _ => Err(format!("unknown theorem tag {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduelessLevel {
    pub level: i32,
    pub vertex: u32,
    pub signature: ResiduelessSignature,
    pub positive_genus: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCertificate {
    pub theorem: Theorem,
    pub ambient: Signature,
    pub graph: EnhancedLevelGraph,
    pub levels: Vec<ResiduelessLevel>,
    pub violations: Vec<Violation>,
    pub automorphisms: u64,
    pub ghost_trivial: bool,
}

impl WitnessCertificate {
    pub fn aut_trivial(&self) -> bool {
        self.automorphisms == 1
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
            && self.aut_trivial()
            && self.levels.iter().all(|l| l.positive_genus)
            && (self.theorem != Theorem::H6 || self.ghost_trivial)
    }
}

/// Residueless signature of a genus-one vertex with a single zero and only
/// poles of order at least 2 (order-0 points are ignored).
pub fn residueless_at(graph: &EnhancedLevelGraph, vertex: u32) -> Option<ResiduelessSignature> {
    if graph.vertex(vertex)?.genus != 1 {
        return None;
    }
    let orders: Vec<i64> = graph.vertex_orders(vertex).into_iter().filter(|&o| o != 0).collect();
    let zeros: Vec<i64> = orders.iter().copied().filter(|&o| o > 0).collect();
    let poles: Vec<i64> = orders.iter().filter(|&&o| o < 0).map(|o| -o).collect();
    match zeros[..] {
        [a] => make_residueless(a, &poles).ok(),
        _ => None,
    }
}

fn positive_genus(sig: &ResiduelessSignature) -> bool {
    matches!(all_rational(sig, Mode::Exact, &CalibratedCorrections), Ok(false))
}

fn unrealizable(msg: impl Into<String>) -> GraphError {
    GraphError::Unrealizable(msg.into())
}

fn legs_from(sig: &Signature, vertex: u32, first: usize) -> Vec<Leg> {
    sig.orders()
        .iter()
        .enumerate()
        .skip(first)
        .map(|(i, &order)| Leg {
            vertex,
            order,
            label: format!("z{}", i + 1),
        })
        .collect()
}

fn vertex(id: u32, genus: i64, level: i32) -> Vertex {
    Vertex {
        id,
        genus: genus as u32,
        level,
    }
}

fn edge(a: u32, b: u32, kappa: i64) -> Edge {
    Edge {
        a,
        b,
        kappa: kappa as u32,
    }
}

fn certify(
    theorem: Theorem,
    ambient: &Signature,
    graph: EnhancedLevelGraph,
    designated: &[u32],
) -> Result<WitnessCertificate, GraphError> {
    let mut levels = Vec::new();
    for &v in designated {
        let signature = residueless_at(&graph, v)
            .ok_or_else(|| unrealizable(format!("vertex {v} does not carry a residueless signature")))?;
        levels.push(ResiduelessLevel {
            level: graph.level_of(v),
            vertex: v,
            positive_genus: positive_genus(&signature),
            signature,
        });
    }
    Ok(WitnessCertificate {
        theorem,
        ambient: ambient.clone(),
        violations: validate(&graph).err().unwrap_or_default(),
        automorphisms: automorphism_order(&graph)?,
        ghost_trivial: ghost_trivial(&graph),
        graph,
        levels,
    })
}

/// Two-level graph: a genus-one bottom vertex with `z_1`, one top vertex of
/// genus `t_i` per part joined by an edge with `kappa = 2 t_i - 1`, and (for
/// `n >= 2`) a top vertex of genus `g - N - 1` with `z_2, ..., z_n` joined by
/// an edge with `kappa = m_1 - 2N - 1`. For a single zero, `N = g - 1`.
pub fn build_h3_witness(sig: &Signature, parts: &[u64]) -> Result<WitnessCertificate, GraphError> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(unrealizable("partition must have positive parts"));
    }
    if parts.windows(2).any(|w| w[0] <= w[1]) {
        return Err(unrealizable("partition parts must be distinct and decreasing"));
    }
    let g = sig.genus() as i64;
    let n = sig.n();
    let m1 = sig.m(1).unwrap_or_default();
    let big_n: i64 = parts.iter().sum::<u64>() as i64;

    if n == 1 {
        if big_n != g - 1 {
            return Err(unrealizable(format!(
                "a single zero needs N = g - 1 = {}, got {big_n}",
                g - 1
            )));
        }
    } else {
        let rest_genus = g - big_n - 1;
        if m1 - 2 * big_n + 2 < 4 {
            return Err(unrealizable(format!("m1 = {m1} is too small for N = {big_n}")));
        }
        if rest_genus < 0 {
            return Err(unrealizable(format!("N = {big_n} exceeds g - 1 = {}", g - 1)));
        }
        // top vertex: genus g-N-1 with n-1 legs and one edge
        if 2 * rest_genus - 2 + n as i64 <= 0 {
            return Err(unrealizable("top vertex carrying z2..zn would be unstable"));
        }
    }

    let mut vertices = vec![vertex(0, 1, -1)];
    let mut edges = Vec::new();
    let mut legs = legs_from(sig, 0, 0);
    legs.truncate(1);
    for (i, &t) in parts.iter().enumerate() {
        let id = i as u32 + 1;
        vertices.push(vertex(id, t as i64, 0));
        edges.push(edge(id, 0, 2 * t as i64 - 1));
    }
    if n >= 2 {
        let id = parts.len() as u32 + 1;
        vertices.push(vertex(id, g - big_n - 1, 0));
        edges.push(edge(id, 0, m1 - 2 * big_n - 1));
        legs.extend(legs_from(sig, id, 1));
    }
    let graph = EnhancedLevelGraph::new(vertices, edges, legs)?;
    certify(Theorem::H3, sig, graph, &[0])
}

fn check_h4_h6_genus(sig: &Signature) -> Result<(), GraphError> {
    let g = sig.genus();
    if g >= 5 || (g == 4 && sig.n() >= 3) {
        Ok(())
    } else {
        Err(unrealizable(format!(
            "needs g >= 5, or g = 4 with n >= 3; got g = {g}, n = {}",
            sig.n()
        )))
    }
}

/// Two bottom vertices `R` (with `z_1`) and `L` (with `z_2`), each fed by a
/// genus-one top vertex through `kappa = 1` and by a top vertex of genus
/// `g - 4` carrying the other legs.
pub fn build_h4_witness(sig: &Signature) -> Result<WitnessCertificate, GraphError> {
    let m2 = sig
        .m(2)
        .ok_or_else(|| unrealizable("needs at least two marked points"))?;
    if m2 < 9 {
        return Err(unrealizable(format!("needs m2 >= 9, got {m2}")));
    }
    check_h4_h6_genus(sig)?;
    let g = sig.genus() as i64;
    let m1 = sig.m(1).unwrap();
    let vertices = vec![
        vertex(0, 1, -1),
        vertex(1, 1, -1),
        vertex(2, g - 4, 0),
        vertex(3, 1, 0),
        vertex(4, 1, 0),
    ];
    let edges = vec![edge(2, 0, m1 - 3), edge(2, 1, m2 - 3), edge(3, 0, 1), edge(4, 1, 1)];
    let mut legs = legs_from(sig, 0, 0);
    legs.truncate(1);
    let mut second = legs_from(sig, 1, 1);
    second.truncate(1);
    legs.extend(second);
    legs.extend(legs_from(sig, 2, 2));
    let graph = EnhancedLevelGraph::new(vertices, edges, legs)?;
    certify(Theorem::H4, sig, graph, &[0, 1])
}

/// Three levels: bottom `B` with `z_1`; middle `X` (joined to `B` by
/// `kappa = m_1 - 3`) and an unmarked genus-one `Y` (`kappa = 1`); top a
/// genus-one vertex over `X` (`kappa = 1`) and a vertex of genus `g - 4`
/// carrying the other legs (`kappa = m_1 - 7`).
pub fn build_h6_witness(sig: &Signature) -> Result<WitnessCertificate, GraphError> {
    let m1 = sig.m(1).unwrap_or_default();
    if m1 < 13 {
        return Err(unrealizable(format!("needs m1 >= 13, got {m1}")));
    }
    check_h4_h6_genus(sig)?;
    let g = sig.genus() as i64;
    let vertices = vec![
        vertex(0, 1, -2),
        vertex(1, 1, -1),
        vertex(2, 1, -1),
        vertex(3, 1, 0),
        vertex(4, g - 4, 0),
    ];
    let edges = vec![edge(1, 0, m1 - 3), edge(2, 0, 1), edge(3, 1, 1), edge(4, 1, m1 - 7)];
    let mut legs = legs_from(sig, 0, 0);
    legs.truncate(1);
    legs.extend(legs_from(sig, 4, 1));
    let graph = EnhancedLevelGraph::new(vertices, edges, legs)?;
    certify(Theorem::H6, sig, graph, &[0, 1])
}

/// Tags whose numeric hypotheses hold for `sig`.
pub fn theorem_applicability(sig: &Signature) -> BTreeSet<Theorem> {
    let g = sig.genus();
    let n = sig.n();
    let m = |i| sig.m(i).unwrap_or(i64::MIN / 4);
    let mut tags = BTreeSet::new();

    let h3 = (g >= 3 || (g == 2 && n >= 3)) && m(1) >= 9;
    let big_genus = g >= 5 || (g == 4 && n >= 3);
    if h3 {
        tags.insert(Theorem::H3);
    }
    if big_genus && n >= 2 && m(2) >= 9 {
        tags.insert(Theorem::H4);
    }
    if big_genus && m(1) >= 13 {
        tags.insert(Theorem::H6);
    }
    let top3 = n >= 3 && m(1) + m(2) + m(3) >= 9;
    let h5 = h3 || (g >= 3 && top3 && m(3) >= 0) || (g >= 3 && n >= 4 && top3) || (g == 2 && n >= 5 && top3);
    if h5 {
        tags.insert(Theorem::H5);
    }
    tags
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H3Bound {
    pub bound: u64,
    pub certificates: Vec<WitnessCertificate>,
}

/// Counts valid H3 witnesses over all admissible distinct partitions.
pub fn h3_dimension_lower_bound(sig: &Signature) -> H3Bound {
    let g = sig.genus() as i64;
    let m1 = sig.m(1).unwrap_or_default();
    let totals: Vec<i64> = if sig.n() == 1 {
        vec![g - 1]
    } else {
        (1..=((m1 - 2) / 2).min(g - 1)).collect()
    };
    let certificates: Vec<WitnessCertificate> = totals
        .into_iter()
        .filter(|&t| t >= 1)
        .flat_map(|t| enumerate_distinct(t as u64))
        .filter_map(|p| build_h3_witness(sig, p.parts()).ok())
        .filter(WitnessCertificate::is_valid)
        .collect();
    H3Bound {
        bound: certificates.len() as u64,
        certificates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelgraphs::{normal_bundle_class, DivisorSymbol};
    use crate::signatures::make_signature;

    fn mu(orders: &[i64]) -> Signature {
        make_signature(orders).unwrap()
    }

    #[test]
    fn h3_simple_case_for_ten() {
        let c = build_h3_witness(&mu(&[10]), &[4, 1]).unwrap();
        assert!(c.is_valid(), "{c:?}");
        assert_eq!(c.levels[0].signature.to_string(), "10,-2,-8");
        let c = build_h3_witness(&mu(&[10]), &[5]).unwrap();
        assert!(!c.is_valid());
    }

    #[test]
    fn h3_for_eight_has_no_valid_witness() {
        let c = build_h3_witness(&mu(&[8]), &[3, 1]).unwrap();
        assert_eq!(c.levels[0].signature.to_string(), "8,-2,-6");
        assert!(!c.is_valid());
        assert_eq!(h3_dimension_lower_bound(&mu(&[8])).bound, 0);
    }

    #[test]
    fn h3_rejects_repeated_parts() {
        assert!(matches!(
            build_h3_witness(&mu(&[10]), &[2, 2, 1]),
            Err(GraphError::Unrealizable(_))
        ));
    }

    #[test]
    fn h3_with_several_legs() {
        let c = build_h3_witness(&mu(&[9, -5]), &[1]).unwrap();
        assert_eq!(c.violations, vec![]);
        assert_eq!(c.levels[0].signature.to_string(), "9,-2,-7");
        assert!(c.is_valid());
        assert!(build_h3_witness(&mu(&[9, -5]), &[3]).is_err());
    }

    #[test]
    fn h3_normal_bundle_has_top_boundary() {
        let c = build_h3_witness(&mu(&[10]), &[4, 1]).unwrap();
        let nb = normal_bundle_class(&c.graph, 0).unwrap();
        assert!(nb.top.boundary_terms().count() >= 1);
        assert!(nb.top.boundary_terms().all(|(_, c)| *c < crate::euler::int(0)));
        let ell = crate::euler::Rational::from_integer(nb.ell.into());
        let kappa = crate::euler::Rational::from_integer(c.graph.edges()[0].kappa.into());
        assert_eq!(nb.nu.coefficient(&DivisorSymbol::PsiUp(0)), -kappa / ell);
    }

    #[test]
    fn h4_examples() {
        let c = build_h4_witness(&mu(&[9, 9])).unwrap();
        assert!(c.is_valid(), "{c:?}");
        let sigs: Vec<String> = c.levels.iter().map(|l| l.signature.to_string()).collect();
        assert_eq!(sigs, ["9,-2,-7", "9,-2,-7"]);
        assert!(build_h4_witness(&mu(&[10, 10])).unwrap().is_valid());
        assert!(matches!(
            build_h4_witness(&mu(&[9, 8, 1])),
            Err(GraphError::Unrealizable(_))
        ));
    }

    #[test]
    fn h6_examples() {
        let c = build_h6_witness(&mu(&[14])).unwrap();
        assert!(c.is_valid(), "{c:?}");
        assert!(c.ghost_trivial);
        let sigs: Vec<String> = c.levels.iter().map(|l| l.signature.to_string()).collect();
        assert_eq!(sigs, ["14,-2,-12", "10,-2,-8"]);
        assert!(matches!(build_h6_witness(&mu(&[12])), Err(GraphError::Unrealizable(_))));
    }

    #[test]
    fn applicability_examples() {
        use Theorem::*;
        assert_eq!(theorem_applicability(&mu(&[9, -5])), BTreeSet::from([H3, H5]));
        assert!(!theorem_applicability(&mu(&[9, -7])).contains(&H3));
        assert_eq!(theorem_applicability(&mu(&[9, 9])), BTreeSet::from([H3, H4, H5]));
        assert!(theorem_applicability(&mu(&[14])).contains(&H6));
    }

    #[test]
    fn h3_bound_for_ten() {
        let b = h3_dimension_lower_bound(&mu(&[10]));
        assert!(b.bound >= 1);
        assert!(b.certificates.iter().all(WitnessCertificate::is_valid));
    }
}
