//! Brute-force isomorphisms of small enhanced level graphs.

use std::collections::BTreeMap;

use super::{EnhancedLevelGraph, GraphError};

/// Vertex cap for the brute-force searches.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 12;

/// Multiset of enhancements between each unordered pair of vertex positions.
fn edge_table(g: &EnhancedLevelGraph) -> BTreeMap<(usize, usize), Vec<u32>> {
    let mut table: BTreeMap<(usize, usize), Vec<u32>> = BTreeMap::new();
    for e in g.edges() {
        let (i, j) = (g.position(e.a), g.position(e.b));
        table.entry((i.min(j), i.max(j))).or_default().push(e.kappa);
    }
    for kappas in table.values_mut() {
        kappas.sort_unstable();
    }
    table
}

/// Sorted `(order, label)` pairs of each vertex position.
fn leg_table(g: &EnhancedLevelGraph) -> Vec<Vec<(i64, &str)>> {
    let mut legs = vec![Vec::new(); g.vertices().len()];
    for l in g.legs() {
        legs[g.position(l.vertex)].push((l.order, l.label.as_str()));
    }
    for v in &mut legs {
        v.sort_unstable();
    }
    legs
}

struct Matcher<'a> {
    src: &'a EnhancedLevelGraph,
    dst: &'a EnhancedLevelGraph,
    src_edges: BTreeMap<(usize, usize), Vec<u32>>,
    dst_edges: BTreeMap<(usize, usize), Vec<u32>>,
    src_legs: Vec<Vec<(i64, &'a str)>>,
    dst_legs: Vec<Vec<(i64, &'a str)>>,
    image: Vec<usize>,
    used: Vec<bool>,
    found: u64,
    stop_at_first: bool,
}

impl Matcher<'_> {
    fn pair(table: &BTreeMap<(usize, usize), Vec<u32>>, i: usize, j: usize) -> &[u32] {
        table.get(&(i.min(j), i.max(j))).map_or(&[], Vec::as_slice)
    }

    fn compatible(&self, i: usize, w: usize) -> bool {
        let (a, b) = (&self.src.vertices()[i], &self.dst.vertices()[w]);
        if a.genus != b.genus || a.level != b.level || self.src_legs[i] != self.dst_legs[w] {
            return false;
        }
        (0..=i).all(|j| {
            let wj = if j == i { w } else { self.image[j] };
            Self::pair(&self.src_edges, i, j) == Self::pair(&self.dst_edges, w, wj)
        })
    }

    fn search(&mut self, i: usize) {
        if self.stop_at_first && self.found > 0 {
            return;
        }
        if i == self.image.len() {
            self.found += 1;
            return;
        }
        for w in 0..self.used.len() {
            if !self.used[w] && self.compatible(i, w) {
                self.used[w] = true;
                self.image[i] = w;
                self.search(i + 1);
                self.used[w] = false;
            }
        }
    }
}

fn count_maps(src: &EnhancedLevelGraph, dst: &EnhancedLevelGraph, stop_at_first: bool) -> Result<u64, GraphError> {
    let n = src.vertices().len();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(GraphError::TooLarge {
            vertices: n,
            cap: MAX_BRUTE_FORCE_VERTICES,
        });
    }
    if n != dst.vertices().len() || src.edges().len() != dst.edges().len() || src.legs().len() != dst.legs().len() {
        return Ok(0);
    }
    let mut m = Matcher {
        src,
        dst,
        src_edges: edge_table(src),
        dst_edges: edge_table(dst),
        src_legs: leg_table(src),
        dst_legs: leg_table(dst),
        image: vec![0; n],
        used: vec![false; n],
        found: 0,
        stop_at_first,
    };
    m.search(0);
    Ok(m.found)
}

/// Order of the automorphism group: vertex bijections preserving genus,
/// level, legs pointwise and enhancements, times the permutations of
/// parallel edges with equal enhancement and the flips of self-loops.
pub fn automorphism_order(graph: &EnhancedLevelGraph) -> Result<u64, GraphError> {
    let vertex_maps = count_maps(graph, graph, false)?;
    let mut factor = 1u64;
    for ((i, j), kappas) in edge_table(graph) {
        let mut run = 1u64;
        for w in kappas.windows(2) {
            if w[0] == w[1] {
                run += 1;
                factor *= run;
            } else {
                run = 1;
            }
        }
        if i == j {
            factor <<= kappas.len();
        }
    }
    Ok(vertex_maps * factor)
}

/// Isomorphism preserving genus, level, enhancements and labelled legs.
pub fn is_isomorphic(a: &EnhancedLevelGraph, b: &EnhancedLevelGraph) -> Result<bool, GraphError> {
    Ok(count_maps(a, b, true)? > 0)
}
