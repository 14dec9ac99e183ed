//! Separations of finite graphs as separation systems, and inverse systems
//! of restrictions to vertex subsets.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::inverse::{DirectedPoset, InverseError, InverseSystem};
use crate::system::{Elem, SepSystem};

/// Largest vertex set enumerated (3^n assignments before pruning).
pub const MAX_ENUM_VERTICES: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph has {0} vertices, above the enumeration limit of {MAX_ENUM_VERTICES}")]
    TooLarge(usize),
    #[error("order bound must be at least 1")]
    BadOrderBound,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("subset family is not a chain with a greatest member")]
    NotAChain,
    #[error("subset {0} listed twice")]
    DuplicateSubset(usize),
    #[error(transparent)]
    Inverse(#[from] InverseError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: &[(usize, usize)]) -> Self {
        let mut es: Vec<(usize, usize)> = edges.iter().filter(|(a, b)| a != b).map(|&(a, b)| (a.min(b), a.max(b))).collect();
        es.sort_unstable();
        es.dedup();
        Graph { vertices, edges: es }
    }

    /// Path `v1 - v2 - ... - vn`.
    pub fn path(n: usize) -> Self {
        let vs = (1..=n).map(|i| format!("v{i}")).collect();
        let es: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(vs, &es)
    }

    /// Parses lines of the form `v: u w ...` listing neighbours. Blank lines
    /// and text after `#` are ignored; a vertex may be listed with no
    /// neighbours.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let id = |v: &str, vs: &mut Vec<String>| match vs.iter().position(|x| x == v) {
            Some(i) => i,
            None => {
                vs.push(v.to_string());
                vs.len() - 1
            }
        };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((head, rest)) = line.split_once(':') else {
                return Err(GraphError::Parse { line: n + 1, msg: "expected `vertex: neighbours`".into() });
            };
            let head = head.trim();
            if head.is_empty() || head.contains(char::is_whitespace) {
                return Err(GraphError::Parse { line: n + 1, msg: "bad vertex label".into() });
            }
            let v = id(head, &mut vertices);
            for u in rest.split_whitespace() {
                let u = id(u, &mut vertices);
                if u == v {
                    return Err(GraphError::Parse { line: n + 1, msg: "loops are not allowed".into() });
                }
                edges.push((v, u));
            }
        }
        Ok(Graph::new(vertices, &edges))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn all(&self) -> u64 {
        (0..self.len()).fold(0, |m, i| m | 1 << i)
    }

    pub fn mask_of(&self, labels: &[&str]) -> Result<u64, GraphError> {
        labels.iter().try_fold(0u64, |m, l| {
            let i = self.vertices.iter().position(|v| v == l).ok_or_else(|| GraphError::UnknownVertex(l.to_string()))?;
            Ok(m | 1 << i)
        })
    }

    pub fn mask_label(&self, mask: u64) -> String {
        if mask == 0 {
            return "-".into();
        }
        (0..self.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.vertices[i].as_str()).collect::<Vec<_>>().join(",")
    }
}

/// A pair of vertex sets covering the graph with no edge from `a ∖ b` to
/// `b ∖ a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SetSeparation {
    pub a: u64,
    pub b: u64,
}

impl SetSeparation {
    pub fn order(&self) -> u32 {
        (self.a & self.b).count_ones()
    }

    pub fn inverse(&self) -> Self {
        SetSeparation { a: self.b, b: self.a }
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.a & !other.a == 0 && other.b & !self.b == 0
    }

    pub fn is_valid_in(&self, g: &Graph, within: u64) -> bool {
        let only_a = self.a & !self.b;
        let only_b = self.b & !self.a;
        self.a | self.b == within
            && (self.a | self.b) & !within == 0
            && g.edges.iter().all(|&(u, v)| {
                let (mu, mv) = (1u64 << u, 1u64 << v);
                !((only_a & mu != 0 && only_b & mv != 0) || (only_a & mv != 0 && only_b & mu != 0))
            })
    }
}

pub fn restrict_separation(sep: SetSeparation, p: u64) -> SetSeparation {
    SetSeparation { a: sep.a & p, b: sep.b & p }
}

/// The separations of a graph (or of the subgraph induced on a vertex set)
/// of order below a bound, with the system they form.
#[derive(Clone, Debug)]
pub struct GraphSystem {
    pub system: SepSystem,
    pub seps: Vec<SetSeparation>,
}

impl GraphSystem {
    pub fn find(&self, sep: SetSeparation) -> Option<Elem> {
        self.seps.iter().position(|&s| s == sep).map(Elem)
    }
}

pub fn enumerate_separations(g: &Graph, k: usize) -> Result<GraphSystem, GraphError> {
    enumerate_on(g, g.all(), k)
}

/// Separations of the subgraph induced on `within`.
pub fn enumerate_on(g: &Graph, within: u64, k: usize) -> Result<GraphSystem, GraphError> {
    if k == 0 {
        return Err(GraphError::BadOrderBound);
    }
    let verts: Vec<usize> = (0..g.len()).filter(|i| within & (1 << i) != 0).collect();
    if verts.len() > MAX_ENUM_VERTICES {
        return Err(GraphError::TooLarge(verts.len()));
    }
    let mut adj = vec![0u64; g.len()];
    for &(u, v) in &g.edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut seps = Vec::new();
    assign(&verts, &adj, k, 0, 0, &mut seps);
    seps.sort_unstable();
    let labels = seps.iter().map(|s| format!("{}|{}", g.mask_label(s.a), g.mask_label(s.b))).collect();
    let inv = seps.iter().map(|s| seps.binary_search(&s.inverse()).expect("inverse is enumerated")).collect();
    let system = SepSystem::from_relation(labels, inv, |x, y| seps[x].leq(&seps[y])).expect("set separations form a system");
    Ok(GraphSystem { system, seps })
}

fn assign(verts: &[usize], adj: &[u64], k: usize, a: u64, b: u64, out: &mut Vec<SetSeparation>) {
    let Some((&v, rest)) = verts.split_first() else {
        out.push(SetSeparation { a, b });
        return;
    };
    let bit = 1u64 << v;
    // Only earlier vertices are assigned, so checking v against them suffices.
    let (only_a, only_b) = (a & !b, b & !a);
    if adj[v] & only_b == 0 {
        assign(rest, adj, k, a | bit, b, out);
    }
    if adj[v] & only_a == 0 {
        assign(rest, adj, k, a, b | bit, out);
    }
    if ((a & b).count_ones() as usize) + 1 < k {
        assign(rest, adj, k, a | bit, b | bit, out);
    }
}

/// An inverse system of restrictions: one level per vertex subset.
#[derive(Clone, Debug)]
pub struct RestrictionSystem {
    pub system: InverseSystem,
    pub subsets: Vec<u64>,
    pub levels: Vec<GraphSystem>,
}

/// Levels are the separations of order below `k` of the induced subgraphs on
/// `subsets`, ordered by inclusion; bonds are restrictions. The family needs
/// a greatest member.
pub fn build_restriction_system(g: &Graph, k: usize, subsets: &[u64]) -> Result<RestrictionSystem, GraphError> {
    for (i, s) in subsets.iter().enumerate() {
        if subsets[..i].contains(s) {
            return Err(GraphError::DuplicateSubset(i));
        }
    }
    let n = subsets.len();
    if !(0..n).any(|m| subsets.iter().all(|&s| s & !subsets[m] == 0)) {
        return Err(GraphError::NotAChain);
    }
    let mut gens = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && subsets[p] & !subsets[q] == 0 {
                gens.push((p, q));
            }
        }
    }
    let labels = subsets.iter().map(|&s| g.mask_label(s)).collect();
    let poset = DirectedPoset::new(labels, &gens)?;
    let levels: Vec<GraphSystem> = subsets.iter().map(|&w| enumerate_on(g, w, k)).collect::<Result<_, _>>()?;
    let mut bonds = BTreeMap::new();
    for &(q, p) in &poset.covering_pairs() {
        let table = levels[q]
            .seps
            .iter()
            .map(|&s| levels[p].find(restrict_separation(s, subsets[p])).expect("restriction has no larger order"))
            .collect();
        bonds.insert((q, p), table);
    }
    let system = InverseSystem::new(poset, levels.iter().map(|l| l.system.clone()).collect(), bonds)?;
    Ok(RestrictionSystem { system, subsets: subsets.to_vec(), levels })
}

impl RestrictionSystem {
    /// Rebuilds each limit element as the union of its coordinates and checks
    /// that this is an order isomorphism onto the directly enumerated
    /// separations of the union of all subsets.
    pub fn union_map_is_isomorphism(&self, g: &Graph, k: usize) -> Result<bool, GraphError> {
        let cover = self.subsets.iter().fold(0, |m, s| m | s);
        let direct = enumerate_on(g, cover, k)?;
        let lim = self.system.limit();
        let ls = lim.system();
        let mut image = Vec::new();
        for x in ls.elements() {
            let sep = lim.coords(x).iter().enumerate().fold(SetSeparation { a: 0, b: 0 }, |acc, (p, &c)| {
                let s = self.levels[p].seps[c.0];
                SetSeparation { a: acc.a | s.a, b: acc.b | s.b }
            });
            match direct.find(sep) {
                Some(e) => image.push(e),
                None => return Ok(false),
            }
        }
        let mut sorted = image.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != direct.seps.len() || image.len() != direct.seps.len() {
            return Ok(false);
        }
        Ok(ls.elements().all(|x| {
            ls.elements().all(|y| ls.leq(x, y) == direct.system.leq(image[x.0], image[y.0]))
                && direct.system.inv(image[x.0]) == image[ls.inv(x).0]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let g = Graph::new(vec!["v".into()], &[]);
        let gs = enumerate_separations(&g, 2).unwrap();
        assert_eq!(gs.seps.len(), 3);
        assert!(gs.find(SetSeparation { a: 0, b: 1 }).is_some());
        assert!(gs.find(SetSeparation { a: 1, b: 1 }).is_some());
    }

    #[test]
    fn path_forbidden_edge() {
        let g = Graph::path(3);
        let gs = enumerate_separations(&g, 2).unwrap();
        let m = |l: &[&str]| g.mask_of(l).unwrap();
        assert!(gs.find(SetSeparation { a: m(&["v1"]), b: m(&["v1", "v2", "v3"]) }).is_some());
        // v1 is only in A and its neighbour v2 only in B.
        let bad = SetSeparation { a: m(&["v1", "v3"]), b: m(&["v2", "v3"]) };
        assert!(!bad.is_valid_in(&g, g.all()));
        assert!(gs.find(bad).is_none());
        assert!(gs.find(SetSeparation { a: g.all(), b: 0 }).is_some());
        assert!(gs.seps.iter().all(|s| s.is_valid_in(&g, g.all()) && s.order() < 2));
    }

    #[test]
    fn restriction_examples() {
        let g = Graph::new(["a", "b", "c", "x"].map(String::from).to_vec(), &[]);
        let m = |l: &[&str]| g.mask_of(l).unwrap();
        let s = SetSeparation { a: m(&["x", "a"]), b: m(&["c", "x", "b"]) };
        assert_eq!(restrict_separation(s, m(&["c", "x"])), SetSeparation { a: m(&["x"]), b: m(&["c", "x"]) });
        assert_eq!(restrict_separation(s, g.all()), s);
        assert_eq!(restrict_separation(s, 0), SetSeparation { a: 0, b: 0 });
    }

    #[test]
    fn full_lattice_limit_matches_direct() {
        let g = Graph::parse("a: b\nb: c\nc:\n").unwrap();
        let subsets: Vec<u64> = (1..8).collect();
        let rs = build_restriction_system(&g, 2, &subsets).unwrap();
        assert!(rs.union_map_is_isomorphism(&g, 2).unwrap());
    }

    #[test]
    fn not_a_chain() {
        let g = Graph::path(2);
        assert_eq!(build_restriction_system(&g, 2, &[1, 2]).unwrap_err(), GraphError::NotAChain);
        let rs = build_restriction_system(&g, 2, &[1, 3]).unwrap();
        assert!(rs.system.is_surjective());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Graph::parse("a b"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(Graph::parse("a: a"), Err(GraphError::Parse { .. })));
        let g = Graph::parse("# comment\na: b c\nd:\n").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges.len(), 2);
    }
}
