//! Seeded random instances: tree sets, small separation systems, partial
//! orientations and contraction chains of trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inverse::InverseSystem;
use crate::system::{Elem, ElemSet, SepSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An undirected tree on nodes `0..nodes`.
#[derive(Clone, Debug)]
pub struct Tree {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Tree {
    /// Uniform random labelled tree via a Prüfer sequence.
    pub fn random(rng: &mut impl Rng, nodes: usize) -> Tree {
        if nodes <= 1 {
            return Tree { nodes, edges: vec![] };
        }
        if nodes == 2 {
            return Tree { nodes, edges: vec![(0, 1)] };
        }
        let seq: Vec<usize> = (0..nodes - 2).map(|_| rng.gen_range(0..nodes)).collect();
        let mut degree = vec![1usize; nodes];
        for &v in &seq {
            degree[v] += 1;
        }
        let mut edges = Vec::with_capacity(nodes - 1);
        for &v in &seq {
            let leaf = (0..nodes).find(|&u| degree[u] == 1).unwrap();
            edges.push((leaf.min(v), leaf.max(v)));
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..nodes).filter(|&u| degree[u] == 1).collect();
        edges.push((rest[0], rest[1]));
        Tree { nodes, edges }
    }

    /// Bitmask of the nodes on `u`'s side once edge `(u, v)` is removed.
    pub fn side(&self, u: usize, v: usize) -> u64 {
        let mut seen = 1u64 << u;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &(a, b) in &self.edges {
                for (from, to) in [(a, b), (b, a)] {
                    if from == x && !(from == u && to == v) && seen & (1 << to) == 0 {
                        seen |= 1 << to;
                        stack.push(to);
                    }
                }
            }
        }
        seen
    }

    pub fn all_nodes(&self) -> u64 {
        if self.nodes == 64 {
            u64::MAX
        } else {
            (1u64 << self.nodes) - 1
        }
    }
}

/// A tree set with optional planted extras.
#[derive(Clone, Debug)]
pub struct PlantedTreeSet {
    pub system: SepSystem,
    pub tree: Tree,
    /// `edge_elems[i] = (towards second endpoint, towards first endpoint)`.
    pub edge_elems: Vec<(Elem, Elem)>,
    pub planted_trivial: Vec<Elem>,
    pub planted_co_small: Vec<Elem>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Planting {
    pub trivial: usize,
    pub co_small: usize,
}

/// Edge tree set of a random tree with `n_edges` edges. Oriented edge
/// `(u, v)` is the bipartition (side of `u`, side of `v`). Planted trivial
/// elements sit below both orientations of a random edge; planted co-small
/// elements `c` have `c* <= c` and `c*` below a random oriented edge.
pub fn random_tree_set(seed: u64, n_edges: usize, planting: Planting) -> PlantedTreeSet {
    let mut rng = rng(seed);
    let tree = Tree::random(&mut rng, n_edges + 1);
    let mut labels = Vec::new();
    let mut sides = Vec::new();
    let mut edge_elems = Vec::new();
    for (i, &(u, v)) in tree.edges.iter().enumerate() {
        labels.push(format!("{u}>{v}"));
        labels.push(format!("{v}>{u}"));
        sides.push(tree.side(u, v));
        sides.push(tree.side(v, u));
        edge_elems.push((Elem(2 * i), Elem(2 * i + 1)));
    }
    let m = labels.len();
    let mut inverse: Vec<(usize, usize)> = (0..m / 2).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut gens = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && sides[a] & !sides[b] == 0 {
                gens.push((a, b));
            }
        }
    }
    let mut planted_trivial = Vec::new();
    let mut planted_co_small = Vec::new();
    if m > 0 {
        for k in 0..planting.trivial {
            let e = 2 * rng.gen_range(0..m / 2);
            let r = labels.len();
            labels.push(format!("t{k}"));
            labels.push(format!("t{k}*"));
            inverse.push((r, r + 1));
            gens.push((r, e));
            gens.push((r, e + 1));
            planted_trivial.push(Elem(r));
        }
        for k in 0..planting.co_small {
            let e = rng.gen_range(0..m);
            let c = labels.len();
            labels.push(format!("c{k}"));
            labels.push(format!("c{k}*"));
            inverse.push((c, c + 1));
            gens.push((c + 1, c));
            gens.push((c + 1, e));
            planted_co_small.push(Elem(c));
        }
    }
    let system = SepSystem::new(labels, &inverse, &gens).expect("tree set construction");
    PlantedTreeSet { system, tree, edge_elems, planted_trivial, planted_co_small }
}

/// Random separation system with `n_seps` separations. Each separation is
/// degenerate with probability `p_degenerate`; generators are added with
/// probability `p_edge` and dropped if they would create a cycle.
pub fn random_system(seed: u64, n_seps: usize, p_edge: f64, p_degenerate: f64) -> SepSystem {
    let mut rng = rng(seed);
    let mut labels = Vec::new();
    let mut inverse = Vec::new();
    for i in 0..n_seps {
        let a = labels.len();
        if rng.gen_bool(p_degenerate) {
            labels.push(format!("d{i}"));
            inverse.push((a, a));
        } else {
            labels.push(format!("s{i}"));
            labels.push(format!("s{i}*"));
            inverse.push((a, a + 1));
        }
    }
    let n = labels.len();
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    pairs.shuffle(&mut rng);
    let mut gens = Vec::new();
    for pair in pairs {
        if rng.gen_bool(p_edge) {
            gens.push(pair);
            if SepSystem::new(labels.clone(), &inverse, &gens).is_err() {
                gens.pop();
            }
        }
    }
    SepSystem::new(labels, &inverse, &gens).expect("cycle-free generators")
}

/// A random consistent antisymmetric subset of `s`, built by offering each
/// separation once in random order and orientation.
pub fn random_partial_orientation(rng: &mut impl Rng, s: &SepSystem) -> ElemSet {
    let mut seps = s.separations();
    seps.shuffle(rng);
    let mut out = ElemSet::new();
    for r in seps {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let o = if rng.gen_bool(0.5) { r } else { s.inv(r) };
        out.insert(o);
        if !s.is_consistent(&out) {
            out.remove(&o);
        }
    }
    out
}

/// A chain of tree sets obtained by restricting the edge bipartitions of a
/// random tree to shrinking node sets. Dropping a node of degree two merges
/// its edges; dropping leaves can leave a side empty, which produces a
/// trivial separation at that level.
#[derive(Clone, Debug)]
pub struct ContractionChain {
    pub system: InverseSystem,
    pub tree: Tree,
    /// Node set of each level, bottom first.
    pub node_sets: Vec<u64>,
}

fn mask_label(mask: u64) -> String {
    if mask == 0 {
        return "-".into();
    }
    (0..64).filter(|i| mask & (1 << i) != 0).map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// Level on node set `w`: distinct restrictions of the top bipartitions.
fn restricted_level(top: &[(u64, u64)], w: u64) -> (SepSystem, Vec<(u64, u64)>) {
    let mut seps: Vec<(u64, u64)> = Vec::new();
    for &(a, b) in top {
        let r = (a & w, b & w);
        if !seps.contains(&r) {
            seps.push(r);
        }
    }
    let labels = seps.iter().map(|&(a, b)| format!("{}|{}", mask_label(a), mask_label(b))).collect();
    let inv = seps.iter().map(|&(a, b)| seps.iter().position(|&x| x == (b, a)).unwrap()).collect();
    let sys = SepSystem::from_relation(labels, inv, |x, y| {
        seps[x].0 & !seps[y].0 == 0 && seps[y].1 & !seps[x].1 == 0
    })
    .expect("restricted bipartitions form a separation system");
    (sys, seps)
}

pub fn random_contraction_chain(seed: u64, levels: usize, n_edges: usize) -> ContractionChain {
    let mut rng = rng(seed ^ 0x5eed_c4a1);
    let tree = Tree::random(&mut rng, n_edges + 1);
    let all = tree.all_nodes();
    let top: Vec<(u64, u64)> = tree
        .edges
        .iter()
        .flat_map(|&(u, v)| {
            let a = tree.side(u, v);
            let b = tree.side(v, u);
            [(a, b), (b, a)]
        })
        .collect();
    let levels = levels.max(1);
    let mut node_sets = vec![all];
    for _ in 1..levels {
        let prev = *node_sets.last().unwrap();
        let mut w = prev;
        for v in 0..tree.nodes {
            if w & (1 << v) != 0 && rng.gen_bool(0.35) {
                w &= !(1 << v);
            }
        }
        if w == 0 {
            w = prev & prev.wrapping_neg();
        }
        node_sets.push(w);
    }
    node_sets.reverse();
    let mut systems = Vec::new();
    let mut seps = Vec::new();
    for &w in &node_sets {
        let (sys, sp) = restricted_level(&top, w);
        systems.push(sys);
        seps.push(sp);
    }
    let mut bonds = Vec::new();
    for i in 1..node_sets.len() {
        let w = node_sets[i - 1];
        let table = seps[i]
            .iter()
            .map(|&(a, b)| Elem(seps[i - 1].iter().position(|&x| x == (a & w, b & w)).unwrap()))
            .collect();
        bonds.push(table);
    }
    let labels = (0..node_sets.len()).map(|i| i.to_string()).collect();
    let system = InverseSystem::chain(labels, systems, bonds).expect("restriction chain is an inverse system");
    ContractionChain { system, tree, node_sets }
}

/// Node stars of a tree, as sets of oriented edges pointing at the node,
/// indexed as in [`random_tree_set`].
pub fn node_stars(tree: &Tree) -> Vec<ElemSet> {
    (0..tree.nodes)
        .map(|x| {
            tree.edges
                .iter()
                .enumerate()
                .filter_map(|(i, &(u, v))| {
                    if v == x {
                        Some(Elem(2 * i))
                    } else if u == x {
                        Some(Elem(2 * i + 1))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}
