//! Inverse systems of separation systems over a finite directed poset with a
//! greatest point, their limits, and the limit topology.
//!
//! Limit elements correspond to elements of the top level. Their order and
//! involution are computed coordinatewise from the projections.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::system::{Elem, ElemSet, SepSystem, SystemError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("map has {got} entries, source has {want} elements")]
    WrongLength { got: usize, want: usize },
    #[error("image {0} out of range")]
    OutOfRange(usize),
    #[error("map does not commute with inversion at `{0}`")]
    InvolutionMismatch(String),
    #[error("map does not preserve `{0}` <= `{1}`")]
    OrderViolation(String, String),
}

/// A map between separation systems that commutes with the involution and
/// preserves the order. Only the table is stored; the systems are supplied by
/// the caller.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemHom {
    map: Vec<Elem>,
}

impl SystemHom {
    pub fn new(source: &SepSystem, target: &SepSystem, map: Vec<Elem>) -> Result<Self, HomError> {
        if map.len() != source.len() {
            return Err(HomError::WrongLength { got: map.len(), want: source.len() });
        }
        if let Some(e) = map.iter().find(|e| e.0 >= target.len()) {
            return Err(HomError::OutOfRange(e.0));
        }
        for x in source.elements() {
            if map[source.inv(x).0] != target.inv(map[x.0]) {
                return Err(HomError::InvolutionMismatch(source.label(x).into()));
            }
            for y in source.up(x) {
                if !target.leq(map[x.0], map[y.0]) {
                    return Err(HomError::OrderViolation(source.label(x).into(), source.label(y).into()));
                }
            }
        }
        Ok(SystemHom { map })
    }

    pub fn identity(n: usize) -> Self {
        SystemHom { map: (0..n).map(Elem).collect() }
    }

    pub fn apply(&self, e: Elem) -> Elem {
        self.map[e.0]
    }

    pub fn image(&self, set: &ElemSet) -> ElemSet {
        set.iter().map(|&e| self.apply(e)).collect()
    }

    pub fn table(&self) -> &[Elem] {
        &self.map
    }

    /// `self` after `first`.
    pub fn after(&self, first: &SystemHom) -> SystemHom {
        SystemHom { map: first.map.iter().map(|&e| self.apply(e)).collect() }
    }

    pub fn preimage(&self, y: Elem) -> Vec<Elem> {
        (0..self.map.len()).map(Elem).filter(|&x| self.apply(x) == y).collect()
    }

    pub fn is_epi(&self, target_len: usize) -> bool {
        let hit: BTreeSet<Elem> = self.map.iter().copied().collect();
        hit.len() == target_len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InverseError {
    #[error("not a partial order: `{0}` and `{1}` lie on a cycle")]
    NotAPoset(String, String),
    #[error("poset has no greatest point")]
    NoMaximum,
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("expected {want} levels, got {got}")]
    LevelCount { want: usize, got: usize },
    #[error("missing bond from `{0}` to `{1}`")]
    MissingBond(String, String),
    #[error("bond from `{0}` to `{1}` is not between comparable points")]
    NotComparable(String, String),
    #[error("bond from `{q}` to `{p}`: {source}")]
    Hom { q: String, p: String, source: HomError },
    #[error("bonds disagree: composite `{r}` -> `{q}` -> `{p}` differs from `{r}` -> `{p}`")]
    IncompatibleBonds { p: String, q: String, r: String },
    #[error("level `{0}`: {1}")]
    Level(String, SystemError),
    #[error("not a chain: `{0}` and `{1}` are incomparable")]
    NotAChain(String, String),
    #[error("empty chain has no bounds")]
    EmptyChain,
    #[error("set is not closed in the limit")]
    NotClosed,
    #[error("element `{0}` is not in the set")]
    NotMember(String),
}

/// A finite directed poset. Directedness is checked as the existence of a
/// greatest point, which for finite posets is equivalent.
#[derive(Clone, Debug)]
pub struct DirectedPoset {
    labels: Vec<String>,
    up: Vec<FixedBitSet>,
    max: usize,
}

impl DirectedPoset {
    pub fn new(labels: Vec<String>, generators: &[(usize, usize)]) -> Result<Self, InverseError> {
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in generators {
            if a >= n || b >= n {
                return Err(InverseError::UnknownPoint(a.max(b).to_string()));
            }
            up[a].insert(b);
        }
        for k in 0..n {
            let rk = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&rk);
                }
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if a != b && up[b].contains(a) {
                    return Err(InverseError::NotAPoset(labels[a].clone(), labels[b].clone()));
                }
            }
        }
        let max = (0..n).find(|&m| (0..n).all(|p| up[p].contains(m))).ok_or(InverseError::NoMaximum)?;
        Ok(DirectedPoset { labels, up, max })
    }

    /// The chain `labels[0] < labels[1] < ...`.
    pub fn chain(labels: Vec<String>) -> Result<Self, InverseError> {
        let gens: Vec<(usize, usize)> = (1..labels.len()).map(|i| (i - 1, i)).collect();
        Self::new(labels, &gens)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(q)
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    /// Pairs `(q, p)` with `p < q` and nothing strictly between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for q in 0..n {
            for p in 0..n {
                if self.lt(p, q) && !(0..n).any(|c| self.lt(p, c) && self.lt(c, q)) {
                    out.push((q, p));
                }
            }
        }
        out
    }

    /// Points sorted so that larger points come first.
    pub fn descending(&self) -> Vec<usize> {
        let mut v = self.points();
        v.sort_by_key(|&p| self.up[p].count_ones(..));
        v
    }

    /// Points sorted so that smaller points come first.
    pub fn ascending(&self) -> Vec<usize> {
        let mut v = self.descending();
        v.reverse();
        v
    }
}

/// The limit of an inverse system, represented by the top level. `coords[x][p]`
/// is the projection of limit element `x` to point `p`.
#[derive(Clone, Debug)]
pub struct Limit {
    system: SepSystem,
    coords: Vec<Vec<Elem>>,
}

impl Limit {
    pub fn system(&self) -> &SepSystem {
        &self.system
    }

    pub fn project(&self, x: Elem, p: usize) -> Elem {
        self.coords[x.0][p]
    }

    pub fn project_set(&self, set: &ElemSet, p: usize) -> ElemSet {
        set.iter().map(|&x| self.project(x, p)).collect()
    }

    pub fn coords(&self, x: Elem) -> &[Elem] {
        &self.coords[x.0]
    }

    /// Limit elements whose projections to each point of `points` lie in the
    /// projection of `set`. With all points this is the closure in the limit
    /// topology; a proper subset of points gives a coarser, depth-bounded view.
    pub fn closure_on(&self, set: &ElemSet, points: &[usize]) -> ElemSet {
        let proj: Vec<(usize, ElemSet)> = points.iter().map(|&p| (p, self.project_set(set, p))).collect();
        self.system
            .elements()
            .filter(|&x| proj.iter().all(|(p, img)| img.contains(&self.project(x, *p))))
            .collect()
    }

    pub fn is_closed_on(&self, set: &ElemSet, points: &[usize]) -> bool {
        self.closure_on(set, points) == *set
    }

    /// Limit elements agreeing with the given coordinates at every listed point.
    pub fn with_coords(&self, coords: &[(usize, Elem)]) -> Vec<Elem> {
        self.system.elements().filter(|&x| coords.iter().all(|&(p, c)| self.project(x, p) == c)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct InverseSystem {
    poset: DirectedPoset,
    levels: Vec<SepSystem>,
    covering: BTreeMap<(usize, usize), SystemHom>,
    // maps[q][p] = composite bond q -> p for p <= q.
    maps: Vec<Vec<Option<SystemHom>>>,
    limit: Limit,
}

impl InverseSystem {
    /// Builds an inverse system. `bonds` maps `(q, p)` with `p < q` to the
    /// element table of the bond; every covering pair needs a bond, further
    /// bonds are checked against the composites.
    pub fn new(
        poset: DirectedPoset,
        levels: Vec<SepSystem>,
        bonds: BTreeMap<(usize, usize), Vec<Elem>>,
    ) -> Result<Self, InverseError> {
        let n = poset.len();
        if levels.len() != n {
            return Err(InverseError::LevelCount { want: n, got: levels.len() });
        }
        let name = |p: usize| poset.label(p).to_string();
        let mut checked: BTreeMap<(usize, usize), SystemHom> = BTreeMap::new();
        for (&(q, p), table) in &bonds {
            if q >= n || p >= n {
                return Err(InverseError::UnknownPoint(q.max(p).to_string()));
            }
            if !poset.lt(p, q) {
                return Err(InverseError::NotComparable(name(q), name(p)));
            }
            let h = SystemHom::new(&levels[q], &levels[p], table.clone())
                .map_err(|source| InverseError::Hom { q: name(q), p: name(p), source })?;
            checked.insert((q, p), h);
        }
        let covering_pairs = poset.covering_pairs();
        for &(q, p) in &covering_pairs {
            if !checked.contains_key(&(q, p)) {
                return Err(InverseError::MissingBond(name(q), name(p)));
            }
        }
        let mut maps: Vec<Vec<Option<SystemHom>>> = vec![vec![None; n]; n];
        let desc = poset.descending();
        for &q in &desc {
            maps[q][q] = Some(SystemHom::identity(levels[q].len()));
            // Walk down from q in descending order so every cover's map exists.
            for &c in &desc {
                let Some(fc) = maps[q][c].clone() else { continue };
                for &(cq, p) in &covering_pairs {
                    if cq == c && maps[q][p].is_none() {
                        maps[q][p] = Some(checked[&(c, p)].after(&fc));
                    }
                }
            }
        }
        for r in 0..n {
            for q in 0..n {
                for p in 0..n {
                    if poset.leq(p, q) && poset.leq(q, r) {
                        let direct = maps[r][p].as_ref().unwrap();
                        let via = maps[q][p].as_ref().unwrap().after(maps[r][q].as_ref().unwrap());
                        if *direct != via {
                            return Err(InverseError::IncompatibleBonds { p: name(p), q: name(q), r: name(r) });
                        }
                    }
                }
            }
        }
        for (&(q, p), h) in &checked {
            if maps[q][p].as_ref() != Some(h) {
                return Err(InverseError::IncompatibleBonds { p: name(p), q: name(q), r: name(q) });
            }
        }
        let covering = checked.into_iter().filter(|(k, _)| covering_pairs.contains(k)).collect();
        let limit = build_limit(&poset, &levels, &maps);
        Ok(InverseSystem { poset, levels, covering, maps, limit })
    }

    /// A chain of levels, `bonds[i]` mapping level `i + 1` onto level `i`.
    pub fn chain(labels: Vec<String>, levels: Vec<SepSystem>, bonds: Vec<Vec<Elem>>) -> Result<Self, InverseError> {
        let poset = DirectedPoset::chain(labels)?;
        let map = bonds.into_iter().enumerate().map(|(i, b)| ((i + 1, i), b)).collect();
        Self::new(poset, levels, map)
    }

    pub fn poset(&self) -> &DirectedPoset {
        &self.poset
    }

    pub fn level(&self, p: usize) -> &SepSystem {
        &self.levels[p]
    }

    pub fn levels(&self) -> &[SepSystem] {
        &self.levels
    }

    pub fn top(&self) -> usize {
        self.poset.max()
    }

    /// Composite bond from `q` down to `p`. Panics unless `p <= q`.
    pub fn bond(&self, q: usize, p: usize) -> &SystemHom {
        self.maps[q][p].as_ref().expect("bond requested between incomparable points")
    }

    pub fn covering_bonds(&self) -> &BTreeMap<(usize, usize), SystemHom> {
        &self.covering
    }

    pub fn limit(&self) -> &Limit {
        &self.limit
    }

    pub fn is_surjective(&self) -> bool {
        self.covering.iter().all(|(&(_, p), h)| h.is_epi(self.levels[p].len()))
    }

    /// Image of the limit at `p`: the projection of the top level.
    pub fn image_at(&self, p: usize) -> ElemSet {
        self.bond(self.top(), p).image(&self.levels[self.top()].all())
    }

    /// Restricts every level to the image of the top level. The limit is
    /// unchanged and all bonds become surjective.
    pub fn surjectivize(&self) -> InverseSystem {
        let n = self.poset.len();
        let mut levels = Vec::with_capacity(n);
        let mut backs = Vec::with_capacity(n);
        for p in 0..n {
            let (sub, back) = self.levels[p].induced(&self.image_at(p));
            levels.push(sub);
            backs.push(back);
        }
        let mut bonds = BTreeMap::new();
        for (&(q, p), h) in &self.covering {
            let fwd: BTreeMap<Elem, Elem> = backs[p].iter().enumerate().map(|(i, &e)| (e, Elem(i))).collect();
            let table = backs[q].iter().map(|&e| fwd[&h.apply(e)]).collect();
            bonds.insert((q, p), table);
        }
        InverseSystem::new(self.poset.clone(), levels, bonds).expect("restriction of a valid inverse system")
    }

    /// Pairs where the coordinatewise limit order differs from the order of
    /// the top level. For a finite poset with a greatest point this is always
    /// empty; it is kept as a diagnostic.
    pub fn order_discrepancies(&self) -> Vec<(Elem, Elem)> {
        let top = self.level(self.top());
        let lim = self.limit.system();
        let mut out = Vec::new();
        for a in lim.elements() {
            for b in lim.elements() {
                if lim.leq(a, b) != top.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn closure(&self, set: &ElemSet) -> ElemSet {
        self.limit.closure_on(set, &self.poset.points())
    }

    pub fn is_closed(&self, set: &ElemSet) -> bool {
        self.closure(set) == *set
    }

    /// Points strictly below the top, used when the top level stands in for
    /// the limit of a longer chain.
    pub fn probe_points(&self) -> Vec<usize> {
        self.poset.points().into_iter().filter(|&p| p != self.top()).collect()
    }
}

fn build_limit(poset: &DirectedPoset, levels: &[SepSystem], maps: &[Vec<Option<SystemHom>>]) -> Limit {
    let m = poset.max();
    let top = &levels[m];
    let n = poset.len();
    let coords: Vec<Vec<Elem>> =
        top.elements().map(|x| (0..n).map(|p| maps[m][p].as_ref().unwrap().apply(x)).collect()).collect();
    let inv: Vec<usize> = top.elements().map(|x| top.inv(x).0).collect();
    let system = SepSystem::from_relation(top.labels().to_vec(), inv, |a, b| {
        (0..n).all(|p| levels[p].leq(coords[a][p], coords[b][p]))
    })
    .expect("coordinatewise order of a valid inverse system");
    Limit { system, coords }
}

/// Coordinatewise supremum or infimum of a chain, restricted to `points`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainBound {
    pub coords: Vec<(usize, Elem)>,
    /// The coordinates form a compatible family over `points`.
    pub compatible: bool,
    /// Limit elements with exactly these coordinates.
    pub elements: Vec<Elem>,
    /// Those elements that lie in the closure of the chain over `points`.
    pub in_closure: Vec<Elem>,
}

fn chain_bound(is: &InverseSystem, chain: &ElemSet, points: &[usize], upper: bool) -> Result<ChainBound, InverseError> {
    let lim = is.limit();
    let s = lim.system();
    if chain.is_empty() {
        return Err(InverseError::EmptyChain);
    }
    for &a in chain {
        for &b in chain {
            if !s.leq(a, b) && !s.leq(b, a) {
                return Err(InverseError::NotAChain(s.label(a).into(), s.label(b).into()));
            }
        }
    }
    let mut coords = Vec::new();
    for &p in points {
        let img = lim.project_set(chain, p);
        let lvl = is.level(p);
        let pick = if upper {
            lvl.greatest(&img)
        } else {
            img.iter().copied().find(|&x| img.iter().all(|&y| lvl.leq(x, y)))
        };
        // Projections of a chain form a chain, so a bound always exists.
        let c = pick.expect("projection of a chain is a chain");
        coords.push((p, c));
    }
    let compatible = coords.iter().all(|&(q, cq)| {
        coords.iter().all(|&(p, cp)| !is.poset().lt(p, q) || is.bond(q, p).apply(cq) == cp)
    });
    let elements = lim.with_coords(&coords);
    let closure = lim.closure_on(chain, points);
    let in_closure = elements.iter().copied().filter(|x| closure.contains(x)).collect();
    Ok(ChainBound { coords, compatible, elements, in_closure })
}

/// Supremum of a chain: the greatest projection at every point.
pub fn chain_sup(is: &InverseSystem, chain: &ElemSet, points: &[usize]) -> Result<ChainBound, InverseError> {
    chain_bound(is, chain, points, true)
}

/// Infimum of a chain: the least projection at every point.
pub fn chain_inf(is: &InverseSystem, chain: &ElemSet, points: &[usize]) -> Result<ChainBound, InverseError> {
    chain_bound(is, chain, points, false)
}

/// For a closed set `o` containing `s`: an element of `o` below `s` that is
/// minimal in `o`, and one above `s` that is maximal in `o`, obtained as the
/// bounds of a maximal chain through `s`.
pub fn min_below_max_above(is: &InverseSystem, o: &ElemSet, s: Elem) -> Result<(Elem, Elem), InverseError> {
    let lim = is.limit().system();
    if !o.contains(&s) {
        return Err(InverseError::NotMember(lim.label(s).into()));
    }
    if !is.is_closed(o) {
        return Err(InverseError::NotClosed);
    }
    let mut chain: ElemSet = [s].into();
    for &x in o {
        if chain.iter().all(|&c| lim.leq(c, x) || lim.leq(x, c)) {
            chain.insert(x);
        }
    }
    let points = is.poset().points();
    let sup = chain_sup(is, &chain, &points)?;
    let inf = chain_inf(is, &chain, &points)?;
    let (Some(&top), Some(&bot)) = (sup.in_closure.first(), inf.in_closure.first()) else {
        return Err(InverseError::NotClosed);
    };
    Ok((bot, top))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SepSystem {
        // Path on n+1 nodes, edges e_i pointing right (2i) and left (2i+1).
        let mut labels = Vec::new();
        for i in 0..n {
            labels.push(format!("e{i}>"));
            labels.push(format!("e{i}<"));
        }
        let inv: Vec<(usize, usize)> = (0..n).map(|i| (2 * i, 2 * i + 1)).collect();
        let gens: Vec<(usize, usize)> = (1..n).map(|i| (2 * (i - 1), 2 * i)).collect();
        SepSystem::new(labels, &inv, &gens).unwrap()
    }

    fn contraction() -> InverseSystem {
        // a-b-c onto a-c: both edges map to the single edge.
        let bond = vec![Elem(0), Elem(1), Elem(0), Elem(1)];
        InverseSystem::chain(vec!["lo".into(), "hi".into()], vec![path(1), path(2)], vec![bond]).unwrap()
    }

    #[test]
    fn limit_matches_top() {
        let is = contraction();
        assert_eq!(is.limit().system().len(), 4);
        assert!(is.order_discrepancies().is_empty());
        assert!(is.is_surjective());
        assert_eq!(is.limit().project(Elem(2), 0), Elem(0));
    }

    #[test]
    fn bad_bond_rejected() {
        let bond = vec![Elem(0), Elem(0), Elem(0), Elem(1)];
        let err = InverseSystem::chain(vec!["lo".into(), "hi".into()], vec![path(1), path(2)], vec![bond]).unwrap_err();
        assert!(matches!(err, InverseError::Hom { .. }));
    }

    #[test]
    fn incompatible_diamond_rejected() {
        // 0 < 1, 0 < 2, 1 < 3, 2 < 3 with a swap on one side.
        let poset = DirectedPoset::new((0..4).map(|i| i.to_string()).collect(), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let e = path(1);
        let id = vec![Elem(0), Elem(1)];
        let mut bonds = BTreeMap::new();
        bonds.insert((1, 0), id.clone());
        bonds.insert((2, 0), id.clone());
        bonds.insert((3, 1), id.clone());
        bonds.insert((3, 2), id);
        assert!(InverseSystem::new(poset.clone(), vec![e.clone(); 4], bonds.clone()).is_ok());
        // A map swapping orientations reverses the order only when it is
        // trivial, so use an unordered two-separation level to swap.
        let labels = ["a", "a*", "b", "b*"].map(String::from).to_vec();
        let two = SepSystem::new(labels, &[(0, 1), (2, 3)], &[]).unwrap();
        let id2 = vec![Elem(0), Elem(1), Elem(2), Elem(3)];
        let swap = vec![Elem(2), Elem(3), Elem(0), Elem(1)];
        let mut bonds = BTreeMap::new();
        bonds.insert((1, 0), id2.clone());
        bonds.insert((2, 0), swap);
        bonds.insert((3, 1), id2.clone());
        bonds.insert((3, 2), id2);
        let err = InverseSystem::new(poset, vec![two; 4], bonds).unwrap_err();
        assert!(matches!(err, InverseError::IncompatibleBonds { .. }));
    }

    #[test]
    fn closure_and_bounds() {
        let is = contraction();
        let all_points = is.poset().points();
        let o: ElemSet = [Elem(0), Elem(2)].into();
        assert!(is.is_closed(&o));
        // Seen only from the lower level, both right-pointing edges coincide.
        let lone: ElemSet = [Elem(0)].into();
        assert_eq!(is.limit().closure_on(&lone, &[0]), o);
        let sup = chain_sup(&is, &o, &all_points).unwrap();
        assert_eq!(sup.elements, vec![Elem(2)]);
        assert!(sup.compatible);
        assert_eq!(min_below_max_above(&is, &o, Elem(0)).unwrap(), (Elem(0), Elem(2)));
    }

    #[test]
    fn surjectivize_drops_unused() {
        // Top level one edge, bottom level two edges; the bond hits one.
        let bond = vec![Elem(0), Elem(1)];
        let is = InverseSystem::chain(vec!["lo".into(), "hi".into()], vec![path(2), path(1)], vec![bond]).unwrap();
        assert!(!is.is_surjective());
        let s = is.surjectivize();
        assert!(s.is_surjective());
        assert_eq!(s.level(0).len(), 2);
        assert_eq!(s.limit().system().len(), 2);
    }
}
