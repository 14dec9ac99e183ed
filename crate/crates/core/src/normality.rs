//! Which splitting consistent orientations are closed: the greatest-element
//! dichotomy, depth-bounded normality evidence for schematic chains, and an
//! isomorphism search for separation systems.
//!
//! A schematic chain describes an infinite inverse sequence level by level.
//! Its truncation at depth `n` is a finite chain whose top level stands in
//! for the limit; infinite phenomena are probed on the points below the top.

use serde::Serialize;
use thiserror::Error;

use crate::inverse::{InverseError, InverseSystem};
use crate::orient::{consistent_orientations, extend_orientation, is_consistent_orientation, splits_at};
use crate::system::{Elem, ElemSet, SepSystem};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalityError {
    #[error("no registered chain named `{0}`")]
    UnregisteredChain(String),
    #[error("depth must be at least 1")]
    BadDepth,
    #[error("building level {p}: {msg}")]
    Builder { p: usize, msg: String },
    #[error(transparent)]
    Inverse(#[from] InverseError),
    #[error("orientation has no greatest element")]
    NoGreatest,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("violation: {0}")]
    Violation(String),
}

/// An infinite chain of separation systems given by rules. Levels are
/// indexed from `first_index()` upwards.
pub trait SchematicChain {
    fn name(&self) -> &str;
    fn first_index(&self) -> usize {
        1
    }
    fn level(&self, p: usize) -> Result<SepSystem, String>;
    /// Element table of the bond from level `p + 1` to level `p`.
    fn bond(&self, p: usize) -> Result<Vec<Elem>, String>;
}

/// The first `depth` levels of a schematic chain. Point `i` of the system is
/// level `first_index + i`.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub name: String,
    pub first_index: usize,
    pub system: InverseSystem,
}

impl Truncation {
    pub fn point(&self, index: usize) -> usize {
        index - self.first_index
    }

    pub fn index(&self, point: usize) -> usize {
        point + self.first_index
    }

    pub fn top_index(&self) -> usize {
        self.index(self.system.top())
    }

    pub fn limit(&self) -> &SepSystem {
        self.system.limit().system()
    }

    pub fn probe_points(&self) -> Vec<usize> {
        self.system.probe_points()
    }

    /// Element of the top level by label.
    pub fn elem(&self, label: &str) -> Elem {
        self.limit().find(label).unwrap_or_else(|| panic!("no element `{label}` at the top"))
    }
}

pub fn truncate(chain: &dyn SchematicChain, depth: usize) -> Result<Truncation, NormalityError> {
    if depth == 0 {
        return Err(NormalityError::BadDepth);
    }
    let first = chain.first_index();
    let mut levels = Vec::with_capacity(depth);
    let mut bonds = Vec::with_capacity(depth - 1);
    for p in first..first + depth {
        levels.push(chain.level(p).map_err(|msg| NormalityError::Builder { p, msg })?);
        if p > first {
            bonds.push(chain.bond(p - 1).map_err(|msg| NormalityError::Builder { p: p - 1, msg })?);
        }
    }
    let labels = (first..first + depth).map(|p| p.to_string()).collect();
    let system = InverseSystem::chain(labels, levels, bonds)?;
    Ok(Truncation { name: chain.name().to_string(), first_index: first, system })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GreatestVerdict {
    Closed,
    /// The greatest element is co-small and not co-trivial, and its inverse
    /// lies in the closure: `witnesses` pairs each point with an element of
    /// the orientation that agrees with the inverse there.
    CoSmallGreatest { greatest: Elem, inverse: Elem, witnesses: Vec<(usize, Elem)> },
}

fn require_consistent(ls: &SepSystem, o: &ElemSet) -> Result<(), NormalityError> {
    if is_consistent_orientation(ls, o) {
        Ok(())
    } else {
        Err(NormalityError::PreconditionFailed("not a consistent orientation of the limit".into()))
    }
}

/// For a consistent orientation with a greatest element: closed over
/// `points`, or the greatest element is co-small, not co-trivial, and has its
/// inverse in the closure. Anything else is a violation.
pub fn check_greatest(is: &InverseSystem, o: &ElemSet, points: &[usize]) -> Result<GreatestVerdict, NormalityError> {
    greatest_given(is, o, points, is.limit().closure_on(o, points))
}

fn greatest_given(
    is: &InverseSystem,
    o: &ElemSet,
    points: &[usize],
    closure: ElemSet,
) -> Result<GreatestVerdict, NormalityError> {
    let lim = is.limit();
    let ls = lim.system();
    require_consistent(ls, o)?;
    let m = ls.greatest(o).ok_or(NormalityError::NoGreatest)?;
    let extra: Vec<Elem> = closure.difference(o).copied().collect();
    if extra.is_empty() {
        return Ok(GreatestVerdict::Closed);
    }
    let mi = ls.inv(m);
    if !ls.is_co_small(m) || ls.is_co_trivial(m) || !closure.contains(&mi) {
        let extra: Vec<&str> = extra.iter().map(|&x| ls.label(x)).collect();
        return Err(NormalityError::Violation(format!(
            "not closed (closure adds {extra:?}) but greatest `{}` is not a co-small non-co-trivial element with inverse in the closure",
            ls.label(m)
        )));
    }
    let witnesses = points
        .iter()
        .map(|&p| {
            let target = lim.project(mi, p);
            let w = o.iter().copied().find(|&r| lim.project(r, p) == target).expect("inverse lies in the closure");
            (p, w)
        })
        .collect();
    Ok(GreatestVerdict::CoSmallGreatest { greatest: m, inverse: mi, witnesses })
}

/// A consistent orientation splitting at a star of at least two elements is
/// closed over `points`. A failure is reported with an element of the
/// closure outside the orientation.
pub fn check_bounded_split_closed(is: &InverseSystem, o: &ElemSet, points: &[usize]) -> Result<(), NormalityError> {
    let lim = is.limit();
    let ls = lim.system();
    require_consistent(ls, o)?;
    let sigma = splits_at(ls, o).ok_or_else(|| NormalityError::PreconditionFailed("orientation does not split".into()))?;
    if sigma.len() < 2 {
        return Err(NormalityError::PreconditionFailed("splitting star has fewer than two elements".into()));
    }
    let closure = lim.closure_on(o, points);
    if let Some(&x) = closure.difference(o).next() {
        return Err(NormalityError::Violation(format!("`{}` lies in the closure", ls.label(x))));
    }
    Ok(())
}

/// Classifies a splitting consistent orientation by its splitting star.
pub fn dichotomy(is: &InverseSystem, o: &ElemSet, points: &[usize]) -> Result<GreatestVerdict, NormalityError> {
    let ls = is.limit().system();
    require_consistent(ls, o)?;
    let sigma = splits_at(ls, o).ok_or_else(|| NormalityError::PreconditionFailed("orientation does not split".into()))?;
    match sigma.len() {
        0 => Ok(GreatestVerdict::Closed),
        1 => check_greatest(is, o, points),
        _ => check_bounded_split_closed(is, o, points).map(|_| GreatestVerdict::Closed),
    }
}

/// Closure of `o` over the `probes` of a truncated chain whose labels
/// persist (see [`labels_persist`]). At probe `p`, both the candidate and its
/// witness must already carry their own labels one level up: an element
/// first named at the top stands in for elements further along the chain,
/// and agreement below the top says nothing about it.
pub fn persistent_closure(is: &InverseSystem, o: &ElemSet, probes: &[usize]) -> ElemSet {
    let lim = is.limit();
    let ls = lim.system();
    let covers = is.poset().covering_pairs();
    let named_above = |y: Elem, p: usize| {
        covers.iter().any(|&(q, lo)| lo == p && is.level(q).label(lim.project(y, q)) == ls.label(y))
    };
    ls.elements()
        .filter(|&z| {
            probes.iter().all(|&p| {
                named_above(z, p)
                    && o.iter().any(|&y| lim.project(y, p) == lim.project(z, p) && named_above(y, p))
            })
        })
        .chain(o.iter().copied())
        .collect()
}

/// Every element of a lower level has a preimage of the same name one level
/// up. Without this, [`persistent_closure`] cannot tell artifacts apart.
pub fn labels_persist(is: &InverseSystem) -> bool {
    is.poset().covering_pairs().into_iter().all(|(q, p)| {
        let (up, low) = (is.level(q), is.level(p));
        let f = is.bond(q, p);
        low.elements().all(|x| up.elements().any(|y| f.apply(y) == x && up.label(y) == low.label(x)))
    })
}

/// [`dichotomy`] for a truncated chain, using [`persistent_closure`].
pub fn truncated_dichotomy(is: &InverseSystem, o: &ElemSet, probes: &[usize]) -> Result<GreatestVerdict, NormalityError> {
    let ls = is.limit().system();
    require_consistent(ls, o)?;
    let sigma = splits_at(ls, o).ok_or_else(|| NormalityError::PreconditionFailed("orientation does not split".into()))?;
    let closure = persistent_closure(is, o, probes);
    if sigma.len() == 1 {
        return greatest_given(is, o, probes, closure);
    }
    match closure.difference(o).next() {
        Some(&x) => Err(NormalityError::Violation(format!("`{}` lies in the closure", ls.label(x)))),
        None => Ok(GreatestVerdict::Closed),
    }
}

/// Outcome of a depth-bounded check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DepthVerdict {
    Verified { depth: usize },
    RefutedAt { index: usize },
}

impl DepthVerdict {
    pub fn verified(&self) -> bool {
        matches!(self, DepthVerdict::Verified { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarGrowth {
    /// Largest antisymmetric star per level, bottom first.
    pub sizes: Vec<usize>,
    /// Sizes strictly increase over the last three levels.
    pub growing: bool,
}

/// Construction of a splitting orientation that is not closed: a small
/// `s0` of a star `sigma` whose projections are hit by at least two members
/// of `sigma` at every probed point, and the consistent orientation with
/// greatest element `s0*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbnormalWitness {
    pub star: ElemSet,
    pub s0: Elem,
    pub orientation: ElemSet,
    /// Per probed point, two members of `sigma - {s0}` projecting like `s0`
    /// (the second equal to the first if only one exists besides `s0`).
    pub hits: Vec<(usize, Elem, Elem)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NormalityVerdict {
    Abnormal,
    NormalEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub chain: String,
    pub depth: usize,
    /// Every small element is trivial at every level.
    pub small_trivial: DepthVerdict,
    /// Only reported when every level is a tree set.
    pub star_growth: Option<StarGrowth>,
    pub witness: Option<AbnormalWitness>,
    /// Splitting consistent orientations of the top that are not closed on
    /// the probe points, counting only stars of elements that some probe
    /// point already tells apart from all others. Elements that first
    /// separate at the top look alike on the probes and would be counted
    /// spuriously.
    pub unclosed_splitting: usize,
    pub verdict: NormalityVerdict,
}

fn is_tree_set(s: &SepSystem) -> bool {
    s.is_nested() && s.elements().all(|e| !s.is_trivial(e))
}

/// Size of a largest antisymmetric star of nondegenerate elements.
pub fn largest_star(s: &SepSystem) -> ElemSet {
    let cands: Vec<Elem> = s.elements().filter(|&e| !s.is_degenerate(e)).collect();
    let mut best = ElemSet::new();
    let mut cur = Vec::new();
    grow(s, &cands, &mut cur, &mut best);
    best
}

fn grow(s: &SepSystem, cands: &[Elem], cur: &mut Vec<Elem>, best: &mut ElemSet) {
    if cur.len() > best.len() {
        *best = cur.iter().copied().collect();
    }
    for (i, &x) in cands.iter().enumerate() {
        if cur.len() + cands.len() - i <= best.len() {
            return;
        }
        if cur.iter().all(|&y| y != s.inv(x) && s.leq(x, s.inv(y))) {
            cur.push(x);
            grow(s, &cands[i + 1..], cur, best);
            cur.pop();
        }
    }
}

/// Some probe point separates `x` from every other element of the limit.
fn is_mature(is: &InverseSystem, x: Elem, probes: &[usize]) -> bool {
    let lim = is.limit();
    probes.iter().any(|&p| lim.system().elements().all(|y| y == x || lim.project(y, p) != lim.project(x, p)))
}

/// Tries the construction of [`AbnormalWitness`] on `star`.
pub fn abnormal_witness(t: &Truncation, star: &ElemSet) -> Option<AbnormalWitness> {
    let is = &t.system;
    let lim = is.limit();
    let ls = lim.system();
    let probes = t.probe_points();
    if probes.is_empty() {
        return None;
    }
    for &s0 in star {
        if !ls.is_small(s0) {
            continue;
        }
        let mut hits = Vec::new();
        for &p in &probes {
            let target = lim.project(s0, p);
            let others: Vec<Elem> = star.iter().copied().filter(|&r| r != s0 && lim.project(r, p) == target).collect();
            match others.as_slice() {
                [] => break,
                [a] => hits.push((p, *a, *a)),
                [a, b, ..] => hits.push((p, *a, *b)),
            }
        }
        if hits.len() < probes.len() {
            continue;
        }
        let top = ls.inv(s0);
        let Ok(ext) = extend_orientation(ls, &[top].into(), Some(top)) else {
            continue;
        };
        let o = ext.orientation;
        let splits_single = splits_at(ls, &o).is_some_and(|sig| sig == [top].into());
        if splits_single && lim.closure_on(&o, &probes).contains(&s0) {
            return Some(AbnormalWitness { star: star.clone(), s0, orientation: o, hits });
        }
    }
    None
}

pub fn normality_certificate(name: &str, depth: usize) -> Result<NormalityReport, NormalityError> {
    let chain = crate::gallery::chain(name).ok_or_else(|| NormalityError::UnregisteredChain(name.into()))?;
    let t = truncate(chain.as_ref(), depth)?;
    Ok(certify(&t))
}

/// Normality evidence for a truncation.
pub fn certify(t: &Truncation) -> NormalityReport {
    let is = &t.system;
    let asc = is.poset().ascending();
    let small_trivial = asc
        .iter()
        .find(|&&p| {
            let l = is.level(p);
            l.elements().any(|e| l.is_small(e) && !l.is_trivial(e))
        })
        .map_or(DepthVerdict::Verified { depth: asc.len() }, |&p| DepthVerdict::RefutedAt { index: t.index(p) });
    let star_growth = asc.iter().all(|&p| is_tree_set(is.level(p))).then(|| {
        let sizes: Vec<usize> = asc.iter().map(|&p| largest_star(is.level(p)).len()).collect();
        let growing = sizes.len() >= 3 && sizes[sizes.len() - 3..].windows(2).all(|w| w[0] < w[1]);
        StarGrowth { sizes, growing }
    });
    let ls = t.limit();
    let witness = if small_trivial.verified() { None } else { abnormal_witness(t, &largest_star(ls)) };
    let probes = t.probe_points();
    let unclosed_splitting = consistent_orientations(ls)
        .into_iter()
        .filter(|o| {
            splits_at(ls, o).is_some_and(|sigma| sigma.iter().all(|&x| is_mature(is, x, &probes)))
                && !is.limit().is_closed_on(o, &probes)
        })
        .count();
    let verdict = if witness.is_some() {
        NormalityVerdict::Abnormal
    } else if small_trivial.verified()
        || star_growth.as_ref().is_some_and(|g| !g.growing)
        || unclosed_splitting == 0
    {
        NormalityVerdict::NormalEvidence
    } else {
        NormalityVerdict::Inconclusive
    };
    NormalityReport {
        chain: t.name.clone(),
        depth: asc.len(),
        small_trivial,
        star_growth,
        witness,
        unclosed_splitting,
        verdict,
    }
}

/// An isomorphism `a -> b` commuting with the involutions, if any.
pub fn isomorphism_check(a: &SepSystem, b: &SepSystem) -> Option<Vec<Elem>> {
    if a.len() != b.len() {
        return None;
    }
    let sig = |s: &SepSystem, e: Elem| {
        (s.up(e).count(), s.down(e).count(), s.is_degenerate(e), s.is_small(e), s.is_trivial(e), s.up(s.inv(e)).count())
    };
    let sa: Vec<_> = a.elements().map(|e| sig(a, e)).collect();
    let sb: Vec<_> = b.elements().map(|e| sig(b, e)).collect();
    let mut ms = sa.clone();
    let mut mb = sb.clone();
    ms.sort_unstable();
    mb.sort_unstable();
    if ms != mb {
        return None;
    }
    let mut map: Vec<Option<Elem>> = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    let order: Vec<Elem> = a.elements().collect();
    iso_step(a, b, &sa, &sb, &order, &mut map, &mut used).then(|| map.into_iter().map(|m| m.unwrap()).collect())
}

fn iso_step(
    a: &SepSystem,
    b: &SepSystem,
    sa: &[(usize, usize, bool, bool, bool, usize)],
    sb: &[(usize, usize, bool, bool, bool, usize)],
    order: &[Elem],
    map: &mut Vec<Option<Elem>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some((&x, rest)) = order.split_first() else {
        return true;
    };
    if map[x.0].is_some() {
        return iso_step(a, b, sa, sb, rest, map, used);
    }
    let xi = a.inv(x);
    for y in b.elements() {
        let yi = b.inv(y);
        if used[y.0] || sa[x.0] != sb[y.0] || (xi == x) != (yi == y) || (yi != y && used[yi.0]) {
            continue;
        }
        let fits = |u: Elem, v: Elem, map: &Vec<Option<Elem>>| {
            a.elements().all(|z| match map[z.0] {
                Some(w) => a.leq(u, z) == b.leq(v, w) && a.leq(z, u) == b.leq(w, v),
                None => true,
            })
        };
        if !fits(x, y, map) {
            continue;
        }
        map[x.0] = Some(y);
        used[y.0] = true;
        let ok_inv = xi == x || fits(xi, yi, map);
        if ok_inv {
            map[xi.0] = Some(yi);
            used[yi.0] = true;
            if iso_step(a, b, sa, sb, rest, map, used) {
                return true;
            }
            map[xi.0] = None;
            used[yi.0] = false;
        }
        map[x.0] = None;
        used[y.0] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::random_tree_set;
    use crate::testkit::Planting;

    fn single(s: SepSystem) -> InverseSystem {
        InverseSystem::chain(vec!["0".into()], vec![s], vec![]).unwrap()
    }

    #[test]
    fn leaf_orientation_of_tree_closed() {
        let t = random_tree_set(4, 3, Planting::default());
        let is = single(t.system.clone());
        let pts = is.poset().points();
        for o in consistent_orientations(&t.system) {
            assert!(dichotomy(&is, &o, &pts).unwrap() == GreatestVerdict::Closed);
        }
    }

    #[test]
    fn singleton_star_rejected_by_bounded_check() {
        let t = random_tree_set(1, 1, Planting::default());
        let is = single(t.system.clone());
        let o: ElemSet = [Elem(0)].into();
        assert!(matches!(
            check_bounded_split_closed(&is, &o, &[0]),
            Err(NormalityError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn isomorphism_identity_and_path_vs_star() {
        let a = random_tree_set(2, 3, Planting::default()).system;
        let map = isomorphism_check(&a, &a).unwrap();
        assert_eq!(map.len(), a.len());
        // Find a path and a claw on four nodes among small seeds.
        let shapes: Vec<_> = (0..40)
            .map(|seed| random_tree_set(seed, 3, Planting::default()))
            .map(|t| (t.tree.edges.iter().flat_map(|&(u, v)| [u, v]).fold([0usize; 4], |mut d, x| {
                d[x] += 1;
                d
            }).into_iter().max().unwrap(), t.system))
            .collect();
        let path = shapes.iter().find(|(d, _)| *d == 2).unwrap();
        let claw = shapes.iter().find(|(d, _)| *d == 3).unwrap();
        assert!(isomorphism_check(&path.1, &claw.1).is_none());
    }

    #[test]
    fn largest_star_of_claw() {
        let claw = (0..40).map(|s| random_tree_set(s, 3, Planting::default())).find(|t| {
            (0..4).any(|v| t.tree.edges.iter().filter(|&&(a, b)| a == v || b == v).count() == 3)
        });
        assert_eq!(largest_star(&claw.unwrap().system).len(), 3);
    }
}
