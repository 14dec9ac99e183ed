//! Finite separation systems: a poset with an order-reversing involution.
//!
//! The order is stored fully closed as bit rows, so every comparison is a
//! single lookup. Elements are dense indices wrapped in [`Elem`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An oriented separation, identified by its index in the owning system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub usize);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type ElemSet = BTreeSet<Elem>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("element index {0} out of range")]
    UnknownElement(usize),
    #[error("involution error: {0}")]
    InvolutionError(String),
    #[error("order has a cycle: `{0}` <= `{1}` <= `{0}`")]
    CycleError(String, String),
    #[error("order not reversed by the involution: `{0}` <= `{1}` but not `{1}*` <= `{0}*`")]
    OrderReversalError(String, String),
}

/// Flags computed by [`SepSystem::classify`]. Witness lists hold canonical
/// representatives of the witnessing separations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub small: bool,
    pub co_small: bool,
    pub degenerate: bool,
    pub trivial: Option<Vec<Elem>>,
    pub co_trivial: Option<Vec<Elem>>,
}

#[derive(Clone, Debug)]
pub struct SepSystem {
    labels: Vec<String>,
    inv: Vec<Elem>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl SepSystem {
    /// Builds a system from labels, inverse pairs and order generators.
    ///
    /// Every element must occur in exactly one inverse pair; `(a, a)` marks a
    /// degenerate element. The order is the reflexive-transitive closure of the
    /// generators together with their mirror images `y* <= x*`.
    pub fn new(
        labels: Vec<String>,
        inverse: &[(usize, usize)],
        generators: &[(usize, usize)],
    ) -> Result<Self, SystemError> {
        let n = labels.len();
        check_labels(&labels)?;
        let mut inv: Vec<Option<usize>> = vec![None; n];
        for &(a, b) in inverse {
            for x in [a, b] {
                if x >= n {
                    return Err(SystemError::UnknownElement(x));
                }
            }
            for (x, y) in [(a, b), (b, a)] {
                match inv[x] {
                    Some(old) if old != y => {
                        return Err(SystemError::InvolutionError(format!(
                            "`{}` paired with both `{}` and `{}`",
                            labels[x], labels[old], labels[y]
                        )))
                    }
                    _ => inv[x] = Some(y),
                }
            }
        }
        let inv: Vec<usize> = inv
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    SystemError::InvolutionError(format!("`{}` has no inverse", labels[i]))
                })
            })
            .collect::<Result<_, _>>()?;
        let mut rel = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in generators {
            if a >= n || b >= n {
                return Err(SystemError::UnknownElement(a.max(b)));
            }
            rel[a].insert(b);
            rel[inv[b]].insert(inv[a]);
        }
        Self::finish(labels, inv, rel)
    }

    /// Builds a system from a full relation given as a predicate. Unlike
    /// [`SepSystem::new`] the relation is not mirrored, so a relation that the
    /// involution fails to reverse is reported.
    pub fn from_relation(
        labels: Vec<String>,
        inv: Vec<usize>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, SystemError> {
        let n = labels.len();
        check_labels(&labels)?;
        if inv.len() != n {
            return Err(SystemError::InvolutionError("inverse table has wrong length".into()));
        }
        for (i, &j) in inv.iter().enumerate() {
            if j >= n {
                return Err(SystemError::UnknownElement(j));
            }
            if inv[j] != i {
                return Err(SystemError::InvolutionError(format!(
                    "`{}`** is not `{}`",
                    labels[i], labels[i]
                )));
            }
        }
        let mut rel = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in rel.iter_mut().enumerate() {
            for b in 0..n {
                if leq(a, b) {
                    row.insert(b);
                }
            }
        }
        Self::finish(labels, inv, rel)
    }

    /// Builds a system directly from string labels, as in the interchange
    /// format.
    pub fn from_labels(
        elements: &[String],
        inverse: &[(String, String)],
        leq: &[(String, String)],
    ) -> Result<Self, SystemError> {
        let index: HashMap<&str, usize> =
            elements.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let look = |l: &String| {
            index.get(l.as_str()).copied().ok_or_else(|| SystemError::UnknownLabel(l.clone()))
        };
        let inverse: Vec<(usize, usize)> =
            inverse.iter().map(|(a, b)| Ok((look(a)?, look(b)?))).collect::<Result<_, SystemError>>()?;
        let leq: Vec<(usize, usize)> =
            leq.iter().map(|(a, b)| Ok((look(a)?, look(b)?))).collect::<Result<_, SystemError>>()?;
        Self::new(elements.to_vec(), &inverse, &leq)
    }

    fn finish(labels: Vec<String>, inv: Vec<usize>, mut rel: Vec<FixedBitSet>) -> Result<Self, SystemError> {
        let n = labels.len();
        for (i, row) in rel.iter_mut().enumerate() {
            row.insert(i);
        }
        // Warshall on bit rows.
        for k in 0..n {
            let row_k = rel[k].clone();
            for row in rel.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for a in 0..n {
            for b in rel[a].ones() {
                if a != b && rel[b].contains(a) {
                    return Err(SystemError::CycleError(labels[a].clone(), labels[b].clone()));
                }
                if !rel[inv[b]].contains(inv[a]) {
                    return Err(SystemError::OrderReversalError(labels[a].clone(), labels[b].clone()));
                }
            }
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in rel.iter().enumerate() {
            for b in row.ones() {
                down[b].insert(a);
            }
        }
        Ok(SepSystem { labels, inv: inv.into_iter().map(Elem).collect(), up: rel, down })
    }

    pub fn empty() -> Self {
        SepSystem { labels: vec![], inv: vec![], up: vec![], down: vec![] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.len()).map(Elem)
    }

    pub fn all(&self) -> ElemSet {
        self.elements().collect()
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&self, set: &ElemSet) -> Vec<String> {
        set.iter().map(|&e| self.label(e).to_string()).collect()
    }

    pub fn find(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label).map(Elem)
    }

    pub fn inv(&self, e: Elem) -> Elem {
        self.inv[e.0]
    }

    pub fn inv_set(&self, set: &ElemSet) -> ElemSet {
        set.iter().map(|&e| self.inv(e)).collect()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.up[a.0].contains(b.0)
    }

    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    /// Elements `y` with `e <= y`.
    pub fn up(&self, e: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.up[e.0].ones().map(Elem)
    }

    /// Elements `y` with `y <= e`.
    pub fn down(&self, e: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.down[e.0].ones().map(Elem)
    }

    /// Canonical representative of the underlying separation: the orientation
    /// with the smaller index.
    pub fn sep(&self, e: Elem) -> Elem {
        e.min(self.inv(e))
    }

    pub fn same_sep(&self, a: Elem, b: Elem) -> bool {
        self.sep(a) == self.sep(b)
    }

    /// Canonical representatives of all separations, in index order.
    pub fn separations(&self) -> Vec<Elem> {
        self.elements().filter(|&e| self.sep(e) == e).collect()
    }

    pub fn is_small(&self, e: Elem) -> bool {
        self.leq(e, self.inv(e))
    }

    pub fn is_co_small(&self, e: Elem) -> bool {
        self.leq(self.inv(e), e)
    }

    pub fn is_degenerate(&self, e: Elem) -> bool {
        self.inv(e) == e
    }

    /// Separations `s` (canonical representatives) with `e < s` and `e < s*`,
    /// where `s` is not the separation of `e`.
    pub fn trivial_witnesses(&self, e: Elem) -> Vec<Elem> {
        let mut out = Vec::new();
        for y in self.up(e) {
            if self.same_sep(e, y) || self.sep(y) != y {
                continue;
            }
            if self.lt(e, y) && self.lt(e, self.inv(y)) {
                out.push(y);
            }
        }
        out
    }

    pub fn is_trivial(&self, e: Elem) -> bool {
        !self.trivial_witnesses(e).is_empty()
    }

    pub fn is_co_trivial(&self, e: Elem) -> bool {
        self.is_trivial(self.inv(e))
    }

    pub fn classify(&self, e: Elem) -> Classification {
        let t = self.trivial_witnesses(e);
        let c = self.trivial_witnesses(self.inv(e));
        Classification {
            small: self.is_small(e),
            co_small: self.is_co_small(e),
            degenerate: self.is_degenerate(e),
            trivial: (!t.is_empty()).then_some(t),
            co_trivial: (!c.is_empty()).then_some(c),
        }
    }

    /// A member of `sigma` witnessing that `e` is trivial, if any. The witness
    /// is an orientation lying in `sigma`.
    pub fn trivial_in(&self, e: Elem, sigma: &ElemSet) -> Option<Elem> {
        sigma.iter().copied().find(|&y| {
            !self.same_sep(e, y) && self.lt(e, y) && self.lt(e, self.inv(y))
        })
    }

    pub fn nested_pair(&self, a: Elem, b: Elem) -> bool {
        let (ai, bi) = (self.inv(a), self.inv(b));
        self.leq(a, b) || self.leq(a, bi) || self.leq(ai, b) || self.leq(ai, bi)
    }

    /// Two members of `set` whose separations cross, if any.
    pub fn crossing_pair(&self, set: &ElemSet) -> Option<(Elem, Elem)> {
        let v: Vec<Elem> = set.iter().copied().collect();
        for (i, &a) in v.iter().enumerate() {
            for &b in &v[i + 1..] {
                if !self.nested_pair(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_nested_set(&self, set: &ElemSet) -> bool {
        self.crossing_pair(set).is_none()
    }

    pub fn is_nested(&self) -> bool {
        self.is_nested_set(&self.all())
    }

    pub fn is_star(&self, set: &ElemSet) -> bool {
        set.iter().all(|&r| !self.is_degenerate(r))
            && set.iter().all(|&r| set.iter().all(|&s| r == s || self.leq(r, self.inv(s))))
    }

    /// No member has its (distinct) inverse in the set.
    pub fn is_antisymmetric(&self, set: &ElemSet) -> bool {
        set.iter().all(|&x| self.is_degenerate(x) || !set.contains(&self.inv(x)))
    }

    pub fn is_proper_star(&self, set: &ElemSet) -> bool {
        !set.is_empty() && self.is_antisymmetric(set) && self.is_star(set)
    }

    /// Two members `a, b` of `set` with distinct separations and `a* <= b`.
    pub fn inconsistent_pair(&self, set: &ElemSet) -> Option<(Elem, Elem)> {
        for &a in set {
            for &b in set {
                if !self.same_sep(a, b) && self.leq(self.inv(a), b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_consistent(&self, set: &ElemSet) -> bool {
        self.inconsistent_pair(set).is_none()
    }

    pub fn down_closure(&self, set: &ElemSet) -> ElemSet {
        let mut acc = FixedBitSet::with_capacity(self.len());
        for &e in set {
            acc.union_with(&self.down[e.0]);
        }
        acc.ones().map(Elem).collect()
    }

    pub fn maximal(&self, set: &ElemSet) -> ElemSet {
        set.iter().copied().filter(|&x| !set.iter().any(|&y| self.lt(x, y))).collect()
    }

    pub fn minimal(&self, set: &ElemSet) -> ElemSet {
        set.iter().copied().filter(|&x| !set.iter().any(|&y| self.lt(y, x))).collect()
    }

    /// Greatest element of `set`, if it has one.
    pub fn greatest(&self, set: &ElemSet) -> Option<Elem> {
        set.iter().copied().find(|&m| set.iter().all(|&y| self.leq(y, m)))
    }

    pub fn is_chain(&self, set: &ElemSet) -> bool {
        set.iter().all(|&a| set.iter().all(|&b| self.leq(a, b) || self.leq(b, a)))
    }

    /// No element is small.
    pub fn is_regular(&self) -> bool {
        self.elements().all(|e| !self.is_small(e))
    }

    /// Closes `set` under the involution.
    pub fn with_inverses(&self, set: &ElemSet) -> ElemSet {
        set.iter().flat_map(|&e| [e, self.inv(e)]).collect()
    }

    /// The subsystem induced on an inverse-closed set, with the map from new
    /// indices back to old ones.
    pub fn induced(&self, keep: &ElemSet) -> (SepSystem, Vec<Elem>) {
        let back: Vec<Elem> = keep.iter().copied().collect();
        let fwd: HashMap<Elem, usize> = back.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let labels = back.iter().map(|&e| self.label(e).to_string()).collect();
        let inv = back
            .iter()
            .map(|&e| *fwd.get(&self.inv(e)).expect("induced set must be closed under inversion"))
            .collect();
        let sub = SepSystem::from_relation(labels, inv, |a, b| self.leq(back[a], back[b]))
            .expect("induced subsystem of a valid system is valid");
        (sub, back)
    }

    /// Relabels elements, keeping structure.
    pub fn relabel(&self, labels: Vec<String>) -> Result<SepSystem, SystemError> {
        check_labels(&labels)?;
        if labels.len() != self.len() {
            return Err(SystemError::UnknownElement(labels.len()));
        }
        Ok(SepSystem { labels, ..self.clone() })
    }

    /// Covering pairs of the order, which regenerate it under closure.
    pub fn covering_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.up(a) {
                if a != b && !self.up(a).any(|c| c != a && c != b && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn check_labels(labels: &[String]) -> Result<(), SystemError> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(SystemError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Shorthand for building an [`ElemSet`] from indices.
pub fn set_of(ix: &[usize]) -> ElemSet {
    ix.iter().map(|&i| Elem(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abc() -> SepSystem {
        // e1 = a|bc, e2 = ab|c, oriented left to right, with inverses.
        let labels = ["e1>", "e1<", "e2>", "e2<"].map(String::from).to_vec();
        SepSystem::new(labels, &[(0, 1), (2, 3)], &[(0, 2)]).unwrap()
    }

    #[test]
    fn closure_adds_mirror() {
        let s = path_abc();
        assert!(s.leq(Elem(3), Elem(1)));
        assert!(!s.leq(Elem(1), Elem(3)));
        assert_eq!(s.covering_pairs().len(), 2);
    }

    #[test]
    fn cycle_rejected() {
        let labels = ["a", "a*", "b", "b*"].map(String::from).to_vec();
        let err = SepSystem::new(labels, &[(0, 1), (2, 3)], &[(0, 2), (2, 0)]).unwrap_err();
        assert!(matches!(err, SystemError::CycleError(..)));
    }

    #[test]
    fn bad_involution_rejected() {
        let labels = ["a", "b", "c"].map(String::from).to_vec();
        let err = SepSystem::new(labels.clone(), &[(0, 1), (1, 2)], &[]).unwrap_err();
        assert!(matches!(err, SystemError::InvolutionError(_)));
        let err = SepSystem::new(labels, &[(0, 1)], &[]).unwrap_err();
        assert!(matches!(err, SystemError::InvolutionError(_)));
    }

    #[test]
    fn unmirrored_relation_rejected() {
        let labels = ["a", "a*", "b", "b*"].map(String::from).to_vec();
        let err = SepSystem::from_relation(labels, vec![1, 0, 3, 2], |x, y| x == y || (x, y) == (0, 2))
            .unwrap_err();
        assert!(matches!(err, SystemError::OrderReversalError(..)));
    }

    #[test]
    fn trivial_and_nested() {
        // r < s and r < s*: r trivial, r* co-trivial.
        let labels = ["r", "r*", "s", "s*"].map(String::from).to_vec();
        let s = SepSystem::new(labels, &[(0, 1), (2, 3)], &[(0, 2), (0, 3)]).unwrap();
        let c = s.classify(Elem(0));
        assert!(c.small && !c.degenerate);
        assert_eq!(c.trivial, Some(vec![Elem(2)]));
        assert!(s.classify(Elem(1)).co_trivial.is_some());
        assert!(s.is_nested());
        assert_eq!(s.trivial_in(Elem(0), &set_of(&[2])), Some(Elem(2)));
        assert_eq!(s.trivial_in(Elem(0), &set_of(&[0])), None);
    }

    #[test]
    fn stars_and_consistency() {
        let s = path_abc();
        // e1> and e2< both point at b: the star of b.
        assert!(s.is_proper_star(&set_of(&[0, 3])));
        assert!(!s.is_star(&set_of(&[1, 2])));
        assert!(s.is_consistent(&set_of(&[0, 2])));
        assert!(s.inconsistent_pair(&set_of(&[1, 2])).is_some());
        assert!(s.is_antisymmetric(&set_of(&[0, 2])));
        assert!(!s.is_antisymmetric(&set_of(&[0, 1])));
    }

    #[test]
    fn induced_keeps_order() {
        let s = path_abc();
        let (sub, back) = s.induced(&set_of(&[2, 3]));
        assert_eq!(sub.len(), 2);
        assert_eq!(back, vec![Elem(2), Elem(3)]);
        assert_eq!(sub.inv(Elem(0)), Elem(1));
    }
}
