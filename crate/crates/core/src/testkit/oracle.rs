//! Brute-force reference implementations. These deliberately use only the
//! primitive accessors (`len`, `inv`, `leq`, projections) and share no code
//! with the library algorithms they are compared against.

use std::collections::BTreeSet;

use crate::inverse::InverseSystem;
use crate::system::{Elem, ElemSet, SepSystem};

pub const ORACLE_MAX_SEPS: usize = 16;

fn seps_of(s: &SepSystem, within: &ElemSet) -> Vec<(Elem, Elem)> {
    let mut out: Vec<(Elem, Elem)> = Vec::new();
    for &x in within {
        let y = s.inv(x);
        if !out.iter().any(|&(a, b)| a == x || b == x) {
            out.push((x, y));
        }
    }
    out
}

fn naive_consistent(s: &SepSystem, o: &ElemSet) -> bool {
    for &a in o {
        for &b in o {
            let same = b == a || b == s.inv(a);
            if !same && s.leq(s.inv(a), b) {
                return false;
            }
        }
    }
    true
}

/// Every consistent orientation of the subsystem on `within` (which must be
/// closed under inversion), by trying all choices per separation.
pub fn orientations_within(s: &SepSystem, within: &ElemSet) -> Vec<ElemSet> {
    let seps = seps_of(s, within);
    assert!(seps.len() <= ORACLE_MAX_SEPS, "oracle size guard");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << seps.len()) {
        let o: ElemSet = seps
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if mask & (1 << i) == 0 { a } else { b })
            .collect();
        // Degenerate separations appear twice in the mask space.
        let canonical = seps.iter().enumerate().all(|(i, &(a, b))| a != b || mask & (1 << i) == 0);
        if canonical && naive_consistent(s, &o) {
            out.push(o);
        }
    }
    out
}

pub fn consistent_orientations(s: &SepSystem) -> Vec<ElemSet> {
    orientations_within(s, &s.elements().collect())
}

fn naive_max(s: &SepSystem, o: &ElemSet) -> ElemSet {
    o.iter().copied().filter(|&x| o.iter().all(|&y| y == x || !s.leq(x, y))).collect()
}

/// Consistent orientations containing `p`, with `keep_max` maximal if given.
pub fn extensions(s: &SepSystem, p: &ElemSet, keep_max: Option<Elem>) -> Vec<ElemSet> {
    consistent_orientations(s)
        .into_iter()
        .filter(|o| p.is_subset(o))
        .filter(|o| keep_max.is_none_or(|m| naive_max(s, o).contains(&m)))
        .collect()
}

/// Splitting stars of the subsystem on `within`.
pub fn splitting_within(s: &SepSystem, within: &ElemSet) -> BTreeSet<ElemSet> {
    orientations_within(s, within)
        .into_iter()
        .filter_map(|o| {
            let sigma = naive_max(s, &o);
            o.iter().all(|&x| sigma.iter().any(|&m| s.leq(x, m))).then_some(sigma)
        })
        .collect()
}

pub fn splitting_subsets(s: &SepSystem) -> BTreeSet<ElemSet> {
    splitting_within(s, &s.elements().collect())
}

pub fn is_trivial(s: &SepSystem, x: Elem) -> bool {
    s.elements().any(|y| y != x && y != s.inv(x) && s.leq(x, y) && s.leq(x, s.inv(y)) && x != s.inv(y))
}

pub fn is_nested(s: &SepSystem, set: &ElemSet) -> bool {
    set.iter().all(|&a| {
        set.iter().all(|&b| {
            let (ai, bi) = (s.inv(a), s.inv(b));
            s.leq(a, b) || s.leq(a, bi) || s.leq(ai, b) || s.leq(ai, bi)
        })
    })
}

/// Closure in the limit, straight from the coordinates.
pub fn closure(is: &InverseSystem, set: &ElemSet) -> ElemSet {
    let lim = is.limit();
    let n = is.poset().len();
    lim.system()
        .elements()
        .filter(|&x| (0..n).all(|p| set.iter().any(|&y| lim.project(y, p) == lim.project(x, p))))
        .collect()
}

/// All inverse-closed nested closed subsets of the limit whose splitting
/// stars all lie in `family`.
pub fn nested_sets_over(is: &InverseSystem, family: &[ElemSet]) -> Vec<ElemSet> {
    let s = is.limit().system();
    let seps = seps_of(s, &s.elements().collect());
    assert!(seps.len() <= ORACLE_MAX_SEPS, "oracle size guard");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << seps.len()) {
        let tau: ElemSet = seps
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, &(a, b))| [a, b])
            .collect();
        if !is_nested(s, &tau) || closure(is, &tau) != tau {
            continue;
        }
        if splitting_within(s, &tau).iter().all(|sigma| family.contains(sigma)) {
            out.push(tau);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::random::{node_stars, random_tree_set, Planting};

    #[test]
    fn oracle_tree_bijection() {
        for seed in 0..20 {
            let t = random_tree_set(seed, 4, Planting::default());
            assert_eq!(consistent_orientations(&t.system).len(), 5);
            let stars: BTreeSet<ElemSet> = node_stars(&t.tree).into_iter().collect();
            assert_eq!(splitting_subsets(&t.system), stars);
        }
    }

    #[test]
    fn oracle_sees_planted_trivial() {
        let t = random_tree_set(7, 3, Planting { trivial: 1, co_small: 0 });
        let r = t.planted_trivial[0];
        assert!(is_trivial(&t.system, r));
        assert!(!is_trivial(&t.system, t.system.inv(r)));
    }
}
