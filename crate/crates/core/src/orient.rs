//! Orientations of a finite separation system: consistency, extension,
//! splitting stars and the essential core.

use serde::Serialize;
use thiserror::Error;

use crate::system::{Elem, ElemSet, SepSystem};

/// True if `set` holds exactly one orientation of every separation.
pub fn is_orientation(s: &SepSystem, set: &ElemSet) -> bool {
    s.separations().iter().all(|&r| {
        let a = set.contains(&r);
        let b = set.contains(&s.inv(r));
        if s.is_degenerate(r) {
            a
        } else {
            a != b
        }
    })
}

pub fn is_consistent_orientation(s: &SepSystem, set: &ElemSet) -> bool {
    is_orientation(s, set) && s.is_consistent(set)
}

/// All consistent orientations, by backtracking over separations in index
/// order, trying the lower-indexed orientation first.
pub fn consistent_orientations(s: &SepSystem) -> Vec<ElemSet> {
    let seps = s.separations();
    let mut out = Vec::new();
    let mut chosen: Vec<Elem> = Vec::new();
    walk(s, &seps, &mut chosen, &mut out);
    out
}

fn walk(s: &SepSystem, seps: &[Elem], chosen: &mut Vec<Elem>, out: &mut Vec<ElemSet>) {
    let Some((&r, rest)) = seps.split_first() else {
        out.push(chosen.iter().copied().collect());
        return;
    };
    let options: &[Elem] = if s.is_degenerate(r) { &[r] } else { &[r, s.inv(r)] };
    for &o in options {
        if pair_ok(s, chosen, o) {
            chosen.push(o);
            walk(s, rest, chosen, out);
            chosen.pop();
        }
    }
}

// Adding `o` keeps the chosen set consistent.
fn pair_ok(s: &SepSystem, chosen: &[Elem], o: Elem) -> bool {
    chosen
        .iter()
        .all(|&c| s.same_sep(c, o) || (!s.leq(s.inv(c), o) && !s.leq(s.inv(o), c)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    pub orientation: ElemSet,
    /// Set when the system is nested and a maximal element was requested, in
    /// which case the orientation is the only one with that property.
    pub unique: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ImpossibleReason {
    #[error("member {0} is co-trivial")]
    CoTrivialMember(Elem),
    #[error("requested maximal element {0} is trivial")]
    TrivialKeepMax(Elem),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("no extension exists: {0}")]
    Impossible(ImpossibleReason),
    #[error("input is not a consistent antisymmetric set")]
    InconsistentInput,
    #[error("requested maximal element {0} is not a maximal member of the input")]
    BadKeepMax(Elem),
    #[error("greedy extension got stuck at separation {0}")]
    ConstructionFailed(Elem),
}

/// Extends a consistent partial orientation `p` to a consistent orientation
/// of `s`, optionally keeping `keep_max` maximal.
///
/// An extension exists iff no member of `p` is co-trivial, and `keep_max` can
/// stay maximal iff it is nontrivial. The construction first orients every
/// separation above `keep_max` away from it, then orients the rest greedily.
pub fn extend_orientation(
    s: &SepSystem,
    p: &ElemSet,
    keep_max: Option<Elem>,
) -> Result<Extension, ExtendError> {
    if !s.is_antisymmetric(p) || !s.is_consistent(p) {
        return Err(ExtendError::InconsistentInput);
    }
    if let Some(m) = keep_max {
        if !p.contains(&m) || p.iter().any(|&x| s.lt(m, x)) {
            return Err(ExtendError::BadKeepMax(m));
        }
    }
    if let Some(&x) = p.iter().find(|&&x| s.is_co_trivial(x)) {
        return Err(ExtendError::Impossible(ImpossibleReason::CoTrivialMember(x)));
    }
    let mut chosen: Vec<Elem> = p.iter().copied().collect();
    if let Some(m) = keep_max {
        if s.is_trivial(m) {
            return Err(ExtendError::Impossible(ImpossibleReason::TrivialKeepMax(m)));
        }
        for y in s.up(m) {
            if !s.same_sep(y, m) && !chosen.contains(&s.inv(y)) {
                if !pair_ok(s, &chosen, s.inv(y)) || chosen.contains(&y) {
                    return Err(ExtendError::ConstructionFailed(s.sep(y)));
                }
                chosen.push(s.inv(y));
            }
        }
    }
    for r in s.separations() {
        if chosen.iter().any(|&c| s.same_sep(c, r)) {
            continue;
        }
        let options = if s.is_degenerate(r) { vec![r] } else { vec![r, s.inv(r)] };
        let pick = options
            .into_iter()
            .find(|&o| !s.is_co_trivial(o) && pair_ok(s, &chosen, o))
            .ok_or(ExtendError::ConstructionFailed(r))?;
        chosen.push(pick);
    }
    Ok(Extension {
        orientation: chosen.into_iter().collect(),
        unique: keep_max.is_some() && s.is_nested(),
    })
}

/// The maximal elements of a consistent orientation `o`, provided `o` lies in
/// their down-closure.
pub fn splits_at(s: &SepSystem, o: &ElemSet) -> Option<ElemSet> {
    if !is_consistent_orientation(s, o) {
        return None;
    }
    let sigma = s.maximal(o);
    o.is_subset(&s.down_closure(&sigma)).then_some(sigma)
}

/// The consistent orientation splitting at `sigma`, if there is one. It can
/// only be the down-closure of `sigma` minus the inverses of its members.
pub fn split_orientation(s: &SepSystem, sigma: &ElemSet) -> Option<ElemSet> {
    let inverses: ElemSet = sigma.iter().map(|&x| s.inv(x)).filter(|x| !sigma.contains(x)).collect();
    let o: ElemSet = s.down_closure(sigma).difference(&inverses).copied().collect();
    (splits_at(s, &o).as_ref() == Some(sigma)).then_some(o)
}

pub fn splits(s: &SepSystem, sigma: &ElemSet) -> bool {
    split_orientation(s, sigma).is_some()
}

/// Distinct splitting stars over all consistent orientations, in order of
/// first appearance. The empty system yields the single empty star.
pub fn splitting_subsets(s: &SepSystem) -> Vec<ElemSet> {
    let mut out: Vec<ElemSet> = Vec::new();
    for o in consistent_orientations(s) {
        if let Some(sigma) = splits_at(s, &o) {
            if !out.contains(&sigma) {
                out.push(sigma);
            }
        }
    }
    out
}

/// Elements that are neither degenerate, trivial nor co-trivial.
pub fn essential_elements(s: &SepSystem) -> ElemSet {
    s.elements()
        .filter(|&e| !s.is_degenerate(e) && !s.is_trivial(e) && !s.is_co_trivial(e))
        .collect()
}

/// The essential core as an induced subsystem, with the map back into `s`.
pub fn essential_core(s: &SepSystem) -> (SepSystem, Vec<Elem>) {
    s.induced(&essential_elements(s))
}

/// Members of `sigma` that are not trivial with a witness in `sigma`.
pub fn sigma_minus(s: &SepSystem, sigma: &ElemSet) -> ElemSet {
    sigma.iter().copied().filter(|&x| s.trivial_in(x, sigma).is_none()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::set_of;

    // Star K_{1,3}: leaves 1..3, edges ei pointing into the centre.
    fn claw() -> SepSystem {
        let labels = ["e1>", "e1<", "e2>", "e2<", "e3>", "e3<"].map(String::from).to_vec();
        SepSystem::new(
            labels,
            &[(0, 1), (2, 3), (4, 5)],
            &[(0, 3), (0, 5), (2, 1), (2, 5), (4, 1), (4, 3)],
        )
        .unwrap()
    }

    #[test]
    fn claw_orientations_match_nodes() {
        let s = claw();
        assert_eq!(consistent_orientations(&s).len(), 4);
        let stars = splitting_subsets(&s);
        assert_eq!(stars.len(), 4);
        assert!(stars.contains(&set_of(&[0, 2, 4])));
        assert!(stars.contains(&set_of(&[1])));
    }

    #[test]
    fn empty_system_has_empty_star() {
        let s = SepSystem::empty();
        assert_eq!(splitting_subsets(&s), vec![ElemSet::new()]);
    }

    #[test]
    fn degenerate_system() {
        let s = SepSystem::new(vec!["d".into()], &[(0, 0)], &[]).unwrap();
        assert_eq!(splitting_subsets(&s), vec![set_of(&[0])]);
        assert!(essential_elements(&s).is_empty());
    }

    #[test]
    fn extension_rejects_co_trivial() {
        let labels = ["r", "r*", "s", "s*"].map(String::from).to_vec();
        let s = SepSystem::new(labels, &[(0, 1), (2, 3)], &[(0, 2), (0, 3)]).unwrap();
        let err = extend_orientation(&s, &set_of(&[1]), None).unwrap_err();
        assert_eq!(err, ExtendError::Impossible(ImpossibleReason::CoTrivialMember(Elem(1))));
        let err = extend_orientation(&s, &set_of(&[0]), Some(Elem(0))).unwrap_err();
        assert_eq!(err, ExtendError::Impossible(ImpossibleReason::TrivialKeepMax(Elem(0))));
        let ok = extend_orientation(&s, &set_of(&[2]), Some(Elem(2))).unwrap();
        assert_eq!(ok.orientation, set_of(&[0, 2]));
        assert!(ok.unique);
    }

    #[test]
    fn extension_keeps_max() {
        let s = claw();
        let ext = extend_orientation(&s, &set_of(&[1]), Some(Elem(1))).unwrap();
        assert_eq!(splits_at(&s, &ext.orientation), Some(set_of(&[1])));
    }

    #[test]
    fn minus_drops_trivial() {
        let labels = ["r", "r*", "s", "s*"].map(String::from).to_vec();
        let s = SepSystem::new(labels, &[(0, 1), (2, 3)], &[(0, 2), (0, 3)]).unwrap();
        assert_eq!(sigma_minus(&s, &set_of(&[0, 2])), set_of(&[2]));
        assert_eq!(sigma_minus(&s, &set_of(&[0])), set_of(&[0]));
        let (core, back) = essential_core(&s);
        assert_eq!(core.len(), 2);
        assert_eq!(back, vec![Elem(2), Elem(3)]);
    }

    #[test]
    fn split_orientation_recovers() {
        let s = claw();
        let o = split_orientation(&s, &set_of(&[0, 2, 4])).unwrap();
        assert_eq!(o, set_of(&[0, 2, 4]));
        assert!(split_orientation(&s, &set_of(&[0, 2])).is_none());
    }
}
