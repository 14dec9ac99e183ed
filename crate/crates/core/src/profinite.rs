//! Transfer between a limit and its projections: triviality, order,
//! nestedness, smallness, regularity and splitting stars.
//!
//! Quantifiers of the form "for all q >= p" run over the whole finite poset.
//! Predicates that only make sense for infinite chains ("finitely trivial")
//! take an explicit list of points, so that a truncated chain can be probed
//! below its top level.

use serde::Serialize;
use thiserror::Error;

use crate::inverse::{InverseSystem, SystemHom};
use crate::orient::{essential_elements, extend_orientation, sigma_minus, split_orientation, splits_at};
use crate::system::{Elem, ElemSet, SepSystem};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("bond is not surjective")]
    NotEpi,
    #[error("inverse system is not surjective")]
    NotSurjective,
    #[error("not nested: {0}")]
    NotNested(String),
    #[error("degenerate element in {0}")]
    Degenerate(String),
    #[error("set does not split the system")]
    DoesNotSplit,
    #[error("not a star")]
    NotAStar,
    #[error("`{0}` is not trivial with the given witness")]
    NotTrivialWithWitness(String),
    #[error("input `{0}` is trivial")]
    TrivialInput(String),
    #[error("splitting star has co-small member `{0}`")]
    CoSmallMember(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    /// The conclusion of a lemma failed on an instance meeting its hypotheses.
    #[error("violation: {0}")]
    Violation(String),
}

fn trivial_with(s: &SepSystem, r: Elem, w: Elem) -> bool {
    !s.same_sep(r, w) && s.lt(r, w) && s.lt(r, s.inv(w))
}

/// Least point `p0` such that for every `q >= p0` the projection of `r` is
/// trivial at `q` with the projection of `w` as witness.
pub fn eventual_trivial_projection(is: &InverseSystem, r: Elem, w: Elem) -> Result<usize, TransferError> {
    let lim = is.limit();
    if !trivial_with(lim.system(), r, w) {
        return Err(TransferError::NotTrivialWithWitness(lim.system().label(r).into()));
    }
    let poset = is.poset();
    let good = |q: usize| trivial_with(is.level(q), lim.project(r, q), lim.project(w, q));
    poset
        .ascending()
        .into_iter()
        .find(|&p| poset.points().into_iter().filter(|&q| poset.leq(p, q)).all(good))
        .ok_or_else(|| TransferError::Violation("projection not trivial at the top".into()))
}

/// A maximal preimage of a nontrivial element under a surjective bond; it is
/// itself nontrivial.
pub fn lift_nontrivial(upper: &SepSystem, lower: &SepSystem, f: &SystemHom, r: Elem) -> Result<Elem, TransferError> {
    if !f.is_epi(lower.len()) {
        return Err(TransferError::NotEpi);
    }
    if lower.is_trivial(r) {
        return Err(TransferError::TrivialInput(lower.label(r).into()));
    }
    let pre: ElemSet = f.preimage(r).into_iter().collect();
    let x = *upper.maximal(&pre).iter().next().expect("surjective bond has a preimage");
    if upper.is_trivial(x) {
        return Err(TransferError::Violation(format!("maximal preimage `{}` is trivial", upper.label(x))));
    }
    Ok(x)
}

/// Lifts `r↾p <= s↾p` to `r <= s` for members of a nested set `tau`, given
/// that the projections are distinct and neither `r↾p` nor `s*↾p` is trivial
/// in the projection of `tau`.
pub fn lift_order(is: &InverseSystem, tau: &ElemSet, r: Elem, s: Elem, p: usize) -> Result<(), TransferError> {
    let lim = is.limit();
    let ls = lim.system();
    let pre = |what: &str| Err(TransferError::PreconditionFailed(what.into()));
    if !ls.is_nested_set(tau) {
        return pre("tau is not nested");
    }
    if !tau.contains(&r) || !tau.contains(&s) {
        return pre("r and s must lie in tau");
    }
    let lvl = is.level(p);
    let (rp, sp) = (lim.project(r, p), lim.project(s, p));
    if lvl.same_sep(rp, sp) {
        return pre("r and s have the same projection");
    }
    let tau_p = lvl.with_inverses(&lim.project_set(tau, p));
    if lvl.trivial_in(rp, &tau_p).is_some() {
        return pre("r is trivial in the projection of tau");
    }
    if lvl.trivial_in(lvl.inv(sp), &tau_p).is_some() {
        return pre("s* is trivial in the projection of tau");
    }
    if !lvl.leq(rp, sp) {
        return pre("r does not lie below s at p");
    }
    if ls.same_sep(r, s) || !ls.leq(r, s) {
        return Err(TransferError::Violation(format!("`{}` <= `{}` fails in the limit", ls.label(r), ls.label(s))));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Implication {
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl Implication {
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

/// All levels nested implies the limit is nested.
pub fn check_nested_lift(is: &InverseSystem) -> Implication {
    Implication {
        hypothesis: is.levels().iter().all(|l| l.is_nested()),
        conclusion: is.limit().system().is_nested(),
    }
}

/// All coordinates small implies the element is small.
pub fn check_small_lift(is: &InverseSystem, r: Elem) -> Implication {
    let lim = is.limit();
    Implication {
        hypothesis: is.poset().points().into_iter().all(|p| is.level(p).is_small(lim.project(r, p))),
        conclusion: lim.system().is_small(r),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RegularVerdict {
    /// Every level at or above `p0` is regular.
    Regular { p0: usize },
    /// A small limit element; all its coordinates are small.
    SmallWitness { element: Elem },
}

pub fn regular_decomposition(is: &InverseSystem) -> RegularVerdict {
    let lim = is.limit();
    let ls = lim.system();
    // Compatible families of small coordinates are exactly the small limit
    // elements, since bonds preserve smallness.
    if let Some(x) = ls.elements().find(|&x| is.poset().points().into_iter().all(|p| is.level(p).is_small(lim.project(x, p)))) {
        return RegularVerdict::SmallWitness { element: x };
    }
    let poset = is.poset();
    let p0 = poset
        .ascending()
        .into_iter()
        .find(|&p| poset.points().into_iter().filter(|&q| poset.leq(p, q)).all(|q| is.level(q).is_regular()))
        .expect("top level equals the regular limit");
    RegularVerdict::Regular { p0 }
}

/// Per-point evidence for a finitary predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteVerdict {
    pub holds: bool,
    /// For each probed point, whether the local condition holds there.
    pub levels: Vec<(usize, bool)>,
    /// The implied property (small, resp. co-small) holds at the limit.
    pub implied: bool,
}

/// `r` is finitely trivial over `points` if for every probed `p` some probed
/// `q >= p` has `r↾q` trivial in the image of the limit at `q`.
pub fn is_finitely_trivial(is: &InverseSystem, r: Elem, points: &[usize]) -> FiniteVerdict {
    let lim = is.limit();
    let local: Vec<(usize, bool)> = points
        .iter()
        .map(|&q| {
            let lvl = is.level(q);
            let img = is.image_at(q);
            (q, lvl.trivial_in(lim.project(r, q), &img).is_some())
        })
        .collect();
    let holds = points.iter().all(|&p| local.iter().any(|&(q, t)| t && is.poset().leq(p, q)));
    FiniteVerdict { holds, levels: local, implied: lim.system().is_small(r) }
}

/// `x` is finitely inconsistent over `points` if at every probed `p` some
/// inconsistent pair `{a, b}` of the limit (distinct separations, `a* <= b`)
/// has `a↾p = x↾p = b↾p`.
pub fn is_finitely_inconsistent(is: &InverseSystem, x: Elem, points: &[usize]) -> FiniteVerdict {
    let local: Vec<(usize, bool)> = points.iter().map(|&p| (p, collapse_pair(is, x, p).is_some())).collect();
    let holds = local.iter().all(|&(_, b)| b);
    FiniteVerdict { holds, levels: local, implied: is.limit().system().is_co_small(x) }
}

/// An inconsistent pair of the limit whose members both project to `x↾p`.
pub fn collapse_pair(is: &InverseSystem, x: Elem, p: usize) -> Option<(Elem, Elem)> {
    let lim = is.limit();
    let ls = lim.system();
    let target = lim.project(x, p);
    let fiber: Vec<Elem> = ls.elements().filter(|&a| lim.project(a, p) == target).collect();
    for &a in &fiber {
        for &b in &fiber {
            if !ls.same_sep(a, b) && ls.leq(ls.inv(a), b) {
                return Some((a, b));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectedStar {
    pub p0: usize,
    /// `(p, sigma_p, o_p)` for every point `p >= p0`.
    pub levels: Vec<(usize, ElemSet, ElemSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Projection {
    Projected(ProjectedStar),
    /// `sigma = {x}` with `x*` finitely trivial over the probed points.
    PathologicalFinitelyTrivial(Elem),
    /// `sigma = {d}` with `d` degenerate.
    PathologicalDegenerate(Elem),
}

/// Projects a splitting star of the limit: `sigma_p = (sigma↾p) ∩ S_p°`
/// splits `S_p`, witnessed by `(O↾p)` minus the inverses of `sigma_p`, for
/// all `p` from some `p0` on. `points` scopes the finitely-trivial guard.
pub fn project_splitting_star(
    is: &InverseSystem,
    sigma: &ElemSet,
    o: &ElemSet,
    points: &[usize],
) -> Result<Projection, TransferError> {
    if !is.is_surjective() {
        return Err(TransferError::NotSurjective);
    }
    if let Some(l) = is.levels().iter().position(|l| !l.is_nested()) {
        return Err(TransferError::NotNested(format!("level `{}`", is.poset().label(l))));
    }
    let lim = is.limit();
    let ls = lim.system();
    if sigma.len() == 1 {
        let x = *sigma.iter().next().unwrap();
        if ls.is_degenerate(x) {
            return Ok(Projection::PathologicalDegenerate(x));
        }
        if is_finitely_trivial(is, ls.inv(x), points).holds {
            return Ok(Projection::PathologicalFinitelyTrivial(x));
        }
    }
    if splits_at(ls, o).as_ref() != Some(sigma) {
        return Err(TransferError::DoesNotSplit);
    }
    let poset = is.poset();
    let mut per_point = Vec::new();
    for p in poset.points() {
        let lvl = is.level(p);
        let core = essential_elements(lvl);
        let sp: ElemSet = lim.project_set(sigma, p).intersection(&core).copied().collect();
        let inv_sp = lvl.inv_set(&sp);
        let op: ElemSet = lim.project_set(o, p).difference(&inv_sp).copied().collect();
        let ok = splits_at(lvl, &op).as_ref() == Some(&sp);
        per_point.push((p, sp, op, ok));
    }
    let p0 = poset
        .ascending()
        .into_iter()
        .find(|&p| per_point.iter().all(|(q, .., ok)| !poset.leq(p, *q) || *ok))
        .ok_or_else(|| TransferError::Violation("projection fails at the top level".into()))?;
    let levels = per_point
        .into_iter()
        .filter(|(q, ..)| poset.leq(p0, *q))
        .map(|(q, sp, op, _)| (q, sp, op))
        .collect();
    Ok(Projection::Projected(ProjectedStar { p0, levels }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SanitizeCase {
    /// `sigma` is antisymmetric and `sigma_circ = sigma ∩ S° = sigma⁻`; the
    /// pruned members are trivial with witnesses in `sigma_circ`.
    Antisymmetric { pruned: ElemSet },
    /// `sigma_circ = {s}` and `sigma⁻ = {s, s*}`.
    InversePair { s: Elem },
}

/// Relates a splitting star `sigma_circ` of a nested system to a star
/// `sigma` containing it.
pub fn sanitize_star(s: &SepSystem, sigma_circ: &ElemSet, sigma: &ElemSet) -> Result<SanitizeCase, TransferError> {
    if !s.is_nested() {
        return Err(TransferError::NotNested("system".into()));
    }
    if !s.is_star(sigma) {
        return Err(TransferError::NotAStar);
    }
    if split_orientation(s, sigma_circ).is_none() {
        return Err(TransferError::DoesNotSplit);
    }
    if !sigma_circ.is_subset(sigma) {
        return Err(TransferError::PreconditionFailed("sigma must contain sigma_circ".into()));
    }
    let minus = sigma_minus(s, sigma);
    if s.is_antisymmetric(sigma) {
        let core = essential_elements(s);
        let meet: ElemSet = sigma.intersection(&core).copied().collect();
        if meet != *sigma_circ || minus != *sigma_circ {
            return Err(TransferError::Violation("sigma ∩ S° and sigma⁻ differ from sigma_circ".into()));
        }
        for &x in sigma {
            if s.is_trivial(x) && s.trivial_in(x, sigma_circ).is_none() {
                return Err(TransferError::Violation(format!("`{}` has no witness in sigma_circ", s.label(x))));
            }
        }
        let pruned = sigma.difference(sigma_circ).copied().collect();
        Ok(SanitizeCase::Antisymmetric { pruned })
    } else {
        let only = (sigma_circ.len() == 1).then(|| *sigma_circ.iter().next().unwrap());
        match only {
            Some(x) if minus == [x, s.inv(x)].into_iter().collect::<ElemSet>() => Ok(SanitizeCase::InversePair { s: x }),
            _ => Err(TransferError::Violation("non-antisymmetric star without the inverse-pair shape".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftedStar {
    pub sigma: ElemSet,
    pub orientation: ElemSet,
    /// The lower star had a co-small member and the fiber construction ran.
    pub co_small_branch: bool,
}

fn check_lift(
    upper: &SepSystem,
    lower: &SepSystem,
    f: &SystemHom,
    sigma_p: &ElemSet,
    lifted: &LiftedStar,
) -> Result<(), TransferError> {
    if splits_at(upper, &lifted.orientation).as_ref() != Some(&lifted.sigma) {
        return Err(TransferError::Violation("lifted orientation does not split at the lifted star".into()));
    }
    let img = f.image(&lifted.sigma);
    let core = essential_elements(lower);
    let meet: ElemSet = img.intersection(&core).copied().collect();
    if meet != *sigma_p || sigma_minus(lower, &img) != *sigma_p {
        return Err(TransferError::Violation(format!(
            "projection of lifted star {:?} does not recover {:?}",
            lower.set_labels(&img),
            lower.set_labels(sigma_p)
        )));
    }
    Ok(())
}

/// Lifts a splitting star along a surjective bond between nested
/// degenerate-free systems, so that projecting back and discarding trivial
/// members recovers `sigma_p`.
pub fn lift_splitting_star(
    upper: &SepSystem,
    lower: &SepSystem,
    f: &SystemHom,
    sigma_p: &ElemSet,
) -> Result<LiftedStar, TransferError> {
    if !f.is_epi(lower.len()) {
        return Err(TransferError::NotEpi);
    }
    for (name, s) in [("upper level", upper), ("lower level", lower)] {
        if !s.is_nested() {
            return Err(TransferError::NotNested(name.into()));
        }
        if s.elements().any(|e| s.is_degenerate(e)) {
            return Err(TransferError::Degenerate(name.into()));
        }
    }
    let o_p = split_orientation(lower, sigma_p).ok_or(TransferError::DoesNotSplit)?;
    let o_q: ElemSet = upper.elements().filter(|&x| o_p.contains(&f.apply(x))).collect();
    let co_small = sigma_p.iter().copied().find(|&x| lower.is_co_small(x));
    let lifted = match co_small {
        None => LiftedStar { sigma: upper.maximal(&o_q), orientation: o_q, co_small_branch: false },
        Some(sp) => {
            let fiber: ElemSet = o_q.iter().copied().filter(|&x| f.apply(x) == sp).collect();
            let core = essential_elements(upper);
            let fiber_core: ElemSet = fiber.intersection(&core).copied().collect();
            let s1 = *upper
                .maximal(&fiber_core)
                .iter()
                .next()
                .ok_or_else(|| TransferError::Violation("fiber has no essential element".into()))?;
            let reduced: ElemSet = o_q.iter().copied().filter(|&x| x == s1 || !fiber.contains(&x)).collect();
            let ext = extend_orientation(upper, &reduced, Some(s1))
                .map_err(|e| TransferError::Violation(format!("extension failed: {e}")))?;
            LiftedStar { sigma: upper.maximal(&ext.orientation), orientation: ext.orientation, co_small_branch: true }
        }
    };
    check_lift(upper, lower, f, sigma_p, &lifted)?;
    Ok(lifted)
}

fn levels_nested_nondegenerate(is: &InverseSystem) -> Result<(), TransferError> {
    for (p, l) in is.levels().iter().enumerate() {
        if !l.is_nested() {
            return Err(TransferError::NotNested(format!("level `{}`", is.poset().label(p))));
        }
        if l.elements().any(|e| l.is_degenerate(e)) {
            return Err(TransferError::Degenerate(format!("level `{}`", is.poset().label(p))));
        }
    }
    Ok(())
}

/// Lifts a splitting star of level `p` without co-small members to the
/// limit: the maximal elements of the preimage of its orientation.
pub fn lift_splitting_star_to_limit(is: &InverseSystem, p: usize, sigma_p: &ElemSet) -> Result<LiftedStar, TransferError> {
    if !is.is_surjective() {
        return Err(TransferError::NotSurjective);
    }
    levels_nested_nondegenerate(is)?;
    let lower = is.level(p);
    let o_p = split_orientation(lower, sigma_p).ok_or(TransferError::DoesNotSplit)?;
    if let Some(&x) = sigma_p.iter().find(|&&x| lower.is_co_small(x)) {
        return Err(TransferError::CoSmallMember(lower.label(x).into()));
    }
    let lim = is.limit();
    let o: ElemSet = lim.system().elements().filter(|&x| o_p.contains(&lim.project(x, p))).collect();
    let lifted = LiftedStar { sigma: lim.system().maximal(&o), orientation: o, co_small_branch: false };
    check_lift(lim.system(), lower, is.bond(is.top(), p), sigma_p, &lifted)?;
    if !is.is_closed(&lifted.orientation) {
        return Err(TransferError::Violation("lifted orientation is not closed".into()));
    }
    Ok(lifted)
}

/// The closure of a splitting star of a nested limit is a star whose
/// nontrivial part is the original star.
pub fn closure_of_splitting_star(is: &InverseSystem, sigma_circ: &ElemSet) -> Result<ElemSet, TransferError> {
    let ls = is.limit().system();
    if !ls.is_nested() {
        return Err(TransferError::NotNested("limit".into()));
    }
    if ls.elements().any(|e| ls.is_degenerate(e)) {
        return Err(TransferError::Degenerate("limit".into()));
    }
    if split_orientation(ls, sigma_circ).is_none() {
        return Err(TransferError::DoesNotSplit);
    }
    let sigma = is.closure(sigma_circ);
    if !ls.is_star(&sigma) || sigma_minus(ls, &sigma) != *sigma_circ {
        return Err(TransferError::Violation("closure is not a star over the splitting star".into()));
    }
    Ok(sigma)
}

/// No member of a finite splitting star of a nested limit is finitely
/// trivial, and a singleton star projects to nontrivial elements.
pub fn check_no_finitely_trivial(is: &InverseSystem, sigma: &ElemSet) -> Result<(), TransferError> {
    let points = is.poset().points();
    let lim = is.limit();
    for &x in sigma {
        if is_finitely_trivial(is, x, &points).holds {
            return Err(TransferError::Violation(format!("`{}` is finitely trivial", lim.system().label(x))));
        }
    }
    if sigma.len() == 1 {
        let x = *sigma.iter().next().unwrap();
        for &p in &points {
            if is.level(p).trivial_in(lim.project(x, p), &is.image_at(p)).is_some() {
                return Err(TransferError::Violation(format!("singleton star trivial at `{}`", is.poset().label(p))));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::InverseSystem;
    use crate::orient::splitting_subsets;
    use crate::system::set_of;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    // r < s, r < s* at the top; at the bottom r and s collapse.
    fn collapse_chain() -> InverseSystem {
        let top = SepSystem::new(labels(&["r", "r*", "s", "s*"]), &[(0, 1), (2, 3)], &[(0, 2), (0, 3)]).unwrap();
        let bottom = SepSystem::new(labels(&["u", "u*"]), &[(0, 1)], &[(0, 1)]).unwrap();
        let bond = vec![Elem(0), Elem(1), Elem(0), Elem(1)];
        InverseSystem::chain(labels(&["1", "2"]), vec![bottom, top], vec![bond]).unwrap()
    }

    #[test]
    fn witness_collapse_delays_p0() {
        let is = collapse_chain();
        assert_eq!(eventual_trivial_projection(&is, Elem(0), Elem(2)), Ok(1));
        assert!(eventual_trivial_projection(&is, Elem(2), Elem(0)).is_err());
    }

    #[test]
    fn maximal_preimage_is_nontrivial() {
        let is = collapse_chain();
        let f = is.bond(1, 0);
        // u is trivial nowhere at the bottom (single separation).
        let x = lift_nontrivial(is.level(1), is.level(0), f, Elem(0)).unwrap();
        assert_eq!(x, Elem(2));
    }

    #[test]
    fn order_lift_preconditions() {
        let is = collapse_chain();
        let all = is.limit().system().all();
        let err = lift_order(&is, &all, Elem(0), Elem(2), 0).unwrap_err();
        assert!(matches!(err, TransferError::PreconditionFailed(_)));
    }

    #[test]
    fn regularity() {
        let is = collapse_chain();
        assert_eq!(regular_decomposition(&is), RegularVerdict::SmallWitness { element: Elem(0) });
        assert!(check_nested_lift(&is).holds());
        assert!(check_small_lift(&is, Elem(0)).holds());
    }

    #[test]
    fn finitely_trivial_at_all_points() {
        let is = collapse_chain();
        let v = is_finitely_trivial(&is, Elem(0), &is.poset().points());
        assert!(v.holds && v.implied);
        assert!(!is_finitely_inconsistent(&is, Elem(1), &is.poset().points()).holds);
    }

    #[test]
    fn sanitize_cases() {
        let s = collapse_chain().level(1).clone();
        // {s*} splits; adding r, which lies below s, keeps a star.
        let circ = set_of(&[3]);
        assert!(split_orientation(&s, &circ).is_some());
        let case = sanitize_star(&s, &circ, &set_of(&[0, 3])).unwrap();
        assert_eq!(case, SanitizeCase::Antisymmetric { pruned: set_of(&[0]) });
        let case = sanitize_star(&s, &set_of(&[2]), &set_of(&[2, 3])).unwrap();
        assert_eq!(case, SanitizeCase::InversePair { s: Elem(2) });
    }

    #[test]
    fn lift_and_project_on_identity() {
        let is = collapse_chain().surjectivize();
        let top = is.level(1);
        for sigma in splitting_subsets(top) {
            let o = split_orientation(top, &sigma).unwrap();
            let proj = project_splitting_star(&is, &sigma, &o, &is.poset().points()).unwrap();
            assert!(matches!(proj, Projection::Projected(_)));
            assert_eq!(closure_of_splitting_star(&is, &sigma).unwrap(), sigma);
        }
    }
}
