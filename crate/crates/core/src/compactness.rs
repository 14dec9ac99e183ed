//! Star families over a limit, the augmented families `F_p`, and the
//! construction of a closed nested subset of the limit all of whose splitting
//! stars lie in a given family.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::inverse::{InverseSystem, SystemHom};
use crate::orient::{essential_elements, sigma_minus, splits, splitting_subsets};
use crate::profinite::{collapse_pair, is_finitely_inconsistent, is_finitely_trivial};
use crate::system::{Elem, ElemSet, SepSystem};

/// Largest level handled by power-set operations.
pub const POWER_LEVEL_LIMIT: usize = 16;
/// Largest limit whose stars are enumerated exhaustively.
pub const STAR_UNIVERSE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompactnessError {
    #[error("family member {0} is not a star")]
    NotAStar(usize),
    #[error("level `{point}` has {size} elements, above the limit of {POWER_LEVEL_LIMIT}")]
    LevelTooLarge { point: String, size: usize },
    #[error("limit has {0} elements, too many to enumerate its stars")]
    UniverseTooLarge(usize),
    #[error("degenerate element in {0}")]
    Degenerate(String),
    #[error("family is not essentially closed: {0}")]
    NotEssentiallyClosed(EssentialFailure),
    #[error("no candidate at level `{level}` is essentially over the family")]
    Impossible { level: String },
    #[error("no compatible family of candidates exists")]
    NoCompatibleFamily,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("violation: {0}")]
    Violation(String),
}

/// A finite list of stars of a limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarFamily {
    stars: Vec<ElemSet>,
}

impl StarFamily {
    pub fn new(limit: &SepSystem, stars: Vec<ElemSet>) -> Result<Self, CompactnessError> {
        if let Some(i) = stars.iter().position(|s| !limit.is_star(s)) {
            return Err(CompactnessError::NotAStar(i));
        }
        let mut uniq: Vec<ElemSet> = Vec::new();
        for s in stars {
            if !uniq.contains(&s) {
                uniq.push(s);
            }
        }
        Ok(StarFamily { stars: uniq })
    }

    pub fn stars(&self) -> &[ElemSet] {
        &self.stars
    }

    pub fn contains(&self, s: &ElemSet) -> bool {
        self.stars.contains(s)
    }

    pub fn project(&self, is: &InverseSystem, p: usize) -> Vec<ElemSet> {
        let mut out: Vec<ElemSet> = Vec::new();
        for s in &self.stars {
            let img = is.limit().project_set(s, p);
            if !out.contains(&img) {
                out.push(img);
            }
        }
        out
    }
}

/// Power sets of the levels with image maps as bonds. Subsets are bitmasks.
pub struct PowerSystem<'a> {
    is: &'a InverseSystem,
}

pub fn power_system(is: &InverseSystem) -> Result<PowerSystem<'_>, CompactnessError> {
    for p in is.poset().points() {
        let size = is.level(p).len();
        if size > POWER_LEVEL_LIMIT {
            return Err(CompactnessError::LevelTooLarge { point: is.poset().label(p).into(), size });
        }
    }
    Ok(PowerSystem { is })
}

impl PowerSystem<'_> {
    pub fn level_size(&self, p: usize) -> usize {
        1 << self.is.level(p).len()
    }

    /// Image of subset `mask` of level `q` at level `p <= q`.
    pub fn image(&self, q: usize, p: usize, mask: u32) -> u32 {
        let f = self.is.bond(q, p);
        (0..self.is.level(q).len()).filter(|i| mask & (1 << i) != 0).fold(0, |acc, i| acc | 1 << f.apply(Elem(i)).0)
    }

    pub fn is_compatible(&self, family: &[u32]) -> bool {
        let poset = self.is.poset();
        poset.points().into_iter().all(|q| {
            poset.points().into_iter().all(|p| !poset.leq(p, q) || self.image(q, p, family[q]) == family[p])
        })
    }

    /// Checks that `sigma ↦ (sigma↾p)_p` is a bijection from subsets of the
    /// limit onto compatible families. A compatible family is fixed by its top
    /// coordinate, so it suffices that each image is compatible and returns
    /// `sigma` at the top.
    pub fn verify_bijection(&self) -> bool {
        let top = self.is.top();
        let n = self.is.limit().system().len();
        let points = self.is.poset().points();
        (0u32..(1 << n)).all(|sigma| {
            let family: Vec<u32> = points.iter().map(|&p| self.image(top, p, sigma)).collect();
            self.is_compatible(&family) && family[top] == sigma
        })
    }
}

/// Stars of `s` containing `r` whose members other than `r` are all trivial
/// in the star, so that removing trivial members leaves `{r}`.
fn stars_with_minus(s: &SepSystem, r: Elem) -> Vec<ElemSet> {
    if s.is_degenerate(r) {
        return vec![];
    }
    let cands: Vec<Elem> =
        s.elements().filter(|&x| x != r && !s.is_degenerate(x) && s.leq(x, s.inv(r))).collect();
    let mut out = Vec::new();
    let mut cur: ElemSet = [r].into();
    grow_stars(s, &cands, &mut cur, &mut |set| {
        if sigma_minus(s, set) == [r].into() {
            out.push(set.clone());
        }
    });
    out
}

fn grow_stars(s: &SepSystem, cands: &[Elem], cur: &mut ElemSet, visit: &mut dyn FnMut(&ElemSet)) {
    visit(cur);
    for (i, &x) in cands.iter().enumerate() {
        if cur.iter().all(|&y| s.leq(x, s.inv(y))) {
            cur.insert(x);
            grow_stars(s, &cands[i + 1..], cur, visit);
            cur.remove(&x);
        }
    }
}

/// Every star of `s`, the empty star included.
pub fn all_stars(s: &SepSystem) -> Vec<ElemSet> {
    let cands: Vec<Elem> = s.elements().filter(|&x| !s.is_degenerate(x)).collect();
    let mut out = Vec::new();
    grow_stars(s, &cands, &mut ElemSet::new(), &mut |set| out.push(set.clone()));
    out
}

/// The stars `sigma` of level `p` with `sigma⁻ = {r}`, for every `r` onto
/// which an inconsistent pair of the limit collapses.
pub fn compute_lp(is: &InverseSystem, p: usize) -> Vec<ElemSet> {
    let lim = is.limit();
    let mut cores: ElemSet = ElemSet::new();
    for x in lim.system().elements() {
        if collapse_pair(is, x, p).is_some() {
            cores.insert(lim.project(x, p));
        }
    }
    let lvl = is.level(p);
    let mut out: Vec<ElemSet> = Vec::new();
    for r in cores {
        for s in stars_with_minus(lvl, r) {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

/// `F_p`: the projection of the family together with `L_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentedFamily {
    pub point: usize,
    pub base: Vec<ElemSet>,
    pub lp: Vec<ElemSet>,
}

impl AugmentedFamily {
    pub fn new(is: &InverseSystem, family: &StarFamily, p: usize) -> Self {
        AugmentedFamily { point: p, base: family.project(is, p), lp: compute_lp(is, p) }
    }

    pub fn members(&self) -> impl Iterator<Item = &ElemSet> {
        self.base.iter().chain(self.lp.iter())
    }
}

/// Splitting stars of the subsystem on `tau` and its inverses, in the
/// indices of `s`.
pub fn splitting_stars_of(s: &SepSystem, tau: &ElemSet) -> Vec<ElemSet> {
    let (sub, back) = s.induced(&s.with_inverses(tau));
    splitting_subsets(&sub).into_iter().map(|st| st.iter().map(|e| back[e.0]).collect()).collect()
}

/// Every splitting star of `tau` is `sigma⁻` for some `sigma` in the family,
/// or is `{x}` with `sigma⁻ = {x, x*}`. Returns the first failing star.
pub fn essentially_over<'a>(
    s: &SepSystem,
    tau: &ElemSet,
    family: impl IntoIterator<Item = &'a ElemSet>,
) -> Result<(), ElemSet> {
    let minus: Vec<ElemSet> = family.into_iter().map(|st| sigma_minus(s, st)).collect();
    for star in splitting_stars_of(s, tau) {
        let ok = minus.iter().any(|m| {
            *m == star || (star.len() == 1 && {
                let x = *star.iter().next().unwrap();
                *m == [x, s.inv(x)].into()
            })
        });
        if !ok {
            return Err(star);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EssentialFailure {
    pub condition: u8,
    pub star: ElemSet,
}

impl std::fmt::Display for EssentialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "condition ({}) fails for star {:?}", self.condition, self.star.iter().map(|e| e.0).collect::<Vec<_>>())
    }
}

fn minus_at(is: &InverseSystem, sigma: &ElemSet, p: usize) -> ElemSet {
    sigma_minus(is.level(p), &is.limit().project_set(sigma, p))
}

/// The three closure conditions on a star family, quantified over `points`.
/// Condition (1) ranges over stars of the limit only.
pub fn essentially_closed(
    is: &InverseSystem,
    family: &StarFamily,
    points: &[usize],
) -> Result<Result<(), EssentialFailure>, CompactnessError> {
    let lim = is.limit();
    let ls = lim.system();
    if ls.len() > STAR_UNIVERSE_LIMIT {
        return Err(CompactnessError::UniverseTooLarge(ls.len()));
    }
    for sigma in all_stars(ls) {
        if family.contains(&sigma) {
            continue;
        }
        let forced = points.iter().all(|&p| {
            let target = minus_at(is, &sigma, p);
            family.stars().iter().any(|tilde| {
                let m = minus_at(is, tilde, p);
                m == target
                    || (sigma.len() == 1 && {
                        let x = *sigma.iter().next().unwrap();
                        m == [lim.project(x, p), lim.project(ls.inv(x), p)].into()
                    })
            })
        });
        if forced {
            return Ok(Err(EssentialFailure { condition: 1, star: sigma }));
        }
    }
    for x in ls.elements() {
        let single: ElemSet = [x].into();
        if is_finitely_inconsistent(is, x, points).holds && !family.contains(&single) {
            return Ok(Err(EssentialFailure { condition: 2, star: single }));
        }
        let back: ElemSet = [ls.inv(x)].into();
        if is_finitely_trivial(is, x, points).holds && !family.contains(&back) {
            return Ok(Err(EssentialFailure { condition: 3, star: back }));
        }
    }
    Ok(Ok(()))
}

/// `(sigma↾p)⁻ = ((sigma↾q)⁻↾p)⁻` for `p < q`.
pub fn check_iterated_minus(is: &InverseSystem, sigma: &ElemSet, p: usize, q: usize) -> bool {
    let lhs = minus_at(is, sigma, p);
    let mid = minus_at(is, sigma, q);
    let rhs = sigma_minus(is.level(p), &is.bond(q, p).image(&mid));
    lhs == rhs
}

/// If at every point of a cofinal `pprime` the star `sigma` of `tau` reduces
/// to a single element onto which an inconsistent pair collapses, then
/// `sigma = {r}` with `r` finitely inconsistent over `points`.
pub fn check_cofinal_lp(
    is: &InverseSystem,
    tau: &ElemSet,
    sigma: &ElemSet,
    pprime: &[usize],
    points: &[usize],
) -> Result<Elem, CompactnessError> {
    let lim = is.limit();
    let ls = lim.system();
    let pre = |m: &str| Err(CompactnessError::PreconditionFailed(m.into()));
    if !ls.is_nested_set(tau) || !sigma.is_subset(&ls.with_inverses(tau)) {
        return pre("sigma must be a star of a nested tau");
    }
    let poset = is.poset();
    if !points.iter().all(|&p| pprime.iter().any(|&q| poset.leq(p, q))) {
        return pre("pprime is not cofinal");
    }
    for &p in pprime {
        let m = minus_at(is, sigma, p);
        if m.len() != 1 {
            return pre("sigma↾p⁻ is not a singleton");
        }
        let r = *m.iter().next().unwrap();
        let collapses = ls.elements().any(|x| lim.project(x, p) == r && collapse_pair(is, x, p).is_some());
        if !collapses {
            return pre("no inconsistent pair collapses onto sigma↾p⁻");
        }
    }
    if sigma.len() != 1 {
        return Err(CompactnessError::Violation("sigma is not a singleton".into()));
    }
    let r = *sigma.iter().next().unwrap();
    if !is_finitely_inconsistent(is, r, points).holds {
        return Err(CompactnessError::Violation("sigma's member is not finitely inconsistent".into()));
    }
    Ok(r)
}

/// Projects a nested `tau_q` essentially over `F_q` to a nested `tau_p`
/// essentially over `F_p`.
pub fn transfer_tau(
    upper: &SepSystem,
    lower: &SepSystem,
    f: &SystemHom,
    tau_q: &ElemSet,
    fam_q: &AugmentedFamily,
    fam_p: &AugmentedFamily,
) -> Result<ElemSet, CompactnessError> {
    for (name, s) in [("upper level", upper), ("lower level", lower)] {
        if s.elements().any(|e| s.is_degenerate(e)) {
            return Err(CompactnessError::Degenerate(name.into()));
        }
    }
    let tau_q = upper.with_inverses(tau_q);
    if !upper.is_nested_set(&tau_q) || essentially_over(upper, &tau_q, fam_q.members()).is_err() {
        return Err(CompactnessError::PreconditionFailed("tau_q must be nested and essentially over F_q".into()));
    }
    let tau_p = f.image(&tau_q);
    if !lower.is_nested_set(&tau_p) {
        return Err(CompactnessError::Violation("projected tau is not nested".into()));
    }
    if let Err(star) = essentially_over(lower, &tau_p, fam_p.members()) {
        return Err(CompactnessError::Violation(format!("star {:?} not essentially over F_p", lower.set_labels(&star))));
    }
    Ok(tau_p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub tau: ElemSet,
    /// The chosen compatible family, by point.
    pub family: Vec<(usize, ElemSet)>,
    /// Points kept after discarding levels with degenerate elements.
    pub active: Vec<usize>,
    pub empty_branch: bool,
}

/// Inverse-closed nested subsets of `s`, by subsets of separations.
pub fn nested_candidates(s: &SepSystem) -> Result<Vec<ElemSet>, CompactnessError> {
    let seps = s.separations();
    if s.len() > POWER_LEVEL_LIMIT {
        return Err(CompactnessError::UniverseTooLarge(s.len()));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << seps.len()) {
        let tau: ElemSet = seps
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, &r)| [r, s.inv(r)])
            .collect();
        if s.is_nested_set(&tau) {
            out.push(tau);
        }
    }
    Ok(out)
}

/// Finds a closed nested subset of the limit over `family`. Candidates per
/// level default to all inverse-closed nested subsets of the level.
pub fn compactness_construct(
    is: &InverseSystem,
    family: &StarFamily,
    candidates: Option<&BTreeMap<usize, Vec<ElemSet>>>,
) -> Result<Construction, CompactnessError> {
    let lim = is.limit();
    let ls = lim.system();
    if ls.elements().any(|e| ls.is_degenerate(e)) {
        return Err(CompactnessError::Degenerate("limit".into()));
    }
    let points = is.poset().points();
    if let Err(f) = essentially_closed(is, family, &points)? {
        return Err(CompactnessError::NotEssentiallyClosed(f));
    }
    let poset = is.poset();
    let degenerate_free = |q: usize| is.level(q).elements().all(|e| !is.level(q).is_degenerate(e));
    let p0 = poset
        .ascending()
        .into_iter()
        .find(|&p| points.iter().filter(|&&q| poset.leq(p, q)).all(|&q| degenerate_free(q)))
        .expect("top level is the degenerate-free limit");
    let active: Vec<usize> = poset.descending().into_iter().filter(|&q| poset.leq(p0, q)).collect();

    let mut levels: Vec<(usize, Vec<ElemSet>)> = Vec::new();
    for &p in &active {
        let lvl = is.level(p);
        let fam = AugmentedFamily::new(is, family, p);
        let pool = match candidates {
            Some(map) => map.get(&p).cloned().unwrap_or_default(),
            None => nested_candidates(lvl)?,
        };
        let mut ok = Vec::new();
        for tau in pool {
            let tau = lvl.with_inverses(&tau);
            if !lvl.is_nested_set(&tau) || essentially_over(lvl, &tau, fam.members()).is_err() {
                continue;
            }
            if tau.is_empty() {
                // An empty candidate forces the empty star into the family.
                if family.contains(&ElemSet::new()) {
                    return finish(is, family, ElemSet::new(), vec![(p, ElemSet::new())], active, true);
                }
                return Err(CompactnessError::Violation("empty candidate but empty star not in family".into()));
            }
            ok.push(tau);
        }
        if ok.is_empty() {
            return Err(CompactnessError::Impossible { level: poset.label(p).into() });
        }
        levels.push((p, ok));
    }
    let mut chosen: Vec<(usize, ElemSet)> = Vec::new();
    if !backtrack(is, &levels, &mut chosen) {
        return Err(CompactnessError::NoCompatibleFamily);
    }
    let tau = ls
        .elements()
        .filter(|&x| chosen.iter().all(|(p, t)| t.contains(&lim.project(x, *p))))
        .collect();
    finish(is, family, tau, chosen, active, false)
}

fn backtrack(is: &InverseSystem, levels: &[(usize, Vec<ElemSet>)], chosen: &mut Vec<(usize, ElemSet)>) -> bool {
    let Some(((p, cands), rest)) = levels.split_first() else {
        return true;
    };
    for tau in cands {
        let fits = chosen.iter().all(|(q, tq)| !is.poset().lt(*p, *q) || is.bond(*q, *p).image(tq) == *tau);
        if fits {
            chosen.push((*p, tau.clone()));
            if backtrack(is, rest, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn finish(
    is: &InverseSystem,
    family: &StarFamily,
    tau: ElemSet,
    chosen: Vec<(usize, ElemSet)>,
    active: Vec<usize>,
    empty_branch: bool,
) -> Result<Construction, CompactnessError> {
    let ls = is.limit().system();
    if !is.is_closed(&tau) {
        return Err(CompactnessError::Violation("constructed set is not closed".into()));
    }
    if !ls.is_nested_set(&tau) {
        return Err(CompactnessError::Violation("constructed set is not nested".into()));
    }
    if let Some(star) = splitting_stars_of(ls, &tau).into_iter().find(|s| !family.contains(s)) {
        return Err(CompactnessError::Violation(format!("splitting star {:?} not in the family", ls.set_labels(&star))));
    }
    Ok(Construction { tau, family: chosen, active, empty_branch })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeSetReport {
    pub core: ElemSet,
    pub stars_preserved: bool,
    pub closed: bool,
}

/// The essential core of a nested `tau` (drop members that are degenerate,
/// trivial or co-trivial within `tau`), whether its splitting stars also
/// split `tau`, and whether it is closed over `points`.
pub fn extract_tree_set(is: &InverseSystem, tau: &ElemSet, points: &[usize]) -> Result<TreeSetReport, CompactnessError> {
    let ls = is.limit().system();
    let tau = ls.with_inverses(tau);
    if !ls.is_nested_set(&tau) {
        return Err(CompactnessError::PreconditionFailed("tau must be nested".into()));
    }
    let (sub, back) = ls.induced(&tau);
    let core: ElemSet = essential_elements(&sub).iter().map(|e| back[e.0]).collect();
    let fwd: BTreeMap<Elem, Elem> = back.iter().enumerate().map(|(i, &e)| (e, Elem(i))).collect();
    let stars_preserved = splitting_stars_of(ls, &core)
        .iter()
        .all(|st| splits(&sub, &st.iter().map(|e| fwd[e]).collect()));
    let closed = is.limit().closure_on(&core, points) == core;
    Ok(TreeSetReport { core, stars_preserved, closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::random_contraction_chain;

    #[test]
    fn power_bijection_small_chain() {
        let c = random_contraction_chain(3, 2, 2);
        let ps = power_system(&c.system).unwrap();
        assert!(ps.verify_bijection());
        let f = c.system.limit().system().len();
        assert_eq!(ps.level_size(c.system.top()), 1 << f);
    }

    #[test]
    fn node_stars_essentially_closed_and_constructed() {
        for seed in 0..10 {
            let c = random_contraction_chain(seed, 3, 4);
            let is = &c.system;
            let ls = is.limit().system();
            let fam = StarFamily::new(ls, splitting_subsets(ls)).unwrap();
            assert_eq!(essentially_closed(is, &fam, &is.poset().points()).unwrap(), Ok(()));
            let out = compactness_construct(is, &fam, None).unwrap();
            assert!(is.is_closed(&out.tau));
        }
    }

    #[test]
    fn missing_star_is_reported() {
        let c = random_contraction_chain(1, 1, 3);
        let ls = c.system.limit().system();
        let mut stars = splitting_subsets(ls);
        stars.pop();
        let fam = StarFamily::new(ls, stars.clone()).unwrap();
        let mut t = ElemSet::new();
        t.extend(ls.elements());
        assert!(essentially_over(ls, &t, fam.stars().iter()).is_err());
    }
}
