//! Named constructions with their certificate checks. Chains are built level
//! by level; element labels are stable across levels so that elements of the
//! top level can be tracked down the chain.

use serde::Serialize;
use thiserror::Error;

use crate::graphsep::{build_restriction_system, enumerate_separations, restrict_separation, Graph, SetSeparation};
use crate::inverse::{chain_sup, InverseSystem};
use crate::normality::{
    check_greatest, certify, isomorphism_check, truncate, GreatestVerdict, NormalityError, NormalityVerdict,
    SchematicChain, Truncation,
};
use crate::orient::{is_consistent_orientation, split_orientation, splits_at};
use crate::profinite::{collapse_pair, is_finitely_trivial};
use crate::system::{Elem, ElemSet, SepSystem};

pub const CHAIN_NAMES: [&str; 5] = ["trivialproj", "splittingnotclosed", "splittingnotclosed2", "ray", "stationary"];
pub const EXAMPLE_NAMES: [&str; 6] =
    ["trivialproj", "splittingnotclosed", "splittingnotclosed2", "ray", "stationary", "inconsistentpair"];
pub const MAX_DEPTH: usize = 16;
pub const MAX_RAY_DEPTH: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GalleryError {
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Normality(#[from] NormalityError),
}

pub fn chain(name: &str) -> Option<Box<dyn SchematicChain>> {
    Some(match name {
        "trivialproj" => Box::new(TrivialProj),
        "splittingnotclosed" => Box::new(SplittingNotClosed),
        "splittingnotclosed2" => Box::new(SplittingNotClosed2),
        "ray" => Box::new(Ray { k: 2 }),
        "stationary" => Box::new(Stationary),
        _ => return None,
    })
}

/// The inverse system of a named example. `depth` is ignored by the fixed
/// `inconsistentpair` instance.
pub fn gen(name: &str, depth: usize) -> Result<InverseSystem, GalleryError> {
    if name == "inconsistentpair" {
        return Ok(inconsistent_pair().system);
    }
    let c = chain(name).ok_or_else(|| GalleryError::UnknownExample(name.into()))?;
    let bound = if name == "ray" { MAX_RAY_DEPTH } else { MAX_DEPTH };
    if depth == 0 || depth > bound {
        return Err(GalleryError::BadParams(format!("depth must be in 1..={bound}")));
    }
    Ok(truncate(c.as_ref(), depth)?.system)
}

/// Builds a system from base names: each name `n` gets elements `n` and
/// `n*`; generators are pairs of element labels.
fn named_level(names: &[String], gens: &[(String, String)]) -> Result<SepSystem, String> {
    let mut labels = Vec::new();
    let mut inverse = Vec::new();
    for n in names {
        labels.push(n.clone());
        labels.push(format!("{n}*"));
        inverse.push((n.clone(), format!("{n}*")));
    }
    SepSystem::from_labels(&labels, &inverse, gens).map_err(|e| e.to_string())
}

/// Bond table from `upper` to `lower` given on base names; inverses follow.
fn named_bond(upper: &SepSystem, lower: &SepSystem, base: impl Fn(&str) -> String) -> Result<Vec<Elem>, String> {
    upper
        .labels()
        .iter()
        .map(|l| {
            let target = match l.strip_suffix('*') {
                Some(b) => format!("{}*", base(b)),
                None => base(l),
            };
            lower.find(&target).ok_or_else(|| format!("no image `{target}` for `{l}`"))
        })
        .collect()
}

fn star_gens(names: &[String]) -> Vec<(String, String)> {
    let mut g = Vec::new();
    for a in names {
        for b in names {
            if a != b {
                g.push((a.clone(), format!("{b}*")));
            }
        }
    }
    g
}

/// Level `p` is a proper star `r1..rp` with a small `s` trivial only by `rp`.
/// The bond sends the newest star element and `s` to `s`.
pub struct TrivialProj;

impl SchematicChain for TrivialProj {
    fn name(&self) -> &str {
        "trivialproj"
    }

    fn level(&self, p: usize) -> Result<SepSystem, String> {
        let star: Vec<String> = (1..=p).map(|i| format!("r{i}")).collect();
        let mut gens = star_gens(&star);
        gens.push(("s".into(), format!("r{p}")));
        gens.push(("s".into(), format!("r{p}*")));
        let mut names = vec!["s".to_string()];
        names.extend(star);
        named_level(&names, &gens)
    }

    fn bond(&self, p: usize) -> Result<Vec<Elem>, String> {
        let newest = format!("r{}", p + 1);
        named_bond(&self.level(p + 1)?, &self.level(p)?, |b| if b == newest { "s".into() } else { b.into() })
    }
}

/// Levels start at 3. Level `p` is a star `s, r, c3..cp` with `s <= s*` and
/// `r` below every other element and its inverse. The bond sends the newest
/// `c` to `s`.
pub struct SplittingNotClosed;

impl SchematicChain for SplittingNotClosed {
    fn name(&self) -> &str {
        "splittingnotclosed"
    }

    fn first_index(&self) -> usize {
        3
    }

    fn level(&self, p: usize) -> Result<SepSystem, String> {
        if p < 3 {
            return Err("levels start at 3".into());
        }
        let mut names = vec!["s".to_string(), "r".to_string()];
        names.extend((3..=p).map(|i| format!("c{i}")));
        let mut gens = star_gens(&names);
        gens.push(("s".into(), "s*".into()));
        for t in names.iter().filter(|n| *n != "r") {
            gens.push(("r".into(), t.clone()));
            gens.push(("r".into(), format!("{t}*")));
        }
        named_level(&names, &gens)
    }

    fn bond(&self, p: usize) -> Result<Vec<Elem>, String> {
        let newest = format!("c{}", p + 1);
        named_bond(&self.level(p + 1)?, &self.level(p)?, |b| if b == newest { "s".into() } else { b.into() })
    }
}

/// Separations of a star graph with centre `z`: `({z}, V)` and `({y,z}, V-y)`
/// for leaves `y`, with the extra relation `({x,z}, V-x) <= (V-x, {z,x})`.
/// Level `p` restricts to `q = {z, x, y1..y(p-2)}`; its order holds between
/// restrictions that have related preimages. Two leaves outside `q` stand in
/// for the rest of the graph.
pub struct SplittingNotClosed2;

const SNC2_OUTSIDE: usize = 2;

impl SplittingNotClosed2 {
    fn vertex(i: usize, leaves: usize) -> String {
        match i {
            0 => "z".into(),
            1 => "x".into(),
            i if i < leaves + 2 => format!("y{}", i - 1),
            i => format!("w{}", i - leaves - 1),
        }
    }

    pub fn label(a: u64, b: u64) -> String {
        let side = |m: u64| {
            let names: Vec<String> = (0..64).filter(|i| m & (1 << i) != 0).map(|i| Self::vertex(i, 64)).collect();
            if names.is_empty() {
                "-".into()
            } else {
                names.join(",")
            }
        };
        format!("{}|{}", side(a), side(b))
    }

    /// Bitmask of `q` at level `p`.
    pub fn q_mask(p: usize) -> u64 {
        (1u64 << p) - 1
    }

    /// Separations of the finite stand-in graph for level `p`, both
    /// orientations, and its order.
    fn universe(p: usize) -> (Vec<SetSeparation>, impl Fn(&SetSeparation, &SetSeparation) -> bool) {
        let n = p + SNC2_OUTSIDE;
        let all = (1u64 << n) - 1;
        let (z, x) = (1u64, 2u64);
        let mut g = vec![SetSeparation { a: z, b: all }];
        g.extend((1..n).map(|y| SetSeparation { a: z | 1 << y, b: all & !(1 << y) }));
        let g = g.iter().flat_map(|s| [*s, s.inverse()]).collect();
        let small = SetSeparation { a: x | z, b: all & !x };
        (g, move |s: &SetSeparation, t: &SetSeparation| s.leq(t) || (*s == small && *t == small.inverse()))
    }

    /// The separations at level `p`, in element order.
    pub fn level_seps(p: usize) -> Vec<SetSeparation> {
        let q = Self::q_mask(p);
        let mut seps: Vec<SetSeparation> = Vec::new();
        for s in Self::universe(p).0 {
            let r = restrict_separation(s, q);
            if !seps.contains(&r) {
                seps.push(r);
            }
        }
        seps
    }
}

impl SchematicChain for SplittingNotClosed2 {
    fn name(&self) -> &str {
        "splittingnotclosed2"
    }

    fn first_index(&self) -> usize {
        3
    }

    fn level(&self, p: usize) -> Result<SepSystem, String> {
        if p < 3 || p + SNC2_OUTSIDE > 64 {
            return Err("levels run from 3 to 62".into());
        }
        let (universe, leq) = Self::universe(p);
        let seps = Self::level_seps(p);
        let q = Self::q_mask(p);
        let fibre = |r: SetSeparation| universe.iter().filter(move |s| restrict_separation(**s, q) == r);
        let labels = seps.iter().map(|s| Self::label(s.a, s.b)).collect();
        let inv = seps.iter().map(|s| seps.iter().position(|t| *t == s.inverse()).unwrap()).collect();
        SepSystem::from_relation(labels, inv, |i, j| {
            fibre(seps[i]).any(|a| fibre(seps[j]).any(|b| leq(a, b)))
        })
        .map_err(|e| e.to_string())
    }

    fn bond(&self, p: usize) -> Result<Vec<Elem>, String> {
        let upper = Self::level_seps(p + 1);
        let lower = Self::level_seps(p);
        let q = Self::q_mask(p);
        upper
            .iter()
            .map(|s| {
                let r = restrict_separation(*s, q);
                lower.iter().position(|t| *t == r).map(Elem).ok_or_else(|| "restriction missing".to_string())
            })
            .collect()
    }
}

/// Separations of order below `k` of the prefixes `v1..vp` of a ray, with
/// restriction as bonds.
pub struct Ray {
    pub k: usize,
}

impl SchematicChain for Ray {
    fn name(&self) -> &str {
        "ray"
    }

    fn level(&self, p: usize) -> Result<SepSystem, String> {
        enumerate_separations(&Graph::path(p), self.k).map(|g| g.system).map_err(|e| e.to_string())
    }

    fn bond(&self, p: usize) -> Result<Vec<Elem>, String> {
        let upper = enumerate_separations(&Graph::path(p + 1), self.k).map_err(|e| e.to_string())?;
        let lower = enumerate_separations(&Graph::path(p), self.k).map_err(|e| e.to_string())?;
        let mask = (1u64 << p) - 1;
        upper
            .seps
            .iter()
            .map(|&s| lower.find(restrict_separation(s, mask)).ok_or_else(|| "restriction missing".to_string()))
            .collect()
    }
}

/// The edge tree set of a claw at every level, with identity bonds.
pub struct Stationary;

impl SchematicChain for Stationary {
    fn name(&self) -> &str {
        "stationary"
    }

    fn level(&self, _p: usize) -> Result<SepSystem, String> {
        let names: Vec<String> = (1..=3).map(|i| format!("e{i}")).collect();
        named_level(&names, &star_gens(&names))
    }

    fn bond(&self, p: usize) -> Result<Vec<Elem>, String> {
        Ok(self.level(p)?.elements().collect())
    }
}

/// Set separations of four singleton blocks `a, b, c, x` with the projection
/// to `U = {c, x}`.
pub struct InconsistentPair {
    pub system: InverseSystem,
    pub graph: Graph,
    /// `(x ∪ a, c ∪ x ∪ b)`.
    pub s: Elem,
    /// `(c ∪ x ∪ a, x ∪ b)`.
    pub s_prime: Elem,
    /// The point of `U`.
    pub u: usize,
}

pub fn inconsistent_pair() -> InconsistentPair {
    let graph = Graph::new(["a", "b", "c", "x"].map(String::from).to_vec(), &[]);
    let m = |l: &[&str]| graph.mask_of(l).unwrap();
    let u = m(&["c", "x"]);
    let rs = build_restriction_system(&graph, graph.len() + 1, &[u, graph.all()]).expect("two-level restriction system");
    let top = &rs.levels[1];
    let s = top.find(SetSeparation { a: m(&["x", "a"]), b: m(&["c", "x", "b"]) }).unwrap();
    let s_prime = top.find(SetSeparation { a: m(&["c", "x", "a"]), b: m(&["x", "b"]) }).unwrap();
    InconsistentPair { system: rs.system, graph, s, s_prime, u: 0 }
}

/// Named boolean checks of a certificate suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub example: String,
    pub depth: usize,
    pub checks: Vec<(String, bool)>,
}

impl Certificate {
    fn new(example: &str, depth: usize) -> Self {
        Certificate { example: example.into(), depth, checks: vec![] }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

pub fn certificate(name: &str, depth: usize) -> Result<Certificate, GalleryError> {
    match name {
        "trivialproj" => trivialproj_certificate(depth),
        "splittingnotclosed" => splittingnotclosed_certificate(depth),
        "splittingnotclosed2" => splittingnotclosed2_certificate(depth),
        "ray" => ray_certificate(depth),
        "stationary" => stationary_certificate(depth),
        "inconsistentpair" => Ok(inconsistentpair_certificate()),
        _ => Err(GalleryError::UnknownExample(name.into())),
    }
}

fn truncated(name: &str, depth: usize) -> Result<Truncation, GalleryError> {
    let c = chain(name).ok_or_else(|| GalleryError::UnknownExample(name.into()))?;
    if depth < 2 {
        return Err(GalleryError::BadParams("certificates need depth at least 2".into()));
    }
    Ok(truncate(c.as_ref(), depth)?)
}

fn find_in(s: &SepSystem, label: &str) -> Elem {
    s.find(label).unwrap_or_else(|| panic!("no element `{label}`"))
}

pub fn trivialproj_certificate(depth: usize) -> Result<Certificate, GalleryError> {
    let t = truncated("trivialproj", depth)?;
    let is = &t.system;
    let lim = is.limit();
    let mut c = Certificate::new("trivialproj", depth);
    let mut levels_ok = true;
    let mut stars_ok = true;
    for pt in is.poset().points() {
        let p = t.index(pt);
        let l = is.level(pt);
        let s = find_in(l, "s");
        let tp = find_in(l, &format!("r{p}"));
        levels_ok &= l.trivial_witnesses(s) == vec![l.sep(tp)];
        let star: ElemSet = (1..=p).map(|i| find_in(l, &format!("r{i}"))).collect();
        stars_ok &= star.len() == p && l.is_proper_star(&star);
    }
    c.check("each level holds a proper star of its index size", stars_ok);
    c.check("s is trivial at each level with the newest star element as only witness", levels_ok);

    let ls = lim.system();
    let n = t.top_index();
    let s = t.elem("s");
    c.check("at the top only the newest star element witnesses s", ls.trivial_witnesses(s) == vec![t.elem(&format!("r{n}"))]);
    // r̂_p: the unique top element projecting to t_p at level p.
    let mut reps_ok = true;
    for p in 1..n {
        let pt = t.point(p);
        let tp = find_in(is.level(pt), &format!("r{p}"));
        let hits: Vec<Elem> = ls.elements().filter(|&x| lim.project(x, pt) == tp).collect();
        let [rep] = hits.as_slice() else {
            reps_ok = false;
            continue;
        };
        for q in p + 1..=n {
            let lq = is.level(t.point(q));
            let img = lim.project(*rep, t.point(q));
            let in_star = (1..q).any(|i| img == find_in(lq, &format!("r{i}")));
            reps_ok &= in_star && img != find_in(lq, &format!("r{q}"));
        }
    }
    c.check("each star representative is unique and avoids the later witnesses", reps_ok);
    let avoiders: Vec<Elem> = ls
        .elements()
        .filter(|&x| {
            is.poset().points().into_iter().all(|pt| {
                let l = is.level(pt);
                let img = lim.project(x, pt);
                let name = l.label(img).trim_end_matches('*');
                !name.starts_with('r')
            })
        })
        .collect();
    c.check("s and s* are the only elements avoiding the stars", avoiders == vec![s, ls.inv(s)]);
    c.check("s is finitely trivial on the probe points", is_finitely_trivial(is, s, &t.probe_points()).holds);
    let report = certify(&t);
    c.check("normality evidence: every small element is trivial", report.verdict == NormalityVerdict::NormalEvidence);
    Ok(c)
}

pub fn splittingnotclosed_certificate(depth: usize) -> Result<Certificate, GalleryError> {
    let t = truncated("splittingnotclosed", depth)?;
    let is = &t.system;
    let mut c = Certificate::new("splittingnotclosed", depth);
    let mut shape = true;
    for pt in is.poset().points() {
        let p = t.index(pt);
        let l = is.level(pt);
        let (s, r) = (find_in(l, "s"), find_in(l, "r"));
        let mut star: ElemSet = (3..=p).map(|i| find_in(l, &format!("c{i}"))).collect();
        star.extend([s, r]);
        shape &= star.len() == p && l.is_star(&star) && l.is_small(s);
        shape &= star.iter().filter(|&&x| x != r).all(|&x| l.lt(r, x) && l.lt(r, l.inv(x)));
    }
    c.check("each level is a star of its index size with s small and r below all", shape);

    let ls = t.limit();
    let (s, r) = (t.elem("s"), t.elem("r"));
    let n = t.top_index();
    let mut o: ElemSet = (3..=n).map(|i| t.elem(&format!("c{i}"))).collect();
    o.extend([r, ls.inv(s)]);
    c.check("O splits at {s*}", splits_at(ls, &o) == Some([ls.inv(s)].into()));
    let probes = t.probe_points();
    let verdict = check_greatest(is, &o, &probes);
    let in_closure = matches!(&verdict, Ok(GreatestVerdict::CoSmallGreatest { inverse, .. }) if *inverse == s);
    c.check("s projects into O at every probed level", in_closure);
    c.check("s is small and not trivial at the top", ls.is_small(s) && !ls.is_trivial(s));
    c.check("r is trivial witnessed by s", ls.trivial_witnesses(r).contains(&ls.sep(s)));
    let report = certify(&t);
    let witness_s = report.witness.as_ref().is_some_and(|w| w.s0 == s);
    c.check("normality certificate finds s as the abnormal witness", report.verdict == NormalityVerdict::Abnormal && witness_s);
    Ok(c)
}

pub fn splittingnotclosed2_certificate(depth: usize) -> Result<Certificate, GalleryError> {
    let t = truncated("splittingnotclosed2", depth)?;
    let is = &t.system;
    let ls = t.limit();
    let n = t.top_index();
    let q = SplittingNotClosed2::q_mask(n);
    let (z, x) = (1u64, 2u64);
    let mut c = Certificate::new("splittingnotclosed2", depth);
    let co_small: Vec<Elem> = ls.elements().filter(|&e| !ls.is_degenerate(e) && ls.is_co_small(e)).collect();
    let vx = t.elem(&SplittingNotClosed2::label(q & !x, z | x));
    let vz = t.elem(&SplittingNotClosed2::label(q, z));
    c.check("exactly two co-small separations", co_small.len() == 2 && co_small.contains(&vx) && co_small.contains(&vz));
    c.check("(V,{z}) is co-trivial", ls.is_co_trivial(vz));
    let o = split_orientation(ls, &[vx].into());
    let closed = o.as_ref().is_some_and(|o| matches!(check_greatest(is, o, &t.probe_points()), Ok(GreatestVerdict::Closed)));
    c.check("the splitting singleton orientation is closed", closed);
    let other = truncate(&SplittingNotClosed, n - 2)?;
    c.check("isomorphic to the splittingnotclosed top of equal size", isomorphism_check(ls, other.limit()).is_some());
    let report = certify(&t);
    c.check("normal evidence: no abnormal witness, every splitting orientation closed", report.verdict == NormalityVerdict::NormalEvidence && report.unclosed_splitting == 0);
    Ok(c)
}

pub fn ray_certificate(depth: usize) -> Result<Certificate, GalleryError> {
    if depth > MAX_RAY_DEPTH {
        return Err(GalleryError::BadParams(format!("ray depth must be at most {MAX_RAY_DEPTH}")));
    }
    let t = truncated("ray", depth)?;
    let is = &t.system;
    let lim = is.limit();
    let ls = lim.system();
    let n = depth;
    let g = Graph::path(n);
    let top = enumerate_separations(&g, 2).map_err(|e| GalleryError::BadParams(e.to_string()))?;
    let end = 1u64 << (n - 1);
    let all = g.all();
    let mut c = Certificate::new("ray", depth);
    c.check("levels hold only separations of order below 2", top.seps.iter().all(|s| s.order() < 2));
    // Towards the end: the last vertex lies strictly on the B side.
    let mut o: ElemSet = top.seps.iter().enumerate().filter(|(_, s)| s.b & !s.a & end != 0).map(|(i, _)| Elem(i)).collect();
    o.insert(top.find(SetSeparation { a: all, b: end }).unwrap());
    c.check("O is a consistent orientation", is_consistent_orientation(ls, &o));
    let v_empty = top.find(SetSeparation { a: all, b: 0 }).unwrap();
    c.check("(V,∅) is not in O", !o.contains(&v_empty));
    let probes = t.probe_points();
    c.check("(V,∅) lies in the closure of O on the probe points", lim.closure_on(&o, &probes).contains(&v_empty));
    let chain_elems: ElemSet = (1..=n)
        .map(|i| {
            let a = (1u64 << i) - 1;
            let b = all & !((1u64 << (i - 1)) - 1);
            top.find(SetSeparation { a, b }).unwrap()
        })
        .collect();
    c.check("the prefix chain lies in O", chain_elems.is_subset(&o));
    let sup = chain_sup(is, &chain_elems, &probes).map_err(NormalityError::from)?;
    let matches = sup.coords.iter().all(|&(p, e)| lim.project(v_empty, p) == e);
    c.check("chain supremum equals the projections of (V,∅)", sup.compatible && matches && sup.in_closure.contains(&v_empty));
    Ok(c)
}

pub fn stationary_certificate(depth: usize) -> Result<Certificate, GalleryError> {
    let t = truncated("stationary", depth)?;
    let report = certify(&t);
    let mut c = Certificate::new("stationary", depth);
    c.check("star sizes stay bounded", report.star_growth.as_ref().is_some_and(|g| !g.growing));
    c.check("normal evidence", report.verdict == NormalityVerdict::NormalEvidence);
    Ok(c)
}

pub fn inconsistentpair_certificate() -> Certificate {
    let ip = inconsistent_pair();
    let lim = ip.system.limit();
    let ls = lim.system();
    let mut c = Certificate::new("inconsistentpair", 2);
    c.check("s < s'", ls.lt(ip.s, ip.s_prime));
    c.check("{s*, s'} is inconsistent", !ls.is_consistent(&[ls.inv(ip.s), ip.s_prime].into()));
    let m = |l: &[&str]| ip.graph.mask_of(l).unwrap();
    let u_level = &ip.system.level(ip.u);
    let expect = u_level.find(&format!("{}|{}", ip.graph.mask_label(m(&["c", "x"])), ip.graph.mask_label(m(&["x"]))));
    let a = lim.project(ls.inv(ip.s), ip.u);
    let b = lim.project(ip.s_prime, ip.u);
    c.check("both project to (C∪X, X) on U", a == b && Some(a) == expect);
    c.check("an inconsistent pair collapses there", collapse_pair(&ip.system, ip.s_prime, ip.u).is_some());
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_sizes() {
        let t = truncate(&TrivialProj, 3).unwrap();
        for pt in 0..3 {
            assert_eq!(t.system.level(pt).len(), 2 * (pt + 1) + 2);
        }
        let t = truncate(&SplittingNotClosed, 3).unwrap();
        assert_eq!(t.system.poset().labels(), ["3", "4", "5"]);
        assert_eq!(t.limit().len(), 10);
        let t = truncate(&Ray { k: 2 }, 2).unwrap();
        assert!(t.system.is_surjective());
    }

    #[test]
    fn certificates_small_depth() {
        for name in EXAMPLE_NAMES {
            let c = certificate(name, 4).unwrap();
            assert!(c.passed(), "{name}: {:?}", c.failures());
        }
    }

    #[test]
    fn snc2_top_matches_snc_level() {
        let t = truncate(&SplittingNotClosed2, 3).unwrap();
        assert_eq!(t.limit().len(), 2 * 5);
        let u = truncate(&SplittingNotClosed, 3).unwrap();
        assert!(isomorphism_check(t.limit(), u.limit()).is_some());
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(gen("nope", 3), Err(GalleryError::UnknownExample(_))));
        assert!(matches!(gen("ray", 0), Err(GalleryError::BadParams(_))));
        assert!(gen("inconsistentpair", 0).is_ok());
    }
}
