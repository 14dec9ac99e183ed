//! Counterexample search over random finite systems. A counterexample is
//! shrunk by deleting separations while the property still fails.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::compactness::all_stars;
use crate::doc::{system_doc, SystemDoc};
use crate::orient::{sigma_minus, splitting_subsets};
use crate::system::{ElemSet, SepSystem};
use crate::testkit::{oracle, random_system, rng};

pub const MAX_SEARCH_SIZE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown property `{0}`")]
    Unknown(String),
    #[error("size must be in 1..={MAX_SEARCH_SIZE}")]
    BadSize,
}

pub struct Property {
    pub name: &'static str,
    pub about: &'static str,
    check: fn(&SepSystem) -> Result<(), String>,
}

pub const PROPERTIES: &[Property] = &[
    Property { name: "small-is-trivial", about: "every small nondegenerate element is trivial (false)", check: small_is_trivial },
    Property { name: "nested-has-no-trivial", about: "nested systems have no trivial elements (false)", check: nested_no_trivial },
    Property {
        name: "partial-orientations-extend",
        about: "every consistent partial orientation extends to a consistent orientation (false)",
        check: partial_extends,
    },
    Property {
        name: "nested-splitting-stars-essential",
        about: "splitting stars of nested degenerate-free systems are proper stars of essential elements",
        check: nested_stars_essential,
    },
    Property { name: "stars-are-consistent", about: "every star is consistent", check: stars_consistent },
    Property { name: "sigma-minus-idempotent", about: "pruning a star twice equals pruning once", check: minus_idempotent },
    Property { name: "inverse-reverses-order", about: "x <= y iff y* <= x*", check: inverse_reverses },
];

pub fn find(name: &str) -> Option<&'static Property> {
    PROPERTIES.iter().find(|p| p.name == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub original_separations: usize,
    pub reason: String,
    pub shrunk: SystemDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub property: String,
    pub seed: u64,
    pub instances: usize,
    pub counterexample: Option<Counterexample>,
}

/// Tries `count` random systems with 1..=`size` separations and stops at the
/// first failure.
pub fn search(name: &str, seed: u64, count: usize, size: usize) -> Result<SearchReport, SearchError> {
    let prop = find(name).ok_or_else(|| SearchError::Unknown(name.into()))?;
    if size == 0 || size > MAX_SEARCH_SIZE {
        return Err(SearchError::BadSize);
    }
    let mut report = SearchReport { property: name.into(), seed, instances: 0, counterexample: None };
    for i in 0..count {
        let s_seed = seed.wrapping_add(i as u64);
        let mut r = rng(s_seed);
        let n = r.gen_range(1..=size);
        let s = random_system(s_seed, n, r.gen_range(0.05..0.6), 0.15);
        report.instances += 1;
        if (prop.check)(&s).is_err() {
            let small = shrink(&s, prop.check);
            let reason = (prop.check)(&small).expect_err("shrinking keeps the failure");
            report.counterexample = Some(Counterexample {
                seed: s_seed,
                original_separations: s.separations().len(),
                reason,
                shrunk: system_doc(&small),
            });
            break;
        }
    }
    Ok(report)
}

/// Deletes separations one at a time while `check` keeps failing.
pub fn shrink(s: &SepSystem, check: fn(&SepSystem) -> Result<(), String>) -> SepSystem {
    let mut cur = s.clone();
    'outer: loop {
        for r in cur.separations() {
            let keep: ElemSet = cur.elements().filter(|&x| !cur.same_sep(x, r)).collect();
            let (sub, _) = cur.induced(&keep);
            if check(&sub).is_err() {
                cur = sub;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn small_is_trivial(s: &SepSystem) -> Result<(), String> {
    match s.elements().find(|&x| s.is_small(x) && !s.is_degenerate(x) && !s.is_trivial(x)) {
        Some(x) => Err(format!("`{}` is small but not trivial", s.label(x))),
        None => Ok(()),
    }
}

fn nested_no_trivial(s: &SepSystem) -> Result<(), String> {
    if !s.is_nested() {
        return Ok(());
    }
    match s.elements().find(|&x| s.is_trivial(x)) {
        Some(x) => Err(format!("nested, but `{}` is trivial", s.label(x))),
        None => Ok(()),
    }
}

fn partial_extends(s: &SepSystem) -> Result<(), String> {
    for x in s.elements() {
        let p: ElemSet = [x].into_iter().collect();
        if s.is_consistent(&p) && oracle::extensions(s, &p, None).is_empty() {
            return Err(format!("{{{}}} has no consistent extension", s.label(x)));
        }
    }
    Ok(())
}

fn nested_stars_essential(s: &SepSystem) -> Result<(), String> {
    if !s.is_nested() || s.elements().any(|x| s.is_degenerate(x)) {
        return Ok(());
    }
    for sigma in splitting_subsets(s) {
        if sigma.is_empty() {
            continue;
        }
        if !s.is_proper_star(&sigma) {
            return Err(format!("{:?} is not a proper star", s.set_labels(&sigma)));
        }
        if let Some(&x) = sigma.iter().find(|&&x| s.is_trivial(x) || s.is_co_trivial(x)) {
            return Err(format!("{:?} contains the inessential `{}`", s.set_labels(&sigma), s.label(x)));
        }
    }
    Ok(())
}

fn stars_consistent(s: &SepSystem) -> Result<(), String> {
    match all_stars(s).into_iter().find(|st| !s.is_consistent(st)) {
        Some(st) => Err(format!("star {:?} is inconsistent", s.set_labels(&st))),
        None => Ok(()),
    }
}

fn minus_idempotent(s: &SepSystem) -> Result<(), String> {
    for st in all_stars(s) {
        let once = sigma_minus(s, &st);
        if sigma_minus(s, &once) != once {
            return Err(format!("pruning {:?} twice changes it", s.set_labels(&st)));
        }
    }
    Ok(())
}

fn inverse_reverses(s: &SepSystem) -> Result<(), String> {
    for a in s.elements() {
        for b in s.elements() {
            if s.leq(a, b) != s.leq(s.inv(b), s.inv(a)) {
                return Err(format!("`{}` <= `{}` is not mirrored", s.label(a), s.label(b)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn false_conjectures_are_refuted_and_shrunk() {
        for name in ["small-is-trivial", "nested-has-no-trivial", "partial-orientations-extend"] {
            let rep = search(name, 1, 500, 5).unwrap();
            let ce = rep.counterexample.unwrap_or_else(|| panic!("{name}: no counterexample"));
            assert!(ce.shrunk.inverse.len() <= ce.original_separations);
            assert!(ce.shrunk.inverse.len() <= 2, "{name}: {:?}", ce.shrunk);
        }
    }

    #[test]
    fn true_properties_survive() {
        for name in ["nested-splitting-stars-essential", "stars-are-consistent", "sigma-minus-idempotent", "inverse-reverses-order"] {
            let rep = search(name, 1, 200, 5).unwrap();
            assert!(rep.counterexample.is_none(), "{name}: {:?}", rep.counterexample);
            assert_eq!(rep.instances, 200);
        }
    }
}
