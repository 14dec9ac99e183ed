//! JSON interchange documents for separation systems, inverse systems and
//! star families. Elements and points are referred to by label.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inverse::{DirectedPoset, InverseError, InverseSystem};
use crate::system::{Elem, ElemSet, SepSystem, SystemError};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Inverse(#[from] InverseError),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("no level given for point `{0}`")]
    MissingLevel(String),
    #[error("level `{level}` has no element `{label}`")]
    UnknownLabel { level: String, label: String },
    #[error("bond {upper} -> {lower} does not map `{label}`")]
    IncompleteBond { upper: String, lower: String, label: String },
}

/// A separation system: `inverse` lists each pair once (`[a, a]` for a
/// degenerate element); `leq` lists generating pairs `a <= b`. Mirror images
/// `b* <= a*` are implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub elements: Vec<String>,
    pub inverse: Vec<(String, String)>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub points: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
}

/// A bond from level `upper` to level `lower`, as label pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondDoc {
    pub upper: String,
    pub lower: String,
    pub map: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSystemDoc {
    pub poset: PosetDoc,
    pub levels: BTreeMap<String, SystemDoc>,
    pub bonds: Vec<BondDoc>,
}

/// Stars given by element labels of a limit.
pub type StarFamilyDoc = Vec<Vec<String>>;

/// Either kind of system document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyDoc {
    Inverse(InverseSystemDoc),
    System(SystemDoc),
}

pub fn system_doc(s: &SepSystem) -> SystemDoc {
    SystemDoc {
        elements: s.labels().to_vec(),
        inverse: s.separations().iter().map(|&e| (s.label(e).into(), s.label(s.inv(e)).into())).collect(),
        leq: s.covering_pairs().iter().map(|&(a, b)| (s.label(a).into(), s.label(b).into())).collect(),
    }
}

pub fn system_from_doc(doc: &SystemDoc) -> Result<SepSystem, DocError> {
    Ok(SepSystem::from_labels(&doc.elements, &doc.inverse, &doc.leq)?)
}

pub fn inverse_doc(is: &InverseSystem) -> InverseSystemDoc {
    let poset = is.poset();
    let points = poset.labels().to_vec();
    let covers = poset.covering_pairs();
    let leq = covers.iter().map(|&(q, p)| (points[p].clone(), points[q].clone())).collect();
    let levels = poset.points().into_iter().map(|p| (points[p].clone(), system_doc(is.level(p)))).collect();
    let bonds = covers
        .iter()
        .map(|&(q, p)| {
            let (up, low) = (is.level(q), is.level(p));
            let f = is.bond(q, p);
            BondDoc {
                upper: points[q].clone(),
                lower: points[p].clone(),
                map: up.elements().map(|e| (up.label(e).into(), low.label(f.apply(e)).into())).collect(),
            }
        })
        .collect();
    InverseSystemDoc { poset: PosetDoc { points, leq }, levels, bonds }
}

pub fn inverse_from_doc(doc: &InverseSystemDoc) -> Result<InverseSystem, DocError> {
    let points = &doc.poset.points;
    let find = |l: &String| points.iter().position(|p| p == l).ok_or_else(|| DocError::UnknownPoint(l.clone()));
    let gens: Vec<(usize, usize)> =
        doc.poset.leq.iter().map(|(a, b)| Ok((find(a)?, find(b)?))).collect::<Result<_, DocError>>()?;
    let poset = DirectedPoset::new(points.clone(), &gens)?;
    if let Some(extra) = doc.levels.keys().find(|k| !points.contains(k)) {
        return Err(DocError::UnknownPoint(extra.clone()));
    }
    let levels: Vec<SepSystem> = points
        .iter()
        .map(|p| system_from_doc(doc.levels.get(p).ok_or_else(|| DocError::MissingLevel(p.clone()))?))
        .collect::<Result<_, _>>()?;
    let mut bonds = BTreeMap::new();
    for b in &doc.bonds {
        let (q, p) = (find(&b.upper)?, find(&b.lower)?);
        let (up, low) = (&levels[q], &levels[p]);
        let mut table: Vec<Option<Elem>> = vec![None; up.len()];
        for (x, y) in &b.map {
            let xe = up.find(x).ok_or_else(|| DocError::UnknownLabel { level: b.upper.clone(), label: x.clone() })?;
            let ye = low.find(y).ok_or_else(|| DocError::UnknownLabel { level: b.lower.clone(), label: y.clone() })?;
            table[xe.0] = Some(ye);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| DocError::IncompleteBond {
                    upper: b.upper.clone(),
                    lower: b.lower.clone(),
                    label: up.label(Elem(i)).into(),
                })
            })
            .collect::<Result<_, _>>()?;
        bonds.insert((q, p), table);
    }
    Ok(InverseSystem::new(poset, levels, bonds)?)
}

pub fn set_from_labels(s: &SepSystem, labels: &[String]) -> Result<ElemSet, DocError> {
    labels
        .iter()
        .map(|l| s.find(l).ok_or_else(|| DocError::UnknownLabel { level: "limit".into(), label: l.clone() }))
        .collect()
}

pub fn stars_from_doc(s: &SepSystem, doc: &StarFamilyDoc) -> Result<Vec<ElemSet>, DocError> {
    doc.iter().map(|st| set_from_labels(s, st)).collect()
}

pub fn stars_doc(s: &SepSystem, stars: &[ElemSet]) -> StarFamilyDoc {
    stars.iter().map(|st| s.set_labels(st)).collect()
}

pub fn parse_any(text: &str) -> Result<AnyDoc, DocError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{random_contraction_chain, random_system};

    #[test]
    fn system_round_trip() {
        for seed in 0..20 {
            let s = random_system(seed, 4, 0.3, 0.2);
            let doc = system_doc(&s);
            let text = serde_json::to_string(&doc).unwrap();
            let back = system_from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(system_doc(&back), doc);
            assert!(s.elements().all(|a| s.elements().all(|b| s.leq(a, b) == back.leq(a, b))));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let c = random_contraction_chain(5, 3, 4);
        let doc = inverse_doc(&c.system);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let AnyDoc::Inverse(parsed) = parse_any(&text).unwrap() else { panic!("wrong kind") };
        let back = inverse_from_doc(&parsed).unwrap();
        assert_eq!(inverse_doc(&back), doc);
    }

    #[test]
    fn cyclic_order_rejected() {
        let text = r#"{"elements":["a","a*","b","b*"],"inverse":[["a","a*"],["b","b*"]],"leq":[["a","b"],["b","a"]]}"#;
        let AnyDoc::System(doc) = parse_any(text).unwrap() else { panic!("wrong kind") };
        assert!(matches!(system_from_doc(&doc), Err(DocError::System(SystemError::CycleError(..)))));
    }
}
