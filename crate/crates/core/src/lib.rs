//! Abstract separation systems: finite systems, inverse systems and their
//! profinite limits, transfer of splitting stars along bonds, the
//! tree-set compactness construction, and set separations of graphs.

pub mod compactness;
pub mod doc;
pub mod gallery;
pub mod graphsep;
pub mod inverse;
pub mod normality;
pub mod orient;
pub mod profinite;
pub mod search;
pub mod suites;
pub mod system;
pub mod testkit;

pub use inverse::{DirectedPoset, InverseError, InverseSystem, Limit, SystemHom};
pub use system::{Elem, ElemSet, SepSystem, SystemError};
