//! Selection algorithms, extremal constructions and numeric bounds for
//! Rado's covering problem: given a finite collection of homothetic convex
//! bodies, find a pairwise disjoint subcollection covering as large a
//! fraction of the union as possible.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: bodies (axis-parallel boxes, Euclidean balls, rotated
//!   rectangles), predicates, volumes and union volumes.
//! * [`oracle`]: exact maximum-volume disjoint subcollection by
//!   branch-and-bound on the intersection graph.
//! * [`selectors`]: constructive selection procedures, each returning a
//!   certified disjoint subcollection together with its density guarantee.
//! * [`constructions`]: extremal families and the Ajtai almost-counterexample.
//! * [`bounds`]: closed-form constants and the Kabatiansky-Levenshtein
//!   exponent minimisation.
//! * [`experiment`]: seeded random ensembles comparing selectors with the
//!   oracle.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod oracle;
pub mod selectors;

pub use error::{Error, Result};
pub use geometry::{Body, Collection, Point, Shape, VolumeEstimate, VolumeMethod};
pub use oracle::{Oracle, OracleResult};
pub use selectors::SelectionResult;
