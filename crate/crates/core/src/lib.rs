//! Exact-arithmetic workbench for finite fragments of three constructions of
//! Boolean algebras carrying strictly positive measures: almost disjoint
//! families over the Cantor space, slalom algebras, and Bell's tree algebra.
//!
//! All numeric results are exact [`rational::Rational`] values.

pub mod ad;
pub mod bell;
pub mod budget;
pub mod cantor;
pub mod density;
pub mod kelley;
pub mod rational;
pub mod report;
pub mod slalom;
pub mod suites;
