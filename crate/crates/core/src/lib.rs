//! Exact computation with the super Virasoro algebras `SVir[0]`, `SVir[1/2]`
//! and the super W(2,2) algebra: graded brackets, superderivations,
//! annihilators inside finite windows, and globalization of 2-local
//! superderivations with checkable certificates.

pub mod algebra;
pub mod annihilator;
pub mod cli;
pub mod derivations;
pub mod expr;
pub mod linalg;
pub mod reproductions;
pub mod two_local;

pub use algebra::{bracket, BasisVector, Element, Family, Index, Kind, Parity};
pub use annihilator::{annihilator_basis, DerivationSpace, GradedWindow};
pub use derivations::{leibniz_defect, LocalMap, RawLinearMap, SuperDerivation};
pub use linalg::{LabeledMatrix, Rational};
