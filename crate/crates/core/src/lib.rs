//! Measure algebras on the coset space of a finite group.
//!
//! `M(G/H)` is the space of complex measures on `G/H`. It carries a
//! convolution pulled back from `M(G)` through the averaging operator
//! `P_H`, which on a finite group is encoded by an exact table of hypergroup
//! structure constants. The [`verifier`] module checks the algebraic
//! identities of this construction on concrete groups.

pub mod groups;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod quotient_algebra;
pub mod quotient_ops;
pub mod verifier;

pub use groups::{FiniteGroup, GroupError, QuotientSpace, Subgroup};
pub use measures::{Carrier, CarrierKind, ComplexMeasure, Density, Measure, RationalMeasure};
pub use quotient_algebra::{quotient_convolve, structure_table, StructureTable};
pub use quotient_ops::{QuotientMeasure, RhoFunction};
