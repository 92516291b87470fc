//! Computations with two- and three-stage mod 2 Postnikov towers built
//! from products of Eilenberg–Mac Lane spaces `K((Z/2)^s, n)`.
//!
//! The layers, bottom up: F2 linear algebra, the Steenrod algebra,
//! cohomology of Eilenberg–Mac Lane products, the Serre spectral
//! sequence of a two-stage tower, orbit counting under automorphisms,
//! and the lifting-space description of the third stage.

pub mod classify;
pub mod em_cohomology;
pub mod error;
pub mod f2linalg;
pub mod lifts;
pub mod serre_ss;
pub mod steenrod;

pub use em_cohomology::{
    CohomologyClass, EMGenerator, Factor, Monomial, Poly, SpaceDescriptor,
};
pub use error::{Error, Result};
pub use f2linalg::{F2Matrix, F2Vector, Subspace};
pub use steenrod::{adem_reduce, AdmissibleSequence, SteenrodElement};
