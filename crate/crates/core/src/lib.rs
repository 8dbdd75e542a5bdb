//! Simultaneous approximation of a real number by all conjugates of an
//! algebraic number.
//!
//! The pipeline takes a real irrational ξ, walks its continued fraction
//! convergents, builds an explicit unimodular basis of integer polynomials
//! at each convergent, rounds a real target in that basis to an Eisenstein
//! polynomial whose roots cluster around ξ, and certifies the resulting
//! conjugate distances with interval arithmetic.

pub mod cf;
pub mod constructor;
pub mod error;
pub mod format;
pub mod interval;
pub mod linalg;
pub mod minima;
pub mod poly;
pub mod roots;
mod serde_util;
pub mod verifier;
pub mod xi;

pub use cf::{convergents, is_badly_approximable, BadlyApproximable, Convergent};
pub use constructor::{
    construct, construct_family, construct_p, construct_q, ConstructionRecord, Kind,
};
pub use error::{Error, Result};
pub use interval::Interval;
pub use minima::{probe_minima, MinimaReport};
pub use poly::IntPoly;
pub use roots::{
    all_roots, approximant_for, conjugate_distances, AlgebraicApproximant, RootEnclosure,
};
pub use verifier::{sweep, verify_family, FamilyReport, SweepReport};
pub use xi::XiSpec;
