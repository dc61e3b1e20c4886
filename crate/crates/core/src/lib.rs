//! Symplectic capacities of convex bodies and their p-products.
//!
//! The crate computes, at desk scale:
//!
//! - gauge/support oracles for standard convex bodies (balls, ellipsoids,
//!   polydiscs, boxes) and their symplectic p-products ([`bodies`]),
//! - toric domains given by a profile in the nonnegative orthant and the
//!   two profile functionals `h_Ω` and `[v]_Ω` ([`toric`]),
//! - Gutt-Hutchings capacities of convex/concave toric domains by lattice
//!   optimization, together with the p-product combination formula ([`gh`]),
//! - the EHZ capacity: closed-form p-product rules, characteristic gluing,
//!   and a Clarke-dual spectral solver for smooth bodies ([`ehz`]),
//! - exact and Monte-Carlo volumes, systolic ratios and the p-product
//!   systolic inequality ([`systolic`]),
//! - capacity-sequence combinatorics: merged sequences, the min-max
//!   identity, and the higher-order p-product evaluator ([`seqcomb`]).
//!
//! Every theorem-shaped statement has a corresponding check in [`verify`];
//! the `caplab` binary exposes them as `caplab verify`.
//!
//! Conventions: the phase space is `R^{2n}` with coordinates paired as
//! `(q_1, p_1, ..., q_n, p_n)`, symplectic form `dq ∧ dp`, and the
//! area-normalized bodies of the capacity literature: `B^{2n}[r]` is the
//! ball whose defining disc factors have area `r`, so `c(B^{2n}[r]) = r`
//! and `Vol(B^{2n}[r]) = r^n/n!`.

pub mod bodies;
mod concurrency;
pub mod ehz;
pub mod exponent;
pub mod gh;
pub mod report;
mod rng_util;
pub mod seqcomb;
pub mod special;
pub mod specfile;
pub mod systolic;
pub mod toric;
pub mod verify;

pub use bodies::{BodyKind, BodyOracle, PProductSpec};
pub use exponent::PExponent;
pub use report::{CheckOutcome, CheckStatus, VerificationReport};
pub use seqcomb::CapacitySequence;
pub use toric::{Convexity, ProfileShape, ToricProfile};
