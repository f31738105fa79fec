//! Computational toolkit for stability conditions on local P².
//!
//! * [`ktheory`]: Chern triples, Euler pairings, spherical twists, Γ₁(3) words
//!   and the braid-group action on exceptional triples.
//! * [`exceptional`]: exceptional slopes via the ε-recursion, the
//!   Drézet–Le Potier boundary and the existence criterion.
//! * [`chamber`]: central charges, the geometric chamber, the path γ, support
//!   constants, walls and semicircles.
//! * [`mirror`]: Picard–Fuchs series, the mirror map in both charts,
//!   monodromy, ODE transport and the mirror-side verification sweep.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chamber;
pub mod error;
pub mod exceptional;
pub mod ktheory;
pub mod mirror;

pub use error::{Error, Result};
