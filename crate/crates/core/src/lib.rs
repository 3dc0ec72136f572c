//! Reduction theory of indefinite binary quadratic forms over `Z[lambda_p]`,
//! `lambda_p = 2cos(pi/p)`, for the Hecke groups `G_p`.
//!
//! The crate is layered bottom-up:
//!
//! - [`ring`]: exact arithmetic in `Q(lambda_p)` with decidable order.
//! - [`surd`]: real quadratic irrationalities over `Q(lambda_p)`.
//! - [`group`]: Hecke group matrices, fixed points and powers of `U = ST`.
//! - [`cf`]: negative lambda-continued fractions (next-multiple algorithm).
//! - [`bqf`]: forms, reduction cycles, equivalence, simple forms and `Phi_p`.
//! - [`text`] and [`json`]: the text grammars and JSON encodings.
//! - [`sweep`]: batch invariant checks over many group words, run in
//!   parallel when the `parallel` feature is enabled.

pub mod bqf;
pub mod cf;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod json;
pub mod parallel;
pub mod ring;
pub mod surd;
pub mod sweep;
pub mod text;

pub use bqf::{QForm, ReducedCycle, ReductionTrace, SimpleMember, SimpleOrbit};
pub use cf::{ExpansionTrace, PeriodicCf};
pub use error::{Error, Result};
pub use group::{Classification, FixedPoints, GroupElem};
pub use ring::{FieldContext, FieldOptions, RingElem};
pub use surd::{ExtendedPoint, Surd};

/// Default iteration guard for expansions, reductions and orbits.
pub const DEFAULT_MAX_STEPS: usize = 10_000;
