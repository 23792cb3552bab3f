//! Finite Lorentzian pre-length spaces and the Gromov–Hausdorff style
//! constructions built on them: diamond nets, correspondences, limits,
//! curvature comparison, measures and causal sets.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod causet;
pub mod corr;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod limits;
pub mod measured;
pub mod nets;
pub mod space;
pub mod tail;
pub mod time;

pub use error::{AxiomViolation, Error, Result};
pub use space::{CoveredFiniteSpace, FiniteLorentzSpace, LorentzSpace};
pub use time::ExtendedTime;
