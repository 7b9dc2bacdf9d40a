//! Weighted variance-based uncertainty relations for finite-dimensional
//! observables on pure states.
//!
//! The crate evaluates the classic product bounds (Robertson, Schrödinger), the
//! Maccone-Pati sum bounds, and weighted sum bounds for pairs and n-tuples of
//! observables, each as a [`BoundReport`] with a term-by-term breakdown. The
//! exact parallelogram-type identities the bounds descend from are exposed as
//! residual checks, and [`fuzz`] drives every relation over seeded random
//! instances.
//!
//! Modules, bottom up:
//!
//! - [`linalg`]: dense complex vectors and matrices.
//! - [`state`]: pure states, observables, expectations, variances, perpendicular states.
//! - [`pair`]: two-observable bounds.
//! - [`multi`]: n-observable bounds.
//! - [`optimize`]: λ scans, the error function, extremal points.
//! - [`sampling`]: seeded random states/observables and the spin-1 fixture.
//! - [`instance`], [`sweep`], [`fuzz`], [`cli`]: file formats and drivers behind the `wunc` CLI.
//! - [`dd`]: double-double helpers for checks at extreme weight ratios.

#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dd;
pub mod error;
pub mod fuzz;
pub mod instance;
pub mod linalg;
pub mod multi;
pub mod optimize;
pub mod pair;
pub mod report;
pub mod sampling;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
pub use report::BoundReport;
pub use state::{Observable, Perp, PerpChoice, PureState};
