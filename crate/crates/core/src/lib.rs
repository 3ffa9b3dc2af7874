//! Maximizing monotone submodular objectives under monotone supermodular cost
//! constraints.
//!
//! The crate is organized around the [`SetFunction`] trait. Everything else
//! consumes set functions through it:
//!
//! * [`setfn`]: subsets, memoized oracles, exhaustive structure checks and
//!   exact curvature computation.
//! * [`families`]: weighted coverage, power and edge-count costs, and the
//!   adversarial tightness instance.
//! * [`greedy`]: the ratio-marginal greedy with its stopping policies and the
//!   baseline heuristics.
//! * [`bounds`]: closed-form approximation guarantees.
//! * [`exact`]: brute-force primal/dual optima and the Pareto frontier.
//! * [`dual`]: binary search over budgets for cost minimization.
//! * [`debate`]: the multi-agent debate simulator.
//! * [`bench`]: algorithm comparisons and theorem fuzzing.

// `!(x > 0.0)` is how parameter checks reject NaN along with bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bounds;
pub mod debate;
pub mod dual;
mod error;
pub mod exact;
pub mod families;
pub mod greedy;
mod par;
pub mod setfn;
mod subset;

pub use error::{Error, Result};
pub use setfn::{FnKind, Oracle, SetFunction};
pub use subset::Subset;
