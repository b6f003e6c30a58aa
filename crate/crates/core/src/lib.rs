//! Proximity operators of perspective functions.
//!
//! For a proper lower-semicontinuous convex `f` on `R^n`, the perspective is
//! `f~(x, eta) = eta f(x / eta)` for `eta > 0`, the recession function of `f`
//! at `eta = 0` and `+inf` for `eta < 0`. [`engine::prox_perspective`]
//! computes `prox_{gamma f~}` for any [`catalog::BaseFunction`] using only the
//! conjugate `f*`, its prox and the projection onto `cl dom f*`, at the cost of
//! one monotone scalar root search.
//!
//! Modules:
//!
//! * [`numerics`]: bisection, Lambert `W0`, simplex projection;
//! * [`catalog`]: the base function contract and concrete functions;
//! * [`engine`]: the general prox, plus closed forms used as cross-checks;
//! * [`radial`]: the reduction for `f = phi(|x|)`;
//! * [`oracle`]: brute-force reference and residual certificates;
//! * [`verify`]: randomized verification suites.

// `!(x > 0.0)` is used on purpose so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod engine;
pub mod error;
pub mod ext_real;
pub mod numerics;
pub mod oracle;
pub mod radial;
pub mod verify;

pub use catalog::{BaseFunction, FunctionSpec};
pub use engine::{prox_perspective, ProxCase, ProxQuery, ProxResult};
pub use error::{Error, Result};
pub use ext_real::ExtReal;
pub use numerics::SolverConfig;
