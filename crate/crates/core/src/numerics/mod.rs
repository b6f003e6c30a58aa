//! Scalar kernels: monotone root finding, the principal Lambert W branch and
//! Euclidean projection onto the probability simplex.

mod lambert;
mod root;
mod simplex;

pub use lambert::{lambert_w0, lambert_w0_exp};
pub use root::{bisect_monotone, newton_bisect, Bracket, Root, SolverConfig};
pub use simplex::project_simplex;
