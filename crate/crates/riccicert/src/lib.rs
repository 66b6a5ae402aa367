//! riccicert: curvature positivity certification for warped product metrics
//! and exact characteristic-class arithmetic.
//!
//! The crate has two halves. The numerical half builds warped product metrics
//! from validated warping profiles, evaluates their curvature in closed form,
//! cross-checks against finite-difference oracles, and certifies positivity
//! over deformation paths with machine-checkable certificates. The exact half
//! computes Bernoulli numbers, multiplicative sequences and genera, orders of
//! groups of exotic spheres, and lens-space characteristic-class arithmetic,
//! all in arbitrary-precision rational arithmetic.

pub mod certify;
pub mod cli;
pub mod convexity;
pub mod curvature;
pub mod fixtures;
pub mod isotopy;
pub mod profiles;
pub mod rational;
pub mod topo;

pub use certify::{certify_positive, refine, Mode, PositivityCertificate, Rectangle, Verdict};
pub use curvature::{
    fd_ricci_oracle, ricci_doubly_warped, sectional_singly_warped, RicciDiagonal, WarpedMetric,
};
pub use profiles::{convex_combine, validate_closure, ClosureSpec, WarpProfile};
pub use rational::Rational;
