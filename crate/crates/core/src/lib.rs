//! Exact decision-theoretic analysis for domain generalization on finite
//! supports.
//!
//! Everything here operates on a finite joint law over four axes: feature
//! points `X`, class labels `Y`, an observable metadata symbol `M`, and an
//! unobserved domain symbol `D`. Distributions are built in factored form
//! (domain weights, metadata emission per domain, feature/label table per
//! domain), which bakes in the structural assumption that metadata tells you
//! nothing about `(X, Y)` once the domain is known.
//!
//! On top of that representation the crate computes, in closed form with no
//! sampling:
//!
//! * the three Bayes classifiers that see `x`, `(x, m)` and `(x, d)`
//!   respectively, their risks, and the gaps between them ([`bayes`]);
//! * sandwich bounds on those gaps from posterior margins and classifier
//!   disagreement, plus membership certificates for posterior-drift and
//!   covariate-shift instance classes ([`bayes`]);
//! * named instance families used by the test suites and the command-line
//!   driver ([`generators`]);
//! * a small empirical-risk-minimization lab: two-stage domain sampling and
//!   exact minimizers over table, threshold, and histogram function classes,
//!   with population risks evaluated exactly against the joint ([`erm`]).
//!
//! All types are plain immutable data after construction; callers may share
//! them freely across threads and parallelize at the instance or trial level.

pub mod bayes;
pub mod distribution;
pub mod erm;
pub mod generators;
pub mod seed;
pub mod specfile;
pub mod support;
pub mod tol;

mod textformat;

pub use distribution::{Condition, FactoredDistribution, JointTable, MarginalTable};
pub use support::{Axis, Support};
