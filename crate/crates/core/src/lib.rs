//! Nonlinear spectral gaps, average-distortion embeddings of finite metric
//! spaces, and the certificates that follow from them.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`]: finite metric spaces, ℓp hosts, weights, snowflakes.
//! * [`markov`]: reversible kernels and their spectra.
//! * [`graph`]: graph families, BFS metrics, Cayley graphs of SL_k(F_q).
//! * [`gap`]: Rayleigh quotients, gap searches, extrapolation checks.
//! * [`mazur`]: the fractional normalization maps `f_ω` and their constants.
//! * [`embed`]: snowflake self-embeddings, line embeddings, exponent changes.
//! * [`boost`]: the centering solver behind the Rayleigh-quotient boost.
//! * [`certify`]: dimension and average-distortion lower bounds.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boost;
pub mod certify;
pub mod embed;
pub mod error;
pub mod gap;
pub mod graph;
pub mod linalg;
pub mod markov;
pub mod mazur;
pub mod metric;
pub mod sample;

pub use error::{Error, Result};
pub use graph::{Graph, GraphFamily, GroupElement};
pub use linalg::Matrix;
pub use markov::{Spectrum, StochasticKernel};
pub use metric::{Exponent, FiniteMetricSpace, NormedHost, PointConfig, ProbabilityWeights};
