//! Exact two-state (c-free) noncommutative probability.
//!
//! Moment–cumulant transforms for a pair of states (φ, ψ), free and c-free
//! convolution, the quadratic-regression transform with its limit laws, and
//! the machinery behind the two-state central limit theorem.
//!
//! All computations are generic over [`Scalar`]; the aliases below fix the
//! two supported fields.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clt;
pub mod convolution;
pub mod cumulants;
pub mod error;
pub mod freeprod;
pub mod io;
pub mod lahalukacs;
pub mod laws;
pub mod scalar;
pub mod selftest;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{rat, Rational, Scalar, ScalarMode, DEFAULT_TOLERANCE};
pub use series::{AnySeries, TruncatedSeries};

pub type ExactSeries = TruncatedSeries<Rational>;
pub type FloatSeries = TruncatedSeries<f64>;
pub type ExactMoments = laws::MomentSequence<Rational>;
pub type FloatMoments = laws::MomentSequence<f64>;
pub type ExactLaw = laws::TwoStateLaw<Rational>;
pub type FloatLaw = laws::TwoStateLaw<f64>;
