//! Critical-point structure of bivariate missing-data likelihoods.
//!
//! The Gaussian side finds all complex critical points of the observed-data
//! likelihood by homotopy continuation (the root count is nine for generic
//! data), classifies them as real / statistically relevant / local maxima,
//! and reproduces the censoring-scenario experiments. The multinomial side
//! computes the corresponding root count exactly: poly-Bernoulli
//! combinatorics on one route, an exact-LP census of bounded regions of the
//! margin hyperplane arrangement on the other, with EM fits and per-region
//! critical points cross-checking both.
//!
//! Numeric code is generic over the scalar type through [`Real`]; the usual
//! double-precision instantiations are aliased at the crate root.

// pub mod arrangement;
pub mod combinatorics;
pub mod critical;
pub mod em;
pub mod error;
pub mod homotopy;
pub mod likelihood;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod scalar;
#[cfg(test)]
pub(crate) mod testutil;
// pub mod scenarios;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the main domain types.
pub type Dataset64 = model::Dataset<f64>;
pub type SuffStats64 = model::SuffStats<f64>;
pub type GaussianParams64 = model::GaussianParams<f64>;
pub type CountTable64 = model::CountTable<f64>;
pub type ProbTable64 = model::ProbTable<f64>;
pub type ScoreVector64 = likelihood::ScoreVector<f64>;
pub type PolySystem64 = critical::PolySystem<f64>;
pub type CriticalPoint64 = homotopy::CriticalPoint<f64>;
pub type SolveReport64 = homotopy::SolveReport<f64>;
pub type SolverConfig64 = homotopy::SolverConfig<f64>;
pub type EmTrace64 = em::EmTrace<model::GaussianParams<f64>, f64>;
// pub type ScenarioSpec64 = scenarios::ScenarioSpec<f64>;
// pub type Histogram64 = scenarios::Histogram;
