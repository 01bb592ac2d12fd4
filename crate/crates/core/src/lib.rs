//! Value-at-Risk and Conditional Value-at-Risk for Gaussian and Student-T
//! return models.
//!
//! Under either model the risk of a position with mean `mu` and standard
//! deviation `sigma` takes the form `-mu + psi(u) * sigma`, where the loss
//! multiplier `psi` depends only on the distribution, the risk measure and the
//! tail level `u`. The crate provides:
//!
//! * [`special`]: log-gamma, the normal distribution and the regularized
//!   incomplete beta function with its inverse.
//! * [`tquantile`]: Student-T density, CDF and quantile for real degrees of
//!   freedom (closed forms, inverse-beta route and a deep-tail series).
//! * [`risk`]: the four `psi` multipliers, VaR/CVaR and the kurtosis helper.
//! * [`portfolio`]: the mean-SD risk objective over the long-only simplex,
//!   its minimization and efficient-frontier sampling.
//! * [`mc_oracle`]: seeded Monte Carlo samplers and empirical estimators used
//!   to cross-check every analytic quantity.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod mc_oracle;
pub mod portfolio;
pub mod risk;
pub mod special;
pub mod tquantile;

pub use error::{Error, Result};
pub use portfolio::{
    OptimizationResult, PortfolioProblem, SolverOptions, WeightVector, frontier, optimize,
};
pub use risk::{Distribution, Measure, MomentParams, RiskSpec, psi};
pub use special::{BetaParams, Probability};
pub use tquantile::DegreesOfFreedom;
