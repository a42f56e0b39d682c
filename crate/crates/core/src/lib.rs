//! Frequentist and objective-Bayesian inference for the two-parameter
//! Dhillon lifetime distribution.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: root finding, quadrature, incomplete beta, `J(beta)`.
//! - [`dist`]: density, survival, hazard, quantile, moments, mean residual life.
//! - [`mle`]: likelihood, score, Fisher information, MLE and method of moments.
//! - [`bayes`]: objective priors, posterior guards, Metropolis–Hastings,
//!   Geweke diagnostics, posterior and predictive summaries.
//! - [`compare`]: Weibull and Gamma fits, AIC/BIC/AICc, empirical survival.
//! - [`simstudy`]: replicated bias/MSE/coverage studies.

pub mod bayes;
pub mod compare;
pub mod dataset;
pub mod dist;
pub mod error;
pub mod mle;
pub mod numerics;
pub mod rng;
pub mod simstudy;

pub use dataset::Dataset;
pub use dist::{DhillonParams, HazardKind, HazardShape};
pub use error::{Error, Result};
