//! Objective-Bayesian inference: priors, posterior guards, the sampler,
//! convergence diagnostics and posterior/predictive summaries.

pub mod geweke;
pub mod mh;
pub mod prior;
pub mod summary;

pub use geweke::{geweke_z, monte_carlo_se};
pub use mh::{run_mh, sample_target, LogTarget, McmcChain, McmcConfig, PosteriorTarget};
pub use prior::{check_validity, log_posterior, log_prior, Prior, ValidityReport};
pub use summary::{
    posterior_predictive, posterior_predictive_with, summarize, summarize_predictive, PosteriorSummary,
    PredictiveSummary,
};
