use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dist::DhillonParams;
use crate::mle::log_likelihood;

/// Objective priors for `(beta, theta)`.
///
/// Jeffreys' prior and the reference prior (under either parameter
/// ordering) share the kernel `1 / (beta theta)`. The maximal data
/// information prior has kernel `beta theta^(1/beta)` and never yields a
/// proper posterior for this model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    JeffreysReference,
    Mdip,
}

impl Prior {
    /// Unnormalized log density.
    pub fn log_density(&self, p: &DhillonParams) -> f64 {
        match self {
            Prior::JeffreysReference => -p.beta.ln() - p.theta.ln(),
            Prior::Mdip => p.beta.ln() + p.theta.ln() / p.beta,
        }
    }
}

pub fn log_prior(prior: Prior, p: &DhillonParams) -> f64 {
    prior.log_density(p)
}

/// Unnormalized log posterior: `log_prior + log_likelihood`.
pub fn log_posterior(prior: Prior, p: &DhillonParams, d: &Dataset) -> f64 {
    prior.log_density(p) + log_likelihood(p, d)
}

/// Posterior-existence conditions for a prior/dataset pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub posterior_proper: bool,
    pub beta_moments_finite: bool,
    pub theta_mean_guaranteed: bool,
    pub messages: Vec<String>,
}

/// Checks the sufficient conditions for a proper posterior and finite
/// posterior moments.
///
/// Under the Jeffreys/reference prior the posterior is proper (and all
/// moments of `beta` finite) iff `n >= 2` with at least two distinct times.
/// The posterior mean of `theta` is guaranteed when at least one time is
/// below 1 and at least two exceed 1; with `n = 2` and both times below 1
/// it is infinite.
pub fn check_validity(prior: Prior, d: &Dataset) -> ValidityReport {
    let mut messages = Vec::new();
    if prior == Prior::Mdip {
        messages.push(
            "the maximal data information prior gives an improper posterior for every sample size; \
             its normalizing integral diverges in the theta direction"
                .to_string(),
        );
        return ValidityReport {
            posterior_proper: false,
            beta_moments_finite: false,
            theta_mean_guaranteed: false,
            messages,
        };
    }

    let n = d.n();
    let mut proper = true;
    if n < 2 {
        proper = false;
        messages.push(format!(
            "posterior is improper: need at least 2 observations, got {n}"
        ));
    } else if d.is_degenerate() {
        proper = false;
        messages.push("posterior is improper: all observations are equal".to_string());
    }

    let below = d.times().iter().filter(|&&t| t < 1.0).count();
    let above = d.times().iter().filter(|&&t| t > 1.0).count();
    let theta_mean = proper && below >= 1 && above >= 2;
    if proper && !theta_mean {
        if below == 0 {
            messages.push(
                "posterior mean of theta is not guaranteed: no observation is below 1".to_string(),
            );
        }
        if above < 2 {
            messages.push(format!(
                "posterior mean of theta is not guaranteed: {above} observation(s) above 1, need at least 2"
            ));
        }
        if n == 2 && above == 0 && below == 2 {
            messages.push(
                "posterior mean of theta is infinite: n = 2 with both observations below 1".to_string(),
            );
        }
    }

    ValidityReport {
        posterior_proper: proper,
        beta_moments_finite: proper,
        theta_mean_guaranteed: theta_mean,
        messages,
    }
}
