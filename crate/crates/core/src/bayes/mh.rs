//! Two-block Metropolis–Hastings with Gamma random-walk proposals.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::geweke::{geweke_z, MIN_GEWEKE_LEN};
use super::prior::{check_validity, Prior};
use crate::dataset::Dataset;
use crate::dist::{log1p_exp, DhillonParams};
use crate::error::{Error, Result};
use crate::mle::initial_values;
use crate::numerics::normal_quantile;
use crate::rng::stream_rng;

/// Iterations between proposal-shape adjustments during burn-in.
pub const TUNE_WINDOW: usize = 100;
const TARGET_LOW: f64 = 0.2;
const TARGET_HIGH: f64 = 0.4;
const SHAPE_UP: f64 = 1.5;
const SHAPE_DOWN: f64 = 0.66;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Shape of the Gamma proposal for `beta`; larger means smaller steps.
    pub a_beta: f64,
    pub a_theta: f64,
    pub seed: u64,
    pub geweke_level: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            iterations: 5500,
            burn_in: 500,
            thin: 5,
            a_beta: 50.0,
            a_theta: 50.0,
            seed: 0,
            geweke_level: 0.95,
        }
    }
}

impl McmcConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of retained draws, `(iterations - burn_in) / thin`.
    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if self.retained() == 0 {
            return Err(Error::InvalidConfig("configuration retains no draws".into()));
        }
        for (name, a) in [("a_beta", self.a_beta), ("a_theta", self.a_theta)] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} = {a} must be positive")));
            }
        }
        if !(self.geweke_level > 0.0 && self.geweke_level < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "geweke_level = {} must lie in (0, 1)",
                self.geweke_level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcChain {
    pub draws: Vec<DhillonParams>,
    pub accept_rate_beta: f64,
    pub accept_rate_theta: f64,
    /// `NaN` (serialized as `null`) when the diagnostic could not be computed.
    pub geweke_z_beta: f64,
    pub geweke_z_theta: f64,
    pub passed_geweke: bool,
    pub seed: u64,
    /// Proposal shapes after burn-in tuning.
    pub tuned_a_beta: f64,
    pub tuned_a_theta: f64,
}

impl McmcChain {
    pub fn betas(&self) -> Vec<f64> {
        self.draws.iter().map(|p| p.beta).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.draws.iter().map(|p| p.theta).collect()
    }

    /// Chain built from externally supplied draws, with no sampler metadata.
    pub fn from_draws(draws: Vec<DhillonParams>) -> Self {
        Self {
            draws,
            accept_rate_beta: f64::NAN,
            accept_rate_theta: f64::NAN,
            geweke_z_beta: f64::NAN,
            geweke_z_theta: f64::NAN,
            passed_geweke: false,
            seed: 0,
            tuned_a_beta: f64::NAN,
            tuned_a_theta: f64::NAN,
        }
    }
}

/// Unnormalized log density on the positive quadrant.
pub trait LogTarget {
    fn log_density(&self, beta: f64, theta: f64) -> f64;
}

/// Log posterior of the Dhillon model under an objective prior.
#[derive(Debug, Clone)]
pub struct PosteriorTarget {
    prior: Prior,
    log_times: Vec<f64>,
    sum_log_times: f64,
}

impl PosteriorTarget {
    pub fn new(prior: Prior, d: &Dataset) -> Self {
        let log_times: Vec<f64> = d.times().iter().map(|t| t.ln()).collect();
        let sum_log_times = log_times.iter().sum();
        Self { prior, log_times, sum_log_times }
    }
}

impl LogTarget for PosteriorTarget {
    fn log_density(&self, beta: f64, theta: f64) -> f64 {
        let n = self.log_times.len() as f64;
        let (lb, lt) = (beta.ln(), theta.ln());
        let tail: f64 = self.log_times.iter().map(|&x| log1p_exp(lt + beta * x)).sum();
        let loglik = n * (lb + lt) + (beta - 1.0) * self.sum_log_times - 2.0 * tail;
        let prior = match self.prior {
            Prior::JeffreysReference => -lb - lt,
            Prior::Mdip => lb + lt / beta,
        };
        loglik + prior
    }
}

/// Log density of `Gamma(shape a, rate a / y)` at `x`, without `ln Gamma(a)`.
#[inline]
pub fn log_proposal(x: f64, y: f64, a: f64) -> f64 {
    a * a.ln() - a * y.ln() + (a - 1.0) * x.ln() - a * x / y
}

/// Log acceptance ratio for moving from `current` to `proposed`.
#[inline]
pub fn log_acceptance(lp_current: f64, lp_proposed: f64, current: f64, proposed: f64, a: f64) -> f64 {
    lp_proposed - lp_current + log_proposal(current, proposed, a) - log_proposal(proposed, current, a)
}

fn gamma_step<R: Rng + ?Sized>(rng: &mut R, x: f64, a: f64) -> f64 {
    match Gamma::new(a, x / a) {
        Ok(g) => g.sample(rng),
        Err(_) => f64::NAN,
    }
}

/// Runs the sampler on an arbitrary target. Each iteration updates `theta`
/// and then `beta`; proposal shapes are tuned every [`TUNE_WINDOW`]
/// iterations during burn-in and frozen afterwards.
pub fn sample_target<T: LogTarget>(target: &T, init: DhillonParams, cfg: &McmcConfig) -> Result<McmcChain> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, 0);
    let (mut beta, mut theta) = (init.beta, init.theta);
    let mut lp = target.log_density(beta, theta);
    if !lp.is_finite() {
        return Err(Error::Domain(format!(
            "log target is not finite at the starting point ({beta}, {theta})"
        )));
    }

    let (mut a_beta, mut a_theta) = (cfg.a_beta, cfg.a_theta);
    let (mut win_beta, mut win_theta) = (0usize, 0usize);
    let (mut acc_beta, mut acc_theta) = (0usize, 0usize);
    let mut draws = Vec::with_capacity(cfg.retained());

    for j in 0..cfg.iterations {
        let theta_prop = gamma_step(&mut rng, theta, a_theta);
        let u: f64 = rng.random();
        let mut accepted_theta = false;
        if theta_prop > 0.0 && theta_prop.is_finite() {
            let lp_prop = target.log_density(beta, theta_prop);
            if lp_prop.is_finite() && u.ln() < log_acceptance(lp, lp_prop, theta, theta_prop, a_theta) {
                theta = theta_prop;
                lp = lp_prop;
                accepted_theta = true;
            }
        }

        let beta_prop = gamma_step(&mut rng, beta, a_beta);
        let u: f64 = rng.random();
        let mut accepted_beta = false;
        if beta_prop > 0.0 && beta_prop.is_finite() {
            let lp_prop = target.log_density(beta_prop, theta);
            if lp_prop.is_finite() && u.ln() < log_acceptance(lp, lp_prop, beta, beta_prop, a_beta) {
                beta = beta_prop;
                lp = lp_prop;
                accepted_beta = true;
            }
        }

        if j < cfg.burn_in {
            win_theta += accepted_theta as usize;
            win_beta += accepted_beta as usize;
            if (j + 1) % TUNE_WINDOW == 0 {
                a_theta = tune(a_theta, win_theta);
                a_beta = tune(a_beta, win_beta);
                win_theta = 0;
                win_beta = 0;
            }
        } else {
            acc_theta += accepted_theta as usize;
            acc_beta += accepted_beta as usize;
            if (j + 1 - cfg.burn_in) % cfg.thin == 0 {
                draws.push(DhillonParams { beta, theta });
            }
        }
    }

    let post = (cfg.iterations - cfg.burn_in) as f64;
    let mut chain = McmcChain {
        draws,
        accept_rate_beta: acc_beta as f64 / post,
        accept_rate_theta: acc_theta as f64 / post,
        geweke_z_beta: f64::NAN,
        geweke_z_theta: f64::NAN,
        passed_geweke: false,
        seed: cfg.seed,
        tuned_a_beta: a_beta,
        tuned_a_theta: a_theta,
    };
    apply_geweke(&mut chain, cfg.geweke_level);
    Ok(chain)
}

fn tune(a: f64, accepted: usize) -> f64 {
    let rate = accepted as f64 / TUNE_WINDOW as f64;
    if rate < TARGET_LOW {
        a * SHAPE_UP
    } else if rate > TARGET_HIGH {
        a * SHAPE_DOWN
    } else {
        a
    }
}

/// Fills the Geweke fields; a chain too short or stuck fails the check.
fn apply_geweke(chain: &mut McmcChain, level: f64) {
    if chain.draws.len() < MIN_GEWEKE_LEN {
        return;
    }
    let zb = geweke_z(&chain.betas(), 0.1, 0.5).unwrap_or(f64::NAN);
    let zt = geweke_z(&chain.thetas(), 0.1, 0.5).unwrap_or(f64::NAN);
    let crit = normal_quantile(0.5 + level / 2.0);
    chain.geweke_z_beta = zb;
    chain.geweke_z_theta = zt;
    chain.passed_geweke = zb.abs() < crit && zt.abs() < crit;
}

/// Samples the posterior of `(beta, theta)` for `d` under `prior`.
///
/// Refuses to run when the posterior is improper. The chain starts at the
/// method-of-moments estimate (or `(1, 1/median)` when that is infeasible).
pub fn run_mh(prior: Prior, d: &Dataset, cfg: &McmcConfig) -> Result<McmcChain> {
    let report = check_validity(prior, d);
    if !report.posterior_proper {
        return Err(Error::ImproperPosterior(report.messages.join("; ")));
    }
    let target = PosteriorTarget::new(prior, d);
    sample_target(&target, initial_values(d), cfg)
}
