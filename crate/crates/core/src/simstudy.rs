//! Replicated simulation studies of estimator bias, MSE and interval
//! coverage.
//!
//! Every replicate owns its seeds, derived from the root seed, the sample
//! size and the replicate index, so results do not depend on scheduling.
//! Replicates run in parallel and are aggregated in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{run_mh, summarize, McmcConfig, Prior};
use crate::dataset::Dataset;
use crate::dist::DhillonParams;
use crate::error::{Error, Result};
use crate::mle::{fit_mle, fit_mom, MleOptions};
use crate::rng::{derive_seed, stream_rng};

/// Total sampler attempts per replicate before a Geweke-failing chain is
/// excluded.
pub const MAX_CHAIN_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub truth: DhillonParams,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub mcmc: McmcConfig,
    pub ci_level: f64,
    pub root_seed: u64,
}

impl SimScenario {
    pub fn new(truth: DhillonParams, n_values: Vec<usize>, replicates: usize, root_seed: u64) -> Self {
        Self { truth, n_values, replicates, mcmc: McmcConfig::default(), ci_level: 0.95, root_seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes given".into()));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("sample size {n} is below 2")));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidConfig(format!("ci_level = {} must lie in (0, 1)", self.ci_level)));
        }
        self.mcmc.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Estimator {
    #[serde(rename = "MM")]
    Mm,
    #[serde(rename = "MLE")]
    Mle,
    #[serde(rename = "Bayes")]
    Bayes,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Mm, Estimator::Mle, Estimator::Bayes];

    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Mm => "MM",
            Estimator::Mle => "MLE",
            Estimator::Bayes => "Bayes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Beta,
    Theta,
}

impl Parameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parameter::Beta => "beta",
            Parameter::Theta => "theta",
        }
    }
}

/// A point estimate with optional interval-coverage flags `(beta, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub params: DhillonParams,
    pub covers: Option<(bool, bool)>,
}

/// Everything one replicate contributes to the report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplicateOutcome {
    pub mm: Option<Estimate>,
    pub mle: Option<Estimate>,
    pub bayes: Option<Estimate>,
    /// Chains that failed the Geweke check in this replicate.
    pub geweke_failures: usize,
}

impl ReplicateOutcome {
    fn get(&self, e: Estimator) -> Option<&Estimate> {
        match e {
            Estimator::Mm => self.mm.as_ref(),
            Estimator::Mle => self.mle.as_ref(),
            Estimator::Bayes => self.bayes.as_ref(),
        }
    }
}

/// Identifies a replicate and carries its seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicateContext {
    pub n: usize,
    pub index: usize,
    pub root_seed: u64,
}

impl ReplicateContext {
    pub fn data_seed(&self) -> u64 {
        derive_seed(self.root_seed, &[self.n as u64, self.index as u64, 0])
    }

    /// Seed of the sampler for the given zero-based attempt.
    pub fn chain_seed(&self, attempt: usize) -> u64 {
        derive_seed(self.root_seed, &[self.n as u64, self.index as u64, 1 + attempt as u64])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub estimator: Estimator,
    pub parameter: Parameter,
    pub n: usize,
    pub bias: f64,
    pub mse: f64,
    pub cp: Option<f64>,
    pub geweke_fail_count: usize,
    /// Replicates contributing to the row.
    pub used: usize,
    /// Replicates dropped for this estimator.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: SimScenario,
    pub rows: Vec<SimRow>,
}

impl SimReport {
    pub fn row(&self, estimator: Estimator, parameter: Parameter, n: usize) -> Option<&SimRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.parameter == parameter && r.n == n)
    }
}

/// `(mean(x - truth), mean((x - truth)^2))`.
pub fn bias_mse(estimates: &[f64], truth: f64) -> Result<(f64, f64)> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = estimates.len() as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for &x in estimates {
        let e = x - truth;
        s1 += e;
        s2 += e * e;
    }
    Ok((s1 / n, s2 / n))
}

/// Runs the method of moments, maximum likelihood and the Bayesian
/// posterior median (Jeffreys/reference prior) on one simulated sample.
pub fn estimate_replicate(d: &Dataset, s: &SimScenario, ctx: &ReplicateContext) -> ReplicateOutcome {
    let truth = s.truth;
    let mut out = ReplicateOutcome::default();

    out.mm = fit_mom(d).params.map(|params| Estimate { params, covers: None });

    if let Ok(fit) = fit_mle(d, s.ci_level, &MleOptions::default()) {
        out.mle = Some(Estimate { params: fit.params, covers: Some(fit.covers(&truth)) });
    }

    for attempt in 0..MAX_CHAIN_ATTEMPTS {
        let cfg = McmcConfig { seed: ctx.chain_seed(attempt), ..s.mcmc };
        let Ok(chain) = run_mh(Prior::JeffreysReference, d, &cfg) else {
            break;
        };
        if !chain.passed_geweke {
            out.geweke_failures += 1;
            continue;
        }
        if let Ok(sum) = summarize(&chain, s.ci_level) {
            let inside = |ci: (f64, f64), x: f64| ci.0 <= x && x <= ci.1;
            out.bayes = Some(Estimate {
                params: DhillonParams { beta: sum.median.0, theta: sum.median.1 },
                covers: Some((inside(sum.ci_beta, truth.beta), inside(sum.ci_theta, truth.theta))),
            });
        }
        break;
    }
    out
}

pub fn run_scenario(s: &SimScenario) -> Result<SimReport> {
    run_scenario_with(s, estimate_replicate)
}

/// Runs a scenario with a caller-supplied per-replicate estimator.
pub fn run_scenario_with<F>(s: &SimScenario, estimate: F) -> Result<SimReport>
where
    F: Fn(&Dataset, &SimScenario, &ReplicateContext) -> ReplicateOutcome + Sync,
{
    s.validate()?;
    let mut rows = Vec::new();
    for &n in &s.n_values {
        let outcomes: Vec<ReplicateOutcome> = (0..s.replicates)
            .into_par_iter()
            .map(|index| {
                let ctx = ReplicateContext { n, index, root_seed: s.root_seed };
                let mut rng = stream_rng(ctx.data_seed(), 0);
                match s.truth.sample_with(n, &mut rng) {
                    Ok(d) => estimate(&d, s, &ctx),
                    Err(_) => ReplicateOutcome::default(),
                }
            })
            .collect();
        rows.extend(aggregate(&outcomes, s.truth, n));
    }
    Ok(SimReport { scenario: s.clone(), rows })
}

fn aggregate(outcomes: &[ReplicateOutcome], truth: DhillonParams, n: usize) -> Vec<SimRow> {
    let geweke: usize = outcomes.iter().map(|o| o.geweke_failures).sum();
    let mut rows = Vec::with_capacity(6);
    for est in Estimator::ALL {
        let kept: Vec<&Estimate> = outcomes.iter().filter_map(|o| o.get(est)).collect();
        for param in [Parameter::Beta, Parameter::Theta] {
            let (values, target): (Vec<f64>, f64) = match param {
                Parameter::Beta => (kept.iter().map(|e| e.params.beta).collect(), truth.beta),
                Parameter::Theta => (kept.iter().map(|e| e.params.theta).collect(), truth.theta),
            };
            let (bias, mse) = bias_mse(&values, target).unwrap_or((f64::NAN, f64::NAN));
            let cp = if est == Estimator::Mm || kept.is_empty() {
                None
            } else {
                let hits = kept
                    .iter()
                    .filter(|e| match (e.covers, param) {
                        (Some((b, _)), Parameter::Beta) => b,
                        (Some((_, t)), Parameter::Theta) => t,
                        (None, _) => false,
                    })
                    .count();
                Some(hits as f64 / kept.len() as f64)
            };
            rows.push(SimRow {
                estimator: est,
                parameter: param,
                n,
                bias,
                mse,
                cp,
                geweke_fail_count: if est == Estimator::Bayes { geweke } else { 0 },
                used: kept.len(),
                excluded: outcomes.len() - kept.len(),
            });
        }
    }
    rows
}
