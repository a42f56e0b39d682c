use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mh::McmcChain;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Per-coordinate posterior summaries. Pairs are `(beta, theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub median: (f64, f64),
    pub mean: (f64, f64),
    pub sd: (f64, f64),
    pub ci_beta: (f64, f64),
    pub ci_theta: (f64, f64),
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictiveSummary {
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Sample quantile with linear interpolation between order statistics
/// (`x[(n-1)p]`). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Marginal {
    median: f64,
    mean: f64,
    sd: f64,
    ci: (f64, f64),
}

fn marginal(mut x: Vec<f64>, level: f64) -> Marginal {
    x.sort_by(f64::total_cmp);
    let (mean, sd) = mean_sd(&x);
    let tail = (1.0 - level) / 2.0;
    Marginal {
        median: quantile_sorted(&x, 0.5),
        mean,
        sd,
        ci: (quantile_sorted(&x, tail), quantile_sorted(&x, 1.0 - tail)),
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("level = {level} must lie in (0, 1)")))
    }
}

/// Medians, means, SDs and equal-tail credible intervals.
pub fn summarize(chain: &McmcChain, level: f64) -> Result<PosteriorSummary> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    check_level(level)?;
    let b = marginal(chain.betas(), level);
    let t = marginal(chain.thetas(), level);
    Ok(PosteriorSummary {
        median: (b.median, t.median),
        mean: (b.mean, t.mean),
        sd: (b.sd, t.sd),
        ci_beta: b.ci,
        ci_theta: t.ci,
        level,
    })
}

/// One lifetime per retained draw, `T_j ~ Dhillon(beta_j, theta_j)`.
pub fn posterior_predictive(chain: &McmcChain, seed: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, 0);
    posterior_predictive_with(chain, &mut rng)
}

pub fn posterior_predictive_with<R: Rng + ?Sized>(chain: &McmcChain, rng: &mut R) -> Result<Vec<f64>> {
    if chain.draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(chain.draws.iter().map(|p| p.draw(rng)).collect())
}

/// Mean, SD, median and equal-tail interval of a predictive sample.
pub fn summarize_predictive(sample: &[f64], level: f64) -> Result<PredictiveSummary> {
    if sample.is_empty() {
        return Err(Error::EmptyChain);
    }
    check_level(level)?;
    let m = marginal(sample.to_vec(), level);
    Ok(PredictiveSummary { mean: m.mean, sd: m.sd, median: m.median, lower: m.ci.0, upper: m.ci.1, level })
}
