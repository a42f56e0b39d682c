//! Likelihood-based estimation: log-likelihood, score, expected Fisher
//! information, the maximum-likelihood fit with Wald intervals, and the
//! method-of-moments estimator used to start both the optimizer and the
//! MCMC sampler.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dist::{log1p_exp, DhillonParams};
use crate::error::{Error, Result};
use crate::numerics::{find_root, normal_quantile, RootConfig};

/// `sum_i ln f(t_i; beta, theta)`.
pub fn log_likelihood(p: &DhillonParams, d: &Dataset) -> f64 {
    let ln_theta = p.theta.ln();
    let n = d.n() as f64;
    let mut sum_log_t = 0.0;
    let mut sum_log1p = 0.0;
    for &t in d.times() {
        let lt = t.ln();
        sum_log_t += lt;
        sum_log1p += log1p_exp(ln_theta + p.beta * lt);
    }
    n * (p.beta.ln() + ln_theta) + (p.beta - 1.0) * sum_log_t - 2.0 * sum_log1p
}

/// Gradient `(dL/dbeta, dL/dtheta)` of [`log_likelihood`].
pub fn score(p: &DhillonParams, d: &Dataset) -> (f64, f64) {
    let ln_theta = p.theta.ln();
    let n = d.n() as f64;
    let mut s_beta = n / p.beta;
    let mut s_theta = n / p.theta;
    for &t in d.times() {
        let lt = t.ln();
        // w = theta t^b / (1 + theta t^b), computed as a logistic in log space.
        let lx = ln_theta + p.beta * lt;
        let w = logistic(lx);
        s_beta += lt - 2.0 * w * lt;
        // t^b / (1 + theta t^b) = w / theta
        s_theta -= 2.0 * w / p.theta;
    }
    (s_beta, s_theta)
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-observation expected Fisher information; the sample total is `n`
/// times each entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherInfo {
    pub i_bb: f64,
    pub i_bt: f64,
    pub i_tt: f64,
}

impl FisherInfo {
    pub fn determinant(&self) -> f64 {
        self.i_bb * self.i_tt - self.i_bt * self.i_bt
    }

    /// Inverse of the sample information `n * I`, as `[[v_bb, v_bt], [v_bt, v_tt]]`.
    pub fn covariance(&self, n: usize) -> [[f64; 2]; 2] {
        let det = self.determinant() * (n as f64);
        [
            [self.i_tt / det, -self.i_bt / det],
            [-self.i_bt / det, self.i_bb / det],
        ]
    }
}

pub fn fisher_info(p: &DhillonParams) -> FisherInfo {
    let lt = p.theta.ln();
    FisherInfo {
        i_bb: (PI * PI + 3.0 + 3.0 * lt * lt) / (9.0 * p.beta * p.beta),
        i_bt: -lt / (3.0 * p.theta * p.beta),
        i_tt: 1.0 / (3.0 * p.theta * p.theta),
    }
}

/// Result of [`fit_mle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub params: DhillonParams,
    pub loglik: f64,
    pub fisher: FisherInfo,
    pub covariance: [[f64; 2]; 2],
    pub se_beta: f64,
    pub se_theta: f64,
    pub ci_beta: (f64, f64),
    pub ci_theta: (f64, f64),
    pub level: f64,
    pub converged: bool,
    pub iterations: usize,
    pub score: (f64, f64),
}

impl MleFit {
    pub fn covers(&self, truth: &DhillonParams) -> (bool, bool) {
        (
            self.ci_beta.0 <= truth.beta && truth.beta <= self.ci_beta.1,
            self.ci_theta.0 <= truth.theta && truth.theta <= self.ci_theta.1,
        )
    }
}

/// Optimizer settings for [`fit_mle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    /// Bound on `max(|beta dL/dbeta|, |theta dL/dtheta|)` at convergence.
    /// This is the score in log coordinates and does not depend on the
    /// time unit of the data.
    pub score_tol: f64,
    /// Bound on the relative parameter change of the final step.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            score_tol: 1e-6,
            step_tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// Log-likelihood and gradient in `(ln beta, ln theta)` coordinates.
fn objective(d: &Dataset, x: [f64; 2]) -> Option<(f64, [f64; 2], (f64, f64))> {
    let p = DhillonParams::new(x[0].exp(), x[1].exp()).ok()?;
    let ll = log_likelihood(&p, d);
    if !ll.is_finite() {
        return None;
    }
    let s = score(&p, d);
    Some((ll, [s.0 * p.beta, s.1 * p.theta], s))
}

fn log_gradient(d: &Dataset, x: [f64; 2]) -> Option<[f64; 2]> {
    let p = DhillonParams::new(x[0].exp(), x[1].exp()).ok()?;
    let s = score(&p, d);
    Some([s.0 * p.beta, s.1 * p.theta])
}

/// Central-difference Hessian of the log-coordinate gradient, symmetrized.
fn fd_hessian(d: &Dataset, x: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    const H: f64 = 1e-5;
    let mut h = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut up = x;
        let mut down = x;
        up[j] += H;
        down[j] -= H;
        let gu = log_gradient(d, up)?;
        let gd = log_gradient(d, down)?;
        for i in 0..2 {
            h[i][j] = (gu[i] - gd[i]) / (2.0 * H);
        }
    }
    let off = 0.5 * (h[0][1] + h[1][0]);
    h[0][1] = off;
    h[1][0] = off;
    Some(h)
}

/// Starting point: method of moments when feasible, else `(1, 1/median)`.
pub fn initial_values(d: &Dataset) -> DhillonParams {
    match fit_mom(d).params {
        Some(p) => p,
        None => DhillonParams::new(1.0, 1.0 / d.median()).unwrap_or(DhillonParams {
            beta: 1.0,
            theta: 1.0,
        }),
    }
}

/// Maximum-likelihood fit with marginal Wald intervals at `level`.
///
/// Newton ascent in `(ln beta, ln theta)` with a finite-difference Hessian
/// of the analytic score; when the Hessian is not negative definite the
/// step falls back to the gradient direction. Every step is backtracked
/// until the likelihood increases. The search runs on the data divided by
/// their geometric mean, which removes the strong `ln theta`/`beta` ridge
/// that appears when the times are far from 1.
pub fn fit_mle(d: &Dataset, level: f64, opts: &MleOptions) -> Result<MleFit> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("level {level} not in (0, 1)")));
    }
    if d.n() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 observations, got {}",
            d.n()
        )));
    }
    if d.is_degenerate() {
        return Err(Error::DegenerateData("all failure times are equal".into()));
    }

    // The optimizer runs on data with unit geometric mean; the estimate
    // maps back through theta = theta' m^(-beta).
    let log_gm = d.times().iter().map(|t| t.ln()).sum::<f64>() / d.n() as f64;
    let unit = d.rescaled((-log_gm).exp())?;
    let (x, iterations) = ascend(&unit, opts)?;
    let params = DhillonParams::new(x[0].exp(), (x[1] - x[0].exp() * log_gm).exp())?;
    let ll = log_likelihood(&params, d);
    let raw_score = score(&params, d);
    Ok(wald_fit(d, params, ll, level, iterations, raw_score))
}

/// Newton ascent from [`initial_values`]; returns `(ln beta, ln theta)`
/// and the iteration count.
fn ascend(d: &Dataset, opts: &MleOptions) -> Result<([f64; 2], usize)> {
    let start = initial_values(d);
    let mut x = [start.beta.ln(), start.theta.ln()];
    let (mut ll, mut grad, mut raw_score) =
        objective(d, x).ok_or_else(|| Error::NotConverged("non-finite start".into()))?;
    let mut converged = false;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;

    while iterations < opts.max_iter {
        let score_norm = grad[0].abs().max(grad[1].abs());
        if score_norm < opts.score_tol && last_change < opts.step_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let h = fd_hessian(d, x).ok_or_else(|| Error::NotConverged("non-finite Hessian".into()))?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let newton = h[0][0] < 0.0 && det > 0.0;
        let mut step = if newton {
            [
                -(h[1][1] * grad[0] - h[0][1] * grad[1]) / det,
                -(-h[1][0] * grad[0] + h[0][0] * grad[1]) / det,
            ]
        } else {
            let g = grad[0].abs().max(grad[1].abs()).max(1e-300);
            [grad[0] / g, grad[1] / g]
        };
        let big = step[0].abs().max(step[1].abs());
        if big > 2.0 {
            step = [2.0 * step[0] / big, 2.0 * step[1] / big];
        }

        // Below this size the likelihood gain of a Newton step is lost in
        // rounding, so the step is taken without a line search.
        let tiny = newton && big < 1e-6;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [x[0] + alpha * step[0], x[1] + alpha * step[1]];
            if let Some(eval) = objective(d, trial) {
                if tiny || eval.0 >= ll {
                    accepted = Some((trial, eval));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, (new_ll, new_grad, new_score))) => {
                // Relative change in (beta, theta) equals the log step to first order.
                last_change = (trial[0] - x[0]).abs().max((trial[1] - x[1]).abs());
                x = trial;
                ll = new_ll;
                grad = new_grad;
                raw_score = new_score;
            }
            None => {
                // No ascent possible at machine precision.
                let score_norm = grad[0].abs().max(grad[1].abs());
                converged = score_norm < opts.score_tol;
                break;
            }
        }
    }

    if !converged {
        return Err(Error::NotConverged(format!(
            "score ({:.3e}, {:.3e}) after {iterations} iterations",
            raw_score.0, raw_score.1
        )));
    }

    Ok((x, iterations))
}

fn wald_fit(
    d: &Dataset,
    params: DhillonParams,
    loglik: f64,
    level: f64,
    iterations: usize,
    score: (f64, f64),
) -> MleFit {
    let n = d.n() as f64;
    let c = PI * PI + 3.0;
    let lt = params.theta.ln();
    let se_beta = (9.0 * params.beta * params.beta / (n * c)).sqrt();
    let se_theta = (3.0 * params.theta * params.theta * (c + 3.0 * lt * lt) / (n * c)).sqrt();
    let z = normal_quantile(0.5 + 0.5 * level);
    let fisher = fisher_info(&params);
    MleFit {
        params,
        loglik,
        fisher,
        covariance: fisher.covariance(d.n()),
        se_beta,
        se_theta,
        ci_beta: (params.beta - z * se_beta, params.beta + z * se_beta),
        ci_theta: (params.theta - z * se_theta, params.theta + z * se_theta),
        level,
        converged: true,
        iterations,
        score,
    }
}

/// Method-of-moments estimate. Only shapes above 2 are reachable, since
/// the second moment is infinite otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomEstimate {
    pub params: Option<DhillonParams>,
    /// `m2 / mean^2`.
    pub ratio: f64,
    pub feasible: bool,
}

/// `tan(pi/beta) / (pi/beta)`, the theoretical `E[T^2] / E[T]^2`.
pub fn moment_ratio(beta: f64) -> f64 {
    let x = PI / beta;
    x.tan() / x
}

/// Lower end of the MoM shape search.
pub const MOM_BRACKET: (f64, f64) = (2.0 + 1e-9, 1e6);

pub fn fit_mom(d: &Dataset) -> MomEstimate {
    let n = d.n() as f64;
    let mean = d.mean();
    let m2 = d.times().iter().map(|t| t * t).sum::<f64>() / n;
    let ratio = m2 / (mean * mean);
    let infeasible = MomEstimate {
        params: None,
        ratio,
        feasible: false,
    };
    if d.n() < 2 || !(ratio > 1.0) || d.is_degenerate() {
        return infeasible;
    }
    let cfg = RootConfig::bracketed(MOM_BRACKET.0, MOM_BRACKET.1).with_tol(1e-12);
    let beta = match find_root(|b| moment_ratio(b) - ratio, &cfg) {
        Ok(b) => b,
        Err(_) => return infeasible,
    };
    let theta = (mean * beta * (PI / beta).sin() / PI).powf(-beta);
    match DhillonParams::new(beta, theta) {
        Ok(p) => MomEstimate {
            params: Some(p),
            ratio,
            feasible: true,
        },
        Err(_) => infeasible,
    }
}
