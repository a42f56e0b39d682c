//! The Dhillon lifetime distribution.
//!
//! Survival `R(t) = 1 / (1 + theta t^beta)` with shape `beta > 0` and scale
//! `theta > 0`. The hazard decreases monotonically for `beta <= 1` and is
//! unimodal for `beta > 1`; the mean residual life exists only for `beta > 1`.
//!
//! `theta t^beta` is always formed as `exp(ln theta + beta ln t)` so that
//! large shapes and extreme times stay finite in log space.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::incomplete_beta_complemented;
use crate::rng::stream_rng;

/// Shape/scale pair. Serializes as `{"beta": .., "theta": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhillonParams {
    pub beta: f64,
    pub theta: f64,
}

/// Qualitative form of the hazard rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardKind {
    Decreasing,
    Unimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardShape {
    pub kind: HazardKind,
    /// Location of the hazard peak, present iff the hazard is unimodal.
    pub mode: Option<f64>,
}

impl DhillonParams {
    pub fn new(beta: f64, theta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("shape beta = {beta} must be positive and finite")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("scale theta = {theta} must be positive and finite")));
        }
        Ok(Self { beta, theta })
    }

    /// `ln(theta t^beta)`.
    #[inline]
    fn log_scaled_power(&self, t: f64) -> f64 {
        self.theta.ln() + self.beta * t.ln()
    }

    /// `ln(1 + theta t^beta)`, stable for both tiny and huge arguments.
    #[inline]
    fn log1p_scaled_power(&self, t: f64) -> f64 {
        log1p_exp(self.log_scaled_power(t))
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.log_pdf(t)?.exp())
    }

    pub fn log_pdf(&self, t: f64) -> Result<f64> {
        check_positive_time(t)?;
        Ok(self.beta.ln() + self.theta.ln() + (self.beta - 1.0) * t.ln()
            - 2.0 * self.log1p_scaled_power(t))
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        check_nonnegative_time(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        Ok((-self.log1p_scaled_power(t)).exp())
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_nonnegative_time(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        // F = x / (1 + x) with x = theta t^beta, i.e. the logistic of ln x.
        let lx = self.log_scaled_power(t);
        Ok((lx - log1p_exp(lx)).exp())
    }

    pub fn hazard(&self, t: f64) -> Result<f64> {
        check_positive_time(t)?;
        let lx = self.log_scaled_power(t);
        Ok((self.beta.ln() + lx - t.ln() - log1p_exp(lx)).exp())
    }

    /// Hazard shape: decreasing for `beta <= 1`, otherwise
    /// unimodal with peak `((beta - 1) / theta)^(1/beta)`.
    pub fn hazard_shape(&self) -> HazardShape {
        if self.beta <= 1.0 {
            HazardShape {
                kind: HazardKind::Decreasing,
                mode: None,
            }
        } else {
            HazardShape {
                kind: HazardKind::Unimodal,
                mode: Some(((self.beta - 1.0) / self.theta).powf(1.0 / self.beta)),
            }
        }
    }

    /// Closed-form inverse cdf `(u / (theta (1 - u)))^(1/beta)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile: u = {u} not in (0, 1)")));
        }
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        ((u.ln() - (-u).ln_1p() - self.theta.ln()) / self.beta).exp()
    }

    /// Draws one variate by inverse transform.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile_unchecked(open_unit(rng))
    }

    /// `n` inverse-transform draws from the stream identified by `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let mut rng = stream_rng(seed, 0);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let times = (0..n).map(|_| self.draw(rng)).collect();
        Dataset::new(times, format!("dhillon(beta={}, theta={})", self.beta, self.theta))
    }

    /// `E[T^r] = (r pi / beta) / sin(pi r / beta) * theta^(-r/beta)`, finite iff `0 < r < beta`.
    pub fn raw_moment(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.beta) {
            return Err(Error::MomentDoesNotExist { r, beta: self.beta });
        }
        let ratio = r / self.beta;
        Ok(PI * ratio / (PI * ratio).sin() * self.theta.powf(-ratio))
    }

    /// Mean (present iff `beta > 1`) and variance (present iff `beta > 2`).
    pub fn mean_variance(&self) -> (Option<f64>, Option<f64>) {
        let mean = self.raw_moment(1.0).ok();
        let variance = match (mean, self.raw_moment(2.0).ok()) {
            (Some(m), Some(m2)) => Some(m2 - m * m),
            _ => None,
        };
        (mean, variance)
    }

    /// Mean residual life `E[T - t | T > t]`.
    ///
    /// `theta^(-1/beta) (1 + theta t^beta) / beta * B(1/(1 + theta t^beta); 1 - 1/beta, 1/beta)`.
    pub fn mean_residual_life(&self, t: f64) -> Result<f64> {
        if self.beta <= 1.0 {
            return Err(Error::MrlUndefined { beta: self.beta });
        }
        check_nonnegative_time(t)?;
        let inv = 1.0 / self.beta;
        let (log_one_plus, w) = if t == 0.0 {
            (0.0, 0.0)
        } else {
            let l = self.log1p_scaled_power(t);
            (l, (self.log_scaled_power(t) - l).exp())
        };
        let z = (-log_one_plus).exp();
        let b = incomplete_beta_complemented(z, w, 1.0 - inv, inv)?;
        Ok(self.theta.powf(-inv) * log_one_plus.exp() * inv * b)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn log1p_exp(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time t = {t} must be positive and finite")))
    }
}

fn check_nonnegative_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time t = {t} must be non-negative and finite")))
    }
}
