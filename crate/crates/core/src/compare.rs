//! Competing two-parameter lifetime models and information criteria.
//!
//! Weibull uses shape `k` and scale `lambda` with survival
//! `exp(-(t/lambda)^k)`; Gamma uses shape `alpha` and rate `lambda`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, gamma_ur, ln_gamma};

use crate::dataset::Dataset;
use crate::dist::DhillonParams;
use crate::error::{Error, Result};
use crate::mle::{fit_mle, MleOptions};
use crate::numerics::{find_root, RootConfig};

/// Per-observation score tolerance used to accept a competitor fit.
pub const SCORE_TOL: f64 = 1e-6;

/// Other lifetime families that are commonly compared but not fitted here.
pub const EXCLUDED_MODELS_NOTE: &str =
    "exponentiated exponential-geometric, Weibull-Lindley, generalized exponential and \
     exponential-Poisson models are not fitted";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullFit {
    pub shape: f64,
    pub scale: f64,
    pub loglik: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub shape: f64,
    pub rate: f64,
    pub loglik: f64,
}

/// A fitted model usable for density and survival evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FittedModel {
    Dhillon { params: DhillonParams, loglik: f64 },
    Weibull(WeibullFit),
    Gamma(GammaFit),
}

impl FittedModel {
    pub fn name(&self) -> &'static str {
        match self {
            FittedModel::Dhillon { .. } => "Dhillon",
            FittedModel::Weibull(_) => "Weibull",
            FittedModel::Gamma(_) => "Gamma",
        }
    }

    pub fn loglik(&self) -> f64 {
        match self {
            FittedModel::Dhillon { loglik, .. } => *loglik,
            FittedModel::Weibull(w) => w.loglik,
            FittedModel::Gamma(g) => g.loglik,
        }
    }

    pub fn log_pdf(&self, t: f64) -> f64 {
        match self {
            FittedModel::Dhillon { params, .. } => params.log_pdf(t).unwrap_or(f64::NEG_INFINITY),
            FittedModel::Weibull(w) => weibull_log_pdf(w.shape, w.scale, t),
            FittedModel::Gamma(g) => gamma_log_pdf(g.shape, g.rate, t),
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self {
            FittedModel::Dhillon { params, .. } => params.survival(t).unwrap_or(f64::NAN),
            FittedModel::Weibull(w) => (-(t / w.scale).powf(w.shape)).exp(),
            FittedModel::Gamma(g) => gamma_ur(g.shape, g.rate * t),
        }
    }
}

pub fn weibull_log_pdf(k: f64, lambda: f64, t: f64) -> f64 {
    k.ln() - k * lambda.ln() + (k - 1.0) * t.ln() - (t / lambda).powf(k)
}

pub fn gamma_log_pdf(alpha: f64, rate: f64, t: f64) -> f64 {
    alpha * rate.ln() - ln_gamma(alpha) + (alpha - 1.0) * t.ln() - rate * t
}

fn check_fit_input(d: &Dataset) -> Result<()> {
    if d.n() < 2 {
        return Err(Error::DegenerateData(format!("need at least 2 observations, got {}", d.n())));
    }
    if d.is_degenerate() {
        return Err(Error::DegenerateData("all observations are equal".into()));
    }
    Ok(())
}

/// Weibull maximum likelihood via the profile equation for the shape.
///
/// With `x = t / max(t)`, the shape solves
/// `sum x^k ln x / sum x^k - 1/k - mean(ln x) = 0`, solved in `ln k`.
pub fn fit_weibull(d: &Dataset) -> Result<WeibullFit> {
    check_fit_input(d)?;
    let (_, max) = d.min_max();
    let logs: Vec<f64> = d.times().iter().map(|t| (t / max).ln()).collect();
    let n = logs.len() as f64;
    let mean_log = logs.iter().sum::<f64>() / n;

    // Weighted mean of ln x under weights x^k; every ln x <= 0 so x^k <= 1.
    let weighted = |k: f64| -> (f64, f64) {
        let (mut s0, mut s1) = (0.0, 0.0);
        for &l in &logs {
            let w = (k * l).exp();
            s0 += w;
            s1 += w * l;
        }
        (s0, s1)
    };
    let profile = |u: f64| {
        let k = u.exp();
        let (s0, s1) = weighted(k);
        s1 / s0 - 1.0 / k - mean_log
    };
    let u = find_root(profile, &RootConfig::bracketed(-20.0, 20.0))?;
    let shape = u.exp();
    let (s0, _) = weighted(shape);
    let scale = max * (s0 / n).powf(1.0 / shape);

    let loglik: f64 = d.times().iter().map(|&t| weibull_log_pdf(shape, scale, t)).sum();
    let (gk, gl) = weibull_score(shape, scale, d);
    if !(gk.abs() / n < SCORE_TOL && gl.abs() * scale / n < SCORE_TOL) || !loglik.is_finite() {
        return Err(Error::NotConverged(format!(
            "Weibull score ({gk:.3e}, {gl:.3e}) exceeds tolerance"
        )));
    }
    Ok(WeibullFit { shape, scale, loglik })
}

/// Score of the Weibull log-likelihood in `(shape, scale)`.
pub fn weibull_score(k: f64, lambda: f64, d: &Dataset) -> (f64, f64) {
    let n = d.n() as f64;
    let (mut dk, mut sum_pow) = (n / k, 0.0);
    for &t in d.times() {
        let z = (t / lambda).ln();
        let p = (k * z).exp();
        dk += z - p * z;
        sum_pow += p;
    }
    (dk, k / lambda * (sum_pow - n))
}

/// Gamma maximum likelihood: the shape solves
/// `ln alpha - digamma(alpha) = ln(mean t) - mean(ln t)`, solved in
/// `ln alpha`; the rate is `alpha / mean t`.
pub fn fit_gamma(d: &Dataset) -> Result<GammaFit> {
    check_fit_input(d)?;
    let n = d.n() as f64;
    let mean = d.mean();
    let mean_log = d.times().iter().map(|t| t.ln()).sum::<f64>() / n;
    let s = mean.ln() - mean_log;
    if !(s > 0.0) {
        return Err(Error::DegenerateData(format!("log-mean gap {s} is not positive")));
    }
    let eq = |u: f64| {
        let a = u.exp();
        a.ln() - digamma(a) - s
    };
    let u = find_root(eq, &RootConfig::bracketed(-25.0, 30.0))?;
    let shape = u.exp();
    let rate = shape / mean;
    let loglik: f64 = d.times().iter().map(|&t| gamma_log_pdf(shape, rate, t)).sum();
    let ga = n * rate.ln() - n * digamma(shape) + n * mean_log;
    if !(ga.abs() / n < SCORE_TOL) || !loglik.is_finite() {
        return Err(Error::NotConverged(format!("Gamma shape score {ga:.3e} exceeds tolerance")));
    }
    Ok(GammaFit { shape, rate, loglik })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub model: String,
    pub k: usize,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub aicc: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FittedModel>,
    /// Present when the fit failed; the numeric fields are then `NaN`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CriteriaRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// AIC, BIC and AICc for a log-likelihood with `k` parameters and `n`
/// observations.
pub fn criteria(loglik: f64, k: usize, n: usize) -> Result<CriteriaRow> {
    if n <= k + 1 {
        return Err(Error::Domain(format!("AICc needs n > k + 1 (n = {n}, k = {k})")));
    }
    let kf = k as f64;
    let aic = -2.0 * loglik + 2.0 * kf;
    Ok(CriteriaRow {
        model: String::new(),
        k,
        loglik,
        aic,
        bic: -2.0 * loglik + kf * (n as f64).ln(),
        aicc: aic + 2.0 * kf * (kf + 1.0) / (n as f64 - kf - 1.0),
        fit: None,
        error: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub dataset: String,
    pub n: usize,
    /// Sorted by AIC ascending; failed rows come last.
    pub rows: Vec<CriteriaRow>,
    pub note: String,
}

impl Comparison {
    pub fn best(&self) -> Option<&CriteriaRow> {
        self.rows.iter().find(|r| !r.failed())
    }
}

/// Fits the Dhillon, Weibull and Gamma models and ranks them by AIC.
pub fn compare(d: &Dataset) -> Result<Comparison> {
    if d.n() < 3 {
        return Err(Error::DegenerateData(format!("comparison needs at least 3 observations, got {}", d.n())));
    }
    let fits: [(&str, Result<FittedModel>); 3] = [
        (
            "Dhillon",
            fit_mle(d, 0.95, &MleOptions::default())
                .map(|f| FittedModel::Dhillon { params: f.params, loglik: f.loglik }),
        ),
        ("Weibull", fit_weibull(d).map(FittedModel::Weibull)),
        ("Gamma", fit_gamma(d).map(FittedModel::Gamma)),
    ];
    let mut rows = Vec::with_capacity(3);
    for (name, fit) in fits {
        let row = match fit.and_then(|m| criteria(m.loglik(), 2, d.n()).map(|r| (m, r))) {
            Ok((m, mut r)) => {
                r.model = name.to_string();
                r.fit = Some(m);
                r
            }
            Err(e) => CriteriaRow {
                model: name.to_string(),
                k: 2,
                loglik: f64::NAN,
                aic: f64::NAN,
                bic: f64::NAN,
                aicc: f64::NAN,
                fit: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    rows.sort_by(|a, b| match (a.failed(), b.failed()) {
        (false, false) => a.aic.total_cmp(&b.aic),
        (x, y) => x.cmp(&y),
    });
    Ok(Comparison { dataset: d.label().to_string(), n: d.n(), rows, note: EXCLUDED_MODELS_NOTE.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Empirical,
    Parametric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSeries {
    pub kind: SeriesKind,
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Empirical survival `#{t_i > t} / n` at the sorted unique times, with
/// `(0, 1)` prepended.
pub fn empirical_survival(d: &Dataset) -> SurvivalSeries {
    let mut sorted = d.times().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points = vec![(0.0, 1.0)];
    let mut i = 0;
    while i < n {
        let t = sorted[i];
        while i < n && sorted[i] == t {
            i += 1;
        }
        points.push((t, (n - i) as f64 / n as f64));
    }
    SurvivalSeries { kind: SeriesKind::Empirical, label: "empirical".into(), points }
}

/// Survival of a fitted model on `m` evenly spaced points of `[0, upper]`.
pub fn parametric_survival(model: &FittedModel, upper: f64, m: usize) -> SurvivalSeries {
    let m = m.max(2);
    let points = (0..m)
        .map(|i| {
            let t = upper * i as f64 / (m - 1) as f64;
            (t, model.survival(t))
        })
        .collect();
    SurvivalSeries { kind: SeriesKind::Parametric, label: model.name().into(), points }
}
