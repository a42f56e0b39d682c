//! Geweke stationarity diagnostic and Monte Carlo standard errors.

use crate::error::{Error, Result};

/// Minimum series length accepted by [`geweke_z`].
pub const MIN_GEWEKE_LEN: usize = 100;

/// Bartlett lag window as a fraction of the segment length.
const BANDWIDTH_FRACTION: f64 = 0.04;

/// Spectral density at frequency zero with a Bartlett lag window of
/// `max(1, floor(0.04 m))` lags.
fn spectrum_at_zero(x: &[f64]) -> f64 {
    let m = x.len();
    let mean = x.iter().sum::<f64>() / m as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let autocov = |k: usize| -> f64 {
        centered[..m - k]
            .iter()
            .zip(&centered[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / m as f64
    };
    let lags = ((BANDWIDTH_FRACTION * m as f64).floor() as usize).clamp(1, m - 1);
    let mut s = autocov(0);
    for k in 1..=lags {
        s += 2.0 * (1.0 - k as f64 / (lags as f64 + 1.0)) * autocov(k);
    }
    s
}

/// Geweke z-score comparing the mean of the first `frac_first` of the
/// series with the mean of the last `frac_last`.
pub fn geweke_z(series: &[f64], frac_first: f64, frac_last: f64) -> Result<f64> {
    if series.len() < MIN_GEWEKE_LEN {
        return Err(Error::InvalidConfig(format!(
            "Geweke diagnostic needs at least {MIN_GEWEKE_LEN} values, got {}",
            series.len()
        )));
    }
    if !(frac_first > 0.0 && frac_last > 0.0 && frac_first + frac_last <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "Geweke window fractions ({frac_first}, {frac_last}) are invalid"
        )));
    }
    let n = series.len();
    let n_first = ((frac_first * n as f64).floor() as usize).max(2);
    let n_last = ((frac_last * n as f64).floor() as usize).max(2);
    let first = &series[..n_first];
    let last = &series[n - n_last..];

    let s_first = spectrum_at_zero(first);
    let s_last = spectrum_at_zero(last);
    if !(s_first > 0.0 && s_last > 0.0) {
        return Err(Error::DegenerateSeries);
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    Ok((mean(first) - mean(last)) / (s_first / n_first as f64 + s_last / n_last as f64).sqrt())
}

/// Batch-means standard error of the series mean (`floor(sqrt(n))` batches).
pub fn monte_carlo_se(series: &[f64]) -> f64 {
    let n = series.len();
    let batches = (n as f64).sqrt().floor().max(1.0) as usize;
    let size = n / batches;
    if size == 0 || batches < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}
