//! Numeric kernels shared by the rest of the crate: a safeguarded root
//! finder, adaptive Gauss–Kronrod quadrature, the (non-regularized)
//! incomplete beta function and the closed-form integral `J(beta)` that
//! bounds the posterior normalizing constant.
//!
//! Everything here is a pure function of its inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    /// Width of the final bracket.
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Search interval. When absent the search expands outwards from `(-1, 1)`.
    pub bracket: Option<(f64, f64)>,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
            bracket: None,
        }
    }
}

impl RootConfig {
    pub fn bracketed(lo: f64, hi: f64) -> Self {
        Self {
            bracket: Some((lo, hi)),
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("abs_tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.bracket {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "bracket ({lo}, {hi}) is not an increasing finite interval"
                )));
            }
        }
        Ok(())
    }
}

/// Finds a root of `f` with Newton steps guarded by a bisection bracket.
///
/// The slope is taken from the secant through the two most recent iterates,
/// so only function values are needed. See [`find_root_with_derivative`]
/// when an analytic derivative is available.
pub fn find_root<F>(f: F, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    safeguarded_newton(&f, None::<&fn(f64) -> f64>, cfg)
}

/// Same as [`find_root`] but uses `df` for the Newton slope.
pub fn find_root_with_derivative<F, D>(f: F, df: D, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    safeguarded_newton(&f, Some(&df), cfg)
}

fn expand_bracket<F: Fn(f64) -> f64>(f: &F) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    for _ in 0..64 {
        if flo.is_finite() && fhi.is_finite() && flo * fhi <= 0.0 {
            return Ok((lo, hi));
        }
        let width = hi - lo;
        lo -= width;
        hi += width;
        flo = f(lo);
        fhi = f(hi);
    }
    Err(Error::NoBracket)
}

fn safeguarded_newton<F, D>(f: &F, df: Option<&D>, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (mut lo, mut hi) = match cfg.bracket {
        Some(b) => b,
        None => expand_bracket(f)?,
    };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NoBracket);
    }

    // Start from the secant point of the bracket (falls back to the midpoint).
    let mut x = lo - flo * (hi - lo) / (fhi - flo);
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    let mut prev: Option<(f64, f64)> = None;
    let mut last_width = hi - lo;

    for _ in 0..cfg.max_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.is_finite() && fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if hi - lo < cfg.abs_tol {
            return Ok(0.5 * (lo + hi));
        }

        let slope = match (df, prev) {
            (Some(d), _) => d(x),
            (None, Some((xp, fp))) if xp != x => (fx - fp) / (x - xp),
            _ => f64::NAN,
        };
        prev = Some((x, fx));

        let mut next = if slope.is_finite() && slope != 0.0 && fx.is_finite() {
            x - fx / slope
        } else {
            f64::NAN
        };
        let width = hi - lo;
        let slow = width > 0.5 * last_width;
        last_width = width;
        if !(next > lo && next < hi) || (slow && (next - x).abs() > 0.25 * width) {
            next = 0.5 * (lo + hi);
        } else if (next - x).abs() < 0.5 * cfg.abs_tol {
            // Step past the root so the next evaluation closes the bracket.
            let nudge = 0.5 * cfg.abs_tol * (next - x).signum();
            let candidate = if nudge == 0.0 { next } else { next + nudge };
            next = if candidate > lo && candidate < hi {
                candidate
            } else {
                0.5 * (lo + hi)
            };
        }
        x = next;
    }
    Err(Error::MaxIterExceeded(cfg.max_iter))
}

/// Outcome of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 5000;

#[derive(Debug, Clone, Copy)]
enum Piece {
    /// Integrand evaluated as given.
    Direct,
    /// Tail `[a, inf)` mapped onto `s in (0, 1]` with `x = a + (1 - s)/s`.
    Tail(f64),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: Piece,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn eval_piece<F: Fn(f64) -> f64>(f: &F, piece: Piece, x: f64) -> f64 {
    match piece {
        Piece::Direct => f(x),
        Piece::Tail(a) => {
            let inv = 1.0 / x;
            let v = f(a + (1.0 - x) * inv) * inv * inv;
            // Far in the tail 1/s^2 overflows; integrable tails vanish there.
            if v.is_finite() {
                v
            } else {
                0.0
            }
        }
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, piece: Piece, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval_piece(f, piece, center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval_piece(f, piece, center - dx);
        let f2 = eval_piece(f, piece, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resasc = asc * half.abs();
    let resabs = abs_sum * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        piece,
        lo,
        hi,
        value,
        error,
    }
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// `b` may be `f64::INFINITY`; the range is then split at `a + 1` and the
/// tail is integrated in the variable `s = 1/(x - a)`, which leaves any
/// algebraic tail singularity at `s = 0` where doubles resolve it finely.
/// When `tol` cannot be met the best estimate is returned with
/// `converged == false`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> QuadResult
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            converged: true,
        };
    }
    if b < a {
        let r = integrate(f, b, a, tol);
        return QuadResult {
            value: -r.value,
            ..r
        };
    }
    let mut segments = Vec::with_capacity(64);
    if b.is_infinite() {
        segments.push(gauss_kronrod(&f, Piece::Direct, a, a + 1.0));
        segments.push(gauss_kronrod(&f, Piece::Tail(a + 1.0), 0.0, 1.0));
    } else {
        segments.push(gauss_kronrod(&f, Piece::Direct, a, b));
    }

    let mut converged = false;
    loop {
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if total_err <= tol {
            converged = true;
            break;
        }
        if segments.len() >= MAX_INTERVALS {
            break;
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, *s))
            .expect("at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) || !worst.error.is_finite() {
            break;
        }
        let left = gauss_kronrod(&f, worst.piece, worst.lo, mid);
        let right = gauss_kronrod(&f, worst.piece, mid, worst.hi);
        segments[idx] = left;
        segments.push(right);
    }

    let value = segments.iter().map(|s| s.value).sum();
    let abs_error_estimate = segments.iter().map(|s| s.error).sum();
    QuadResult {
        value,
        abs_error_estimate,
        converged,
    }
}

/// `ln B(a, b)` for the complete beta function.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Non-regularized incomplete beta function
/// `B(z; a, b) = int_0^z u^(a-1) (1-u)^(b-1) du`.
pub fn incomplete_beta(z: f64, a: f64, b: f64) -> Result<f64> {
    incomplete_beta_complemented(z, 1.0 - z, a, b)
}

/// [`incomplete_beta`] with the complement `w = 1 - z` supplied by the
/// caller, for arguments where `z` is within rounding of 1 but `w` is
/// known accurately.
pub fn incomplete_beta_complemented(z: f64, w: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) || !(0.0..=1.0).contains(&w) {
        return Err(Error::Domain(format!("incomplete_beta: z = {z} not in [0, 1]")));
    }
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "incomplete_beta: parameters must be positive (a = {a}, b = {b})"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if w == 0.0 {
        return Ok(ln_beta(a, b).exp());
    }
    if z <= a / (a + b) {
        let front = (a * z.ln() + b * w.ln()).exp() / a;
        Ok(front * beta_cf(z, a, b)?)
    } else {
        let front = (b * w.ln() + a * z.ln()).exp() / b;
        Ok(ln_beta(a, b).exp() - front * beta_cf(w, b, a)?)
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    const MAX_ITER: usize = 10_000;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::MaxIterExceeded(MAX_ITER))
}

/// Below this `|r^beta - 1|` the series form of [`j_beta`] is used.
const J_SERIES_CUTOFF: f64 = 1e-2;

/// `J(beta) = int_0^inf x / ((1 + r^beta x)^2 (1 + x)^2) dx` in closed form,
/// `[beta (r^beta + 1) ln r - 2 (r^beta - 1)] / (r^beta - 1)^3`.
///
/// The closed form loses all precision as `r^beta -> 1` (cubic
/// cancellation), so a Taylor series in `d = r^beta - 1` takes over there.
pub fn j_beta(beta: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("j_beta: r = {r} not in (0, 1)")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("j_beta: beta = {beta} must be positive")));
    }
    let log_q = beta * r.ln();
    let d = log_q.exp_m1();
    if d.abs() < J_SERIES_CUTOFF {
        // sum_k (-d)^k (k + 1) / ((k + 2)(k + 3))
        let mut sum = 0.0;
        let mut power = 1.0;
        for k in 0..14 {
            let k = k as f64;
            sum += power * (k + 1.0) / ((k + 2.0) * (k + 3.0));
            power *= -d;
        }
        return Ok(sum);
    }
    let q = d + 1.0;
    Ok((log_q * (q + 1.0) - 2.0 * d) / (d * d * d))
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * statrs::function::erf::erf_inv(2.0 * p - 1.0)
}
