//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every stochastic check uses seed 1, fixed before any result was seen.
//! Command-line checks run the tool in process through `dhillon_cli::run_to`.

use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use dhillon::bayes::{check_validity, log_posterior, run_mh, summarize, McmcConfig, Prior};
use dhillon::compare::compare;
use dhillon::mle::{fisher_info, fit_mle, log_likelihood, score, MleOptions};
use dhillon::numerics::{integrate, j_beta};
use dhillon::rng::stream_rng;
use dhillon::simstudy::{estimate_replicate, run_scenario_with, Estimator, Parameter, ReplicateOutcome, SimScenario};
use dhillon::{dataset, Dataset, DhillonParams, Error, HazardKind};
use dhillon_validation::{report_line, Checks};
use rand::Rng;

const SEED: u64 = 1;

fn p(beta: f64, theta: f64) -> DhillonParams {
    DhillonParams::new(beta, theta).unwrap()
}

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let r = integrate(f, a, b, tol);
    r.converged.then_some(r.value)
}

fn quad_positive(f: impl Fn(f64) -> f64 + Copy, split: f64) -> Option<f64> {
    Some(quad(f, 0.0, split, 1e-13)? + quad(f, split, f64::INFINITY, 1e-13)?)
}

fn log_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..m).map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp()).collect()
}

fn sign_changes(values: &[f64]) -> (usize, f64, f64) {
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let changes = diffs.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    (changes, diffs[0], *diffs.last().unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Checks {
    let mut c = Checks::default();
    let mut worst_norm: f64 = 0.0;
    for &beta in &[0.5, 1.0, 2.0, 4.0, 8.0] {
        for &theta in &[0.5, 2.0] {
            let d = p(beta, theta);
            let total = quad_positive(|t| d.pdf(t).unwrap(), d.quantile(0.5).unwrap()).unwrap_or(f64::NAN);
            worst_norm = worst_norm.max((total - 1.0).abs());
        }
    }
    c.check(worst_norm < 1e-7, format!("pdf normalization max error {worst_norm:.1e}"));

    let mut worst_rt: f64 = 0.0;
    for &(beta, theta) in &[(0.5, 3.0), (1.0, 1.0), (3.0, 4.0), (8.0, 0.2)] {
        let d = p(beta, theta);
        for k in 1..=99 {
            let u = k as f64 / 100.0;
            worst_rt = worst_rt.max((d.cdf(d.quantile(u).unwrap()).unwrap() - u).abs());
        }
    }
    c.check(worst_rt < 1e-10, format!("quantile/cdf round trip max error {worst_rt:.1e}"));

    let mut worst_mom: f64 = 0.0;
    for &beta in &[1.5, 2.0, 3.0, 4.0, 8.0] {
        for &theta in &[0.5, 2.0] {
            let d = p(beta, theta);
            for &frac in &[0.25, 0.5, 0.75] {
                let r = frac * beta;
                let oracle = quad_positive(|t| t.powf(r) * d.pdf(t).unwrap(), d.quantile(0.5).unwrap()).unwrap_or(f64::NAN);
                worst_mom = worst_mom.max(rel(d.raw_moment(r).unwrap(), oracle));
            }
        }
    }
    c.check(worst_mom < 1e-6, format!("raw moments max relative error {worst_mom:.1e}"));

    let mut worst_mrl: f64 = 0.0;
    for &(beta, theta) in &[(1.5, 0.5), (2.0, 1.0), (3.0, 2.0), (8.0, 3.0)] {
        let d = p(beta, theta);
        for &t in &[0.0, 0.1, 0.7, 1.5, 4.0, 20.0] {
            let s = |x: f64| d.survival(x).unwrap();
            let upper = t + d.quantile(0.5).unwrap();
            let oracle = (quad(s, t, upper, 1e-13).unwrap_or(f64::NAN) + quad(s, upper, f64::INFINITY, 1e-13).unwrap_or(f64::NAN)) / s(t);
            worst_mrl = worst_mrl.max(rel(d.mean_residual_life(t).unwrap(), oracle));
        }
    }
    c.check(worst_mrl < 1e-7, format!("mean residual life max relative error {worst_mrl:.1e}"));

    let mut shapes_ok = true;
    for &beta in &[0.5, 1.5, 3.0, 8.0] {
        let d = p(beta, 2.0);
        let shape = d.hazard_shape();
        if beta <= 1.0 {
            let h: Vec<f64> = log_grid(1e-4, 1e4, 2000).iter().map(|&t| d.hazard(t).unwrap()).collect();
            shapes_ok &= shape.kind == HazardKind::Decreasing && h.windows(2).all(|w| w[1] < w[0]);
            shapes_ok &= matches!(d.mean_residual_life(1.0), Err(Error::MrlUndefined { .. }));
        } else {
            let mode = shape.mode.unwrap_or(f64::NAN);
            let grid = log_grid(1e-3 * mode, 1e3 * mode, 2000);
            let h: Vec<f64> = grid.iter().map(|&t| d.hazard(t).unwrap()).collect();
            let (hc, h0, _) = sign_changes(&h);
            let m: Vec<f64> = grid.iter().map(|&t| d.mean_residual_life(t).unwrap()).collect();
            let (mc, m0, m1) = sign_changes(&m);
            shapes_ok &= shape.kind == HazardKind::Unimodal
                && (mode - ((beta - 1.0) / 2.0).powf(1.0 / beta)).abs() < 1e-12
                && hc == 1
                && h0 > 0.0
                && mc == 1
                && m0 < 0.0
                && m1 > 0.0;
        }
    }
    c.check(shapes_ok, "hazard and MRL shape checks for beta in {0.5, 1.5, 3, 8}");
    c
}

fn neg_hessian(d: &DhillonParams, t: f64) -> [f64; 3] {
    let (b, th) = (d.beta, d.theta);
    let x = th * t.powf(b);
    let l = t.ln();
    let den = (1.0 + x).powi(2);
    [1.0 / (b * b) + 2.0 * x * l * l / den, 2.0 * t.powf(b) * l / den, 1.0 / (th * th) - 2.0 * t.powf(2.0 * b) / den]
}

fn criterion_2() -> Checks {
    let mut c = Checks::default();
    let mut rng = stream_rng(SEED, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let beta = rng.random_range(0.3..8.0);
        let theta = rng.random_range(0.05..20.0);
        let n = rng.random_range(5..40);
        let d = p(rng.random_range(0.5..6.0), 1.0).sample(n, rng.random()).unwrap();
        let (sb, st) = score(&p(beta, theta), &d);
        let h = 1e-6;
        let ll = |b: f64, t: f64| log_likelihood(&p(b, t), &d);
        let fb = (ll(beta * (1.0 + h), theta) - ll(beta * (1.0 - h), theta)) / (2.0 * h * beta);
        let ft = (ll(beta, theta * (1.0 + h)) - ll(beta, theta * (1.0 - h))) / (2.0 * h * theta);
        worst = worst.max((sb - fb).abs() / sb.abs().max(1.0)).max((st - ft).abs() / st.abs().max(1.0));
    }
    c.check(worst < 1e-5, format!("score vs finite differences, 100 instances, max relative error {worst:.1e}"));

    let mut worst_f: f64 = 0.0;
    for &(beta, theta) in &[(2.0, 1.0), (2.0, 3.0), (4.0, 0.5)] {
        let d = p(beta, theta);
        let f = fisher_info(&d);
        for (k, closed) in [f.i_bb, f.i_bt, f.i_tt].into_iter().enumerate() {
            let g = |u: f64| neg_hessian(&d, d.quantile(u).unwrap())[k];
            let oracle = quad(g, 0.0, 0.5, 1e-13).unwrap_or(f64::NAN) + quad(g, 0.5, 1.0, 1e-13).unwrap_or(f64::NAN);
            worst_f = worst_f.max((closed - oracle).abs() / oracle.abs().max(1e-3));
        }
    }
    c.check(worst_f < 1e-5, format!("Fisher entries vs quadrature max relative error {worst_f:.1e}"));
    c
}

/// `int_0^inf a1 a2 / ((x + a1)^2 (x + a2)^2) dx` with `a_i = t_i^(-beta)`,
/// in closed form.
fn theta_mean_inner(beta: f64, t1: f64, t2: f64) -> f64 {
    let q = (beta * (t1 / t2).ln()).exp();
    let dq = q - 1.0;
    let ratio = if dq.abs() < 1e-3 {
        1.0 / 3.0 - dq / 6.0 + dq * dq / 10.0
    } else {
        (q * q - 1.0 - 2.0 * q * q.ln()) / dq.powi(3)
    };
    t2.powf(-beta) * ratio
}

fn criterion_3() -> Checks {
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    for &beta in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        for &r in &[0.1f64, 0.5, 0.9] {
            let q = r.powf(beta);
            let f = |x: f64| x / ((1.0 + q * x).powi(2) * (1.0 + x).powi(2));
            let oracle = quad(f, 0.0, 1.0, 1e-14).unwrap_or(f64::NAN)
                + quad(f, 1.0, 1.0 / q, 1e-14).unwrap_or(f64::NAN)
                + quad(f, 1.0 / q, f64::INFINITY, 1e-14).unwrap_or(f64::NAN);
            worst = worst.max(rel(j_beta(beta, r).unwrap(), oracle));
        }
    }
    c.check(worst < 1e-7, format!("j_beta vs quadrature max relative error {worst:.1e}"));

    let limit = j_beta(1e-8, 0.5).unwrap();
    c.check((limit - 1.0 / 6.0).abs() < 1e-4, format!("j_beta(1e-8, 0.5) = {limit:.6}"));

    let d = Dataset::new(vec![0.5, 1.2, 2.0], "mdip").unwrap();
    let beta = 1.0 / (d.n() as f64 + 1.0);
    let density = |theta: f64| log_posterior(Prior::Mdip, &DhillonParams { beta, theta }, &d).exp();
    let decade = |lo: f64| {
        let rough = integrate(density, lo, 10.0 * lo, 1e-3).value;
        quad(density, lo, 10.0 * lo, 1e-10 * rough).unwrap_or(f64::NAN)
    };
    let mut cumulative = vec![decade(1.0)];
    for lo in [10.0, 100.0, 1000.0] {
        cumulative.push(cumulative.last().unwrap() + decade(lo));
    }
    let growth: Vec<f64> = cumulative.windows(2).map(|w| w[1] / w[0]).collect();
    c.check(
        growth.iter().all(|&g| g > 10.0),
        format!("MDIP truncated normalizer growth per decade {:?}", growth.iter().map(|g| format!("{g:.1}")).collect::<Vec<_>>()),
    );

    let outer = |t1: f64, t2: f64, upper: f64| {
        let f = |b: f64| b * theta_mean_inner(b, t1, t2);
        let rough = integrate(f, 0.0, upper, 1e-3).value;
        quad(f, 0.0, upper, 1e-11 * rough).unwrap_or(f64::NAN)
    };
    let (a, b) = (outer(0.5, 2.0, 80.0), outer(0.5, 2.0, 160.0));
    c.check(rel(b, a) < 1e-6, format!("n=2 times (0.5, 2): theta mean integral settles ({a:.6} vs {b:.6})"));
    let g: Vec<f64> = [20.0, 40.0, 80.0].iter().map(|&u| outer(0.4, 0.7, u)).collect();
    c.check(
        g[1] > 10.0 * g[0] && g[2] > 10.0 * g[1],
        format!("n=2 times (0.4, 0.7): theta mean integral diverges ({:.3e}, {:.3e}, {:.3e})", g[0], g[1], g[2]),
    );
    c
}

fn criterion_4() -> Checks {
    let mut c = Checks::default();
    let mut s = SimScenario::new(p(4.0, 2.0), vec![20, 100], 1000, SEED);
    s.mcmc = McmcConfig::default();
    let kept: Mutex<Vec<(usize, usize, ReplicateOutcome)>> = Mutex::new(Vec::new());
    let report = run_scenario_with(&s, |d, sc, ctx| {
        let o = estimate_replicate(d, sc, ctx);
        kept.lock().unwrap().push((ctx.n, ctx.index, o.clone()));
        o
    })
    .unwrap();
    let row = |e, prm, n| report.row(e, prm, n).unwrap();

    let b20 = row(Estimator::Bayes, Parameter::Beta, 20);
    let m20 = row(Estimator::Mle, Parameter::Beta, 20);
    c.check((b20.bias - 0.264).abs() <= 0.10, format!("n=20 Bayes bias(beta) {:.3} (target 0.264 +/- 0.10)", b20.bias));
    c.check(rel(b20.mse, 3.351) <= 0.15, format!("n=20 Bayes MSE(beta) {:.3} (target 3.351 +/- 15%)", b20.mse));
    let cp20 = 100.0 * b20.cp.unwrap_or(f64::NAN);
    c.check((cp20 - 93.7).abs() <= 2.5, format!("n=20 Bayes CP(beta) {cp20:.1} (target 93.7 +/- 2.5)"));
    let cp100 = 100.0 * row(Estimator::Mle, Parameter::Beta, 100).cp.unwrap_or(f64::NAN);
    c.check((cp100 - 95.6).abs() <= 2.0, format!("n=100 MLE CP(beta) {cp100:.1} (target 95.6 +/- 2.0)"));
    let bt100 = row(Estimator::Bayes, Parameter::Theta, 100).bias;
    c.check((bt100 - 0.066).abs() <= 0.05, format!("n=100 Bayes bias(theta) {bt100:.3} (target 0.066 +/- 0.05)"));

    let outcomes = kept.into_inner().unwrap();
    let diffs: Vec<f64> = outcomes
        .iter()
        .filter(|(n, _, _)| *n == 20)
        .filter_map(|(_, _, o)| {
            let (b, m) = (o.bayes.as_ref()?, o.mle.as_ref()?);
            Some((b.params.beta - 4.0).powi(2) - (m.params.beta - 4.0).powi(2))
        })
        .collect();
    let k = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / k;
    let se = (diffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt();
    c.check(
        mean <= 2.0 * se,
        format!("n=20 MSE(beta) Bayes {:.3} vs MLE {:.3}: paired difference {mean:.3} (2 SE {:.3})", b20.mse, m20.mse, 2.0 * se),
    );
    c.check(
        true,
        format!(
            "Geweke failures n=20: {}, n=100: {}; Bayes replicates used n=20: {}",
            b20.geweke_fail_count,
            row(Estimator::Bayes, Parameter::Beta, 100).geweke_fail_count,
            b20.used
        ),
    );
    c
}

fn criterion_5() -> Checks {
    let mut c = Checks::default();
    let targets = [("diesel_engine", 391.86, 4.0, 1.35, 0.16), ("line_divider", 483.51, 6.0, 1.52, 0.13)];
    for (name, aic, aic_tol, beta, theta) in targets {
        let d = dataset::builtin(name).unwrap();
        let cmp = compare(&d).unwrap();
        let best = cmp.best().unwrap();
        c.check(best.model == "Dhillon", format!("{name}: lowest AIC is {}", best.model));
        let dh = cmp.rows.iter().find(|r| r.model == "Dhillon").unwrap();
        c.check((dh.aic - aic).abs() <= aic_tol, format!("{name}: Dhillon AIC {:.2} (target {aic} +/- {aic_tol})", dh.aic));

        let chain = run_mh(Prior::JeffreysReference, &d, &McmcConfig::default().with_seed(SEED)).unwrap();
        let s = summarize(&chain, 0.95).unwrap();
        c.check((s.median.0 - beta).abs() <= 0.15, format!("{name}: posterior median beta {:.3} (target {beta} +/- 0.15)", s.median.0));
        c.check((s.median.1 - theta).abs() <= 0.06, format!("{name}: posterior median theta {:.3} (target {theta} +/- 0.06)", s.median.1));
        let mle = fit_mle(&d, 0.95, &MleOptions::default()).unwrap();
        let consistent = (mle.params.beta - s.median.0).abs() <= 3.0 * s.sd.0 && (mle.params.theta - s.median.1).abs() <= 3.0 * s.sd.1;
        c.check(consistent, format!("{name}: MLE ({:.3}, {:.3}) within 3 posterior SD of the medians", mle.params.beta, mle.params.theta));
    }
    c
}

/// Runs the command-line tool in process; returns the exit code and stdout.
fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dhillon").chain(args.iter().copied());
    let code = dhillon_cli::run_to(argv, &mut out, &mut err);
    (code, out)
}

fn criterion_6() -> Checks {
    let mut c = Checks::default();
    let (code, out) = run_cli(&["--seed", &SEED.to_string(), "--format", "json", "predict", "--data", "diesel_engine"]);
    c.check(code == 0, format!("predict exit code {code}"));
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap_or_default();
    let mean = report["predictive"]["mean"].as_f64().unwrap_or(f64::NAN);
    let upper = report["predictive"]["upper"].as_f64().unwrap_or(f64::NAN);
    c.check((mean - 12.81).abs() <= 3.0, format!("predictive mean {mean:.2} (target 12.81 +/- 3)"));
    c.check((upper - 69.20).abs() <= 15.0, format!("predictive 97.5% quantile {upper:.2} (target 69.20 +/- 15)"));
    c
}

fn criterion_7(dir: &Path) -> Checks {
    let mut c = Checks::default();
    let (code, _) = run_cli(&["fit", "--data", "diesel_engine", "--method", "bayes", "--prior", "mdip"]);
    c.check(code == 3, format!("MDIP sampling exit code {code}"));
    let one = dir.join("one.csv");
    let flat = dir.join("flat.csv");
    std::fs::write(&one, "4.2\n").unwrap();
    std::fs::write(&flat, "time\n3\n3\n3\n3\n").unwrap();
    for (label, path) in [("n=1", &one), ("all-equal", &flat)] {
        let path = path.to_str().unwrap();
        let (bayes, _) = run_cli(&["fit", "--data", path, "--method", "bayes"]);
        let (mle, _) = run_cli(&["fit", "--data", path, "--method", "mle"]);
        c.check(bayes != 0 && mle != 0, format!("{label} refused (bayes exit {bayes}, mle exit {mle})"));
    }
    let cases: [(&[f64], bool, bool); 6] = [
        (&[0.4, 0.7], true, false),
        (&[0.5, 2.0, 3.0], true, true),
        (&[1.5, 2.0, 3.0], true, false),
        (&[0.2, 0.3, 5.0], true, false),
        (&[4.0, 4.0], false, false),
        (&[0.1, 0.2, 3.0, 4.0, 5.0], true, true),
    ];
    let mismatches = cases
        .iter()
        .filter(|(times, proper, theta_mean)| {
            let r = check_validity(Prior::JeffreysReference, &Dataset::new(times.to_vec(), "v").unwrap());
            r.posterior_proper != *proper || r.beta_moments_finite != *proper || r.theta_mean_guaranteed != *theta_mean
        })
        .count();
    c.check(mismatches == 0, format!("validity flags on {} crafted datasets, {mismatches} mismatches", cases.len()));
    let mdip = check_validity(Prior::Mdip, &dataset::builtin("diesel_engine").unwrap());
    c.check(!mdip.posterior_proper, "MDIP validity report flags the posterior improper");
    c
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn criterion_8(dir: &Path) -> Checks {
    let mut c = Checks::default();
    let invocations: [&[&str]; 6] = [
        &["sample", "--beta", "2", "--theta", "4", "--n", "200"],
        &["fit", "--data", "diesel_engine", "--method", "mle"],
        &["fit", "--data", "line_divider", "--method", "bayes"],
        &["compare", "--data", "diesel_engine"],
        &["predict", "--data", "diesel_engine"],
        &["simulate", "--n", "20,40", "--replicates", "30", "--threads", "2"],
    ];
    for (i, args) in invocations.iter().enumerate() {
        let mut runs = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("det{i}_{rep}"));
            let mut full = vec!["--seed", "1", "--format", "json", "--out-dir", out.to_str().unwrap()];
            full.extend_from_slice(args);
            let (code, stdout) = run_cli(&full);
            runs.push((code, stdout, read_dir_sorted(&out)));
        }
        let same = runs[0] == runs[1] && runs[0].0 == 0 && !runs[0].2.is_empty();
        c.check(same, format!("{}: {} files byte-identical", args[0], runs[0].2.len()));
    }
    c
}

fn main() {
    std::env::set_var("SOURCE_DATE_EPOCH", "1700000000");
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<(&str, Box<dyn Fn() -> Checks + '_>)> = vec![
        ("distribution correctness", Box::new(criterion_1)),
        ("Fisher information and score", Box::new(criterion_2)),
        ("integral oracles and prior propriety", Box::new(criterion_3)),
        ("simulation study at desk scale", Box::new(criterion_4)),
        ("real-data fits", Box::new(criterion_5)),
        ("posterior predictive", Box::new(criterion_6)),
        ("guard behaviour", Box::new(|| criterion_7(dir.path()))),
        ("determinism", Box::new(|| criterion_8(dir.path()))),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let checks = run();
        if !checks.passed() {
            failures += 1;
        }
        println!("{}", report_line(i + 1, title, start.elapsed().as_secs_f64(), &checks));
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
