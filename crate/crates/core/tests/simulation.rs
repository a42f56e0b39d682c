use dhillon::bayes::McmcConfig;
use dhillon::rng::stream_rng;
use dhillon::simstudy::{
    bias_mse, run_scenario, run_scenario_with, Estimator, Parameter, ReplicateOutcome, SimReport, SimScenario,
};
use dhillon::{DhillonParams, Error};
use proptest::prelude::*;
use rand::Rng;

fn quick_mcmc() -> McmcConfig {
    McmcConfig { iterations: 1500, burn_in: 500, thin: 5, ..McmcConfig::default() }
}

fn scenario(n_values: Vec<usize>, replicates: usize, seed: u64) -> SimScenario {
    let mut s = SimScenario::new(DhillonParams::new(4.0, 2.0).unwrap(), n_values, replicates, seed);
    s.mcmc = quick_mcmc();
    s
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let m = (x.len() as f64 - 1.0) / 2.0;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - m) * (b - m)).sum();
    let var: f64 = rx.iter().map(|a| (a - m).powi(2)).sum();
    cov / var
}

fn report_bits(r: &SimReport) -> Vec<u64> {
    r.rows
        .iter()
        .flat_map(|row| [row.bias.to_bits(), row.mse.to_bits(), row.cp.unwrap_or(-1.0).to_bits()])
        .collect()
}

#[test]
fn report_is_reproducible() {
    let s = scenario(vec![20, 30], 24, 77);
    let a = run_scenario(&s).unwrap();
    let b = run_scenario(&s).unwrap();
    assert_eq!(report_bits(&a), report_bits(&b));
    let c = run_scenario(&SimScenario { root_seed: 78, ..s }).unwrap();
    assert_ne!(report_bits(&a), report_bits(&c));
}

#[test]
fn rows_respect_jensen_and_layout() {
    let s = scenario(vec![20, 40], 60, 3);
    let r = run_scenario(&s).unwrap();
    assert_eq!(r.rows.len(), 12);
    for row in &r.rows {
        assert!(row.used + row.excluded == 60, "{row:?}");
        if row.used > 0 {
            assert!(row.mse >= row.bias * row.bias - 1e-12, "{row:?}");
        }
        match (row.estimator, row.cp) {
            (Estimator::Mm, cp) => assert!(cp.is_none()),
            (_, Some(cp)) => assert!((0.0..=1.0).contains(&cp)),
            (_, None) => panic!("missing coverage in {row:?}"),
        }
    }
}

#[test]
fn errors_shrink_with_sample_size() {
    let ns: Vec<usize> = (20..=120).step_by(10).collect();
    let s = scenario(ns.clone(), 300, 2024);
    let r = run_scenario(&s).unwrap();
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    for est in [Estimator::Mle, Estimator::Bayes] {
        for param in [Parameter::Beta, Parameter::Theta] {
            let abs_bias: Vec<f64> = ns.iter().map(|&n| r.row(est, param, n).unwrap().bias.abs()).collect();
            let mse: Vec<f64> = ns.iter().map(|&n| r.row(est, param, n).unwrap().mse).collect();
            let rb = spearman(&nf, &abs_bias);
            let rm = spearman(&nf, &mse);
            assert!(rb < 0.0, "{} {}: |bias| rank correlation {rb}", est.as_str(), param.as_str());
            assert!(rm < 0.0, "{} {}: mse rank correlation {rm}", est.as_str(), param.as_str());
        }
    }
}

#[test]
fn injected_exact_estimator_is_perfect() {
    let s = scenario(vec![10, 25], 40, 1);
    let r = run_scenario_with(&s, |_, sc, _| {
        let e = dhillon::simstudy::Estimate { params: sc.truth, covers: Some((true, true)) };
        ReplicateOutcome { mm: Some(dhillon::simstudy::Estimate { covers: None, ..e }), mle: Some(e), bayes: Some(e), geweke_failures: 0 }
    })
    .unwrap();
    for row in &r.rows {
        assert_eq!((row.bias, row.mse), (0.0, 0.0));
        if row.estimator != Estimator::Mm {
            assert_eq!(row.cp, Some(1.0));
        }
    }
}

#[test]
fn replicate_seeds_do_not_depend_on_thread_count() {
    let s = scenario(vec![20], 16, 5);
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = serial.install(|| run_scenario(&s).unwrap());
    let b = wide.install(|| run_scenario(&s).unwrap());
    assert_eq!(report_bits(&a), report_bits(&b));
}

#[test]
fn bias_mse_examples() {
    assert_eq!(bias_mse(&[2.0, 2.0, 2.0], 2.0).unwrap(), (0.0, 0.0));
    assert_eq!(bias_mse(&[3.0, 1.0], 2.0).unwrap(), (0.0, 1.0));
    assert!(matches!(bias_mse(&[], 1.0), Err(Error::EmptyInput)));
}

proptest! {
    #[test]
    fn bias_mse_matches_brute_force(seed in any::<u64>(), len in 1usize..200, truth in -5.0f64..5.0) {
        let mut rng = stream_rng(seed, 0);
        let xs: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let (bias, mse) = bias_mse(&xs, truth).unwrap();
        let mut b = 0.0;
        let mut m = 0.0;
        for x in &xs {
            b += x - truth;
            m += (x - truth) * (x - truth);
        }
        prop_assert_eq!(bias, b / len as f64);
        prop_assert_eq!(mse, m / len as f64);
    }
}
