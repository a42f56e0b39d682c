use dhillon::simstudy::{run_scenario, Estimator, Parameter, SimReport, SimScenario};
use dhillon::DhillonParams;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::output::{csv_string, percent, sig4, with_manifest, Rendered, RunManifest, Table};
use crate::SimulateArgs;

#[derive(Debug, Serialize)]
struct SimCsvRow {
    estimator: &'static str,
    parameter: &'static str,
    n: usize,
    bias: f64,
    mse: f64,
    cp: Option<f64>,
}

pub fn run(args: &SimulateArgs, seed: u64) -> Result<Rendered> {
    let truth = DhillonParams::new(args.beta, args.theta)?;
    let mut scenario = SimScenario::new(truth, args.n_values.clone(), args.replicates, seed);
    scenario.mcmc = args.mcmc.config(seed);
    scenario.ci_level = args.level;
    scenario.validate()?;
    let report = match args.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?
            .install(|| run_scenario(&scenario))?,
        None => run_scenario(&scenario)?,
    };
    let rows: Vec<SimCsvRow> = report
        .rows
        .iter()
        .map(|r| SimCsvRow {
            estimator: r.estimator.as_str(),
            parameter: r.parameter.as_str(),
            n: r.n,
            bias: r.bias,
            mse: r.mse,
            cp: r.cp,
        })
        .collect();
    let manifest = RunManifest::new("simulate", seed, args)?;
    Ok(Rendered {
        name: "simulation",
        json: with_manifest(&manifest, &report)?,
        text: table(&report),
        csv: csv_string(&rows)?,
        artifacts: Vec::new(),
    })
}

/// One block per parameter; rows are sample sizes, coverage in percent.
fn table(report: &SimReport) -> String {
    let s = &report.scenario;
    let mut out = format!(
        "beta = {}, theta = {}, {} replicates, {}% intervals\n",
        s.truth.beta,
        s.truth.theta,
        s.replicates,
        percent(s.ci_level)
    );
    for param in [Parameter::Beta, Parameter::Theta] {
        out.push_str(&format!("\n{}\n", param.as_str()));
        let mut t = Table::new(&[
            "n", "MM bias", "MM mse", "MLE bias", "MLE mse", "MLE cp", "Bayes bias", "Bayes mse", "Bayes cp", "Geweke fails",
        ]);
        for &n in &s.n_values {
            let mut cells = vec![n.to_string()];
            let mut geweke = 0;
            for est in Estimator::ALL {
                let Some(r) = report.row(est, param, n) else { continue };
                cells.push(sig4(r.bias));
                cells.push(sig4(r.mse));
                if est != Estimator::Mm {
                    cells.push(r.cp.map(|c| format!("{:.2}", 100.0 * c)).unwrap_or_else(|| "NA".into()));
                }
                geweke = r.geweke_fail_count;
            }
            cells.push(geweke.to_string());
            t.row(cells);
        }
        out.push_str(&t.render());
    }
    let excluded: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.parameter == Parameter::Beta && r.excluded > 0)
        .map(|r| format!("{} n={}: {}", r.estimator.as_str(), r.n, r.excluded))
        .collect();
    if !excluded.is_empty() {
        out.push_str(&format!("\nexcluded replicates: {}\n", excluded.join("; ")));
    }
    out
}
