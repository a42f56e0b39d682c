pub mod compare;
pub mod fit;
pub mod predict;
pub mod sample;
pub mod simulate;

use std::path::Path;

use dhillon::bayes::{check_validity, run_mh, summarize, McmcChain, McmcConfig, PosteriorSummary, Prior, ValidityReport};
use dhillon::{Dataset, DhillonParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::{interval, percent, sig4, Table};

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub label: String,
    pub n: usize,
    pub unit: String,
    pub min: f64,
    pub max: f64,
}

impl DatasetInfo {
    pub fn of(d: &Dataset) -> Self {
        let (min, max) = d.min_max();
        Self { label: d.label().to_string(), n: d.n(), unit: d.unit().to_string(), min, max }
    }

    pub fn header(&self) -> String {
        format!("dataset: {} (n = {}, unit = {})\n", self.label, self.n, self.unit)
    }
}

/// Chain diagnostics reported next to posterior summaries.
#[derive(Debug, Clone, Serialize)]
pub struct ChainInfo {
    pub draws: usize,
    pub seed: u64,
    pub accept_rate_beta: f64,
    pub accept_rate_theta: f64,
    pub geweke_z_beta: f64,
    pub geweke_z_theta: f64,
    pub passed_geweke: bool,
    pub tuned_a_beta: f64,
    pub tuned_a_theta: f64,
}

impl ChainInfo {
    pub fn of(c: &McmcChain) -> Self {
        Self {
            draws: c.draws.len(),
            seed: c.seed,
            accept_rate_beta: c.accept_rate_beta,
            accept_rate_theta: c.accept_rate_theta,
            geweke_z_beta: c.geweke_z_beta,
            geweke_z_theta: c.geweke_z_theta,
            passed_geweke: c.passed_geweke,
            tuned_a_beta: c.tuned_a_beta,
            tuned_a_theta: c.tuned_a_theta,
        }
    }

    pub fn text(&self) -> String {
        format!(
            "chain: {} draws, acceptance beta {} theta {}, Geweke z beta {} theta {} ({})\n",
            self.draws,
            sig4(self.accept_rate_beta),
            sig4(self.accept_rate_theta),
            sig4(self.geweke_z_beta),
            sig4(self.geweke_z_theta),
            if self.passed_geweke { "passed" } else { "FAILED" },
        )
    }
}

/// Posterior fit shared by `fit --method bayes` and `predict`.
pub struct Posterior {
    pub prior: Prior,
    pub validity: ValidityReport,
    pub chain: McmcChain,
    pub summary: PosteriorSummary,
}

pub fn posterior(d: &Dataset, prior: Prior, cfg: &McmcConfig, level: f64) -> Result<Posterior> {
    let validity = check_validity(prior, d);
    let chain = run_mh(prior, d, cfg)?;
    let summary = summarize(&chain, level)?;
    Ok(Posterior { prior, validity, chain, summary })
}

pub fn summary_table(s: &PosteriorSummary) -> String {
    let pct = format!("{}% interval", percent(s.level));
    let mut t = Table::new(&["parameter", "median", "mean", "sd", &pct]);
    t.row(vec!["beta".into(), sig4(s.median.0), sig4(s.mean.0), sig4(s.sd.0), interval(s.ci_beta)]);
    t.row(vec!["theta".into(), sig4(s.median.1), sig4(s.mean.1), sig4(s.sd.1), interval(s.ci_theta)]);
    t.render()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainRow {
    iter: usize,
    beta: f64,
    theta: f64,
}

/// Chain CSV with the sampler iteration of each retained draw.
pub fn chain_csv(chain: &McmcChain, cfg: &McmcConfig) -> Result<String> {
    let rows: Vec<ChainRow> = chain
        .draws
        .iter()
        .enumerate()
        .map(|(k, p)| ChainRow { iter: cfg.burn_in + (k + 1) * cfg.thin, beta: p.beta, theta: p.theta })
        .collect();
    crate::output::csv_string(&rows)
}

pub fn read_chain_csv(path: &Path) -> Result<McmcChain> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut draws = Vec::new();
    for (i, row) in rdr.deserialize::<ChainRow>().enumerate() {
        let row = row.map_err(|e| CliError::Input(format!("chain row {}: {e}", i + 2)))?;
        let p = DhillonParams::new(row.beta, row.theta)
            .map_err(|e| CliError::Input(format!("chain row {}: {e}", i + 2)))?;
        draws.push(p);
    }
    if draws.is_empty() {
        return Err(CliError::Input(format!("chain file {} has no draws", path.display())));
    }
    Ok(McmcChain::from_draws(draws))
}
