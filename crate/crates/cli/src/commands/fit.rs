use dhillon::bayes::{PosteriorSummary, Prior, ValidityReport};
use dhillon::mle::{fit_mle, fit_mom, MleFit, MleOptions, MomEstimate};
use serde::Serialize;

use super::{chain_csv, posterior, summary_table, ChainInfo, DatasetInfo};
use crate::data::resolve;
use crate::error::{CliError, Result};
use crate::output::{csv_string, interval, percent, sig4, with_manifest, Rendered, RunManifest, Table};
use crate::{FitArgs, Method};

#[derive(Debug, Serialize)]
#[serde(tag = "method", rename_all = "lowercase")]
enum Estimates {
    Mle(MleFit),
    Mom(MomEstimate),
    Bayes { prior: Prior, validity: ValidityReport, summary: PosteriorSummary, chain: ChainInfo },
}

#[derive(Debug, Serialize)]
struct FitReport {
    dataset: DatasetInfo,
    #[serde(flatten)]
    estimates: Estimates,
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    parameter: &'static str,
    estimate: f64,
    spread: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
}

pub fn run(args: &FitArgs, seed: u64) -> Result<Rendered> {
    let d = resolve(&args.data.data, args.data.unit.as_deref())?;
    let info = DatasetInfo::of(&d);
    let manifest = RunManifest::new("fit", seed, args)?;
    let mut text = info.header();
    let mut artifacts = Vec::new();
    let (estimates, rows) = match args.method {
        Method::Mle => {
            let fit = fit_mle(&d, args.level, &MleOptions::default())?;
            text.push_str(&format!("maximum likelihood, log-likelihood {}\n", sig4(fit.loglik)));
            let pct = format!("{}% Wald interval", percent(fit.level));
            let mut t = Table::new(&["parameter", "estimate", "se", &pct]);
            t.row(vec!["beta".into(), sig4(fit.params.beta), sig4(fit.se_beta), interval(fit.ci_beta)]);
            t.row(vec!["theta".into(), sig4(fit.params.theta), sig4(fit.se_theta), interval(fit.ci_theta)]);
            text.push_str(&t.render());
            let rows = vec![
                EstimateRow { parameter: "beta", estimate: fit.params.beta, spread: Some(fit.se_beta), lower: Some(fit.ci_beta.0), upper: Some(fit.ci_beta.1) },
                EstimateRow { parameter: "theta", estimate: fit.params.theta, spread: Some(fit.se_theta), lower: Some(fit.ci_theta.0), upper: Some(fit.ci_theta.1) },
            ];
            (Estimates::Mle(fit), rows)
        }
        Method::Mom => {
            let m = fit_mom(&d);
            let Some(p) = m.params else {
                return Err(CliError::Input(format!(
                    "method of moments is infeasible: sample ratio m2/mean^2 = {} must exceed 1",
                    m.ratio
                )));
            };
            text.push_str(&format!("method of moments, m2/mean^2 = {}\n", sig4(m.ratio)));
            let mut t = Table::new(&["parameter", "estimate"]);
            t.row(vec!["beta".into(), sig4(p.beta)]);
            t.row(vec!["theta".into(), sig4(p.theta)]);
            text.push_str(&t.render());
            let rows = vec![
                EstimateRow { parameter: "beta", estimate: p.beta, spread: None, lower: None, upper: None },
                EstimateRow { parameter: "theta", estimate: p.theta, spread: None, lower: None, upper: None },
            ];
            (Estimates::Mom(m), rows)
        }
        Method::Bayes => {
            let cfg = args.mcmc.config(seed);
            let post = posterior(&d, args.prior.into(), &cfg, args.level)?;
            let chain = ChainInfo::of(&post.chain);
            let prior_name = match post.prior {
                Prior::JeffreysReference => "Jeffreys/reference",
                Prior::Mdip => "maximal data information",
            };
            text.push_str(&format!("posterior under the {prior_name} prior\n"));
            text.push_str(&summary_table(&post.summary));
            text.push_str(&chain.text());
            for m in &post.validity.messages {
                text.push_str(&format!("note: {m}\n"));
            }
            let chain_body = chain_csv(&post.chain, &cfg)?;
            if let Some(path) = &args.chain {
                crate::output::write(path, &chain_body)?;
            }
            artifacts.push(("chain.csv".to_string(), chain_body));
            let s = &post.summary;
            let rows = vec![
                EstimateRow { parameter: "beta", estimate: s.median.0, spread: Some(s.sd.0), lower: Some(s.ci_beta.0), upper: Some(s.ci_beta.1) },
                EstimateRow { parameter: "theta", estimate: s.median.1, spread: Some(s.sd.1), lower: Some(s.ci_theta.0), upper: Some(s.ci_theta.1) },
            ];
            let est = Estimates::Bayes { prior: post.prior, validity: post.validity, summary: post.summary, chain };
            (est, rows)
        }
    };
    let report = FitReport { dataset: info, estimates };
    Ok(Rendered { name: "fit", json: with_manifest(&manifest, &report)?, text, csv: csv_string(&rows)?, artifacts })
}
