use dhillon::bayes::{posterior_predictive_with, summarize, summarize_predictive, PosteriorSummary, PredictiveSummary};
use dhillon::rng::stream_rng;
use serde::Serialize;

use super::{posterior, read_chain_csv, summary_table, ChainInfo, DatasetInfo};
use crate::data::resolve;
use crate::error::{CliError, Result};
use crate::output::{csv_string, interval, percent, sig4, with_manifest, Rendered, RunManifest, Table};
use crate::PredictArgs;

/// Stream of the root seed used for predictive draws; the chain uses
/// stream 0.
const PREDICTIVE_STREAM: u64 = 1;

#[derive(Debug, Serialize)]
struct PredictReport {
    dataset: Option<DatasetInfo>,
    chain_source: String,
    chain: Option<ChainInfo>,
    posterior: PosteriorSummary,
    predictive: PredictiveSummary,
}

#[derive(Debug, Serialize)]
struct Draw {
    time: f64,
}

pub fn run(args: &PredictArgs, seed: u64) -> Result<Rendered> {
    let (info, chain, chain_info, source) = match (&args.chain, &args.data) {
        (Some(path), _) => (None, read_chain_csv(path)?, None, path.display().to_string()),
        (None, Some(name)) => {
            let d = resolve(name, args.unit.as_deref())?;
            let post = posterior(&d, args.prior.into(), &args.mcmc.config(seed), args.level)?;
            let ci = ChainInfo::of(&post.chain);
            (Some(DatasetInfo::of(&d)), post.chain, Some(ci), "sampled".to_string())
        }
        (None, None) => return Err(CliError::Input("predict needs --data or --chain".into())),
    };
    let summary = summarize(&chain, args.level)?;
    let mut rng = stream_rng(seed, PREDICTIVE_STREAM);
    let draws = posterior_predictive_with(&chain, &mut rng)?;
    let pred = summarize_predictive(&draws, args.level)?;

    let mut text = info.as_ref().map(|i| i.header()).unwrap_or_else(|| format!("chain: {source}\n"));
    text.push_str(&summary_table(&summary));
    if let Some(c) = &chain_info {
        text.push_str(&c.text());
    }
    let pct = format!("{}% interval", percent(pred.level));
    let mut t = Table::new(&["predictive", "mean", "sd", "median", &pct]);
    t.row(vec!["T".into(), sig4(pred.mean), sig4(pred.sd), sig4(pred.median), interval((pred.lower, pred.upper))]);
    text.push_str(&t.render());

    let rows: Vec<Draw> = draws.iter().map(|&time| Draw { time }).collect();
    let manifest = RunManifest::new("predict", seed, args)?;
    let csv = csv_string(&[&pred])?;
    let report = PredictReport { dataset: info, chain_source: source, chain: chain_info, posterior: summary, predictive: pred };
    Ok(Rendered {
        name: "predict",
        json: with_manifest(&manifest, &report)?,
        text,
        csv,
        artifacts: vec![("predictive_draws.csv".into(), csv_string(&rows)?)],
    })
}
