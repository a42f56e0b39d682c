use dhillon::compare::{compare, empirical_survival, parametric_survival, Comparison};
use serde::Serialize;

use super::DatasetInfo;
use crate::data::resolve;
use crate::error::Result;
use crate::output::{csv_string, sig4, with_manifest, Rendered, RunManifest, Table};
use crate::CompareArgs;

#[derive(Debug, Serialize)]
struct CompareReport {
    dataset: DatasetInfo,
    #[serde(flatten)]
    comparison: Comparison,
}

#[derive(Debug, Serialize)]
struct CriteriaCsvRow<'a> {
    model: &'a str,
    k: usize,
    loglik: f64,
    bic: f64,
    aic: f64,
    aicc: f64,
    error: Option<&'a str>,
}

#[derive(Debug, Serialize)]
struct SurvivalRow<'a> {
    model: &'a str,
    t: f64,
    s: f64,
}

pub fn run(args: &CompareArgs, seed: u64) -> Result<Rendered> {
    let d = resolve(&args.data.data, args.data.unit.as_deref())?;
    let info = DatasetInfo::of(&d);
    let comparison = compare(&d)?;

    let mut text = info.header();
    text.push_str(&format!("note: {}\n", comparison.note));
    let mut t = Table::new(&["model", "k", "loglik", "BIC", "AIC", "AICc"]);
    for r in &comparison.rows {
        match &r.error {
            None => t.row(vec![r.model.clone(), r.k.to_string(), sig4(r.loglik), sig4(r.bic), sig4(r.aic), sig4(r.aicc)]),
            Some(e) => t.row(vec![r.model.clone(), r.k.to_string(), format!("failed: {e}"), String::new(), String::new(), String::new()]),
        }
    }
    text.push_str(&t.render());
    if let Some(best) = comparison.best() {
        text.push_str(&format!("lowest AIC: {}\n", best.model));
    }

    let rows: Vec<CriteriaCsvRow> = comparison
        .rows
        .iter()
        .map(|r| CriteriaCsvRow {
            model: &r.model,
            k: r.k,
            loglik: r.loglik,
            bic: r.bic,
            aic: r.aic,
            aicc: r.aicc,
            error: r.error.as_deref(),
        })
        .collect();

    let empirical = empirical_survival(&d);
    let mut series = vec![empirical];
    for fit in comparison.rows.iter().filter_map(|r| r.fit.as_ref()) {
        series.push(parametric_survival(fit, info.max, args.points));
    }
    let overlay: Vec<SurvivalRow> = series
        .iter()
        .flat_map(|s| s.points.iter().map(move |&(t, v)| SurvivalRow { model: &s.label, t, s: v }))
        .collect();

    let manifest = RunManifest::new("compare", seed, args)?;
    let csv = csv_string(&rows)?;
    let survival = csv_string(&overlay)?;
    let report = CompareReport { dataset: info, comparison };
    Ok(Rendered {
        name: "compare",
        json: with_manifest(&manifest, &report)?,
        text,
        csv,
        artifacts: vec![("survival.csv".into(), survival)],
    })
}
