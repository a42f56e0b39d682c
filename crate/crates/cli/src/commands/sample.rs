use dhillon::DhillonParams;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::output::{csv_string, with_manifest, write, Rendered, RunManifest};
use crate::SampleArgs;

#[derive(Debug, Serialize)]
struct Draw {
    time: f64,
}

#[derive(Debug, Serialize)]
struct SampleReport<'a> {
    params: DhillonParams,
    n: usize,
    times: &'a [f64],
}

pub fn run(args: &SampleArgs, seed: u64) -> Result<Rendered> {
    if args.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let params = DhillonParams::new(args.beta, args.theta)?;
    let d = params.sample(args.n, seed)?;
    let rows: Vec<Draw> = d.times().iter().map(|&time| Draw { time }).collect();
    let body = csv_string(&rows)?;
    if let Some(path) = &args.out {
        write(path, &body)?;
    }
    let manifest = RunManifest::new("sample", seed, args)?;
    let report = SampleReport { params, n: args.n, times: d.times() };
    Ok(Rendered { name: "sample", json: with_manifest(&manifest, &report)?, text: body.clone(), csv: body, artifacts: Vec::new() })
}
