//! `run`: every (method, k) cell of a sweep, for every configured dataset.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use faircap::baselines::{pipeline, Method};
use faircap::ingest::load_csv;
use faircap::metrics::{RunRecord, RunStatus};
use faircap::Dataset;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Config, DatasetEntry, DEFAULT_OUTPUT_DIR};
use crate::exit::{CliError, CliResult, Exit};
use crate::generate::{generate, write_generated};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const GENERATED_FILE: &str = "data.csv";

/// One JSONL line after the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub dataset: String,
    #[serde(flatten)]
    pub record: RunRecord,
}

#[derive(Debug, Clone)]
pub struct DatasetOutcome {
    pub name: String,
    pub dir: PathBuf,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub datasets: Vec<DatasetOutcome>,
    pub exit: Exit,
}

/// Output directory: explicit override, then the config, then the default.
pub fn output_dir(config: &Config, over: Option<&Path>) -> PathBuf {
    over.map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Loads or generates a dataset. Generated data is also written to `dir`
/// when given.
pub fn load_dataset(
    entry: &DatasetEntry,
    config: &Config,
    dir: Option<&Path>,
) -> CliResult<(Dataset, serde_json::Value)> {
    if let Some(spec) = &entry.csv {
        let data = load_csv(spec).map_err(CliError::data)?;
        let source = json!({ "csv": spec });
        return Ok((data, source));
    }
    let spec = entry.generator.as_ref().expect("validated dataset entry");
    let data = generate(spec, config.seed).map_err(CliError::usage)?;
    if let Some(dir) = dir {
        write_generated(&data, &dir.join(GENERATED_FILE)).map_err(CliError::data)?;
    }
    Ok((data, json!({ "generator": spec })))
}

/// Runs every cell; records come back in canonical (method name, k) order.
pub fn run_cells(config: &Config, data: &Dataset) -> Vec<RunRecord> {
    let cells: Vec<(Method, usize)> = config
        .methods()
        .into_iter()
        .flat_map(|m| config.k_values().into_iter().map(move |k| (m, k)))
        .collect();
    let mut records: Vec<RunRecord> = cells
        .par_iter()
        .map(|&(method, k)| {
            let params = config.params(method, k);
            match pipeline(method, data, &params) {
                Ok(run) => {
                    let mut record = run.record;
                    if !config.sweep.record_timing {
                        record.wall_time_ms = None;
                    }
                    record
                }
                Err(e) => RunRecord::failed(method.name(), data.len(), &params, &e),
            }
        })
        .collect();
    records.sort_by(|a, b| a.method.cmp(&b.method).then(a.k.cmp(&b.k)));
    records
}

/// Header line: resolved parameters and dataset facts. Keys are emitted in
/// sorted order.
pub fn provenance(config: &Config, name: &str, data: &Dataset, source: &serde_json::Value) -> serde_json::Value {
    let [c0, c1] = data.group_counts();
    let methods: Vec<serde_json::Value> = config
        .methods()
        .into_iter()
        .map(|m| {
            json!({
                "name": m.name(),
                "epsilon": config.epsilon(m),
                "lambda": config.lambda(m),
            })
        })
        .collect();
    json!({
        "kind": "provenance",
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "t": config.sweep.t,
        "lambda": config.sweep.lambda,
        "epsilon_partitioning": config.sweep.epsilon_partitioning,
        "epsilon_hierarchical": config.sweep.epsilon_hierarchical,
        "center": config.sweep.center,
        "k_values": config.k_values(),
        "methods": methods,
        "record_timing": config.sweep.record_timing,
        "dataset": {
            "name": name,
            "n": data.len(),
            "dim": data.dim(),
            "group_counts": [c0, c1],
            "balance": data.balance().ok().map(|b| b.value()),
            "source": source,
        },
    })
}

pub fn records_jsonl(header: &serde_json::Value, name: &str, records: &[RunRecord]) -> String {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    for record in records {
        let line = RecordLine {
            dataset: name.to_string(),
            record: record.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_summary(records: &[RunRecord], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "method", "k", "status", "n", "q", "t", "epsilon", "lambda", "seed", "cost", "balance",
        "max_size", "median_size", "min_size", "message",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        let spread = r.dispersion();
        w.write_record([
            r.method.clone(),
            r.k.to_string(),
            status_name(r.status).to_string(),
            r.n.to_string(),
            r.q.to_string(),
            r.t.to_string(),
            r.epsilon.to_string(),
            r.lambda.to_string(),
            r.seed.to_string(),
            opt(r.cost),
            opt(r.balance),
            opt(spread.map(|s| s.max)),
            opt(spread.map(|s| s.median)),
            opt(spread.map(|s| s.min)),
            r.message.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn status_name(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Ok => "ok",
        RunStatus::Infeasible => "infeasible",
        RunStatus::Error => "error",
    }
}

/// Runs the configured sweep and writes `<output>/<dataset>/records.jsonl`
/// and `summary.csv`.
///
/// Infeasible cells are recorded and the sweep continues. The exit status is
/// [`Exit::AllInfeasible`] when no cell succeeded and every failure was an
/// infeasibility, [`Exit::Data`] when any cell failed for another reason.
pub fn cmd_run(config_path: &Path, output_override: Option<&Path>) -> CliResult<SweepOutcome> {
    let config = Config::load(config_path)?;
    let root = output_dir(&config, output_override);
    let mut datasets = Vec::new();
    for entry in &config.datasets {
        let dir = root.join(&entry.name);
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::data)?;
        let (data, source) = load_dataset(entry, &config, Some(&dir))?;
        let records = run_cells(&config, &data);
        let header = provenance(&config, &entry.name, &data, &source);
        let path = dir.join(RECORDS_FILE);
        fs::write(&path, records_jsonl(&header, &entry.name, &records))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::data)?;
        write_summary(&records, &dir.join(SUMMARY_FILE))
            .with_context(|| format!("writing {}", dir.join(SUMMARY_FILE).display()))
            .map_err(CliError::data)?;
        datasets.push(DatasetOutcome {
            name: entry.name.clone(),
            dir,
            records,
        });
    }

    let all: Vec<&RunRecord> = datasets.iter().flat_map(|d| &d.records).collect();
    let exit = if all.iter().any(|r| r.status == RunStatus::Error) {
        Exit::Data
    } else if all.iter().all(|r| r.status == RunStatus::Infeasible) {
        Exit::AllInfeasible
    } else {
        Exit::Success
    };
    Ok(SweepOutcome { datasets, exit })
}
