//! `validate`: fairlet-decomposition audit.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use faircap::fairlets::{
    fairlet_cost, import_fairlets, mcf_decompose_with, validate, validate_fairlets,
    vanilla_decompose_with, CenterRule, FairletRecord, ValidationReport,
};
use faircap::{Dataset, FairletDecomposition};
use serde::Serialize;

use crate::config::Config;
use crate::exit::{CliError, CliResult, Exit};
use crate::sweep::load_dataset;

#[derive(Debug, Clone, Default)]
pub struct ValidateArgs {
    pub config: PathBuf,
    /// Restrict to one configured dataset.
    pub dataset: Option<String>,
    /// Audit this exported decomposition instead of computing both.
    pub decomposition: Option<PathBuf>,
    /// Directory for `<dataset>-<source>-fairlets.json` exports.
    pub export: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    pub dataset: String,
    /// `vanilla`, `mcf`, or the audited file name.
    pub source: String,
    /// `None` when the decomposition could not be built.
    pub report: Option<ValidationReport>,
    pub cost: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub infeasible: bool,
}

impl Audit {
    pub fn is_valid(&self) -> bool {
        self.report.as_ref().is_some_and(ValidationReport::is_valid)
    }

    pub fn describe(&self) -> String {
        let head = format!("{} / {}", self.dataset, self.source);
        match (&self.report, &self.error) {
            (Some(r), _) => {
                let cost = self.cost.map(|c| format!(", cost {c:.4}")).unwrap_or_default();
                let mut s = format!(
                    "{head}: {} fairlets over {} rows, t = {}{cost}: {}",
                    r.fairlets,
                    r.rows,
                    r.threshold,
                    if r.is_valid() { "valid".to_string() } else { format!("{} violations", r.violations.len()) }
                );
                for v in &r.violations {
                    s.push_str(&format!("\n  - {v}"));
                }
                s
            }
            (None, Some(e)) => format!("{head}: {e}"),
            (None, None) => head,
        }
    }
}

/// Audits decompositions. Exit status: [`Exit::Data`] when any audited
/// decomposition has violations or fails for a reason other than
/// infeasibility, [`Exit::AllInfeasible`] when none could be built.
pub fn cmd_validate(args: &ValidateArgs) -> CliResult<(Vec<Audit>, Exit)> {
    let config = Config::load(&args.config)?;
    let entries: Vec<_> = config
        .datasets
        .iter()
        .filter(|d| args.dataset.as_ref().is_none_or(|n| &d.name == n))
        .collect();
    if entries.is_empty() {
        return Err(CliError::usage(anyhow!(
            "no dataset named {:?} in the config",
            args.dataset.as_deref().unwrap_or("")
        )));
    }
    if args.decomposition.is_some() && entries.len() != 1 {
        return Err(CliError::usage(anyhow!(
            "auditing a decomposition file needs exactly one dataset; pass --dataset"
        )));
    }
    if let Some(dir) = &args.export {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::data)?;
    }

    let t = config.sweep.t;
    let mut audits = Vec::new();
    for entry in entries {
        let (data, _) = load_dataset(entry, &config, None)?;
        if let Some(path) = &args.decomposition {
            audits.push(audit_file(&entry.name, path, &data, &config)?);
            continue;
        }
        let center = config.sweep.center.rule();
        let built = [
            ("vanilla", vanilla_decompose_with(&data, t, config.seed, center.unwrap_or(CenterRule::Random))),
            ("mcf", mcf_decompose_with(&data, t, config.seed, center.unwrap_or(CenterRule::Medoid))),
        ];
        for (source, result) in built {
            let audit = match result {
                Ok(decomp) => {
                    if let Some(dir) = &args.export {
                        export(&decomp, &data, &dir.join(format!("{}-{source}-fairlets.json", entry.name)))?;
                    }
                    Audit {
                        dataset: entry.name.clone(),
                        source: source.into(),
                        report: Some(validate(&decomp, &data, t)),
                        cost: Some(fairlet_cost(&decomp, &data)),
                        error: None,
                        infeasible: false,
                    }
                }
                Err(e) => Audit {
                    dataset: entry.name.clone(),
                    source: source.into(),
                    report: None,
                    cost: None,
                    error: Some(e.to_string()),
                    infeasible: e.is_infeasible(),
                },
            };
            audits.push(audit);
        }
    }

    let exit = if audits.iter().any(|a| !a.is_valid() && !a.infeasible) {
        Exit::Data
    } else if audits.iter().all(|a| a.infeasible) {
        Exit::AllInfeasible
    } else {
        Exit::Success
    };
    Ok((audits, exit))
}

fn audit_file(name: &str, path: &Path, data: &Dataset, config: &Config) -> CliResult<Audit> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::data)?;
    let records: Vec<FairletRecord> = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(CliError::data)?;
    let source = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
    Ok(match import_fairlets(&records, data) {
        Ok(fairlets) => Audit {
            dataset: name.into(),
            source,
            report: Some(validate_fairlets(&fairlets, data, config.sweep.t)),
            cost: None,
            error: None,
            infeasible: false,
        },
        Err(e) => Audit {
            dataset: name.into(),
            source,
            report: None,
            cost: None,
            error: Some(e.to_string()),
            infeasible: false,
        },
    })
}

fn export(decomp: &FairletDecomposition, data: &Dataset, path: &Path) -> CliResult<()> {
    let json = decomp.to_json(data).map_err(CliError::data)?;
    fs::write(path, json)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::data)
}
