//! Sweep configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! output_dir = "out"
//!
//! [[dataset]]
//! name = "math"
//! [dataset.csv]
//! path = "student-mat.csv"
//! protected_column = "sex"
//! positive_label = "F"
//!
//! [[dataset]]
//! name = "blobs"
//! [dataset.generator]
//! n = 300
//! balance = 0.5
//!
//! [sweep]
//! k_min = 2
//! k_max = 14
//!
//! [method.kmed_fair_cap_mcf]
//! lambda = 0.5
//! ```
//!
//! Unknown keys are rejected. Relative CSV paths resolve against the
//! configuration file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use faircap::baselines::Method;
use faircap::fairlets::CenterRule;
use faircap::ingest::DatasetSpec;
use faircap::{Params, Threshold};
use serde::{Deserialize, Serialize};

use crate::exit::{CliError, CliResult};
use crate::generate::GeneratorSpec;

pub const DEFAULT_OUTPUT_DIR: &str = "faircap-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(rename = "dataset", default)]
    pub datasets: Vec<DatasetEntry>,
    #[serde(default)]
    pub sweep: Sweep,
    /// Per-method overrides keyed by method name.
    #[serde(rename = "method", default)]
    pub methods: BTreeMap<String, MethodOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    #[serde(default)]
    pub csv: Option<DatasetSpec>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterChoice {
    /// Random centers for vanilla fairlets, medoids for flow fairlets.
    #[default]
    Auto,
    Random,
    Medoid,
}

impl CenterChoice {
    pub fn rule(self) -> Option<CenterRule> {
        match self {
            CenterChoice::Auto => None,
            CenterChoice::Random => Some(CenterRule::Random),
            CenterChoice::Medoid => Some(CenterRule::Medoid),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub methods: Vec<Method>,
    pub k_min: usize,
    pub k_max: usize,
    pub k_step: usize,
    pub t: Threshold,
    pub lambda: f64,
    /// Capacity slack for the partitioning (k-medoids) methods.
    pub epsilon_partitioning: f64,
    /// Capacity slack for the hierarchical methods.
    pub epsilon_hierarchical: f64,
    pub center: CenterChoice,
    /// Adds `wall_time_ms` to records, which makes output run-dependent.
    pub record_timing: bool,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            k_min: 2,
            k_max: 14,
            k_step: 2,
            t: Threshold::HALF,
            lambda: 0.3,
            epsilon_partitioning: 1.01,
            epsilon_hierarchical: 1.2,
            center: CenterChoice::Auto,
            record_timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodOverride {
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::usage)?;
        let mut config = Self::parse(&text)
            .with_context(|| format!("in config {}", path.display()))
            .map_err(CliError::usage)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut config.datasets {
            if let Some(csv) = &mut entry.csv {
                if csv.path.is_relative() {
                    csv.path = base.join(&csv.path);
                }
            }
        }
        Ok(config)
    }

    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.datasets.is_empty() {
            bail!("no [[dataset]] entries");
        }
        let mut names = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if d.name.is_empty()
                || !d.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
                || d.name.starts_with('.')
            {
                bail!("dataset name {:?} must be non-empty [A-Za-z0-9._-] and not start with '.'", d.name);
            }
            if !names.insert(&d.name) {
                bail!("dataset name {:?} appears twice", d.name);
            }
            match (&d.csv, &d.generator) {
                (Some(_), None) => {}
                (None, Some(g)) => g.validate().with_context(|| format!("dataset.generator of {:?}", d.name))?,
                _ => bail!("dataset {:?} needs exactly one of [dataset.csv] or [dataset.generator]", d.name),
            }
        }
        let s = &self.sweep;
        if s.methods.is_empty() {
            bail!("sweep.methods is empty");
        }
        if s.k_min == 0 || s.k_step == 0 || s.k_max < s.k_min {
            bail!(
                "sweep k range needs 1 <= k_min <= k_max and k_step >= 1 (got {}..={} step {})",
                s.k_min,
                s.k_max,
                s.k_step
            );
        }
        check_epsilon("sweep.epsilon_partitioning", s.epsilon_partitioning)?;
        check_epsilon("sweep.epsilon_hierarchical", s.epsilon_hierarchical)?;
        check_lambda("sweep.lambda", s.lambda)?;
        for (name, o) in &self.methods {
            name.parse::<Method>().map_err(|e| anyhow!("[method.{name}]: {e}"))?;
            if let Some(e) = o.epsilon {
                check_epsilon(&format!("method.{name}.epsilon"), e)?;
            }
            if let Some(l) = o.lambda {
                check_lambda(&format!("method.{name}.lambda"), l)?;
            }
        }
        Ok(())
    }

    pub fn k_values(&self) -> Vec<usize> {
        (self.sweep.k_min..=self.sweep.k_max)
            .step_by(self.sweep.k_step)
            .collect()
    }

    /// Methods in canonical (name) order, without duplicates.
    pub fn methods(&self) -> Vec<Method> {
        let mut methods = self.sweep.methods.clone();
        methods.sort_by_key(|m| m.name());
        methods.dedup();
        methods
    }

    pub fn epsilon(&self, method: Method) -> f64 {
        self.methods
            .get(method.name())
            .and_then(|o| o.epsilon)
            .unwrap_or(if method.is_hierarchical() {
                self.sweep.epsilon_hierarchical
            } else {
                self.sweep.epsilon_partitioning
            })
    }

    pub fn lambda(&self, method: Method) -> f64 {
        self.methods
            .get(method.name())
            .and_then(|o| o.lambda)
            .unwrap_or(self.sweep.lambda)
    }

    pub fn params(&self, method: Method, k: usize) -> Params {
        Params {
            k,
            t: self.sweep.t,
            epsilon: self.epsilon(method),
            lambda: self.lambda(method),
            seed: self.seed,
            fairlet_center: self.sweep.center.rule(),
        }
    }
}

fn check_epsilon(field: &str, e: f64) -> anyhow::Result<()> {
    if !(e >= 1.0 && e.is_finite()) {
        bail!("{field} = {e} must be a finite number >= 1");
    }
    Ok(())
}

fn check_lambda(field: &str, l: f64) -> anyhow::Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        bail!("{field} = {l} must be a finite number > 0");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[[dataset]]\nname = \"toy\"\n[dataset.generator]\nn = 40\nbalance = 0.5\n";

    #[test]
    fn defaults_match_the_reference_setting() {
        let c = Config::parse(MINIMAL).unwrap();
        assert_eq!(c.k_values(), vec![2, 4, 6, 8, 10, 12, 14]);
        assert_eq!(c.methods().len(), 7);
        assert_eq!(c.sweep.t, Threshold::HALF);
        assert_eq!(c.lambda(Method::KmedFairCapMcf), 0.3);
        assert_eq!(c.epsilon(Method::KmedFairCapMcf), 1.01);
        assert_eq!(c.epsilon(Method::HierFairCapVanilla), 1.2);
        assert_eq!(c.epsilon(Method::VanillaKmedoids), 1.01);
    }

    #[test]
    fn methods_sort_by_name() {
        let c = Config::parse(&format!(
            "{MINIMAL}[sweep]\nmethods = [\"vanilla_kmedoids\", \"hier_fair_cap_mcf\", \"vanilla_kmedoids\"]\n"
        ))
        .unwrap();
        assert_eq!(c.methods(), vec![Method::HierFairCapMcf, Method::VanillaKmedoids]);
    }

    #[test]
    fn overrides_apply_per_method() {
        let c = Config::parse(&format!(
            "{MINIMAL}[method.kmed_fair_cap_mcf]\nepsilon = 1.5\nlambda = 0.1\n"
        ))
        .unwrap();
        assert_eq!(c.epsilon(Method::KmedFairCapMcf), 1.5);
        assert_eq!(c.lambda(Method::KmedFairCapMcf), 0.1);
        assert_eq!(c.epsilon(Method::KmedFairCapVanilla), 1.01);
        let p = c.params(Method::KmedFairCapMcf, 4);
        assert_eq!((p.k, p.epsilon, p.lambda), (4, 1.5, 0.1));
    }

    #[test]
    fn threshold_accepts_fraction_or_decimal() {
        let c = Config::parse(&format!("{MINIMAL}[sweep]\nt = \"1/3\"\n")).unwrap();
        assert_eq!(c.sweep.t, Threshold::new(1, 3).unwrap());
        let c = Config::parse(&format!("{MINIMAL}[sweep]\nt = \"0.5\"\n")).unwrap();
        assert_eq!(c.sweep.t, Threshold::HALF);
        assert!(Config::parse(&format!("{MINIMAL}[sweep]\nt = \"3/2\"\n")).is_err());
    }

    #[test]
    fn errors_name_the_offending_field() {
        let typo = format!("{MINIMAL}[sweep]\nk_mx = 3\n");
        let err = format!("{:#}", Config::parse(&typo).unwrap_err());
        assert!(err.contains("k_mx"), "{err}");
        assert!(err.contains("line"), "{err}");

        let bad = format!("{MINIMAL}[sweep]\nepsilon_hierarchical = 0.5\n");
        assert!(format!("{:#}", Config::parse(&bad).unwrap_err()).contains("epsilon_hierarchical"));

        let bad = format!("{MINIMAL}[method.kmeans]\nlambda = 1.0\n");
        assert!(format!("{:#}", Config::parse(&bad).unwrap_err()).contains("kmeans"));

        assert!(Config::parse("seed = 1\n").is_err());
        let both = format!("{MINIMAL}[dataset.csv]\npath = \"x.csv\"\nprotected_column = \"s\"\npositive_label = \"1\"\n");
        assert!(Config::parse(&both).is_err());
        let dup = format!("{MINIMAL}{MINIMAL}");
        assert!(format!("{:#}", Config::parse(&dup).unwrap_err()).contains("twice"));
        let k = format!("{MINIMAL}[sweep]\nk_min = 5\nk_max = 3\n");
        assert!(Config::parse(&k).is_err());
    }
}
