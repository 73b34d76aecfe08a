//! Synthetic Gaussian-blob datasets with a binary protected column.

use std::path::Path;

use anyhow::{bail, Context};
use faircap::{Dataset, SeedStream};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Name of the protected column in generated files; label 1 is written as "1".
pub const PROTECTED_COLUMN: &str = "protected";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n: usize,
    /// Requested global balance, minority over majority.
    pub balance: f64,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    /// Per-coordinate standard deviation around each blob center.
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Relative blob sizes; equal when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Overrides the sweep seed for data generation.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_clusters() -> usize {
    3
}

fn default_noise() -> f64 {
    0.05
}

fn default_dim() -> usize {
    2
}

impl GeneratorSpec {
    pub fn new(n: usize, balance: f64) -> Self {
        Self {
            n,
            balance,
            clusters: default_clusters(),
            noise: default_noise(),
            dim: default_dim(),
            weights: None,
            seed: None,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n < 2 {
            bail!("n = {} must be at least 2", self.n);
        }
        if !(self.balance > 0.0 && self.balance <= 1.0) {
            bail!("balance = {} must be in (0, 1]", self.balance);
        }
        if self.clusters == 0 || self.clusters > self.n {
            bail!("clusters = {} must be in 1..=n", self.clusters);
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            bail!("noise = {} must be a finite number >= 0", self.noise);
        }
        if self.dim == 0 {
            bail!("dim must be positive");
        }
        if let Some(w) = &self.weights {
            if w.len() != self.clusters {
                bail!("{} weights for {} clusters", w.len(), self.clusters);
            }
            if w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                bail!("weights must be finite and positive");
            }
        }
        Ok(())
    }

    /// Rows labelled 1: `round(n * b / (1 + b))`, so that
    /// `minority / (n - minority)` is the requested balance up to rounding.
    pub fn minority_count(&self) -> usize {
        let m = (self.n as f64 * self.balance / (1.0 + self.balance)).round() as usize;
        m.clamp(1, self.n - 1)
    }

    /// Blob sizes by largest remainder over the weights; earlier blobs win
    /// remainder ties.
    pub fn blob_sizes(&self) -> Vec<usize> {
        let weights = self
            .weights
            .clone()
            .unwrap_or_else(|| vec![1.0; self.clusters]);
        let total: f64 = weights.iter().sum();
        let exact: Vec<f64> = weights.iter().map(|w| self.n as f64 * w / total).collect();
        let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - sizes[a] as f64;
            let rb = exact[b] - sizes[b] as f64;
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let short = self.n - sizes.iter().sum::<usize>();
        for &i in order.iter().take(short) {
            sizes[i] += 1;
        }
        sizes
    }
}

/// Draws the dataset. Blob centers are uniform in the unit cube; rows are
/// emitted blob by blob and the protected label is placed on a seeded
/// random subset of rows.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> anyhow::Result<Dataset> {
    spec.validate()?;
    let seeds = SeedStream::new(spec.seed.unwrap_or(seed));
    let mut rng = seeds.rng("generate-points");
    let noise = Normal::new(0.0, spec.noise).context("noise distribution")?;

    let mut features = Vec::with_capacity(spec.n);
    for size in spec.blob_sizes() {
        let center: Vec<f64> = (0..spec.dim).map(|_| rng.random_range(0.0..1.0)).collect();
        for _ in 0..size {
            features.push(center.iter().map(|c| c + noise.sample(&mut rng)).collect());
        }
    }
    let minority = spec.minority_count();
    let mut labels: Vec<u8> = (0..spec.n).map(|i| u8::from(i < minority)).collect();
    labels.shuffle(&mut seeds.rng("generate-labels"));
    Ok(Dataset::new(features, labels)?)
}

/// Writes `x0..x{d-1}` feature columns and the protected column.
pub fn write_generated(data: &Dataset, path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let mut header: Vec<String> = data.feature_names().to_vec();
    header.push(PROTECTED_COLUMN.into());
    w.write_record(&header)?;
    for i in 0..data.len() {
        let mut rec: Vec<String> = data.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(data.label(i).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use faircap::ingest::{load_csv, DatasetSpec};
    use faircap::balance_of;

    #[test]
    fn requested_counts() {
        assert_eq!(GeneratorSpec::new(100, 1.0).minority_count(), 50);
        assert_eq!(GeneratorSpec::new(100, 0.25).minority_count(), 20);
        let d = generate(&GeneratorSpec::new(100, 0.25), 1).unwrap();
        assert_eq!(d.group_counts(), [80, 20]);
        assert_eq!(d.balance().unwrap(), balance_of(20, 80));
    }

    #[test]
    fn blob_sizes_follow_weights() {
        let mut s = GeneratorSpec::new(300, 0.5);
        s.weights = Some(vec![0.6, 0.27, 0.13]);
        assert_eq!(s.blob_sizes(), vec![180, 81, 39]);
        s.weights = None;
        s.n = 10;
        assert_eq!(s.blob_sizes(), vec![4, 3, 3]);
    }

    #[test]
    fn reload_preserves_balance_within_one_count() {
        let dir = tempfile::tempdir().unwrap();
        for (i, (n, b)) in [(100, 1.0), (100, 0.25), (37, 0.7), (501, 0.33), (2, 1.0)].into_iter().enumerate() {
            let mut spec = GeneratorSpec::new(n, b);
            spec.clusters = spec.clusters.min(n);
            let data = generate(&spec, i as u64).unwrap();
            let path = dir.path().join(format!("g{i}.csv"));
            write_generated(&data, &path).unwrap();
            let back = load_csv(&DatasetSpec::new(&path, PROTECTED_COLUMN, "1")).unwrap();
            assert_eq!(back.len(), n);
            assert_eq!(back.group_counts(), data.group_counts());
            // the best achievable minority count for the requested ratio
            let ideal = n as f64 * b / (1.0 + b);
            assert!((back.group_counts()[1] as f64 - ideal).abs() <= 1.0);
        }
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let s = GeneratorSpec::new(50, 0.5);
        assert_eq!(generate(&s, 3).unwrap(), generate(&s, 3).unwrap());
        assert_ne!(generate(&s, 3).unwrap(), generate(&s, 4).unwrap());
    }

    #[test]
    fn invalid_specs() {
        assert!(GeneratorSpec::new(1, 0.5).validate().is_err());
        assert!(GeneratorSpec::new(10, 0.0).validate().is_err());
        assert!(GeneratorSpec::new(10, 1.5).validate().is_err());
        let mut s = GeneratorSpec::new(10, 0.5);
        s.weights = Some(vec![1.0]);
        assert!(s.validate().is_err());
    }
}
