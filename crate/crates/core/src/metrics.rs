//! Run records: clustering cost, balance and cluster sizes.

use serde::{Deserialize, Serialize};

use crate::balance::{BalanceRatio, Threshold};
use crate::clustering::{clustering_balance, clustering_cost, Clustering};
use crate::dataset::Dataset;
use crate::error::Error;
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Infeasible,
    Error,
}

/// Evaluation of one (method, k) run. Failed runs keep their parameters and
/// an error message but no measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub k: usize,
    pub n: usize,
    pub q: usize,
    pub t: Threshold,
    pub epsilon: f64,
    pub lambda: f64,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
    pub cost: Option<f64>,
    pub balance: Option<f64>,
    pub balance_ratio: Option<BalanceRatio>,
    /// Cluster sizes, largest first.
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

impl RunRecord {
    fn skeleton(method: &str, n: usize, params: &Params) -> Self {
        Self {
            method: method.to_string(),
            k: params.k,
            n,
            q: params.capacity(n),
            t: params.t,
            epsilon: params.epsilon,
            lambda: params.lambda,
            seed: params.seed,
            status: RunStatus::Ok,
            message: None,
            cost: None,
            balance: None,
            balance_ratio: None,
            sizes: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn failed(method: &str, n: usize, params: &Params, err: &Error) -> Self {
        Self {
            status: if err.is_infeasible() {
                RunStatus::Infeasible
            } else {
                RunStatus::Error
            },
            message: Some(err.to_string()),
            ..Self::skeleton(method, n, params)
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    pub fn max_size(&self) -> Option<usize> {
        self.sizes.first().copied()
    }

    pub fn dispersion(&self) -> Option<FiveNumber> {
        size_dispersion(&self.sizes)
    }
}

/// Measures a clustering: medoid cost, minimum cluster balance, and sizes
/// sorted in descending order.
pub fn evaluate(c: &Clustering, data: &Dataset, params: &Params, method: &str) -> RunRecord {
    let balance = clustering_balance(c, data);
    let mut sizes = c.sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    RunRecord {
        cost: Some(clustering_cost(c, data)),
        balance: Some(balance.value()),
        balance_ratio: Some(balance),
        sizes,
        ..RunRecord::skeleton(method, data.len(), params)
    }
}

/// Five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Five-number summary of `sizes`, `None` when empty.
///
/// Quartiles interpolate linearly between order statistics at position
/// `p * (len - 1)` of the ascending sort (the inclusive convention used by
/// NumPy's default `percentile`).
pub fn size_dispersion(sizes: &[usize]) -> Option<FiveNumber> {
    if sizes.is_empty() {
        return None;
    }
    let mut xs: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    xs.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let pos = p * (xs.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        xs[lo] + (xs[hi] - xs[lo]) * (pos - lo as f64)
    };
    Some(FiveNumber {
        min: xs[0],
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
        max: xs[xs.len() - 1],
    })
}
