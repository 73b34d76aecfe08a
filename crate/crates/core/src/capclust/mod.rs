//! Clustering weighted fairlets into `k` clusters of total weight at most `q`.
//!
//! Both algorithms return a fairlet-level assignment; composing it with the
//! decomposition gives the row-level clustering, whose balance is at least the
//! decomposition threshold because every cluster is a union of fairlets.

mod hierarchical;
mod kmedoids;
mod knapsack;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fairlets::FairletDecomposition;

pub use hierarchical::hierarchical_fair_capacitated;
pub use kmedoids::{decay_value, kmedoids_fair_capacitated};
pub use knapsack::{knapsack_select, KnapsackInstance};

/// A fairlet seen as one point: its center's features and its cardinality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub position: Vec<f64>,
    pub weight: usize,
    pub fairlet_index: usize,
}

impl WeightedPoint {
    pub fn unit(position: Vec<f64>, fairlet_index: usize) -> Self {
        Self {
            position,
            weight: 1,
            fairlet_index,
        }
    }
}

/// One weighted point per fairlet, in fairlet order.
pub fn weighted_points(decomp: &FairletDecomposition, data: &Dataset) -> Vec<WeightedPoint> {
    decomp
        .fairlets()
        .iter()
        .enumerate()
        .map(|(j, f)| WeightedPoint {
            position: data.row(f.center()).to_vec(),
            weight: f.weight(),
            fairlet_index: j,
        })
        .collect()
}

/// `q = ceil(n * epsilon / k)`. Products within 1e-9 of an integer are
/// treated as that integer, so `n * 1.2 / k` does not round up spuriously.
pub fn capacity_threshold(n: usize, k: usize, epsilon: f64) -> usize {
    let x = n as f64 * epsilon / k as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Capacity budget `q` for `n` rows in `k` clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityBudget {
    pub q: usize,
    pub epsilon: f64,
    pub k: usize,
    pub n: usize,
}

impl CapacityBudget {
    pub fn new(n: usize, k: usize, epsilon: f64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidParameter("n and k must be positive".into()));
        }
        if !(epsilon >= 1.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} must be >= 1"
            )));
        }
        Ok(Self {
            q: capacity_threshold(n, k, epsilon),
            epsilon,
            k,
            n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Merge,
    Swap,
    Assign,
}

/// One step of an algorithm run. For merges `cost` is the proximity of the
/// merged pair; for assignments and swaps it is the clustering cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iteration: usize,
    pub event: TraceKind,
    pub cost: f64,
}

/// Fairlet-level clustering `delta` plus run diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairletAssignment {
    /// Cluster id in `0..k` for every input point.
    pub delta: Vec<usize>,
    pub k: usize,
    /// Input indices of the cluster medoids or centers, by cluster id, when
    /// the algorithm has them.
    pub centers: Option<Vec<usize>>,
    pub trace: Vec<TraceEvent>,
}

impl FairletAssignment {
    /// Summed weight per cluster.
    pub fn cluster_weights(&self, points: &[WeightedPoint]) -> Vec<usize> {
        let mut w = vec![0; self.k];
        for (p, &c) in points.iter().zip(&self.delta) {
            w[c] += p.weight;
        }
        w
    }

    /// Trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|e| serde_json::to_string(e).expect("trace events serialize") + "\n")
            .collect()
    }
}

pub(crate) fn check_feasible(
    points: &[WeightedPoint],
    k: usize,
    q: usize,
    check_total: bool,
) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if points.len() < k {
        return Err(Error::InvalidParameter(format!(
            "{} points cannot form {k} clusters",
            points.len()
        )));
    }
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.weight == 0) {
        return Err(Error::InvalidParameter(format!(
            "point {i} (fairlet {}) has zero weight",
            p.fairlet_index
        )));
    }
    let total: usize = points.iter().map(|p| p.weight).sum();
    if check_total && total > k * q {
        return Err(Error::CapacityExceeded { total, k, q });
    }
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.weight > q) {
        return Err(Error::Unplaceable {
            fairlet: i,
            weight: p.weight,
            q,
        });
    }
    if let Some(w) = points.windows(2).find(|w| w[0].position.len() != w[1].position.len()) {
        return Err(Error::DimensionMismatch {
            left: w[0].position.len(),
            right: w[1].position.len(),
        });
    }
    Ok(())
}
