//! Point-level clusterings: construction, cost, balance, and composition of
//! fairlet-level assignments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{balance_of, BalanceRatio};
use crate::dataset::{count_groups, Dataset};
use crate::distance::l2;
use crate::error::{Error, Result};
use crate::fairlets::FairletDecomposition;

/// Assignment of every row to one of `k` non-empty clusters, with one
/// representative row per cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    assignment: Vec<usize>,
    representatives: Vec<usize>,
    k: usize,
}

impl Clustering {
    pub fn new(assignment: Vec<usize>, representatives: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if representatives.len() != k {
            return Err(Error::InvalidParameter(format!(
                "{} representatives for k = {k}",
                representatives.len()
            )));
        }
        let mut sizes = vec![0usize; k];
        for &c in &assignment {
            if c >= k {
                return Err(Error::InvalidParameter(format!(
                    "cluster id {c} out of range for k = {k}"
                )));
            }
            sizes[c] += 1;
        }
        if let Some(cluster) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster { cluster });
        }
        for (c, &r) in representatives.iter().enumerate() {
            if assignment.get(r) != Some(&c) {
                return Err(Error::InvalidParameter(format!(
                    "representative {r} is not a member of cluster {c}"
                )));
            }
        }
        Ok(Self {
            assignment,
            representatives,
            k,
        })
    }

    /// Builds a clustering whose representatives are the cluster medoids.
    pub fn with_medoids(assignment: Vec<usize>, k: usize, data: &Dataset) -> Result<Self> {
        if assignment.len() != data.len() {
            return Err(Error::InvalidParameter(format!(
                "assignment has {} rows, dataset has {}",
                assignment.len(),
                data.len()
            )));
        }
        let mut members = vec![Vec::new(); k];
        for (row, &c) in assignment.iter().enumerate() {
            if c >= k {
                return Err(Error::InvalidParameter(format!(
                    "cluster id {c} out of range for k = {k}"
                )));
            }
            members[c].push(row);
        }
        if let Some(cluster) = members.iter().position(Vec::is_empty) {
            return Err(Error::EmptyCluster { cluster });
        }
        let representatives = members.iter().map(|m| medoid(data, m)).collect();
        Self::new(assignment, representatives, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (row, &c) in self.assignment.iter().enumerate() {
            members[c].push(row);
        }
        members
    }
}

/// Member of `rows` minimizing the summed distance to the others; ties go to
/// the earliest row.
pub fn medoid(data: &Dataset, rows: &[usize]) -> usize {
    let sums: Vec<f64> = rows
        .par_iter()
        .map(|&i| rows.iter().map(|&j| l2(data.row(i), data.row(j))).sum())
        .collect();
    let mut best = 0;
    for (pos, &s) in sums.iter().enumerate() {
        if s < sums[best] {
            best = pos;
        }
    }
    rows[best]
}

/// Balance of the least balanced cluster.
pub fn clustering_balance(c: &Clustering, data: &Dataset) -> BalanceRatio {
    let mut counts = vec![[0u64; 2]; c.k()];
    for (row, &cl) in c.assignment().iter().enumerate() {
        counts[cl][data.label(row) as usize] += 1;
    }
    counts
        .iter()
        .map(|&[a, b]| balance_of(a, b))
        .min()
        .unwrap_or(BalanceRatio::ZERO)
}

/// Summed distance of every row to its cluster representative.
pub fn clustering_cost(c: &Clustering, data: &Dataset) -> f64 {
    c.assignment()
        .iter()
        .enumerate()
        .map(|(row, &cl)| l2(data.row(row), data.row(c.representatives()[cl])))
        .sum()
}

/// Row-level labels `phi(x) = delta(gamma(x))`.
pub fn compose_labels(delta: &[usize], decomp: &FairletDecomposition) -> Result<Vec<usize>> {
    if delta.len() != decomp.fairlets().len() {
        return Err(Error::IncompleteAssignment {
            expected: decomp.fairlets().len(),
            got: delta.len(),
        });
    }
    Ok(decomp.gamma().iter().map(|&f| delta[f]).collect())
}

/// Point-level clustering induced by a fairlet-level assignment `delta`, with
/// medoid representatives.
pub fn compose_assignment(
    delta: &[usize],
    k: usize,
    decomp: &FairletDecomposition,
    data: &Dataset,
) -> Result<Clustering> {
    let labels = compose_labels(delta, decomp)?;
    Clustering::with_medoids(labels, k, data)
}

/// Per-cluster group counts, `[count of 0, count of 1]`.
pub fn cluster_group_counts(c: &Clustering, data: &Dataset) -> Vec<[u64; 2]> {
    c.members()
        .into_iter()
        .map(|m| count_groups(data.protected(), m))
        .collect()
}
