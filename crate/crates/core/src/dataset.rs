use serde::{Deserialize, Serialize};

use crate::balance::{balance_of, BalanceRatio};
use crate::error::{Error, Result};

/// Immutable feature matrix with one binary protected label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    protected: Vec<u8>,
    row_ids: Vec<String>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset with row ids `0..n` and feature names `x0..x{d-1}`.
    pub fn new(features: Vec<Vec<f64>>, protected: Vec<u8>) -> Result<Self> {
        let row_ids = (0..features.len()).map(|i| i.to_string()).collect();
        let d = features.first().map_or(0, Vec::len);
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Self::with_names(features, protected, row_ids, names)
    }

    pub fn with_names(
        features: Vec<Vec<f64>>,
        protected: Vec<u8>,
        row_ids: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if protected.len() != n || row_ids.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{n} feature rows but {} labels and {} row ids",
                protected.len(),
                row_ids.len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::InvalidDataset(format!(
                "{d} features but {} feature names",
                feature_names.len()
            )));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!("row {i} has non-finite value {v}")));
            }
        }
        if let Some(&p) = protected.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidDataset(format!(
                "protected label {p} is not binary"
            )));
        }
        Ok(Self {
            features,
            protected,
            row_ids,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn protected(&self) -> &[u8] {
        &self.protected
    }

    pub fn label(&self, i: usize) -> u8 {
        self.protected[i]
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Rows per protected label, `[count of 0, count of 1]`.
    pub fn group_counts(&self) -> [u64; 2] {
        count_groups(&self.protected, 0..self.len())
    }

    /// Balance of the whole dataset. Errors if either group is absent.
    pub fn balance(&self) -> Result<BalanceRatio> {
        let [c0, c1] = self.group_counts();
        if c0 == 0 {
            return Err(Error::MissingGroup { label: 0 });
        }
        if c1 == 0 {
            return Err(Error::MissingGroup { label: 1 });
        }
        Ok(balance_of(c0, c1))
    }
}

pub(crate) fn count_groups(labels: &[u8], rows: impl IntoIterator<Item = usize>) -> [u64; 2] {
    let mut counts = [0u64; 2];
    for r in rows {
        counts[labels[r] as usize] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(Dataset::new(vec![], vec![]).is_err());
        assert!(Dataset::new(vec![vec![]], vec![0]).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1]).is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![2]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![0, 1]).is_err());
    }

    #[test]
    fn balance_needs_both_groups() {
        let d = Dataset::new(vec![vec![0.0]; 3], vec![1, 1, 1]).unwrap();
        assert!(matches!(d.balance(), Err(Error::MissingGroup { label: 0 })));
        let d = Dataset::new(vec![vec![0.0]; 50], (0..50).map(|i| u8::from(i < 10)).collect()).unwrap();
        assert_eq!(d.balance().unwrap().value(), 0.25);
    }
}
