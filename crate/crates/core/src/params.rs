use serde::{Deserialize, Serialize};

use crate::balance::Threshold;
use crate::capclust::capacity_threshold;
use crate::error::{Error, Result};
use crate::fairlets::CenterRule;

/// Run parameters shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k: usize,
    pub t: Threshold,
    /// Capacity slack; `q = ceil(n * epsilon / k)`.
    pub epsilon: f64,
    /// Decay scale of the knapsack value `exp(-d / lambda)`.
    pub lambda: f64,
    pub seed: u64,
    /// Center rule override; `None` keeps each decomposition's default.
    pub fairlet_center: Option<CenterRule>,
}

impl Params {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            t: Threshold::HALF,
            epsilon: 1.01,
            lambda: 0.3,
            seed,
            fairlet_center: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_threshold(mut self, t: Threshold) -> Self {
        self.t = t;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if !(self.epsilon >= 1.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} must be >= 1",
                self.epsilon
            )));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda {} must be > 0",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Cluster capacity for a dataset of `n` rows.
    pub fn capacity(&self, n: usize) -> usize {
        capacity_threshold(n, self.k, self.epsilon)
    }
}
