use crate::balance::{BalanceRatio, Threshold};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cluster {cluster} has no members")]
    EmptyCluster { cluster: usize },

    #[error("assignment covers {got} fairlets but the decomposition has {expected}")]
    IncompleteAssignment { expected: usize, got: usize },

    #[error("protected group {label} is absent; balance is 0")]
    MissingGroup { label: u8 },

    #[error("dataset balance {achieved} is below the required threshold {required}")]
    BalanceBelowThreshold {
        achieved: BalanceRatio,
        required: Threshold,
    },

    #[error("threshold {f}/{m} is unsupported: only thresholds of the form 1/m are implemented")]
    UnsupportedThreshold { f: u64, m: u64 },

    #[error("total weight {total} exceeds k*q = {k}*{q}")]
    CapacityExceeded { total: usize, k: usize, q: usize },

    #[error(
        "merge deadlock: {remaining} clusters remain (k = {k}) but no pair fits capacity {q}; \
         try a larger epsilon"
    )]
    MergeDeadlock { remaining: usize, k: usize, q: usize },

    #[error("fairlet {fairlet} (weight {weight}) fits no cluster under capacity {q}")]
    Unplaceable {
        fairlet: usize,
        weight: usize,
        q: usize,
    },

    #[error("flow network is infeasible: {0}")]
    FlowInfeasible(String),

    #[error("{path}: {message}")]
    Ingest { path: String, message: String },

    #[error("{path}: column `{column}` not found")]
    MissingColumn { path: String, column: String },

    #[error("{path}: protected column `{column}` has {count} distinct values, expected 2")]
    ProtectedNotBinary {
        path: String,
        column: String,
        count: usize,
    },

    #[error("{path}: row {row}, column `{column}`: cannot parse {value:?} as a number")]
    UnparseableNumeric {
        path: String,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: row {row}, column `{column}`: missing value")]
    MissingValue {
        path: String,
        row: usize,
        column: String,
    },

    #[error("{path}: file has no data rows")]
    EmptyFile { path: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the instance admitting no fair or capacitated
    /// solution under the requested parameters, as opposed to bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::BalanceBelowThreshold { .. }
                | Error::MissingGroup { .. }
                | Error::CapacityExceeded { .. }
                | Error::MergeDeadlock { .. }
                | Error::Unplaceable { .. }
                | Error::FlowInfeasible(_)
        )
    }
}
