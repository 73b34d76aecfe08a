//! Fair-capacitated clustering.
//!
//! Rows carry one binary protected label. The toolkit partitions them into `k`
//! clusters whose protected-group balance stays at or above a threshold `t`
//! and whose cardinality stays at or below a capacity `q`, while keeping the
//! summed point-to-medoid distance low.
//!
//! The pipeline has two stages:
//!
//! 1. [`fairlets`] splits the rows into small balanced groups (fairlets),
//!    either cost-agnostically ([`fairlets::vanilla_decompose`]) or by solving a
//!    minimum-cost flow ([`fairlets::mcf_decompose`]).
//! 2. [`capclust`] clusters the weighted fairlets under the capacity `q`, with
//!    capacity-gated agglomerative merging or knapsack-assignment k-medoids.
//!
//! Any union of fairlets keeps balance `>= t`, so composing the fairlet-level
//! assignment back onto rows ([`compose_assignment`]) yields a fair clustering.
//! [`baselines`] holds the unconstrained comparison methods and the
//! seven-method [`baselines::pipeline`] dispatcher; [`metrics`] turns a
//! clustering into a [`metrics::RunRecord`].

pub mod balance;
pub mod baselines;
pub mod capclust;
pub mod clustering;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod fairlets;
pub mod ingest;
pub mod metrics;
pub mod params;
pub mod rng;

pub use balance::{balance_of, BalanceRatio, Threshold};
pub use clustering::{
    clustering_balance, clustering_cost, compose_assignment, compose_labels, Clustering,
};
pub use dataset::Dataset;
pub use distance::{distance, DistanceMatrix};
pub use error::{Error, Result};
pub use fairlets::{Fairlet, FairletDecomposition};
pub use params::Params;
pub use rng::SeedStream;
