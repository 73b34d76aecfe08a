//! Comparison methods and the seven-method pipeline dispatcher.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capclust::{
    hierarchical_fair_capacitated, kmedoids_fair_capacitated, weighted_points, TraceEvent,
    TraceKind, WeightedPoint,
};
use crate::clustering::{compose_assignment, Clustering};
use crate::dataset::Dataset;
use crate::distance::{l2, DistanceMatrix};
use crate::error::{Error, Result};
use crate::fairlets::{
    mcf_decompose_with, vanilla_decompose_with, CenterRule, FairletDecomposition,
};
use crate::metrics::{evaluate, RunRecord};
use crate::params::Params;
use crate::rng::SeedStream;

/// Result of plain PAM on the rows.
#[derive(Debug, Clone)]
pub struct PamResult {
    pub clustering: Clustering,
    /// Final PAM medoid rows, ascending.
    pub medoids: Vec<usize>,
    pub trace: Vec<TraceEvent>,
}

/// PAM k-medoids on the raw rows: nearest-medoid assignment and
/// best-improvement swaps until no swap lowers the cost.
pub fn kmedoids_vanilla(data: &Dataset, k: usize, seed: u64) -> Result<PamResult> {
    let n = data.len();
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!(
            "cannot form {k} clusters from {n} rows"
        )));
    }
    let dist = DistanceMatrix::from_points(data.features());
    let mut rng = SeedStream::new(seed).rng("pam-init");
    let mut medoids = sample(&mut rng, n, k).into_vec();
    medoids.sort_unstable();
    let mut cost = pam_cost(&dist, &medoids);
    let mut trace = vec![TraceEvent {
        iteration: 0,
        event: TraceKind::Assign,
        cost,
    }];

    let mut iteration = 0;
    loop {
        // nearest and second-nearest medoid distance per row
        let near: Vec<(usize, f64, f64)> = (0..n)
            .map(|x| {
                let mut best = (0, f64::INFINITY, f64::INFINITY);
                for (pos, &m) in medoids.iter().enumerate() {
                    let d = dist.get(x, m);
                    if d < best.1 {
                        best = (pos, d, best.1);
                    } else if d < best.2 {
                        best.2 = d;
                    }
                }
                best
            })
            .collect();
        let swaps: Vec<(usize, usize)> = (0..k)
            .flat_map(|pos| {
                let medoids = &medoids;
                (0..n)
                    .filter(move |o| medoids.binary_search(o).is_err())
                    .map(move |o| (pos, o))
            })
            .collect();
        let costs: Vec<f64> = swaps
            .par_iter()
            .map(|&(pos, o)| {
                near.iter()
                    .enumerate()
                    .map(|(x, &(p, d1, d2))| {
                        let keep = if p == pos { d2 } else { d1 };
                        keep.min(dist.get(x, o))
                    })
                    .sum()
            })
            .collect();
        let mut best: Option<(f64, usize)> = None;
        for (i, &c) in costs.iter().enumerate() {
            if c < cost && best.is_none_or(|(b, _)| c < b) {
                best = Some((c, i));
            }
        }
        let Some((_, i)) = best else { break };
        let (pos, o) = swaps[i];
        medoids[pos] = o;
        medoids.sort_unstable();
        cost = pam_cost(&dist, &medoids);
        iteration += 1;
        trace.push(TraceEvent {
            iteration,
            event: TraceKind::Swap,
            cost,
        });
    }

    let assignment = nearest_assignment(n, &medoids, |x, m| dist.get(x, m));
    let clustering = Clustering::with_medoids(assignment, k, data)?;
    Ok(PamResult {
        clustering,
        medoids,
        trace,
    })
}

fn pam_cost(dist: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..dist.len())
        .map(|x| {
            medoids
                .iter()
                .map(|&m| dist.get(x, m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Nearest-center labels (ties to the earliest center); every center is
/// labelled with its own cluster even when centers coincide.
fn nearest_assignment(
    n: usize,
    centers: &[usize],
    d: impl Fn(usize, usize) -> f64,
) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n)
        .map(|x| {
            let mut best = 0;
            for c in 1..centers.len() {
                if d(x, centers[c]) < d(x, centers[best]) {
                    best = c;
                }
            }
            best
        })
        .collect();
    for (c, &m) in centers.iter().enumerate() {
        labels[m] = c;
    }
    labels
}

/// Greedy farthest-first k-center result over weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct KCenterResult {
    /// Cluster id per point; cluster `i` is the `i`-th center picked.
    pub delta: Vec<usize>,
    pub centers: Vec<usize>,
    /// Largest point-to-assigned-center distance.
    pub radius: f64,
}

/// Gonzalez farthest-first traversal, first center drawn from `seed`.
/// Weights are ignored.
pub fn kcenter_greedy(points: &[WeightedPoint], k: usize, seed: u64) -> Result<KCenterResult> {
    if k == 0 || points.len() < k {
        return Err(Error::InvalidParameter(format!(
            "cannot pick {k} centers from {} points",
            points.len()
        )));
    }
    let first = SeedStream::new(seed)
        .rng("kcenter-init")
        .random_range(0..points.len());
    kcenter_from(points, k, first)
}

/// Farthest-first traversal from a given first center. Ties pick the
/// smallest index.
pub fn kcenter_from(points: &[WeightedPoint], k: usize, first: usize) -> Result<KCenterResult> {
    let l = points.len();
    if k == 0 || l < k || first >= l {
        return Err(Error::InvalidParameter(format!(
            "cannot pick {k} centers from {l} points starting at {first}"
        )));
    }
    let d = |a: usize, b: usize| l2(&points[a].position, &points[b].position);
    let mut centers = vec![first];
    let mut nearest: Vec<f64> = (0..l).map(|x| d(x, first)).collect();
    while centers.len() < k {
        let mut far = 0;
        for x in 1..l {
            if nearest[x] > nearest[far] {
                far = x;
            }
        }
        if centers.contains(&far) {
            // every point coincides with a center; take the first unused one
            far = (0..l).find(|x| !centers.contains(x)).expect("l >= k");
        }
        centers.push(far);
        for x in 0..l {
            nearest[x] = nearest[x].min(d(x, far));
        }
    }
    let delta = nearest_assignment(l, &centers, d);
    let radius = delta
        .iter()
        .enumerate()
        .map(|(x, &c)| d(x, centers[c]))
        .fold(0.0, f64::max);
    Ok(KCenterResult {
        delta,
        centers,
        radius,
    })
}

/// The seven compared methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    VanillaKmedoids,
    VanillaFairletKcenter,
    McfFairletKcenter,
    HierFairCapVanilla,
    HierFairCapMcf,
    KmedFairCapVanilla,
    KmedFairCapMcf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decomposer {
    Vanilla,
    Mcf,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::VanillaKmedoids,
        Method::VanillaFairletKcenter,
        Method::McfFairletKcenter,
        Method::HierFairCapVanilla,
        Method::HierFairCapMcf,
        Method::KmedFairCapVanilla,
        Method::KmedFairCapMcf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::VanillaKmedoids => "vanilla_kmedoids",
            Method::VanillaFairletKcenter => "vanilla_fairlet_kcenter",
            Method::McfFairletKcenter => "mcf_fairlet_kcenter",
            Method::HierFairCapVanilla => "hier_fair_cap_vanilla",
            Method::HierFairCapMcf => "hier_fair_cap_mcf",
            Method::KmedFairCapVanilla => "kmed_fair_cap_vanilla",
            Method::KmedFairCapMcf => "kmed_fair_cap_mcf",
        }
    }

    /// Methods that enforce the capacity `q`.
    pub fn is_fair_capacitated(&self) -> bool {
        matches!(
            self,
            Method::HierFairCapVanilla
                | Method::HierFairCapMcf
                | Method::KmedFairCapVanilla
                | Method::KmedFairCapMcf
        )
    }

    pub fn is_hierarchical(&self) -> bool {
        matches!(self, Method::HierFairCapVanilla | Method::HierFairCapMcf)
    }

    /// Methods built on a fairlet decomposition, which guarantee balance >= t.
    pub fn is_fair(&self) -> bool {
        *self != Method::VanillaKmedoids
    }

    fn decomposer(&self) -> Option<Decomposer> {
        match self {
            Method::VanillaKmedoids => None,
            Method::VanillaFairletKcenter
            | Method::HierFairCapVanilla
            | Method::KmedFairCapVanilla => Some(Decomposer::Vanilla),
            Method::McfFairletKcenter | Method::HierFairCapMcf | Method::KmedFairCapMcf => {
                Some(Decomposer::Mcf)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(Method::name).collect();
                Error::InvalidParameter(format!(
                    "unknown method {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Output of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub clustering: Clustering,
    pub record: RunRecord,
    pub decomposition: Option<FairletDecomposition>,
    pub trace: Vec<TraceEvent>,
}

/// Runs decomposition (if the method uses one), clustering, and composition,
/// and evaluates the resulting row-level clustering.
pub fn pipeline(method: Method, data: &Dataset, params: &Params) -> Result<PipelineRun> {
    params.validate()?;
    let started = Instant::now();
    let k = params.k;
    let q = params.capacity(data.len());

    let (clustering, decomposition, trace) = match method.decomposer() {
        None => {
            let pam = kmedoids_vanilla(data, k, params.seed)?;
            (pam.clustering, None, pam.trace)
        }
        Some(decomposer) => {
            let decomp = match decomposer {
                Decomposer::Vanilla => {
                    vanilla_decompose_with(
                        data,
                        params.t,
                        params.seed,
                        params.fairlet_center.unwrap_or(CenterRule::Random),
                    )?
                }
                Decomposer::Mcf => {
                    mcf_decompose_with(
                        data,
                        params.t,
                        params.seed,
                        params.fairlet_center.unwrap_or(CenterRule::Medoid),
                    )?
                }
            };
            let points = weighted_points(&decomp, data);
            let (delta, trace) = match method {
                Method::VanillaFairletKcenter | Method::McfFairletKcenter => {
                    (kcenter_greedy(&points, k, params.seed)?.delta, Vec::new())
                }
                Method::HierFairCapVanilla | Method::HierFairCapMcf => {
                    let a = hierarchical_fair_capacitated(&points, k, q)?;
                    (a.delta, a.trace)
                }
                Method::KmedFairCapVanilla | Method::KmedFairCapMcf => {
                    let a = kmedoids_fair_capacitated(&points, k, q, params.lambda, params.seed)?;
                    (a.delta, a.trace)
                }
                Method::VanillaKmedoids => unreachable!("handled above"),
            };
            let clustering = compose_assignment(&delta, k, &decomp, data)?;
            (clustering, Some(decomp), trace)
        }
    };

    let mut record = evaluate(&clustering, data, params, method.name());
    record.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    Ok(PipelineRun {
        clustering,
        record,
        decomposition,
        trace,
    })
}
