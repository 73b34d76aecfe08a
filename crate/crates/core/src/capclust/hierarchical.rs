//! Capacity-gated agglomerative clustering over weighted points.

use super::{check_feasible, FairletAssignment, TraceEvent, TraceKind, WeightedPoint};
use crate::distance::l2;
use crate::error::{Error, Result};

struct Cluster {
    centroid: Vec<f64>,
    weight: usize,
    members: Vec<usize>,
}

/// Repeatedly merges the closest pair of clusters whose combined weight fits
/// in `q` until `k` clusters remain.
///
/// Proximity is the distance between weight-weighted centroids. Pairs that
/// would exceed `q` are passed over in favour of the next-closest pair; ties
/// go to the pair with the smallest (id, id), where a merged cluster keeps
/// the smaller id. Cluster ids in the result follow ascending surviving id.
pub fn hierarchical_fair_capacitated(
    points: &[WeightedPoint],
    k: usize,
    q: usize,
) -> Result<FairletAssignment> {
    // an over-full budget surfaces as a merge deadlock
    check_feasible(points, k, q, false)?;
    let l = points.len();
    let mut clusters: Vec<Option<Cluster>> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Some(Cluster {
                centroid: p.position.clone(),
                weight: p.weight,
                members: vec![i],
            })
        })
        .collect();
    let mut proximity = vec![0.0; l * l];
    for a in 0..l {
        for b in a + 1..l {
            let d = l2(&points[a].position, &points[b].position);
            proximity[a * l + b] = d;
            proximity[b * l + a] = d;
        }
    }

    let mut active: Vec<usize> = (0..l).collect();
    let mut trace = Vec::new();
    let mut iteration = 0;
    while active.len() > k {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            let wa = clusters[a].as_ref().map_or(0, |c| c.weight);
            for &b in &active[ai + 1..] {
                let wb = clusters[b].as_ref().map_or(0, |c| c.weight);
                if wa + wb > q {
                    continue;
                }
                let d = proximity[a * l + b];
                // strict `<` keeps the first (smallest-id) pair among equals
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let Some((d, a, b)) = best else {
            return Err(Error::MergeDeadlock {
                remaining: active.len(),
                k,
                q,
            });
        };

        let absorbed = clusters[b].take().expect("active cluster");
        let target = clusters[a].as_mut().expect("active cluster");
        let total = target.weight + absorbed.weight;
        let (wa, wb) = (target.weight as f64, absorbed.weight as f64);
        for (x, y) in target.centroid.iter_mut().zip(&absorbed.centroid) {
            *x = (wa * *x + wb * y) / total as f64;
        }
        target.weight = total;
        target.members.extend(absorbed.members);
        active.retain(|&c| c != b);

        let centroid = target.centroid.clone();
        for &c in &active {
            if c != a {
                let other = clusters[c].as_ref().expect("active cluster");
                let d = l2(&centroid, &other.centroid);
                proximity[a * l + c] = d;
                proximity[c * l + a] = d;
            }
        }

        iteration += 1;
        trace.push(TraceEvent {
            iteration,
            event: TraceKind::Merge,
            cost: d,
        });
    }

    let mut delta = vec![0; l];
    for (id, &c) in active.iter().enumerate() {
        for &m in &clusters[c].as_ref().expect("active cluster").members {
            delta[m] = id;
        }
    }
    Ok(FairletAssignment {
        delta,
        k,
        centers: None,
        trace,
    })
}
