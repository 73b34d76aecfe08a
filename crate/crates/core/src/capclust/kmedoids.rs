//! k-medoids over weighted points with a knapsack assignment step.
//!
//! Each medoid, in ascending index order, claims the value-maximal set of
//! still-unassigned points that fits its remaining capacity, where a point's
//! value is `exp(-d / lambda)` for its distance `d` to the medoid. The swap
//! phase then replaces medoids by non-medoids while the clustering cost
//! (weight times distance to the medoid) strictly drops.

use rand::seq::index::sample;
use rayon::prelude::*;

use super::knapsack::{knapsack_select, two_class_select, WeightClass};
use super::{check_feasible, FairletAssignment, TraceEvent, TraceKind, WeightedPoint};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

const UNASSIGNED: usize = usize::MAX;
/// Initial medoid draws tried before an unplaceable start is reported.
const INIT_ATTEMPTS: usize = 16;

/// `exp(-d / lambda)`: 1 at distance 0, decaying towards 0.
pub fn decay_value(d: f64, lambda: f64) -> f64 {
    (-d / lambda).exp()
}

struct Problem<'a> {
    points: &'a [WeightedPoint],
    dist: DistanceMatrix,
    q: usize,
    /// `values[m * l + j]` is the decay value of point `j` for medoid `m`.
    values: Vec<f64>,
    /// Per medoid, every point in best-first knapsack order.
    order: Vec<Vec<usize>>,
    /// The distinct weights, ascending, when there are at most two.
    two_weights: Option<(usize, Option<usize>)>,
}

#[derive(Debug, Clone)]
struct Configuration {
    medoids: Vec<usize>,
    delta: Vec<usize>,
    cost: f64,
}

impl<'a> Problem<'a> {
    fn new(points: &'a [WeightedPoint], q: usize, lambda: f64) -> Self {
        let l = points.len();
        let dist = DistanceMatrix::from_points(
            &points.iter().map(|p| p.position.as_slice()).collect::<Vec<_>>(),
        );
        let values: Vec<f64> = (0..l * l)
            .map(|i| decay_value(dist.get(i / l, i % l), lambda))
            .collect();
        let order = (0..l)
            .into_par_iter()
            .map(|m| {
                let row = &values[m * l..(m + 1) * l];
                let mut order: Vec<usize> = (0..l).collect();
                order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                order
            })
            .collect();
        let mut distinct: Vec<usize> = points.iter().map(|p| p.weight).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let two_weights = match distinct.as_slice() {
            [w] => Some((*w, None)),
            [w1, w2] => Some((*w1, Some(*w2))),
            _ => None,
        };
        Self {
            points,
            dist,
            q,
            values,
            order,
            two_weights,
        }
    }

    /// Knapsack selection for medoid `m` over the unassigned points.
    fn claim(&self, m: usize, delta: &[usize], room: usize) -> Vec<usize> {
        let l = self.points.len();
        let row = &self.values[m * l..(m + 1) * l];
        if let Some((light_w, heavy_w)) = self.two_weights {
            let (light, heavy): (Vec<usize>, Vec<usize>) = self.order[m]
                .iter()
                .filter(|&&j| delta[j] == UNASSIGNED)
                .partition(|&&j| self.weight(j) == light_w);
            let light = WeightClass::presorted(light_w, light, row);
            let heavy = heavy_w.map(|w| WeightClass::presorted(w, heavy, row));
            return two_class_select(&light, heavy.as_ref(), room);
        }
        let candidates: Vec<usize> = (0..l).filter(|&j| delta[j] == UNASSIGNED).collect();
        let values: Vec<f64> = candidates.iter().map(|&j| row[j]).collect();
        let weights: Vec<usize> = candidates.iter().map(|&j| self.weight(j)).collect();
        knapsack_select(&values, &weights, room)
            .into_iter()
            .map(|s| candidates[s])
            .collect()
    }

    fn weight(&self, j: usize) -> usize {
        self.points[j].weight
    }

    /// Knapsack assignment for a sorted medoid set.
    fn assign(&self, medoids: &[usize]) -> Result<Configuration> {
        let l = self.points.len();
        let mut delta = vec![UNASSIGNED; l];
        let mut room = vec![0usize; medoids.len()];
        for (c, &m) in medoids.iter().enumerate() {
            delta[m] = c;
            room[c] = self.q - self.weight(m);
        }

        for (c, &m) in medoids.iter().enumerate() {
            for j in self.claim(m, &delta, room[c]) {
                delta[j] = c;
                room[c] -= self.weight(j);
            }
        }

        // knapsacks maximize value, not coverage: place what is left
        let mut leftovers: Vec<usize> = (0..l).filter(|&j| delta[j] == UNASSIGNED).collect();
        leftovers.sort_by_key(|&j| (std::cmp::Reverse(self.weight(j)), j));
        for f in leftovers {
            let w = self.weight(f);
            let nearest = (0..medoids.len())
                .filter(|&c| room[c] >= w)
                .min_by(|&a, &b| {
                    self.dist
                        .get(f, medoids[a])
                        .total_cmp(&self.dist.get(f, medoids[b]))
                        .then(a.cmp(&b))
                });
            match nearest {
                Some(c) => {
                    delta[f] = c;
                    room[c] -= w;
                }
                None => self.eject_into(f, medoids, &mut delta, &mut room)?,
            }
        }

        let cost = self.cost(medoids, &delta);
        Ok(Configuration {
            medoids: medoids.to_vec(),
            delta,
            cost,
        })
    }

    /// Places `f` by moving one lighter non-medoid `g` out of a cluster `c`
    /// into another cluster with room for it, choosing the cheapest such move.
    fn eject_into(
        &self,
        f: usize,
        medoids: &[usize],
        delta: &mut [usize],
        room: &mut [usize],
    ) -> Result<()> {
        let w = self.weight(f);
        let k = medoids.len();
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for (g, &c) in delta.iter().enumerate() {
            if c == UNASSIGNED || medoids[c] == g {
                continue;
            }
            let wg = self.weight(g);
            if room[c] + wg < w {
                continue;
            }
            for c2 in (0..k).filter(|&c2| c2 != c && room[c2] >= wg) {
                let added = w as f64 * self.dist.get(f, medoids[c])
                    + wg as f64 * (self.dist.get(g, medoids[c2]) - self.dist.get(g, medoids[c]));
                if best.is_none_or(|(b, ..)| added < b) {
                    best = Some((added, g, c, c2));
                }
            }
        }
        let Some((_, g, c, c2)) = best else {
            return Err(Error::Unplaceable {
                fairlet: self.points[f].fairlet_index,
                weight: w,
                q: self.q,
            });
        };
        let wg = self.weight(g);
        delta[g] = c2;
        room[c2] -= wg;
        room[c] += wg;
        delta[f] = c;
        room[c] -= w;
        Ok(())
    }

    fn cost(&self, medoids: &[usize], delta: &[usize]) -> f64 {
        delta
            .iter()
            .enumerate()
            .map(|(j, &c)| self.weight(j) as f64 * self.dist.get(j, medoids[c]))
            .sum()
    }
}

/// Fair-capacitated k-medoids over weighted points.
///
/// Initial medoids are a seeded uniform sample, redrawn from the same stream
/// while the first assignment cannot place every point. Each swap iteration scans
/// every (medoid, non-medoid) exchange, re-runs the knapsack assignment, and
/// applies the exchange with the lowest cost if it beats the current one
/// (ties go to the earliest in scan order). Exchanges whose assignment is
/// infeasible are skipped. The loop stops at a configuration no single
/// exchange improves.
pub fn kmedoids_fair_capacitated(
    points: &[WeightedPoint],
    k: usize,
    q: usize,
    lambda: f64,
    seed: u64,
) -> Result<FairletAssignment> {
    check_feasible(points, k, q, true)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} must be > 0")));
    }
    let l = points.len();
    let problem = Problem::new(points, q, lambda);

    let mut rng = SeedStream::new(seed).rng("kmedoids-init");
    let mut attempt = 0;
    let mut current = loop {
        let mut medoids = sample(&mut rng, l, k).into_vec();
        medoids.sort_unstable();
        attempt += 1;
        match problem.assign(&medoids) {
            Err(e) if e.is_infeasible() && attempt < INIT_ATTEMPTS => continue,
            result => break result?,
        }
    };
    let mut trace = vec![TraceEvent {
        iteration: 0,
        event: TraceKind::Assign,
        cost: current.cost,
    }];

    let mut iteration = 0;
    loop {
        let swaps: Vec<(usize, usize)> = (0..k)
            .flat_map(|pos| {
                let medoids = &current.medoids;
                (0..l)
                    .filter(move |o| medoids.binary_search(o).is_err())
                    .map(move |o| (pos, o))
            })
            .collect();
        let costs: Vec<Option<f64>> = swaps
            .par_iter()
            .map(|&(pos, o)| {
                let candidate = swapped(&current.medoids, pos, o);
                problem.assign(&candidate).ok().map(|c| c.cost)
            })
            .collect();

        let mut best: Option<(f64, usize)> = None;
        for (i, cost) in costs.iter().enumerate() {
            if let Some(cost) = *cost {
                if cost < current.cost && best.is_none_or(|(b, _)| cost < b) {
                    best = Some((cost, i));
                }
            }
        }
        let Some((_, i)) = best else { break };
        let (pos, o) = swaps[i];
        current = problem.assign(&swapped(&current.medoids, pos, o))?;
        iteration += 1;
        trace.push(TraceEvent {
            iteration,
            event: TraceKind::Swap,
            cost: current.cost,
        });
    }

    Ok(FairletAssignment {
        delta: current.delta,
        k,
        centers: Some(current.medoids),
        trace,
    })
}

fn swapped(medoids: &[usize], pos: usize, o: usize) -> Vec<usize> {
    let mut next = medoids.to_vec();
    next[pos] = o;
    next.sort_unstable();
    next
}
