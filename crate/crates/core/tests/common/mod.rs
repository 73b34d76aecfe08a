#![allow(dead_code)]

use faircap::Dataset;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Points scattered around `blobs` random centers in the unit square, with
/// exactly `minority` rows labelled 1 at random positions.
pub fn blob_data(n: usize, minority: usize, blobs: usize, spread: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<[f64; 2]> = (0..blobs)
        .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let features = (0..n)
        .map(|i| {
            let c = centers[i % blobs];
            vec![
                c[0] + rng.random_range(-spread..spread),
                c[1] + rng.random_range(-spread..spread),
            ]
        })
        .collect();
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < minority)).collect();
    labels.shuffle(&mut rng);
    Dataset::new(features, labels).unwrap()
}

/// Random dataset whose balance is between 1/2 and 1.
pub fn feasible_half(rng: &mut ChaCha8Rng, n_range: std::ops::RangeInclusive<usize>) -> Dataset {
    let n = rng.random_range(n_range);
    // minority in [ceil(n/3), n/2] keeps minority/majority >= 1/2
    let minority = rng.random_range(n.div_ceil(3)..=n / 2);
    let blobs = rng.random_range(1..=5);
    blob_data(n, minority, blobs, rng.random_range(0.02..0.3), rng.random())
}

/// Cheapest split of `points` into two nonempty groups of weight at most `q`,
/// where a group costs its weighted distance sum to its best member. Labels
/// are normalized so point 0 is in group 0.
pub fn best_two_partition(points: &[faircap::capclust::WeightedPoint], q: usize) -> (f64, Vec<usize>) {
    let l = points.len();
    let d = |a: usize, b: usize| {
        points[a]
            .position
            .iter()
            .zip(&points[b].position)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let group_cost = |members: &[usize]| {
        members
            .iter()
            .map(|&c| members.iter().map(|&j| points[j].weight as f64 * d(j, c)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (f64::INFINITY, Vec::new());
    // point 0 always in group 0; mask over the rest marks group 1
    for mask in 1u32..(1 << (l - 1)) {
        let labels: Vec<usize> = (0..l).map(|j| if j == 0 { 0 } else { (mask >> (j - 1) & 1) as usize }).collect();
        let groups: Vec<Vec<usize>> = (0..2).map(|g| (0..l).filter(|&j| labels[j] == g).collect()).collect();
        if groups.iter().any(|g| g.iter().map(|&j| points[j].weight).sum::<usize>() > q) {
            continue;
        }
        let cost = group_cost(&groups[0]) + group_cost(&groups[1]);
        if cost < best.0 {
            best = (cost, labels);
        }
    }
    best
}

/// Relabels so the first occurrence of each cluster id is increasing from 0.
pub fn normalized(delta: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    delta
        .iter()
        .map(|c| {
            let next = map.len();
            *map.entry(*c).or_insert(next)
        })
        .collect()
}
