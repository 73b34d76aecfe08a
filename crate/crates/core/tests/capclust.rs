mod common;

use faircap::capclust::{
    capacity_threshold, hierarchical_fair_capacitated, kmedoids_fair_capacitated,
    weighted_points, WeightedPoint,
};
use faircap::fairlets::{mcf_decompose, vanilla_decompose};
use faircap::{clustering_balance, compose_assignment, Error, Threshold};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two tight groups far apart, with the given weights.
fn two_blobs(rng: &mut ChaCha8Rng, weights: &[usize], split: usize) -> Vec<WeightedPoint> {
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let base = if i < split { 0.0 } else { 10.0 };
            WeightedPoint {
                position: vec![base + rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
                weight: w,
                fairlet_index: i,
            }
        })
        .collect()
}

#[test]
fn small_instances_recover_the_optimal_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for round in 0..40 {
        let l = 2 * rng.random_range(1..=6);
        let points = two_blobs(&mut rng, &vec![1; l], l / 2);
        let q = l / 2;
        let (_, want) = common::best_two_partition(&points, q);

        let kmed = kmedoids_fair_capacitated(&points, 2, q, 0.3, round).unwrap();
        assert_eq!(common::normalized(&kmed.delta), want, "k-medoids round {round}");
        let hier = hierarchical_fair_capacitated(&points, 2, q).unwrap();
        assert_eq!(common::normalized(&hier.delta), want, "hierarchical round {round}");
    }
}

#[test]
fn small_weighted_instances_recover_the_optimal_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..40 {
        let half = rng.random_range(1..=5);
        let mut weights: Vec<usize> = (0..half).map(|_| rng.random_range(2..=3)).collect();
        weights.extend(weights.clone());
        let points = two_blobs(&mut rng, &weights, half);
        let q = weights.iter().sum::<usize>() / 2;
        let (_, want) = common::best_two_partition(&points, q);

        let kmed = kmedoids_fair_capacitated(&points, 2, q, 0.3, round).unwrap();
        assert_eq!(common::normalized(&kmed.delta), want);
        let hier = hierarchical_fair_capacitated(&points, 2, q).unwrap();
        assert_eq!(common::normalized(&hier.delta), want);
    }
}

#[test]
fn kmedoids_trace_is_monotone_and_short() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for seed in 0..20 {
        let data = common::feasible_half(&mut rng, 20..=200);
        let d = mcf_decompose(&data, Threshold::HALF, seed).unwrap();
        let points = weighted_points(&d, &data);
        let k = rng.random_range(2..=points.len().min(8));
        let q = capacity_threshold(data.len(), k, 1.01);
        match kmedoids_fair_capacitated(&points, k, q, 0.3, seed) {
            Ok(a) => {
                assert!(a.trace.windows(2).all(|w| w[1].cost <= w[0].cost));
                assert!(a.trace.len() - 1 < 10 * points.len());
            }
            Err(e) => assert!(e.is_infeasible(), "{e}"),
        }
    }
}

#[test]
fn deadlock_is_reported_as_infeasibility() {
    let points: Vec<WeightedPoint> = (0..3)
        .map(|i| WeightedPoint {
            position: vec![i as f64],
            weight: 3,
            fairlet_index: i,
        })
        .collect();
    let err = hierarchical_fair_capacitated(&points, 2, 4).unwrap_err();
    assert!(matches!(err, Error::MergeDeadlock { remaining: 3, k: 2, q: 4 }));
    assert!(err.is_infeasible());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fair_capacitated_outputs_are_fair_capacitated_and_complete(
        data_seed in any::<u64>(),
        seed in any::<u64>(),
        use_mcf in any::<bool>(),
        k in 2usize..=8,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
        let data = common::feasible_half(&mut rng, 30..=150);
        let d = if use_mcf {
            mcf_decompose(&data, Threshold::HALF, seed).unwrap()
        } else {
            vanilla_decompose(&data, Threshold::HALF, seed).unwrap()
        };
        let points = weighted_points(&d, &data);
        prop_assume!(points.len() >= k);
        let runs = [
            (kmedoids_fair_capacitated(&points, k, capacity_threshold(data.len(), k, 1.01), 0.3, seed),
             capacity_threshold(data.len(), k, 1.01)),
            (hierarchical_fair_capacitated(&points, k, capacity_threshold(data.len(), k, 1.2)),
             capacity_threshold(data.len(), k, 1.2)),
        ];
        for (run, q) in runs {
            let a = match run {
                Ok(a) => a,
                Err(e) => {
                    prop_assert!(e.is_infeasible(), "{}", e);
                    continue;
                }
            };
            prop_assert_eq!(a.delta.len(), points.len());
            prop_assert!(a.cluster_weights(&points).iter().all(|&w| w <= q));
            let c = compose_assignment(&a.delta, k, &d, &data).unwrap();
            prop_assert_eq!(c.sizes().iter().sum::<usize>(), data.len());
            prop_assert!(clustering_balance(&c, &data).meets(Threshold::HALF));
        }
    }

    #[test]
    fn hierarchical_partition_ignores_input_order(seed in any::<u64>(), l in 4usize..=40, k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<WeightedPoint> = (0..l)
            .map(|i| WeightedPoint {
                position: vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
                weight: rng.random_range(1..=3),
                fairlet_index: i,
            })
            .collect();
        let total: usize = points.iter().map(|p| p.weight).sum();
        let q = capacity_threshold(total, k, 1.5);
        let mut shuffled = points.clone();
        shuffled.shuffle(&mut rng);

        let groups = |pts: &[WeightedPoint], delta: &[usize]| {
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
            for (p, &c) in pts.iter().zip(delta) {
                groups[c].push(p.fairlet_index);
            }
            for g in &mut groups {
                g.sort_unstable();
            }
            groups.sort();
            groups
        };
        match (hierarchical_fair_capacitated(&points, k, q), hierarchical_fair_capacitated(&shuffled, k, q)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(groups(&points, &a.delta), groups(&shuffled, &b.delta)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }
}
