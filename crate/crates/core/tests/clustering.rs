mod common;

use faircap::fairlets::{vanilla_decompose, Fairlet};
use faircap::{
    balance_of, clustering_balance, clustering_cost, compose_assignment, compose_labels,
    BalanceRatio, Clustering, Dataset, Error, FairletDecomposition, Threshold,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rows(xs: &[f64], labels: &[u8]) -> Dataset {
    Dataset::new(xs.iter().map(|&x| vec![x]).collect(), labels.to_vec()).unwrap()
}

#[test]
fn balance_of_perfect_clusters() {
    // clusters {(1F,1M), (2F,2M)}
    let data = rows(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[1, 0, 1, 1, 0, 0]);
    let c = Clustering::with_medoids(vec![0, 0, 1, 1, 1, 1], 2, &data).unwrap();
    assert_eq!(clustering_balance(&c, &data).value(), 1.0);
}

#[test]
fn balance_is_the_worst_cluster() {
    // clusters {(2F,1M), (1F,3M)} -> min(1/2, 1/3)
    let data = rows(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[1, 1, 0, 1, 0, 0, 0]);
    let c = Clustering::with_medoids(vec![0, 0, 0, 1, 1, 1, 1], 2, &data).unwrap();
    assert_eq!(clustering_balance(&c, &data), balance_of(1, 3));
}

#[test]
fn balance_matches_counting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = common::blob_data(60, 25, 3, 0.2, 2);
    for _ in 0..100 {
        let k = rng.random_range(1..=8);
        // every cluster gets row i < k, the rest at random
        let assignment: Vec<usize> = (0..data.len())
            .map(|i| if i < k { i } else { rng.random_range(0..k) })
            .collect();
        let c = Clustering::with_medoids(assignment.clone(), k, &data).unwrap();

        let mut worst = f64::INFINITY;
        for cl in 0..k {
            let ones = (0..data.len())
                .filter(|&i| assignment[i] == cl && data.label(i) == 1)
                .count() as f64;
            let zeros = (0..data.len())
                .filter(|&i| assignment[i] == cl && data.label(i) == 0)
                .count() as f64;
            let b = if ones == 0.0 || zeros == 0.0 {
                0.0
            } else {
                (ones / zeros).min(zeros / ones)
            };
            worst = worst.min(b);
        }
        assert_eq!(clustering_balance(&c, &data).value(), worst);
    }
}

#[test]
fn cost_examples() {
    let data = rows(&[0.0, 2.0, 7.0], &[0, 1, 0]);
    let singletons = Clustering::new(vec![0, 1, 2], vec![0, 1, 2], 3).unwrap();
    assert_eq!(clustering_cost(&singletons, &data), 0.0);

    let pair = rows(&[0.0, 2.0], &[0, 1]);
    let c = Clustering::new(vec![0, 0], vec![0], 1).unwrap();
    assert_eq!(clustering_cost(&c, &pair), 2.0);
}

#[test]
fn cost_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = common::blob_data(40, 15, 2, 0.3, 4);
    for _ in 0..20 {
        let k = rng.random_range(1..=5);
        let assignment: Vec<usize> = (0..data.len())
            .map(|i| if i < k { i } else { rng.random_range(0..k) })
            .collect();
        let c = Clustering::with_medoids(assignment.clone(), k, &data).unwrap();
        let mut want = 0.0;
        for cl in 0..k {
            let rep = c.representatives()[cl];
            for i in 0..data.len() {
                if assignment[i] == cl {
                    let mut s = 0.0;
                    for d in 0..data.dim() {
                        s += (data.row(i)[d] - data.row(rep)[d]).powi(2);
                    }
                    want += s.sqrt();
                }
            }
        }
        assert!((clustering_cost(&c, &data) - want).abs() < 1e-9);
    }
}

#[test]
fn medoid_representatives_minimize_summed_distance() {
    let data = rows(&[0.0, 1.0, 2.0, 10.0, 11.0], &[0, 1, 0, 1, 0]);
    let c = Clustering::with_medoids(vec![0, 0, 0, 1, 1], 2, &data).unwrap();
    assert_eq!(c.representatives(), [1, 3]);
}

#[test]
fn clustering_construction_errors() {
    let data = rows(&[0.0, 1.0], &[0, 1]);
    assert!(matches!(
        Clustering::with_medoids(vec![0, 0], 2, &data),
        Err(Error::EmptyCluster { cluster: 1 })
    ));
    assert!(Clustering::new(vec![0, 1], vec![1, 0], 2).is_err());
    assert!(Clustering::new(vec![0, 2], vec![0, 1], 2).is_err());
}

fn two_fairlets() -> (Dataset, FairletDecomposition) {
    let data = rows(&[0.0, 1.0, 5.0], &[0, 1, 1]);
    let d = FairletDecomposition::new(
        vec![
            Fairlet::new(vec![0, 1], 0).unwrap(),
            Fairlet::new(vec![2], 2).unwrap(),
        ],
        3,
        Threshold::HALF,
    )
    .unwrap();
    (data, d)
}

#[test]
fn constant_delta_sends_every_row_to_one_cluster() {
    let (data, d) = two_fairlets();
    assert_eq!(compose_labels(&[1, 1], &d).unwrap(), vec![1, 1, 1]);
    // with k = 2 cluster 0 would be empty
    assert!(matches!(
        compose_assignment(&[1, 1], 2, &d, &data),
        Err(Error::EmptyCluster { cluster: 0 })
    ));
    let c = compose_assignment(&[0, 0], 1, &d, &data).unwrap();
    assert_eq!(c.sizes(), vec![3]);
}

#[test]
fn identity_delta_reproduces_fairlets() {
    let (data, d) = two_fairlets();
    let c = compose_assignment(&[0, 1], 2, &d, &data).unwrap();
    assert_eq!(c.assignment(), d.gamma());
}

#[test]
fn short_delta_is_rejected() {
    let (data, d) = two_fairlets();
    assert!(matches!(
        compose_assignment(&[0], 1, &d, &data),
        Err(Error::IncompleteAssignment { expected: 2, got: 1 })
    ));
}

#[test]
fn composed_sizes_sum_fairlet_weights_and_stay_fair() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..50 {
        let data = common::feasible_half(&mut rng, 20..=120);
        let d = vanilla_decompose(&data, Threshold::HALF, round).unwrap();
        let l = d.fairlets().len();
        let k = rng.random_range(1..=l.min(6));
        let delta: Vec<usize> = (0..l)
            .map(|j| if j < k { j } else { rng.random_range(0..k) })
            .collect();
        let c = compose_assignment(&delta, k, &d, &data).unwrap();

        let mut want = vec![0usize; k];
        for (j, f) in d.fairlets().iter().enumerate() {
            want[delta[j]] += f.weight();
        }
        assert_eq!(c.sizes(), want);
        assert_eq!(c.sizes().iter().sum::<usize>(), data.len());
        assert!(clustering_balance(&c, &data) >= balance_of(1, 2));
        assert_ne!(clustering_balance(&c, &data), BalanceRatio::ZERO);
    }
}
