//! Euclidean distance and a dense pairwise matrix.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Euclidean distance between two equal-length vectors.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(l2(a, b))
}

/// Unchecked variant for callers that already guarantee equal lengths.
#[inline]
pub(crate) fn l2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Dense symmetric matrix of pairwise distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Pairwise distances between `points`, computed row-parallel. Every entry
    /// is computed by the same expression regardless of thread count.
    pub fn from_points<P: AsRef<[f64]> + Sync>(points: &[P]) -> Self {
        let n = points.len();
        let mut values = vec![0.0; n * n];
        values.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                // fixed operand order keeps d(i, j) == d(j, i) bit-for-bit
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                *v = l2(points[a].as_ref(), points[b].as_ref());
            }
        });
        Self { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..a.len() {
            let d = a[i] - b[i];
            acc += d * d;
        }
        acc.sqrt()
    }

    #[test]
    fn identity_and_triangle_345() {
        let v = [1.5, -2.0, 7.0];
        assert_eq!(distance(&v, &v).unwrap(), 0.0);
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(matches!(
            distance(&[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn matrix_matches_pointwise() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![-1.0, 2.0]];
        let m = DistanceMatrix::from_points(&pts);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
                assert!((m.get(i, j) - naive(&pts[i], &pts[j])).abs() < 1e-12);
            }
        }
        assert_eq!(m.get(0, 1), 5.0);
    }

    proptest! {
        #[test]
        fn agrees_with_naive_loop(a in prop::collection::vec(-100.0f64..100.0, 10),
                                  b in prop::collection::vec(-100.0f64..100.0, 10)) {
            let got = distance(&a, &b).unwrap();
            let want = naive(&a, &b);
            prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }

        #[test]
        fn metric_axioms(a in prop::collection::vec(-10.0f64..10.0, 4),
                         b in prop::collection::vec(-10.0f64..10.0, 4),
                         c in prop::collection::vec(-10.0f64..10.0, 4)) {
            let ab = distance(&a, &b).unwrap();
            let ba = distance(&b, &a).unwrap();
            let bc = distance(&b, &c).unwrap();
            let ac = distance(&a, &c).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(ab == 0.0, a == b);
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }
}
