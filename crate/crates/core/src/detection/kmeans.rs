use crate::error::{Error, Result};

/// Outcome of 1-D Lloyd clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans1d {
    /// Cluster index per input value; clusters are ordered by centroid.
    pub assignments: Vec<usize>,
    pub centroids: Vec<f64>,
    /// Fewer distinct values than clusters. Centroids are duplicated and every
    /// value is assigned to cluster 0; callers should not filter on this.
    pub degenerate: bool,
}

/// Deterministic 1-D k-means.
///
/// Centroids start evenly spaced between `min` and `max` (exactly the
/// extremes for `k = 2`). Lloyd iterations run until assignments stop
/// changing or `iters` is reached. A value equidistant from two centroids
/// joins the lower one.
pub fn kmeans_1d(values: &[f64], k: usize, iters: usize) -> Result<KMeans1d> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("k-means needs at least one value".into()));
    }
    if k == 0 || iters == 0 {
        return Err(Error::InvalidConfig(format!(
            "k-means needs k >= 1 and iters >= 1, got k={k}, iters={iters}"
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < k {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        return Ok(KMeans1d {
            assignments: vec![0; values.len()],
            centroids: vec![mean; k],
            degenerate: true,
        });
    }

    let mut centroids: Vec<f64> = if k == 1 {
        vec![min]
    } else {
        (0..k)
            .map(|i| min + (max - min) * i as f64 / (k - 1) as f64)
            .collect()
    };
    let mut assignments = vec![usize::MAX; values.len()];

    for _ in 0..iters {
        let mut changed = false;
        for (slot, &v) in assignments.iter_mut().zip(values) {
            let mut best = 0;
            for (j, &c) in centroids.iter().enumerate().skip(1) {
                // Strict comparison keeps ties on the lower centroid.
                if (v - c).abs() < (v - centroids[best]).abs() {
                    best = j;
                }
            }
            if *slot != best {
                *slot = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&a, &v) in assignments.iter().zip(values) {
            sums[a] += v;
            counts[a] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j] / counts[j] as f64;
            }
        }
    }

    Ok(KMeans1d {
        assignments,
        centroids,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Best split of sorted values into a low and a high group by exhaustive
    /// search over boundaries (global SSE minimum).
    fn best_split(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let sse = |s: &[f64]| {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            s.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        };
        let cut = (1..v.len())
            .min_by(|&a, &b| {
                (sse(&v[..a]) + sse(&v[a..])).total_cmp(&(sse(&v[..b]) + sse(&v[b..])))
            })
            .unwrap();
        (v[..cut].to_vec(), v[cut..].to_vec())
    }

    #[test]
    fn two_clusters_match_exhaustive_split() {
        let values = [1.0, 1.0, 2.0, 10.0, 11.0];
        let (lo, hi) = best_split(&values);
        assert_eq!(lo, vec![1.0, 1.0, 2.0]);
        assert_eq!(hi, vec![10.0, 11.0]);

        let km = kmeans_1d(&values, 2, 100).unwrap();
        assert!(!km.degenerate);
        assert_eq!(km.assignments, vec![0, 0, 0, 1, 1]);
        assert!((km.centroids[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((km.centroids[1] - 10.5).abs() < 1e-12);
    }

    #[test]
    fn all_equal_is_degenerate() {
        let km = kmeans_1d(&[3.0; 4], 2, 100).unwrap();
        assert!(km.degenerate);
    }

    #[test]
    fn single_cluster_is_mean() {
        let km = kmeans_1d(&[1.0, 2.0, 6.0], 1, 10).unwrap();
        assert_eq!(km.centroids, vec![3.0]);
        assert_eq!(km.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn tie_goes_to_lower_centroid() {
        // Midpoint 5 is equidistant from the initial centroids 0 and 10.
        let km = kmeans_1d(&[0.0, 5.0, 10.0], 2, 1).unwrap();
        assert_eq!(km.assignments, vec![0, 0, 1]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(kmeans_1d(&[], 2, 10).is_err());
        assert!(kmeans_1d(&[1.0], 0, 10).is_err());
        assert!(kmeans_1d(&[1.0], 1, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn two_means_agree_with_exhaustive_oracle_on_separated_data(
            lo in proptest::collection::vec(0.0f64..1.0, 1..20),
            hi in proptest::collection::vec(10.0f64..11.0, 1..20),
        ) {
            let values: Vec<f64> = lo.iter().chain(&hi).copied().collect();
            let km = kmeans_1d(&values, 2, 100).unwrap();
            let (olo, _) = best_split(&values);
            let n_lo = km.assignments.iter().filter(|&&a| a == 0).count();
            proptest::prop_assert_eq!(n_lo, olo.len());
        }
    }
}
