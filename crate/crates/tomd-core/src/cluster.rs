//! Spectral clustering of an affinity matrix: symmetric-normalized
//! Laplacian, k smallest eigenvectors, row normalization, then seeded
//! k-means (k-means++ initialization, Lloyd refinement).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::sym_eig_smallest;
use crate::tensor::DenseTensor;

/// A hard clustering of N samples into k clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    /// Cluster id per sample, each in 0..k.
    pub labels: Vec<usize>,
    pub k: usize,
    /// Final k-means objective: Σᵢ ‖xᵢ − c_{label(i)}‖².
    pub inertia: f64,
}

fn row(points: &DenseTensor, i: usize) -> Vec<f64> {
    let (n, d) = (points.rows(), points.cols());
    (0..d).map(|j| points.data()[j * n + i]).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from k-means++ seeding; returns the per-iteration
/// inertia trace alongside the assignment.
fn lloyd(points: &DenseTensor, k: usize, seed: u64) -> (ClusterAssignment, Vec<f64>) {
    let n = points.rows();
    let pts: Vec<Vec<f64>> = (0..n).map(|i| row(points, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding: first center uniform, then D²-weighted
    let mut centers: Vec<Vec<f64>> = vec![pts[rng.random_range(0..n)].clone()];
    let mut min_d2: Vec<f64> = pts.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = min_d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // all remaining points coincide with chosen centers
            (0..n)
                .find(|&i| centers.iter().all(|c| dist2(&pts[i], c) > 0.0))
                .unwrap_or(centers.len() % n)
        };
        centers.push(pts[next].clone());
        for i in 0..n {
            min_d2[i] = min_d2[i].min(dist2(&pts[i], centers.last().unwrap()));
        }
    }

    let assign = |centers: &[Vec<f64>]| -> (Vec<usize>, f64) {
        let mut labels = vec![0usize; n];
        let mut inertia = 0.0;
        for i in 0..n {
            let (mut best, mut best_d) = (0usize, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = dist2(&pts[i], center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            labels[i] = best;
            inertia += best_d;
        }
        (labels, inertia)
    };

    let (mut labels, mut inertia) = assign(&centers);
    let mut trace = vec![inertia];
    for _ in 0..300 {
        // means of the current assignment; empty clusters grab the point
        // farthest from its center
        let dim = pts[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &x) in sums[c].iter_mut().zip(&pts[i]) {
                *s += x;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|&s| s / counts[c] as f64).collect();
            } else {
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| {
                        let da = dist2(&pts[a], &centers[labels[a]]);
                        let db = dist2(&pts[b], &centers[labels[b]]);
                        da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                    })
                    .unwrap_or(c % n);
                taken[far] = true;
                centers[c] = pts[far].clone();
            }
        }
        let (next_labels, next_inertia) = assign(&centers);
        let stable = next_labels == labels;
        labels = next_labels;
        inertia = next_inertia;
        trace.push(inertia);
        if stable {
            break;
        }
    }
    (
        ClusterAssignment { labels, k, inertia },
        trace,
    )
}

/// Seeded k-means over row-vector points (N×d matrix).
pub fn kmeans(points: &DenseTensor, k: usize, seed: u64) -> Result<ClusterAssignment> {
    if points.order() != 2 {
        return Err(Error::Shape(format!(
            "points must form an N×d matrix, got {:?}",
            points.shape()
        )));
    }
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArg(format!(
            "cluster count {k} out of range 1..={n}"
        )));
    }
    Ok(lloyd(points, k, seed).0)
}

/// Spectral clustering: normalized Laplacian
/// L_sym = I − D^{−1/2}·(M+Mᵀ)/2·D^{−1/2} (zero-degree samples are treated
/// as isolated identity rows), k smallest eigenvectors, unit row
/// normalization (zero rows untouched), then seeded k-means.
pub fn spectral_clustering(m: &DenseTensor, k: usize, seed: u64) -> Result<ClusterAssignment> {
    if m.order() != 2 || m.rows() != m.cols() {
        return Err(Error::Shape(format!(
            "affinity must be square, got {:?}",
            m.shape()
        )));
    }
    if m.data().iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidArg(
            "affinity must be entrywise nonnegative".into(),
        ));
    }
    let n = m.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArg(format!(
            "cluster count {k} out of range 1..={n}"
        )));
    }
    let mut w = DenseTensor::zeros(&[n, n]);
    for i in 0..n {
        for j in 0..n {
            w.set2(i, j, 0.5 * (m.get2(i, j) + m.get2(j, i)));
        }
    }
    let inv_sqrt_d: Vec<f64> = (0..n)
        .map(|i| {
            let d: f64 = (0..n).map(|j| w.get2(i, j)).sum();
            if d > 0.0 {
                1.0 / libm::sqrt(d)
            } else {
                0.0
            }
        })
        .collect();
    let lap = DenseTensor::from_fn(&[n, n], |ix| {
        let (i, j) = (ix[0], ix[1]);
        let off = w.get2(i, j) * inv_sqrt_d[i] * inv_sqrt_d[j];
        if i == j {
            1.0 - off
        } else {
            -off
        }
    });
    let (_, vecs) = sym_eig_smallest(&lap, k)?;
    let mut embed = vecs;
    for i in 0..n {
        let norm: f64 = libm::sqrt(
            (0..k)
                .map(|j| {
                    let x = embed.get2(i, j);
                    x * x
                })
                .sum(),
        );
        if norm > 0.0 {
            for j in 0..k {
                let x = embed.get2(i, j) / norm;
                embed.set2(i, j, x);
            }
        }
    }
    kmeans(&embed, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kmeans_separates_two_gaps() {
        let pts = DenseTensor::new(vec![4, 1], vec![0.0, 0.1, 10.0, 10.1]).unwrap();
        let a = kmeans(&pts, 2, 0).unwrap();
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
        assert_ne!(a.labels[0], a.labels[2]);
    }

    #[test]
    fn kmeans_with_k_equal_n_is_exact() {
        let pts = DenseTensor::new(vec![3, 1], vec![1.0, 5.0, 9.0]).unwrap();
        let a = kmeans(&pts, 3, 7).unwrap();
        let mut seen = a.labels.clone();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
        assert_eq!(a.inertia, 0.0);
    }

    #[test]
    fn kmeans_duplicates_collapse() {
        let pts = DenseTensor::new(vec![4, 2], vec![2.0; 8]).unwrap();
        let a = kmeans(&pts, 1, 3).unwrap();
        assert_eq!(a.labels, vec![0; 4]);
        assert_eq!(a.inertia, 0.0);
        // duplicated points with k exceeding the distinct count still works
        let a = kmeans(&pts, 3, 3).unwrap();
        assert_eq!(a.inertia, 0.0);
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        let pts = DenseTensor::zeros(&[3, 2]);
        assert!(kmeans(&pts, 0, 0).is_err());
        assert!(kmeans(&pts, 4, 0).is_err());
    }

    #[test]
    fn kmeans_is_deterministic_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = DenseTensor::from_fn(&[40, 3], |_| rng.random::<f64>());
        let a = kmeans(&pts, 4, 5).unwrap();
        let b = kmeans(&pts, 4, 5).unwrap();
        assert_eq!(a, b);
        let (_, trace) = lloyd(&pts, 4, 5);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "inertia increased: {w:?}");
        }
    }

    #[test]
    fn spectral_splits_disconnected_blocks() {
        // two blocks of sizes 3 and 4, no cross edges
        let n = 7;
        let m = DenseTensor::from_fn(&[n, n], |ix| {
            let (i, j) = (ix[0], ix[1]);
            if i == j {
                0.0
            } else if (i < 3) == (j < 3) {
                1.0
            } else {
                0.0
            }
        });
        let a = spectral_clustering(&m, 2, 0).unwrap();
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[0], a.labels[2]);
        assert_eq!(a.labels[3], a.labels[4]);
        assert_eq!(a.labels[3], a.labels[6]);
        assert_ne!(a.labels[0], a.labels[3]);
    }

    #[test]
    fn spectral_k_one_is_constant() {
        let m = DenseTensor::from_fn(&[5, 5], |ix| if ix[0] == ix[1] { 0.0 } else { 1.0 });
        let a = spectral_clustering(&m, 1, 0).unwrap();
        assert_eq!(a.labels, vec![0; 5]);
    }

    #[test]
    fn spectral_handles_zero_degree_rows() {
        // sample 4 is isolated; the rest form two blocks
        let m = DenseTensor::from_fn(&[5, 5], |ix| {
            let (i, j) = (ix[0], ix[1]);
            if i >= 4 || j >= 4 || i == j {
                0.0
            } else if (i < 2) == (j < 2) {
                1.0
            } else {
                0.0
            }
        });
        let a = spectral_clustering(&m, 2, 0).unwrap();
        assert_eq!(a.labels.len(), 5);
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
    }

    #[test]
    fn spectral_is_permutation_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let n = 9;
        let base = DenseTensor::from_fn(&[n, n], |ix| {
            let (i, j) = (ix[0], ix[1]);
            let block = if (i < 4) == (j < 4) { 1.0 } else { 0.02 };
            if i == j {
                0.0
            } else {
                block
            }
        });
        // random symmetric jitter to break eigenvalue degeneracy
        let mut m = base.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let eps = 0.01 * rng.random::<f64>();
                m.set2(i, j, m.get2(i, j) + eps);
                m.set2(j, i, m.get2(i, j));
            }
        }
        let perm: Vec<usize> = vec![3, 7, 1, 0, 8, 5, 2, 6, 4];
        let mp = DenseTensor::from_fn(&[n, n], |ix| m.get2(perm[ix[0]], perm[ix[1]]));
        let a = spectral_clustering(&m, 2, 0).unwrap();
        let b = spectral_clustering(&mp, 2, 0).unwrap();
        // partitions must agree up to cluster renaming
        for i in 0..n {
            for j in 0..n {
                assert_eq!(
                    a.labels[perm[i]] == a.labels[perm[j]],
                    b.labels[i] == b.labels[j],
                    "co-membership differs at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn spectral_rejects_bad_inputs() {
        let m = DenseTensor::zeros(&[3, 4]);
        assert!(spectral_clustering(&m, 2, 0).is_err());
        let neg = DenseTensor::new(vec![2, 2], vec![0.0, -1.0, -1.0, 0.0]).unwrap();
        assert!(spectral_clustering(&neg, 1, 0).is_err());
        let ok = DenseTensor::zeros(&[3, 3]);
        assert!(spectral_clustering(&ok, 4, 0).is_err());
    }
}
