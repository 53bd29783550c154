//! Synthetic multi-view clustering data: cluster-wise low-rank views with
//! sparse gross corruption, plus ground-truth labels.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tomd_core::{DenseTensor, MultiViewDataset};

use crate::manifest::near_cubic_dims;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub per_cluster: usize,
    /// Feature count C_v of each view (length = V).
    pub view_features: Vec<usize>,
    /// Dimension of each cluster's subspace.
    pub basis_rank: usize,
    /// Fraction of sample columns per view receiving gross corruption,
    /// in [0, 1]. Columns are drawn independently per view.
    pub corruption: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_cluster: 20,
            view_features: vec![40, 32],
            basis_rank: 2,
            corruption: 0.05,
            seed: 7,
        }
    }
}

/// Draw a dataset: for each view and cluster, sample columns from a random
/// `basis_rank`-dimensional subspace and scale every column to unit norm.
/// Then, per view, a `corruption` fraction of the columns (chosen
/// independently per view, so a sample corrupted in one view usually stays
/// clean in the others) receives gross noise: uniform [-0.5, 0.5) added to
/// every entry, which gives the noise ℓ2 norm well above the unit signal
/// norm of the column. Samples are ordered cluster by cluster; labels are
/// 0..clusters.
pub fn synthetic_clusters(spec: &SyntheticSpec) -> Result<MultiViewDataset, CliError> {
    if spec.clusters == 0 || spec.per_cluster == 0 || spec.view_features.is_empty() {
        return Err(CliError::validation(
            "synthetic spec needs clusters ≥ 1, per_cluster ≥ 1, and ≥ 1 view",
        ));
    }
    if spec.basis_rank == 0 {
        return Err(CliError::validation("basis_rank must be ≥ 1"));
    }
    if !(0.0..=1.0).contains(&spec.corruption) {
        return Err(CliError::validation("corruption fraction must lie in [0, 1]"));
    }
    let n = spec.clusters * spec.per_cluster;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut views = Vec::with_capacity(spec.view_features.len());
    for &c_v in &spec.view_features {
        let mut x = DenseTensor::zeros(&[c_v, n]);
        for cluster in 0..spec.clusters {
            let basis = DenseTensor::from_fn(&[c_v, spec.basis_rank], |_| {
                rng.random::<f64>() * 2.0 - 1.0
            });
            for s in 0..spec.per_cluster {
                let j = cluster * spec.per_cluster + s;
                let coeff: Vec<f64> = (0..spec.basis_rank)
                    .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                    .collect();
                let mut norm = 0.0;
                for i in 0..c_v {
                    let mut val = 0.0;
                    for (r, &a) in coeff.iter().enumerate() {
                        val += basis.get2(i, r) * a;
                    }
                    x.set2(i, j, val);
                    norm += val * val;
                }
                let norm = norm.sqrt();
                if norm > 0.0 {
                    for i in 0..c_v {
                        let val = x.get2(i, j);
                        x.set2(i, j, val / norm);
                    }
                }
            }
        }
        let corrupt = ((spec.corruption * n as f64).round() as usize).min(n);
        let mut columns: Vec<usize> = (0..n).collect();
        columns.partial_shuffle(&mut rng, corrupt);
        for &j in columns.iter().take(corrupt) {
            for i in 0..c_v {
                let noise = rng.random::<f64>() - 0.5;
                let val = x.get2(i, j);
                x.set2(i, j, val + noise);
            }
        }
        views.push(x);
    }
    let labels: Vec<usize> = (0..n).map(|j| j / spec.per_cluster).collect();
    MultiViewDataset::new(views, Some(labels), near_cubic_dims(n * n))
        .map_err(|e| CliError::validation(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_shapes_and_labels() {
        let spec = SyntheticSpec::default();
        let ds = synthetic_clusters(&spec).unwrap();
        assert_eq!(ds.n_views(), 2);
        assert_eq!(ds.n_samples(), 60);
        assert_eq!(ds.views()[0].rows(), 40);
        assert_eq!(ds.views()[1].rows(), 32);
        let labels = ds.labels().unwrap();
        assert_eq!(labels.len(), 60);
        assert_eq!(labels[0], 0);
        assert_eq!(labels[59], 2);
        assert_eq!(ds.reshape_dims().iter().product::<usize>(), 3600);
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let spec = SyntheticSpec::default();
        let a = synthetic_clusters(&spec).unwrap();
        let b = synthetic_clusters(&spec).unwrap();
        assert_eq!(a.views()[0], b.views()[0]);
        let c = synthetic_clusters(&SyntheticSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.views()[0], c.views()[0]);
    }

    #[test]
    fn corruption_hits_the_declared_column_fraction() {
        // With corruption 0, every column is exactly unit norm; with 0.05
        // exactly round(0.05 · N) columns per view deviate.
        let clean = synthetic_clusters(&SyntheticSpec {
            corruption: 0.0,
            ..SyntheticSpec::default()
        })
        .unwrap();
        for x in clean.views() {
            for j in 0..x.cols() {
                let norm: f64 = (0..x.rows()).map(|i| x.get2(i, j).powi(2)).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
        let dirty = synthetic_clusters(&SyntheticSpec::default()).unwrap();
        for x in dirty.views() {
            let off_unit = (0..x.cols())
                .filter(|&j| {
                    let norm: f64 =
                        (0..x.rows()).map(|i| x.get2(i, j).powi(2)).sum::<f64>().sqrt();
                    (norm - 1.0).abs() > 1e-9
                })
                .count();
            assert_eq!(off_unit, 3, "expected round(0.05·60) corrupted columns");
        }
    }

    #[test]
    fn generator_rejects_bad_specs() {
        let bad = SyntheticSpec { clusters: 0, ..SyntheticSpec::default() };
        assert!(synthetic_clusters(&bad).is_err());
        let bad = SyntheticSpec { corruption: 1.5, ..SyntheticSpec::default() };
        assert!(synthetic_clusters(&bad).is_err());
    }
}
