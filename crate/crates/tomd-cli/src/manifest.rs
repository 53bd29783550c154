//! Dataset manifests: a JSON file naming the per-view feature matrices and
//! labels of a multi-view dataset, with paths resolved relative to the
//! manifest file itself.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tomd_core::{DenseTensor, MultiViewDataset};

use crate::{io, CliError};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewSpec {
    /// Headerless CSV, features × samples.
    pub path: String,
    /// Optional expected feature count, checked after loading.
    #[serde(default)]
    pub features: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub views: Vec<ViewSpec>,
    /// Single-column CSV of ground-truth labels, one per sample.
    #[serde(default)]
    pub labels_path: Option<String>,
    /// Declared sample count, checked against every view.
    #[serde(default)]
    pub n: Option<usize>,
    /// Declared view count, checked against the view list.
    #[serde(default)]
    pub v: Option<usize>,
    /// Third-order reshape of the stacked self-representation tensor;
    /// must multiply to N². Defaults to a near-cubic factorization of N².
    #[serde(default)]
    pub reshape_dims: Option<[usize; 3]>,
    /// Cluster count override; defaults to the number of distinct labels.
    #[serde(default)]
    pub k: Option<usize>,
    /// Scale every sample column to unit Euclidean norm after loading.
    #[serde(default)]
    pub normalize: Option<bool>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        let m: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        if m.views.is_empty() {
            return Err(CliError::validation(format!(
                "{}: manifest lists no views",
                path.display()
            )));
        }
        Ok(m)
    }
}

/// Factor n into [a, b, c] with a·b·c = n and the three factors as close
/// to n^(1/3) as divisibility allows: a is the largest divisor of n that is
/// ≤ ⌈n^(1/3)⌉, then b is the largest divisor of n/a that is ≤ ⌈√(n/a)⌉.
pub fn near_cubic_dims(n: usize) -> [usize; 3] {
    assert!(n > 0, "near_cubic_dims needs a positive argument");
    let largest_divisor_below = |m: usize, cap: usize| -> usize {
        (1..=cap.min(m)).rev().find(|&d| m.is_multiple_of(d)).unwrap_or(1)
    };
    let cbrt = (n as f64).cbrt().ceil() as usize;
    let a = largest_divisor_below(n, cbrt);
    let rest = n / a;
    let sqrt = (rest as f64).sqrt().ceil() as usize;
    let b = largest_divisor_below(rest, sqrt);
    let mut dims = [a, b, rest / b];
    dims.sort_unstable();
    dims
}

/// A loaded dataset plus the manifest-level metadata the commands need.
/// `k` stays optional at ingest; commands that cluster require it (from the
/// manifest, the labels, or a flag).
#[derive(Debug)]
pub struct LoadedDataset {
    pub name: String,
    pub dataset: MultiViewDataset,
    pub k: Option<usize>,
}

/// Read every view matrix and the labels named by a manifest, validate the
/// sample counts, and assemble the `MultiViewDataset`.
pub fn ingest_dataset(manifest_path: &Path) -> Result<LoadedDataset, CliError> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |rel: &str| -> PathBuf { base.join(rel) };

    if let Some(v) = manifest.v {
        if v != manifest.views.len() {
            return Err(CliError::validation(format!(
                "manifest declares v={v} but lists {} views",
                manifest.views.len()
            )));
        }
    }

    let mut views = Vec::with_capacity(manifest.views.len());
    let mut n_samples = manifest.n;
    for (v, spec) in manifest.views.iter().enumerate() {
        let path = resolve(&spec.path);
        let mut x = io::read_matrix_csv(&path)
            .map_err(|e| CliError::validation(format!("view {v} ({}): {e}", spec.path)))?;
        if let Some(want) = spec.features {
            if x.rows() != want {
                return Err(CliError::validation(format!(
                    "view {v} ({}): has {} feature rows, manifest says {want}",
                    spec.path,
                    x.rows()
                )));
            }
        }
        match n_samples {
            None => n_samples = Some(x.cols()),
            Some(n) if n != x.cols() => {
                return Err(CliError::validation(format!(
                    "view {v} ({}): has {} samples, expected {n}",
                    spec.path,
                    x.cols()
                )));
            }
            _ => {}
        }
        if manifest.normalize.unwrap_or(false) {
            normalize_columns(&mut x);
        }
        views.push(x);
    }
    let n = n_samples.expect("manifest has at least one view");

    let labels = match &manifest.labels_path {
        Some(rel) => {
            let labels = io::read_labels(&resolve(rel))?;
            if labels.len() != n {
                return Err(CliError::validation(format!(
                    "labels ({rel}): {} entries for {n} samples",
                    labels.len()
                )));
            }
            Some(labels)
        }
        None => None,
    };

    let k = manifest.k.or_else(|| {
        labels.as_ref().map(|l| {
            let mut distinct: Vec<usize> = l.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        })
    });
    if let Some(k) = k {
        if k == 0 || k > n {
            return Err(CliError::validation(format!(
                "cluster count {k} is outside 1..={n}"
            )));
        }
    }

    let reshape = manifest.reshape_dims.unwrap_or_else(|| near_cubic_dims(n * n));
    let dataset = MultiViewDataset::new(views, labels, reshape)
        .map_err(|e| CliError::validation(e.to_string()))?;
    Ok(LoadedDataset {
        name: manifest.name,
        dataset,
        k,
    })
}

fn normalize_columns(x: &mut DenseTensor) {
    let (rows, cols) = (x.rows(), x.cols());
    for j in 0..cols {
        let mut norm = 0.0;
        for i in 0..rows {
            let v = x.get2(i, j);
            norm += v * v;
        }
        let norm = norm.sqrt();
        if norm > 0.0 {
            for i in 0..rows {
                let v = x.get2(i, j);
                x.set2(i, j, v / norm);
            }
        }
    }
}
