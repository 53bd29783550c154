//! Clustering evaluation measures: pairwise F-score/precision/recall,
//! normalized mutual information, adjusted Rand index, and
//! optimal-assignment accuracy.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// All six measures for one (predicted, ground-truth) labeling pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub f_score: f64,
    pub precision: f64,
    pub recall: f64,
    pub nmi: f64,
    pub ar: f64,
    pub acc: f64,
}

/// NMI normalization: MI divided by the geometric or arithmetic mean of the
/// two label entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NmiNorm {
    #[default]
    Geometric,
    Arithmetic,
}

fn check_lengths(pred: &[usize], truth: &[usize], min_len: usize) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.len() < min_len {
        return Err(Error::InvalidArg(format!(
            "need at least {min_len} samples, got {}",
            pred.len()
        )));
    }
    Ok(())
}

/// Remap arbitrary ids to 0..k in order of first appearance.
fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut ids: Vec<usize> = Vec::new();
    let out = labels
        .iter()
        .map(|&l| match ids.iter().position(|&x| x == l) {
            Some(i) => i,
            None => {
                ids.push(l);
                ids.len() - 1
            }
        })
        .collect();
    (out, ids.len())
}

/// Contingency table: counts[i][j] = |pred cluster i ∩ truth cluster j|,
/// plus the marginals.
fn contingency(pred: &[usize], truth: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
    let (p, kp) = compact(pred);
    let (t, kt) = compact(truth);
    let mut table = vec![vec![0usize; kt]; kp];
    for (&a, &b) in p.iter().zip(&t) {
        table[a][b] += 1;
    }
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..kt).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    (table, rows, cols)
}

fn choose2(n: usize) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Pairwise precision/recall/F over all unordered sample pairs, with
/// "positive" meaning same predicted cluster. All 0/0 cases yield 0.
pub fn pair_counting_prf(pred: &[usize], truth: &[usize]) -> Result<(f64, f64, f64)> {
    check_lengths(pred, truth, 2)?;
    let (table, rows, cols) = contingency(pred, truth);
    let tp: f64 = table
        .iter()
        .flat_map(|r| r.iter())
        .map(|&nij| choose2(nij))
        .sum();
    let pred_pairs: f64 = rows.iter().map(|&a| choose2(a)).sum();
    let truth_pairs: f64 = cols.iter().map(|&b| choose2(b)).sum();
    let fp = pred_pairs - tp;
    let fn_ = truth_pairs - tp;
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((f_score, precision, recall))
}

/// Normalized mutual information with the default geometric normalization.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    nmi_with(pred, truth, NmiNorm::Geometric)
}

/// NMI with an explicit normalization. Both-single-cluster partitions give
/// 1; a single-cluster side against a split side gives 0.
pub fn nmi_with(pred: &[usize], truth: &[usize], norm: NmiNorm) -> Result<f64> {
    check_lengths(pred, truth, 1)?;
    let n = pred.len() as f64;
    let (table, rows, cols) = contingency(pred, truth);
    let entropy = |marg: &[usize]| -> f64 {
        marg.iter()
            .filter(|&&a| a > 0)
            .map(|&a| {
                let p = a as f64 / n;
                -p * libm::log(p)
            })
            .sum()
    };
    let hp = entropy(&rows);
    let ht = entropy(&cols);
    if hp == 0.0 && ht == 0.0 {
        return Ok(1.0);
    }
    if hp == 0.0 || ht == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let pij = nij as f64 / n;
                mi += pij * libm::log(n * nij as f64 / (rows[i] as f64 * cols[j] as f64));
            }
        }
    }
    let denom = match norm {
        NmiNorm::Geometric => libm::sqrt(hp * ht),
        NmiNorm::Arithmetic => 0.5 * (hp + ht),
    };
    Ok((mi / denom).clamp(0.0, 1.0))
}

/// Same set partition regardless of the ids used.
fn same_partition(pred: &[usize], truth: &[usize]) -> bool {
    let n = pred.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (pred[i] == pred[j]) != (truth[i] == truth[j]) {
                return false;
            }
        }
    }
    true
}

/// Adjusted Rand index. A degenerate denominator (both partitions trivial)
/// gives 1 for identical partitions and 0 otherwise.
pub fn adjusted_rand(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth, 2)?;
    let (table, rows, cols) = contingency(pred, truth);
    let index: f64 = table
        .iter()
        .flat_map(|r| r.iter())
        .map(|&nij| choose2(nij))
        .sum();
    let sum_a: f64 = rows.iter().map(|&a| choose2(a)).sum();
    let sum_b: f64 = cols.iter().map(|&b| choose2(b)).sum();
    let total = choose2(pred.len());
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if max_index == expected {
        return Ok(if same_partition(pred, truth) { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max_index - expected))
}

/// Minimum-cost perfect assignment on a square cost matrix; returns the
/// column matched to each row.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Clustering accuracy: the best fraction of agreeing samples over all
/// one-to-one matchings of predicted to true cluster ids (Hungarian method
/// on the contingency table).
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth, 1)?;
    let (table, _, _) = contingency(pred, truth);
    let k = table.len().max(table[0].len());
    // pad to square, negate to convert maximization into min-cost
    let cost: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| -(*table.get(i).and_then(|r| r.get(j)).unwrap_or(&0) as f64))
                .collect()
        })
        .collect();
    let assignment = hungarian_min(&cost);
    let matched: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| *table.get(i).and_then(|r| r.get(j)).unwrap_or(&0) as f64)
        .sum();
    Ok(matched / pred.len() as f64)
}

/// Evaluate all six measures at once.
pub fn evaluate(pred: &[usize], truth: &[usize]) -> Result<MetricReport> {
    let (f_score, precision, recall) = pair_counting_prf(pred, truth)?;
    Ok(MetricReport {
        f_score,
        precision,
        recall,
        nmi: nmi(pred, truth)?,
        ar: adjusted_rand(pred, truth)?,
        acc: accuracy(pred, truth)?,
    })
}
