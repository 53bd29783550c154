//! Report schemas (versioned JSON plus CSV tables). Reports are pure
//! functions of inputs, configuration, and seeds: no timestamps, no wall
//! times, no machine identifiers, so identical runs serialize identically.

use serde::Serialize;
use tomd_core::MetricReport;

pub const SCHEMA_VERSION: u32 = 1;

/// Quote a CSV field per RFC 4180 when it contains a delimiter, quote, or
/// newline (rank specs contain commas).
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub rank: String,
    pub storage: usize,
    pub rse: f64,
    pub iterations: usize,
    /// Whether `rse` met the requested target, when one was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub met_target: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub tensor_shape: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rse_target: Option<f64>,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,rank,storage,rse,iterations,met_target\n");
        for r in &self.rows {
            let met = match r.met_target {
                Some(b) => b.to_string(),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.method,
                csv_field(&r.rank),
                r.storage,
                r.rse,
                r.iterations,
                met
            ));
        }
        out
    }
}

/// Serializable mirror of the six clustering metrics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricsOut {
    pub f_score: f64,
    pub precision: f64,
    pub recall: f64,
    pub nmi: f64,
    pub ar: f64,
    pub acc: f64,
}

impl From<MetricReport> for MetricsOut {
    fn from(m: MetricReport) -> Self {
        Self {
            f_score: m.f_score,
            precision: m.precision,
            recall: m.recall,
            nmi: m.nmi,
            ar: m.ar,
            acc: m.acc,
        }
    }
}

impl MetricsOut {
    pub fn as_array(&self) -> [f64; 6] {
        [self.f_score, self.precision, self.recall, self.nmi, self.ar, self.acc]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            f_score: a[0],
            precision: a[1],
            recall: a[2],
            nmi: a[3],
            ar: a[4],
            acc: a[5],
        }
    }
}

/// Per-seed clustering outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub labels: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterConfigEcho {
    pub mu: f64,
    pub k_neighbors: usize,
    pub rank_r: [usize; 4],
    pub rank_d: [usize; 6],
    pub tau0: f64,
    pub beta: f64,
    pub tau_max: f64,
    pub tol: f64,
    pub iter_max: usize,
    pub als_iter_max: usize,
    pub als_tol: f64,
    pub als_seed: u64,
    pub k: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub schema_version: u32,
    pub dataset: String,
    pub n_samples: usize,
    pub n_views: usize,
    pub reshape_dims: [usize; 3],
    pub config: ClusterConfigEcho,
    pub admm_iterations: usize,
    pub converged: bool,
    pub reconstruction_residual: f64,
    pub match_residual: f64,
    pub residual_trace: Vec<[f64; 2]>,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<SeedOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<MetricsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_dev: Option<MetricsOut>,
}

impl ClusterReport {
    /// Per-seed metric table; empty string when the dataset has no labels.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("seed,f_score,precision,recall,nmi,ar,acc\n");
        let mut any = false;
        for s in &self.per_seed {
            if let Some(m) = &s.metrics {
                any = true;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    s.seed, m.f_score, m.precision, m.recall, m.nmi, m.ar, m.acc
                ));
            }
        }
        if let (true, Some(mean), Some(sd)) = (any, &self.mean, &self.std_dev) {
            out.push_str(&format!(
                "mean,{},{},{},{},{},{}\n",
                mean.f_score, mean.precision, mean.recall, mean.nmi, mean.ar, mean.acc
            ));
            out.push_str(&format!(
                "std,{},{},{},{},{},{}\n",
                sd.f_score, sd.precision, sd.recall, sd.nmi, sd.ar, sd.acc
            ));
        }
        if any {
            out
        } else {
            String::new()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub k_neighbors: usize,
    pub rank: String,
    pub converged: bool,
    pub admm_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acc_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acc_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi_std: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub dataset: String,
    pub seeds: Vec<u64>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "mu,k_neighbors,rank,converged,admm_iterations,acc_mean,acc_std,nmi_mean,nmi_std\n",
        );
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.mu,
                r.k_neighbors,
                csv_field(&r.rank),
                r.converged,
                r.admm_iterations,
                opt(r.acc_mean),
                opt(r.acc_std),
                opt(r.nmi_mean),
                opt(r.nmi_std)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub n_samples: usize,
    pub metrics: MetricsOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub method: String,
    pub tensor_shape: Vec<usize>,
    pub rank: String,
    pub storage: usize,
    pub rse: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Element-wise mean and (population) standard deviation over per-seed
/// metric reports.
pub fn mean_and_std(reports: &[MetricReport]) -> Option<(MetricsOut, MetricsOut)> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let arrays: Vec<[f64; 6]> = reports.iter().map(|&m| MetricsOut::from(m).as_array()).collect();
    let mut mean = [0.0; 6];
    for a in &arrays {
        for (m, x) in mean.iter_mut().zip(a) {
            *m += x / n;
        }
    }
    let mut var = [0.0; 6];
    for a in &arrays {
        for ((v, x), m) in var.iter_mut().zip(a).zip(&mean) {
            *v += (x - m) * (x - m) / n;
        }
    }
    let std = var.map(f64::sqrt);
    Some((MetricsOut::from_array(mean), MetricsOut::from_array(std)))
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    s.push('\n');
    s
}
