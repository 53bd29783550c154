//! Subcommand drivers: decompose, reconstruct-bench, cluster, sweep, and
//! metrics. Wall times go to stdout only; report files stay deterministic.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::Deserialize;
use tomd_core::baselines::BaselineRank;
use tomd_core::{
    admm_solve, affinity_from_z, evaluate, ominus_als, ominus_reconstruct, rse,
    spectral_clustering, storage_cost, tomd_als, tomd_reconstruct, tucker_als,
    tucker_reconstruct, tutr_als, tutr_reconstruct, AdmmConfig, AlsConfig, DenseTensor,
    MetricReport, MultiViewDataset, TomdRank,
};

use crate::manifest::ingest_dataset;
use crate::presets::{default_cluster_rank, preset, Preset};
use crate::report::{
    mean_and_std, to_json, BenchReport, BenchRow, ClusterConfigEcho, ClusterReport,
    DecomposeReport, MetricsOut, MetricsReport, SeedOutcome, SweepReport, SweepRow,
    SCHEMA_VERSION,
};
use crate::{io, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tomd,
    Tucker,
    Tutr,
    Ominus,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Tomd => "tomd",
            Method::Tucker => "tucker",
            Method::Tutr => "tutr",
            Method::Ominus => "ominus",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "tomd" => Ok(Method::Tomd),
            "tucker" => Ok(Method::Tucker),
            "tutr" => Ok(Method::Tutr),
            "ominus" => Ok(Method::Ominus),
            other => Err(CliError::validation(format!(
                "unknown method {other:?}; expected one of tomd, tucker, tutr, ominus"
            ))),
        }
    }
}

fn parse_entry(tok: &str, views: Option<usize>) -> Result<usize, CliError> {
    let tok = tok.trim();
    if tok.eq_ignore_ascii_case("v") {
        return views.ok_or_else(|| {
            CliError::validation("the view-count placeholder 'v' is not available here")
        });
    }
    tok.parse::<usize>()
        .map_err(|_| CliError::validation(format!("bad rank entry {tok:?}")))
}

fn parse_list(s: &str, want: usize, what: &str, views: Option<usize>) -> Result<Vec<usize>, CliError> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|tok| parse_entry(tok, views))
        .collect::<Result<_, _>>()?;
    if parts.len() != want {
        return Err(CliError::validation(format!(
            "{what} needs {want} comma-separated entries, got {} in {s:?}",
            parts.len()
        )));
    }
    Ok(parts)
}

/// Parse "R1,R2,R3,R4:D1,D2,D3,D4,D5,D6"; entries may be 'v' (view count)
/// when `views` is known.
pub fn parse_tomd_spec(s: &str, views: Option<usize>) -> Result<TomdRank, CliError> {
    let (rs, ds) = s.split_once(':').ok_or_else(|| {
        CliError::validation(format!(
            "rank spec {s:?} needs the form R1,R2,R3,R4:D1,D2,D3,D4,D5,D6"
        ))
    })?;
    let r = parse_list(rs, 4, "outer rank", views)?;
    let d = parse_list(ds, 6, "bond dims", views)?;
    Ok(TomdRank::new(
        [r[0], r[1], r[2], r[3]],
        [d[0], d[1], d[2], d[3], d[4], d[5]],
    ))
}

pub fn fmt_tomd_rank(rank: &TomdRank) -> String {
    let r: Vec<String> = rank.r.iter().map(|x| x.to_string()).collect();
    let d: Vec<String> = rank.d.iter().map(|x| x.to_string()).collect();
    format!("{}:{}", r.join(","), d.join(","))
}

fn fmt_list(xs: &[usize]) -> String {
    let v: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    v.join(",")
}

/// RSE with the zero-reference convention: a zero tensor fitted exactly has
/// error 0, fitted inexactly has error ∞.
fn final_rse(recon: &DenseTensor, x: &DenseTensor) -> Result<f64, CliError> {
    if x.frob_norm() == 0.0 {
        Ok(if recon.frob_norm() == 0.0 { 0.0 } else { f64::INFINITY })
    } else {
        Ok(rse(recon, x)?)
    }
}

/// Order-stable worker pool: returns `f(0..n)` as if run sequentially.
fn parallel_map<T, F>(n: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n);
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(i))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut slots: Vec<Option<Result<T, CliError>>> = (0..n).map(|_| None).collect();
    for (i, r) in rx {
        slots[i] = Some(r);
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("every index was dispatched"))
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------- decompose

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    pub input: PathBuf,
    pub method: String,
    /// Method-shaped rank spec; defaults to rank 2 everywhere (clamped).
    pub rank: Option<String>,
    pub iter_max: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    /// Also write the reconstruction as a tensor text file.
    pub reconstruction: Option<PathBuf>,
}

fn als_config(iter_max: Option<usize>, tol: Option<f64>, seed: Option<u64>) -> AlsConfig {
    let mut cfg = AlsConfig::default();
    if let Some(x) = iter_max {
        cfg.iter_max = x;
    }
    if let Some(x) = tol {
        cfg.tol = x;
    }
    if let Some(x) = seed {
        cfg.seed = x;
    }
    cfg
}

fn default_r(shape: &[usize]) -> [usize; 4] {
    [
        shape[0].min(2),
        shape[1].min(2),
        shape[2].min(2),
        shape[3].min(2),
    ]
}

struct FitOutcome {
    rank_str: String,
    storage: usize,
    rse: f64,
    iterations: usize,
    recon: DenseTensor,
    factors: Vec<(String, DenseTensor)>,
}

fn run_method(
    x: &DenseTensor,
    method: Method,
    spec: Option<&str>,
    cfg: &AlsConfig,
) -> Result<FitOutcome, CliError> {
    let shape = x.shape();
    if shape.len() != 4 {
        return Err(CliError::validation(format!(
            "decompositions need a 4-way tensor, got order {}",
            shape.len()
        )));
    }
    match method {
        Method::Tomd => {
            let rank = match spec {
                Some(s) => parse_tomd_spec(s, None)?,
                None => TomdRank::new(default_r(shape), [2; 6]),
            };
            let (f, trace) = tomd_als(x, &rank, cfg)?;
            let recon = tomd_reconstruct(&f)?;
            let mut factors: Vec<(String, DenseTensor)> = Vec::new();
            for (n, u) in f.factors.iter().enumerate() {
                factors.push((format!("u{}", n + 1), u.clone()));
            }
            for (n, g) in f.cores.iter().enumerate() {
                factors.push((format!("g{}", n + 1), g.clone()));
            }
            factors.push(("g5".into(), f.bridge.clone()));
            Ok(FitOutcome {
                rank_str: fmt_tomd_rank(&rank),
                storage: storage_cost(shape, &rank),
                rse: final_rse(&recon, x)?,
                iterations: trace.len(),
                recon,
                factors,
            })
        }
        Method::Tucker => {
            let r = match spec {
                Some(s) => {
                    let v = parse_list(s, 4, "Tucker rank", None)?;
                    [v[0], v[1], v[2], v[3]]
                }
                None => default_r(shape),
            };
            let (f, trace) = tucker_als(x, r, cfg)?;
            let recon = tucker_reconstruct(&f)?;
            let mut factors: Vec<(String, DenseTensor)> = vec![("core".into(), f.core.clone())];
            for (n, u) in f.factors.iter().enumerate() {
                factors.push((format!("u{}", n + 1), u.clone()));
            }
            Ok(FitOutcome {
                rank_str: fmt_list(&r),
                storage: BaselineRank::Tucker { r }.storage_cost(shape),
                rse: final_rse(&recon, x)?,
                iterations: trace.len(),
                recon,
                factors,
            })
        }
        Method::Tutr => {
            let (r, d) = match spec {
                Some(s) => {
                    let (rs, ds) = s.split_once(':').ok_or_else(|| {
                        CliError::validation(format!(
                            "TuTR rank spec {s:?} needs the form R1,R2,R3,R4:D1,D2,D3,D4"
                        ))
                    })?;
                    let r = parse_list(rs, 4, "outer rank", None)?;
                    let d = parse_list(ds, 4, "ring bonds", None)?;
                    ([r[0], r[1], r[2], r[3]], [d[0], d[1], d[2], d[3]])
                }
                None => (default_r(shape), [2; 4]),
            };
            let (f, trace) = tutr_als(x, r, d, cfg)?;
            let recon = tutr_reconstruct(&f)?;
            let mut factors: Vec<(String, DenseTensor)> = Vec::new();
            for (n, u) in f.factors.iter().enumerate() {
                factors.push((format!("u{}", n + 1), u.clone()));
            }
            for (n, g) in f.cores.iter().enumerate() {
                factors.push((format!("g{}", n + 1), g.clone()));
            }
            Ok(FitOutcome {
                rank_str: format!("{}:{}", fmt_list(&r), fmt_list(&d)),
                storage: BaselineRank::Tutr { r, d }.storage_cost(shape),
                rse: final_rse(&recon, x)?,
                iterations: trace.len(),
                recon,
                factors,
            })
        }
        Method::Ominus => {
            let d = match spec {
                Some(s) => {
                    let v = parse_list(s, 6, "O-minus bonds", None)?;
                    [v[0], v[1], v[2], v[3], v[4], v[5]]
                }
                None => [2; 6],
            };
            let (f, trace) = ominus_als(x, d, cfg)?;
            let recon = ominus_reconstruct(&f)?;
            let mut factors: Vec<(String, DenseTensor)> = Vec::new();
            for (n, g) in f.cores.iter().enumerate() {
                factors.push((format!("g{}", n + 1), g.clone()));
            }
            factors.push(("g5".into(), f.bridge.clone()));
            Ok(FitOutcome {
                rank_str: fmt_list(&d),
                storage: BaselineRank::Ominus { d }.storage_cost(shape),
                rse: final_rse(&recon, x)?,
                iterations: trace.len(),
                recon,
                factors,
            })
        }
    }
}

pub fn cmd_decompose(o: &DecomposeOptions) -> Result<(), CliError> {
    let x = io::read_tensor(&o.input)?;
    let method: Method = o.method.parse()?;
    let cfg = als_config(o.iter_max, o.tol, o.seed);
    let started = Instant::now();
    let fit = run_method(&x, method, o.rank.as_deref(), &cfg)?;
    println!(
        "{}: rse={:e} storage={} iterations={} wall={:.3}s",
        method.name(),
        fit.rse,
        fit.storage,
        fit.iterations,
        started.elapsed().as_secs_f64()
    );
    ensure_dir(&o.out)?;
    for (name, t) in &fit.factors {
        let path = o.out.join(format!("{name}.txt"));
        io::write_tensor(&path, t)?;
        println!("wrote {}", path.display());
    }
    let report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        method: method.name().into(),
        tensor_shape: x.shape().to_vec(),
        rank: fit.rank_str,
        storage: fit.storage,
        rse: fit.rse,
        iterations: fit.iterations,
        seed: cfg.seed,
    };
    write_text(&o.out.join("summary.json"), &to_json(&report))?;
    if let Some(path) = &o.reconstruction {
        io::write_tensor(path, &fit.recon)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

// --------------------------------------------------------- reconstruct-bench

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub input: PathBuf,
    /// Comma-separated subset of tomd,tucker,tutr,ominus; defaults to all.
    pub methods: Option<String>,
    pub tomd_rank: Option<String>,
    pub tucker_rank: Option<String>,
    pub tutr_rank: Option<String>,
    pub ominus_rank: Option<String>,
    pub rse_target: Option<f64>,
    pub iter_max: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn run_reconstruction_bench(
    x: &DenseTensor,
    methods: &[Method],
    specs: &dyn Fn(Method) -> Option<String>,
    rse_target: Option<f64>,
    cfg: &AlsConfig,
) -> Result<BenchReport, CliError> {
    let mut rows = Vec::with_capacity(methods.len());
    for &m in methods {
        let started = Instant::now();
        let fit = run_method(x, m, specs(m).as_deref(), cfg)?;
        println!(
            "{}: rse={:e} storage={} iterations={} wall={:.3}s",
            m.name(),
            fit.rse,
            fit.storage,
            fit.iterations,
            started.elapsed().as_secs_f64()
        );
        rows.push(BenchRow {
            method: m.name().into(),
            rank: fit.rank_str,
            storage: fit.storage,
            rse: fit.rse,
            iterations: fit.iterations,
            met_target: rse_target.map(|t| fit.rse <= t),
        });
    }
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        tensor_shape: x.shape().to_vec(),
        rse_target,
        seed: cfg.seed,
        rows,
    })
}

pub fn cmd_reconstruct_bench(o: &BenchOptions) -> Result<(), CliError> {
    let x = io::read_tensor(&o.input)?;
    let methods: Vec<Method> = o
        .methods
        .as_deref()
        .unwrap_or("tomd,tucker,tutr,ominus")
        .split(',')
        .map(|tok| tok.trim().parse())
        .collect::<Result<_, _>>()?;
    if methods.is_empty() {
        return Err(CliError::validation("no methods selected"));
    }
    let cfg = als_config(o.iter_max, o.tol, o.seed);
    let specs = |m: Method| -> Option<String> {
        match m {
            Method::Tomd => o.tomd_rank.clone(),
            Method::Tucker => o.tucker_rank.clone(),
            Method::Tutr => o.tutr_rank.clone(),
            Method::Ominus => o.ominus_rank.clone(),
        }
    };
    let report = run_reconstruction_bench(&x, &methods, &specs, o.rse_target, &cfg)?;
    ensure_dir(&o.out)?;
    write_text(&o.out.join("bench.json"), &to_json(&report))?;
    write_text(&o.out.join("bench.csv"), &report.to_csv())?;
    Ok(())
}

// ------------------------------------------------------------------ cluster

/// Optional overrides for every `AdmmConfig` field, layered preset → flags →
/// config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmmOverrides {
    pub mu: Option<f64>,
    pub k_neighbors: Option<usize>,
    /// "R1,R2,R3,R4:D1,...,D6"; 'v' stands for the view count.
    pub rank: Option<String>,
    pub tau0: Option<f64>,
    pub beta: Option<f64>,
    pub tau_max: Option<f64>,
    pub tol: Option<f64>,
    pub iter_max: Option<usize>,
    pub als_iter_max: Option<usize>,
    pub als_tol: Option<f64>,
    pub als_seed: Option<u64>,
}

impl AdmmOverrides {
    /// Fields set in `top` win over `self`.
    pub fn overlaid_with(mut self, top: &AdmmOverrides) -> AdmmOverrides {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if top.$field.is_some() { self.$field = top.$field.clone(); })*
            };
        }
        take!(mu, k_neighbors, rank, tau0, beta, tau_max, tol, iter_max, als_iter_max, als_tol, als_seed);
        self
    }

    /// Resolve into a full config for a reshaped tensor of `shape` over a
    /// dataset of `n` samples.
    pub fn build(
        &self,
        preset: Option<Preset>,
        shape: [usize; 4],
        n: usize,
    ) -> Result<AdmmConfig, CliError> {
        let mu = self.mu.or(preset.map(|p| p.mu)).unwrap_or(1.0);
        let k_neighbors = self
            .k_neighbors
            .or(preset.map(|p| p.k_neighbors))
            .unwrap_or_else(|| 10.min(n.saturating_sub(1)).max(1));
        let rank = match &self.rank {
            Some(s) => parse_tomd_spec(s, Some(shape[3]))?,
            None => default_cluster_rank(shape),
        };
        let mut cfg = AdmmConfig::new(mu, k_neighbors, rank);
        if let Some(x) = self.tau0 {
            cfg.tau0 = x;
        }
        if let Some(x) = self.beta {
            cfg.beta = x;
        }
        if let Some(x) = self.tau_max {
            cfg.tau_max = x;
        }
        if let Some(x) = self.tol {
            cfg.tol = x;
        }
        if let Some(x) = self.iter_max {
            cfg.iter_max = x;
        }
        if let Some(x) = self.als_iter_max {
            cfg.als.iter_max = x;
        }
        if let Some(x) = self.als_tol {
            cfg.als.tol = x;
        }
        if let Some(x) = self.als_seed {
            cfg.als.seed = x;
        }
        Ok(cfg)
    }
}

/// `--config` file: ADMM overrides plus experiment-level settings.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfigFile {
    pub admm: AdmmOverrides,
    pub seeds: Option<Vec<u64>>,
    pub k: Option<usize>,
    pub report_path: Option<PathBuf>,
}

impl ExperimentConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }
}

fn resolve_preset(name: Option<&str>) -> Result<Option<Preset>, CliError> {
    match name {
        None => Ok(None),
        Some(n) => preset(n).map(Some).ok_or_else(|| {
            let known: Vec<&str> = crate::presets::PRESETS.iter().map(|p| p.name).collect();
            CliError::validation(format!(
                "unknown preset {n:?}; known presets: {}",
                known.join(", ")
            ))
        }),
    }
}

#[derive(Debug, Clone)]
pub struct ClusterOptions {
    pub manifest: PathBuf,
    pub preset: Option<String>,
    pub flags: AdmmOverrides,
    pub k: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

pub struct ClusterRun {
    pub report: ClusterReport,
    pub affinity: DenseTensor,
}

/// ADMM once (it is deterministic), then spectral clustering per seed.
pub fn run_cluster(
    name: &str,
    dataset: &MultiViewDataset,
    cfg: &AdmmConfig,
    k: usize,
    seeds: &[u64],
) -> Result<ClusterRun, CliError> {
    if seeds.is_empty() {
        return Err(CliError::validation("at least one seed is required"));
    }
    let (state, trace) = admm_solve(dataset, cfg)?;
    let affinity = affinity_from_z(&state.z)?;
    let outcomes = parallel_map(seeds.len(), |i| {
        let assignment = spectral_clustering(&affinity, k, seeds[i])?;
        let metrics = match dataset.labels() {
            Some(truth) => Some(MetricsOut::from(evaluate(&assignment.labels, truth)?)),
            None => None,
        };
        Ok(SeedOutcome {
            seed: seeds[i],
            labels: assignment.labels,
            metrics,
        })
    })?;
    let metric_reports: Vec<MetricReport> = outcomes
        .iter()
        .filter_map(|o| o.metrics.as_ref())
        .map(|m| MetricReport {
            f_score: m.f_score,
            precision: m.precision,
            recall: m.recall,
            nmi: m.nmi,
            ar: m.ar,
            acc: m.acc,
        })
        .collect();
    let (mean, std_dev) = match mean_and_std(&metric_reports) {
        Some((m, s)) => (Some(m), Some(s)),
        None => (None, None),
    };
    let report = ClusterReport {
        schema_version: SCHEMA_VERSION,
        dataset: name.into(),
        n_samples: dataset.n_samples(),
        n_views: dataset.n_views(),
        reshape_dims: dataset.reshape_dims(),
        config: ClusterConfigEcho {
            mu: cfg.mu,
            k_neighbors: cfg.k_neighbors,
            rank_r: cfg.rank.r,
            rank_d: cfg.rank.d,
            tau0: cfg.tau0,
            beta: cfg.beta,
            tau_max: cfg.tau_max,
            tol: cfg.tol,
            iter_max: cfg.iter_max,
            als_iter_max: cfg.als.iter_max,
            als_tol: cfg.als.tol,
            als_seed: cfg.als.seed,
            k,
        },
        admm_iterations: state.iter,
        converged: state.converged,
        reconstruction_residual: state.residuals.0,
        match_residual: state.residuals.1,
        residual_trace: trace.iter().map(|&(a, b)| [a, b]).collect(),
        seeds: seeds.to_vec(),
        per_seed: outcomes,
        mean,
        std_dev,
    };
    Ok(ClusterRun { report, affinity })
}

pub fn cmd_cluster(o: &ClusterOptions) -> Result<(), CliError> {
    let loaded = ingest_dataset(&o.manifest)?;
    let preset = resolve_preset(o.preset.as_deref())?;
    let file = match &o.config {
        Some(path) => ExperimentConfigFile::load(path)?,
        None => ExperimentConfigFile::default(),
    };
    let overrides = o.flags.clone().overlaid_with(&file.admm);
    let dims = loaded.dataset.reshape_dims();
    let shape = [dims[0], dims[1], dims[2], loaded.dataset.n_views()];
    let cfg = overrides.build(preset, shape, loaded.dataset.n_samples())?;
    let k = file
        .k
        .or(o.k)
        .or(loaded.k)
        .ok_or_else(|| {
            CliError::validation(
                "cluster count unknown: set k in the manifest, --k, or the config file",
            )
        })?;
    let seeds: Vec<u64> = file
        .seeds
        .clone()
        .or_else(|| o.seeds.clone())
        .unwrap_or_else(|| (0..10).collect());
    let out = file.report_path.as_deref().unwrap_or(&o.out);

    let started = Instant::now();
    let run = run_cluster(&loaded.name, &loaded.dataset, &cfg, k, &seeds)?;
    println!(
        "admm: {} iterations, converged={}, residuals=({:e}, {:e}); {} seeds; wall={:.3}s",
        run.report.admm_iterations,
        run.report.converged,
        run.report.reconstruction_residual,
        run.report.match_residual,
        seeds.len(),
        started.elapsed().as_secs_f64()
    );
    if let Some(mean) = &run.report.mean {
        println!(
            "mean metrics: f={:.4} p={:.4} r={:.4} nmi={:.4} ar={:.4} acc={:.4}",
            mean.f_score, mean.precision, mean.recall, mean.nmi, mean.ar, mean.acc
        );
    }
    ensure_dir(out)?;
    write_text(&out.join("report.json"), &to_json(&run.report))?;
    io::write_matrix_csv(&out.join("affinity.csv"), &run.affinity)?;
    println!("wrote {}", out.join("affinity.csv").display());
    let metrics_csv = run.report.metrics_csv();
    if !metrics_csv.is_empty() {
        write_text(&out.join("metrics.csv"), &metrics_csv)?;
    }
    Ok(())
}

// -------------------------------------------------------------------- sweep

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub manifest: PathBuf,
    pub preset: Option<String>,
    /// Comma-separated μ values; defaults to the single base μ.
    pub mu_grid: Option<String>,
    /// Comma-separated K values; defaults to the single base K.
    pub k_grid: Option<String>,
    /// Semicolon-separated rank specs ('default' allowed).
    pub rank_grid: Option<String>,
    pub k: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

pub fn cmd_sweep(o: &SweepOptions) -> Result<(), CliError> {
    let loaded = ingest_dataset(&o.manifest)?;
    let preset = resolve_preset(o.preset.as_deref())?;
    let file = match &o.config {
        Some(path) => ExperimentConfigFile::load(path)?,
        None => ExperimentConfigFile::default(),
    };
    let dims = loaded.dataset.reshape_dims();
    let shape = [dims[0], dims[1], dims[2], loaded.dataset.n_views()];
    let base = file.admm.build(preset, shape, loaded.dataset.n_samples())?;
    let k = file.k.or(o.k).or(loaded.k).ok_or_else(|| {
        CliError::validation(
            "cluster count unknown: set k in the manifest, --k, or the config file",
        )
    })?;
    let seeds: Vec<u64> = file
        .seeds
        .clone()
        .or_else(|| o.seeds.clone())
        .unwrap_or_else(|| (0..10).collect());

    let mus: Vec<f64> = match &o.mu_grid {
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::validation(format!("bad μ value {tok:?}")))
            })
            .collect::<Result<_, _>>()?,
        None => vec![base.mu],
    };
    let ks: Vec<usize> = match &o.k_grid {
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::validation(format!("bad K value {tok:?}")))
            })
            .collect::<Result<_, _>>()?,
        None => vec![base.k_neighbors],
    };
    let ranks: Vec<TomdRank> = match &o.rank_grid {
        Some(s) => s
            .split(';')
            .map(|tok| {
                let tok = tok.trim();
                if tok.eq_ignore_ascii_case("default") {
                    Ok(default_cluster_rank(shape))
                } else {
                    parse_tomd_spec(tok, Some(shape[3]))
                }
            })
            .collect::<Result<_, _>>()?,
        None => vec![base.rank],
    };
    if mus.is_empty() || ks.is_empty() || ranks.is_empty() {
        return Err(CliError::validation("sweep grid is empty"));
    }

    let mut cells = Vec::new();
    for &mu in &mus {
        for &kn in &ks {
            for rank in &ranks {
                let mut cfg = base.clone();
                cfg.mu = mu;
                cfg.k_neighbors = kn;
                cfg.rank = *rank;
                cells.push(cfg);
            }
        }
    }
    println!("sweep: {} grid cells × {} seeds", cells.len(), seeds.len());

    let started = Instant::now();
    let runs = parallel_map(cells.len(), |i| {
        run_cluster(&loaded.name, &loaded.dataset, &cells[i], k, &seeds)
    })?;
    println!("sweep done, wall={:.3}s", started.elapsed().as_secs_f64());

    let rows: Vec<SweepRow> = cells
        .iter()
        .zip(&runs)
        .map(|(cfg, run)| SweepRow {
            mu: cfg.mu,
            k_neighbors: cfg.k_neighbors,
            rank: fmt_tomd_rank(&cfg.rank),
            converged: run.report.converged,
            admm_iterations: run.report.admm_iterations,
            acc_mean: run.report.mean.as_ref().map(|m| m.acc),
            acc_std: run.report.std_dev.as_ref().map(|m| m.acc),
            nmi_mean: run.report.mean.as_ref().map(|m| m.nmi),
            nmi_std: run.report.std_dev.as_ref().map(|m| m.nmi),
        })
        .collect();
    let report = SweepReport {
        schema_version: SCHEMA_VERSION,
        dataset: loaded.name.clone(),
        seeds,
        rows,
    };
    let out = file.report_path.as_deref().unwrap_or(&o.out);
    ensure_dir(out)?;
    write_text(&out.join("sweep.json"), &to_json(&report))?;
    write_text(&out.join("sweep.csv"), &report.to_csv())?;
    Ok(())
}

// ------------------------------------------------------------------ metrics

#[derive(Debug, Clone)]
pub struct MetricsOptions {
    pub pred: PathBuf,
    pub truth: PathBuf,
    pub out: Option<PathBuf>,
}

pub fn cmd_metrics(o: &MetricsOptions) -> Result<(), CliError> {
    let pred = io::read_labels(&o.pred)?;
    let truth = io::read_labels(&o.truth)?;
    let metrics = evaluate(&pred, &truth)?;
    let report = MetricsReport {
        schema_version: SCHEMA_VERSION,
        n_samples: pred.len(),
        metrics: metrics.into(),
    };
    let json = to_json(&report);
    print!("{json}");
    if let Some(path) = &o.out {
        write_text(path, &json)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{synthetic_clusters, SyntheticSpec};

    #[test]
    fn rank_spec_parses_and_formats() {
        let r = parse_tomd_spec("30,15,11,v:4,4,4,4,4,4", Some(3)).unwrap();
        assert_eq!(r.r, [30, 15, 11, 3]);
        assert_eq!(r.d, [4; 6]);
        assert_eq!(fmt_tomd_rank(&r), "30,15,11,3:4,4,4,4,4,4");
        assert!(parse_tomd_spec("1,2,3:4,4,4,4,4,4", None).is_err());
        assert!(parse_tomd_spec("1,2,3,4", None).is_err());
        assert!(parse_tomd_spec("1,2,3,v:4,4,4,4,4,4", None).is_err());
        assert!(parse_tomd_spec("1,2,3,x:4,4,4,4,4,4", Some(2)).is_err());
    }

    #[test]
    fn overrides_layering_puts_config_file_on_top() {
        let flags = AdmmOverrides { mu: Some(2.0), tol: Some(1e-5), ..Default::default() };
        let file = AdmmOverrides { mu: Some(9.0), ..Default::default() };
        let merged = flags.overlaid_with(&file);
        assert_eq!(merged.mu, Some(9.0));
        assert_eq!(merged.tol, Some(1e-5));
        let cfg = merged
            .build(resolve_preset(Some("Yale")).unwrap(), [4, 4, 4, 2], 8)
            .unwrap();
        assert_eq!(cfg.mu, 9.0);
        assert_eq!(cfg.tol, 1e-5);
        assert_eq!(cfg.k_neighbors, 10); // from the preset
        assert_eq!(cfg.rank.r, [4, 4, 4, 2]); // default rank clamped
        assert!(resolve_preset(Some("nope")).is_err());
    }

    #[test]
    fn parallel_map_is_order_stable_and_propagates_errors() {
        let squares = parallel_map(100, |i| Ok(i * i)).unwrap();
        assert_eq!(squares[7], 49);
        assert_eq!(squares.len(), 100);
        let err = parallel_map(10, |i| {
            if i == 3 {
                Err(CliError::validation("boom"))
            } else {
                Ok(i)
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("boom"));
    }

    #[test]
    fn run_method_fits_every_variant_on_a_tiny_tensor() {
        let x = DenseTensor::from_fn(&[3, 3, 3, 3], |ix| {
            (ix[0] + 2 * ix[1] + 3 * ix[2] + 4 * ix[3]) as f64 * 0.1 + 1.0
        });
        let cfg = AlsConfig { iter_max: 20, tol: 1e-12, seed: 0 };
        for m in [Method::Tomd, Method::Tucker, Method::Tutr, Method::Ominus] {
            let fit = run_method(&x, m, None, &cfg).unwrap();
            assert!(fit.rse.is_finite(), "{}: rse {}", m.name(), fit.rse);
            assert!(fit.rse < 1.0, "{}: rse {}", m.name(), fit.rse);
            assert!(fit.storage > 0);
            assert_eq!(fit.recon.shape(), x.shape());
        }
    }

    #[test]
    fn cluster_run_produces_consistent_report() {
        let ds = synthetic_clusters(&SyntheticSpec {
            clusters: 2,
            per_cluster: 4,
            view_features: vec![6],
            basis_rank: 1,
            corruption: 0.0,
            seed: 1,
        })
        .unwrap();
        let rank = TomdRank::new([2, 2, 2, 1], [1; 6]);
        let mut cfg = AdmmConfig::new(1.0, 2, rank);
        cfg.iter_max = 5;
        cfg.als.iter_max = 10;
        let run = run_cluster("tiny", &ds, &cfg, 2, &[0, 1]).unwrap();
        assert_eq!(run.report.per_seed.len(), 2);
        assert_eq!(run.report.per_seed[0].labels.len(), 8);
        assert!(run.report.mean.is_some());
        assert_eq!(run.report.residual_trace.len(), run.report.admm_iterations);
        assert_eq!(run.affinity.rows(), 8);
        // Determinism: same inputs, same report.
        let again = run_cluster("tiny", &ds, &cfg, 2, &[0, 1]).unwrap();
        assert_eq!(to_json(&run.report), to_json(&again.report));
    }

    #[test]
    fn metrics_command_round_trips_files() {
        let dir = tempfile::tempdir().unwrap();
        let pred = dir.path().join("pred.csv");
        let truth = dir.path().join("truth.csv");
        io::write_labels(&pred, &[0, 0, 1, 1]).unwrap();
        io::write_labels(&truth, &[1, 1, 0, 0]).unwrap();
        let out = dir.path().join("metrics.json");
        cmd_metrics(&MetricsOptions {
            pred,
            truth,
            out: Some(out.clone()),
        })
        .unwrap();
        let text = std::fs::read_to_string(out).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["metrics"]["acc"], 1.0);
        assert_eq!(v["n_samples"], 4);
    }
}
