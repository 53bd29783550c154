//! ADMM solver for low-rank multi-view subspace clustering.
//!
//! Each view X_v (C_v × N) is self-represented as X_v ≈ X_v S_v + E_v with
//! column-sparse error E_v; the stacked representation tensor is pulled
//! toward a low-TOMD-rank surrogate 𝒵 (through a reshape Φ of the N×N×V
//! stack into a 4-way N₁×N₂×N₃×V tensor), while an adaptive-neighbor graph M
//! regularizes S through its Laplacian. The ADMM loop alternates
//! Z → S → E → M → multipliers with a growing penalty τ.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::tensor::DenseTensor;
use crate::tomd::{tomd_als, tomd_als_warm, tomd_reconstruct, AlsConfig, TomdFactors, TomdRank};

/// V data matrices over a common sample set, with the reshape that maps the
/// N×N×V representation stack to a 4-way tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<DenseTensor>,
    labels: Option<Vec<usize>>,
    reshape_dims: [usize; 3],
}

impl MultiViewDataset {
    pub fn new(
        views: Vec<DenseTensor>,
        labels: Option<Vec<usize>>,
        reshape_dims: [usize; 3],
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidArg("dataset needs at least one view".into()));
        }
        let n = views[0].cols();
        for (v, x) in views.iter().enumerate() {
            if x.order() != 2 {
                return Err(Error::Shape(format!("view {v} is not a matrix")));
            }
            if x.cols() != n {
                return Err(Error::Shape(format!(
                    "view {v} has {} columns, expected {n}",
                    x.cols()
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::LengthMismatch(l.len(), n));
            }
        }
        if reshape_dims.iter().product::<usize>() != n * n {
            return Err(Error::Shape(format!(
                "reshape dims {reshape_dims:?} do not factor N² = {}",
                n * n
            )));
        }
        Ok(Self {
            views,
            labels,
            reshape_dims,
        })
    }

    pub fn views(&self) -> &[DenseTensor] {
        &self.views
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn reshape_dims(&self) -> [usize; 3] {
        self.reshape_dims
    }

    pub fn n_samples(&self) -> usize {
        self.views[0].cols()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Total stacked row count Σ C_v.
    pub fn total_rows(&self) -> usize {
        self.views.iter().map(|x| x.rows()).sum()
    }

    /// First stacked row of view v's block.
    pub fn row_offset(&self, v: usize) -> usize {
        self.views[..v].iter().map(|x| x.rows()).sum()
    }
}

/// ADMM controls.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    /// Graph-regularization weight μ ≥ 0.
    pub mu: f64,
    /// Adaptive-neighbor count, 1 ≤ K < N.
    pub k_neighbors: usize,
    /// TOMD rank of the Z-update surrogate.
    pub rank: TomdRank,
    /// Initial penalty τ⁰ > 0.
    pub tau0: f64,
    /// Penalty growth factor β > 1.
    pub beta: f64,
    /// Penalty ceiling.
    pub tau_max: f64,
    /// Convergence threshold on the ∞-norm residuals.
    pub tol: f64,
    /// Outer iteration cap.
    pub iter_max: usize,
    /// Inner TOMD-ALS budget for the Z-update.
    pub als: AlsConfig,
}

impl AdmmConfig {
    pub fn new(mu: f64, k_neighbors: usize, rank: TomdRank) -> Self {
        Self {
            mu,
            k_neighbors,
            rank,
            tau0: 1.0,
            beta: 1.5,
            tau_max: 1e10,
            tol: 1e-7,
            iter_max: 150,
            als: AlsConfig {
                iter_max: 50,
                tol: 1e-12,
                seed: 0,
            },
        }
    }

    pub fn validate(&self, n_samples: usize) -> Result<()> {
        if self.mu.is_nan() || self.mu < 0.0 {
            return Err(Error::InvalidArg(format!("mu must be ≥ 0, got {}", self.mu)));
        }
        if self.k_neighbors == 0 || self.k_neighbors >= n_samples {
            return Err(Error::InvalidArg(format!(
                "k_neighbors must satisfy 1 ≤ K < N = {n_samples}, got {}",
                self.k_neighbors
            )));
        }
        if self.beta.is_nan() || self.beta <= 1.0 {
            return Err(Error::InvalidArg(format!(
                "beta must exceed 1, got {}",
                self.beta
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArg(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.tau0.is_nan() || self.tau_max.is_nan() || self.tau0 <= 0.0 || self.tau_max < self.tau0 {
            return Err(Error::InvalidArg(format!(
                "need 0 < tau0 ≤ tau_max, got {} and {}",
                self.tau0, self.tau_max
            )));
        }
        if self.iter_max == 0 {
            return Err(Error::InvalidArg("iter_max must be ≥ 1".into()));
        }
        self.als.validate()
    }
}

/// Full solver state. Z, S, Y are N×N×V stacks; E, W stack the per-view
/// blocks vertically into (ΣC_v)×N matrices; M is the N×N neighbor affinity.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub z: DenseTensor,
    pub s: DenseTensor,
    pub e: DenseTensor,
    pub m: DenseTensor,
    pub w: DenseTensor,
    pub y: DenseTensor,
    pub tau: f64,
    pub iter: usize,
    /// (reconstruction residual, match residual), both ∞-norms.
    pub residuals: (f64, f64),
    pub converged: bool,
    /// TOMD factors of the last Z-update, used to warm-start the next one.
    pub z_factors: Option<TomdFactors>,
}

impl AdmmState {
    /// Zero-initialized state per the algorithm (M = 0, τ = τ⁰).
    pub fn new(dataset: &MultiViewDataset, cfg: &AdmmConfig) -> Result<Self> {
        cfg.validate(dataset.n_samples())?;
        let n = dataset.n_samples();
        let v = dataset.n_views();
        let c = dataset.total_rows();
        Ok(Self {
            z: DenseTensor::zeros(&[n, n, v]),
            s: DenseTensor::zeros(&[n, n, v]),
            e: DenseTensor::zeros(&[c, n]),
            m: DenseTensor::zeros(&[n, n]),
            w: DenseTensor::zeros(&[c, n]),
            y: DenseTensor::zeros(&[n, n, v]),
            tau: cfg.tau0,
            iter: 0,
            residuals: (f64::INFINITY, f64::INFINITY),
            converged: false,
            z_factors: None,
        })
    }
}

/// Copy slice v of an N×N×V stack out as an N×N matrix.
pub fn stack_slice(t: &DenseTensor, v: usize) -> DenseTensor {
    let (n, nv) = (t.shape()[0], t.shape()[2]);
    debug_assert!(v < nv && t.shape()[1] == n);
    let len = n * n;
    DenseTensor::new(vec![n, n], t.data()[v * len..(v + 1) * len].to_vec()).unwrap()
}

fn set_stack_slice(t: &mut DenseTensor, v: usize, m: &DenseTensor) {
    let n = t.shape()[0];
    let len = n * n;
    t.data_mut()[v * len..(v + 1) * len].copy_from_slice(m.data());
}

/// Copy rows off..off+c of a stacked matrix out as a c×N block.
pub fn stacked_block(e: &DenseTensor, off: usize, c: usize) -> DenseTensor {
    let (rows, cols) = (e.rows(), e.cols());
    debug_assert!(off + c <= rows);
    DenseTensor::from_fn(&[c, cols], |ix| e.data()[ix[1] * rows + off + ix[0]])
}

fn set_stacked_block(e: &mut DenseTensor, off: usize, block: &DenseTensor) {
    let rows = e.rows();
    let (c, cols) = (block.rows(), block.cols());
    for j in 0..cols {
        for i in 0..c {
            e.data_mut()[j * rows + off + i] = block.data()[j * c + i];
        }
    }
}

/// The Z-update: fit a TOMD to Φ(S − Y/τ) and return its reconstruction
/// reshaped back to the N×N×V stack, plus the fitted factors (used to
/// warm-start the next call).
pub fn update_z(
    state: &AdmmState,
    dataset: &MultiViewDataset,
    cfg: &AdmmConfig,
) -> Result<(DenseTensor, TomdFactors)> {
    let [n1, n2, n3] = dataset.reshape_dims();
    let v = dataset.n_views();
    let shape4 = [n1, n2, n3, v];
    cfg.rank.validate_for(&shape4)?;
    let target = state.s.sub(&state.y.scale(1.0 / state.tau))?;
    let x4 = target.reshape(&shape4)?;
    if x4.frob_norm() == 0.0 {
        let f = TomdFactors::zeros(&shape4, &cfg.rank)?;
        return Ok((DenseTensor::zeros(state.z.shape()), f));
    }
    // a warm start is only usable if it can move: zero-reconstruction
    // factors are a fixed point of every ALS block update
    let mut warm: Option<&TomdFactors> = None;
    if let Some(f0) = &state.z_factors {
        if f0.target_shape() == shape4
            && f0.rank() == cfg.rank
            && tomd_reconstruct(f0)?.frob_norm() > 0.0
        {
            warm = Some(f0);
        }
    }
    let (f, _) = match warm {
        Some(f0) => tomd_als_warm(&x4, f0.clone(), &cfg.als)?,
        None => tomd_als(&x4, &cfg.rank, &cfg.als)?,
    };
    let z = tomd_reconstruct(&f)?.reshape(state.z.shape())?;
    Ok((z, f))
}

/// The per-view S-update: solve (τ(I + X_vᵀX_v) + 2μL) S_v =
/// τZ_v + Y_v + τX_vᵀ(X_v − E_v + W_v/τ) with L the Laplacian of current M.
pub fn update_s(
    state: &AdmmState,
    dataset: &MultiViewDataset,
    cfg: &AdmmConfig,
) -> Result<DenseTensor> {
    let n = dataset.n_samples();
    let tau = state.tau;
    let lap = graph_laplacian(&state.m)?;
    let mut s = DenseTensor::zeros(state.s.shape());
    for v in 0..dataset.n_views() {
        let x = &dataset.views()[v];
        let (off, c) = (dataset.row_offset(v), x.rows());
        let e = stacked_block(&state.e, off, c);
        let w = stacked_block(&state.w, off, c);
        let z = stack_slice(&state.z, v);
        let y = stack_slice(&state.y, v);
        let xt = x.transpose()?;
        let mut a = xt.matmul(x)?.add(&DenseTensor::identity(n))?.scale(tau);
        a = a.add(&lap.scale(2.0 * cfg.mu))?;
        let h = x.sub(&e)?.add(&w.scale(1.0 / tau))?;
        let rhs = z.scale(tau).add(&y)?.add(&xt.matmul(&h)?.scale(tau))?;
        let sv = solve_spd(&a, &rhs)?;
        let resid = a.matmul(&sv)?.sub(&rhs)?.frob_norm();
        if resid > 1e-6 * (1.0 + rhs.frob_norm()) {
            return Err(Error::Numerical(format!(
                "S-subproblem solve residual {resid} too large in view {v}"
            )));
        }
        set_stack_slice(&mut s, v, &sv);
    }
    Ok(s)
}

/// The E-update: column-wise L2 shrinkage of H = stack(X_v − X_vS_v) + W/τ
/// with threshold 1/τ.
pub fn update_e(state: &AdmmState, dataset: &MultiViewDataset) -> Result<DenseTensor> {
    let n = dataset.n_samples();
    let rows = dataset.total_rows();
    let mut h = DenseTensor::zeros(&[rows, n]);
    for v in 0..dataset.n_views() {
        let x = &dataset.views()[v];
        let sv = stack_slice(&state.s, v);
        let block = x.sub(&x.matmul(&sv)?)?;
        set_stacked_block(&mut h, dataset.row_offset(v), &block);
    }
    h = h.add(&state.w.scale(1.0 / state.tau))?;
    let threshold = 1.0 / state.tau;
    let mut e = DenseTensor::zeros(&[rows, n]);
    for j in 0..n {
        let col = &h.data()[j * rows..(j + 1) * rows];
        let norm = libm::sqrt(col.iter().map(|&x| x * x).sum());
        if norm > threshold {
            let scalefac = (norm - threshold) / norm;
            for (dst, &src) in e.data_mut()[j * rows..(j + 1) * rows].iter_mut().zip(col) {
                *dst = scalefac * src;
            }
        }
    }
    Ok(e)
}

/// Adaptive-neighbor weights over a candidate distance list: the K smallest
/// distances get (p₍K+1₎ − p_j) / (K·p₍K+1₎ − Σ_{k≤K} p₍k₎), the rest 0.
/// Degenerate denominators (all K smallest tie with p₍K+1₎) and the
/// no-(K+1)-candidate case fall back to uniform 1/K.
pub fn adaptive_neighbor_weights(dists: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > dists.len() {
        return Err(Error::InvalidArg(format!(
            "neighbor count {k} out of range 1..={}",
            dists.len()
        )));
    }
    let mut order: Vec<usize> = (0..dists.len()).collect();
    order.sort_by(|&a, &b| dists[a].partial_cmp(&dists[b]).unwrap().then(a.cmp(&b)));
    let mut w = vec![0.0; dists.len()];
    if k == dists.len() {
        for &j in &order {
            w[j] = 1.0 / k as f64;
        }
        return Ok(w);
    }
    let pk1 = dists[order[k]];
    let sum_k: f64 = order[..k].iter().map(|&j| dists[j]).sum();
    let denom = k as f64 * pk1 - sum_k;
    if denom <= 0.0 {
        for &j in &order[..k] {
            w[j] = 1.0 / k as f64;
        }
    } else {
        for &j in &order[..k] {
            w[j] = (pk1 - dists[j]) / denom;
        }
    }
    Ok(w)
}

/// The M-update: per sample i, adaptive-neighbor weights over
/// p_{ij} = Σ_v ‖column_i(S_v) − column_j(S_v)‖₂², self excluded.
pub fn update_m(state: &AdmmState, dataset: &MultiViewDataset, cfg: &AdmmConfig) -> Result<DenseTensor> {
    let n = dataset.n_samples();
    let nv = dataset.n_views();
    let mut p = vec![0.0; n * n];
    for v in 0..nv {
        let s = stack_slice(&state.s, v);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut d = 0.0;
                for r in 0..n {
                    let diff = s.data()[i * n + r] - s.data()[j * n + r];
                    d += diff * diff;
                }
                p[j * n + i] += d;
                p[i * n + j] += d;
            }
        }
    }
    let mut m = DenseTensor::zeros(&[n, n]);
    for i in 0..n {
        let cand: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let dists: Vec<f64> = cand.iter().map(|&j| p[i * n + j]).collect();
        let w = adaptive_neighbor_weights(&dists, cfg.k_neighbors)?;
        for (t, &j) in cand.iter().enumerate() {
            m.set2(j, i, w[t]);
        }
    }
    Ok(m)
}

/// Graph Laplacian L = D − (M + Mᵀ)/2 of a nonnegative affinity.
pub fn graph_laplacian(m: &DenseTensor) -> Result<DenseTensor> {
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
    let mut l = DenseTensor::zeros(&[n, n]);
    for i in 0..n {
        let mut deg = 0.0;
        for j in 0..n {
            let a = 0.5 * (m.get2(i, j) + m.get2(j, i));
            deg += a;
            l.set2(i, j, -a);
        }
        *l.at_mut(&[i, i]) += deg;
    }
    Ok(l)
}

/// Multiplier ascent and penalty growth:
/// W_v += τ(X_v − X_vS_v − E_v), Y += τ(Z − S), τ ← min(βτ, τ_max).
pub fn update_multipliers(
    state: &AdmmState,
    dataset: &MultiViewDataset,
    cfg: &AdmmConfig,
) -> Result<(DenseTensor, DenseTensor, f64)> {
    let tau = state.tau;
    let mut w = state.w.clone();
    for v in 0..dataset.n_views() {
        let x = &dataset.views()[v];
        let (off, c) = (dataset.row_offset(v), x.rows());
        let sv = stack_slice(&state.s, v);
        let ev = stacked_block(&state.e, off, c);
        let wv = stacked_block(&state.w, off, c);
        let resid = x.sub(&x.matmul(&sv)?)?.sub(&ev)?;
        set_stacked_block(&mut w, off, &wv.add(&resid.scale(tau))?);
    }
    let y = state.y.add(&state.z.sub(&state.s)?.scale(tau))?;
    let tau_next = (cfg.beta * tau).min(cfg.tau_max);
    Ok((w, y, tau_next))
}

/// Fused affinity M = (1/V) Σ_v (|Z_v| + |Z_vᵀ|): symmetric, nonnegative.
pub fn affinity_from_z(z: &DenseTensor) -> Result<DenseTensor> {
    if z.order() != 3 || z.shape()[0] != z.shape()[1] {
        return Err(Error::Shape(format!(
            "expected an N×N×V stack, got {:?}",
            z.shape()
        )));
    }
    let (n, nv) = (z.shape()[0], z.shape()[2]);
    let mut m = DenseTensor::zeros(&[n, n]);
    for v in 0..nv {
        let zv = stack_slice(z, v);
        for i in 0..n {
            for j in 0..n {
                let add = zv.get2(i, j).abs() + zv.get2(j, i).abs();
                *m.at_mut(&[i, j]) += add;
            }
        }
    }
    Ok(m.scale(1.0 / nv as f64))
}

/// ∞-norm residuals: (max_v ‖X_v − X_vS_v − E_v‖_∞, ‖Z − S‖_∞).
pub fn residuals(state: &AdmmState, dataset: &MultiViewDataset) -> Result<(f64, f64)> {
    let mut rec: f64 = 0.0;
    for v in 0..dataset.n_views() {
        let x = &dataset.views()[v];
        let (off, c) = (dataset.row_offset(v), x.rows());
        let sv = stack_slice(&state.s, v);
        let ev = stacked_block(&state.e, off, c);
        rec = rec.max(x.sub(&x.matmul(&sv)?)?.sub(&ev)?.max_abs());
    }
    let m = state.z.sub(&state.s)?.max_abs();
    Ok((rec, m))
}

/// Run the full ADMM loop from the zero initialization. Returns the final
/// state and the per-iteration residual trace.
pub fn admm_solve(
    dataset: &MultiViewDataset,
    cfg: &AdmmConfig,
) -> Result<(AdmmState, Vec<(f64, f64)>)> {
    let mut state = AdmmState::new(dataset, cfg)?;
    let mut trace = Vec::new();
    for it in 0..cfg.iter_max {
        let (z, factors) = update_z(&state, dataset, cfg)?;
        state.z = z;
        state.z_factors = Some(factors);
        state.s = update_s(&state, dataset, cfg)?;
        state.e = update_e(&state, dataset)?;
        state.m = update_m(&state, dataset, cfg)?;
        let (w, y, tau) = update_multipliers(&state, dataset, cfg)?;
        state.w = w;
        state.y = y;
        state.tau = tau;
        state.iter = it + 1;
        state.residuals = residuals(&state, dataset)?;
        trace.push(state.residuals);
        if state.residuals.0.max(state.residuals.1) <= cfg.tol {
            state.converged = true;
            break;
        }
    }
    Ok((state, trace))
}
