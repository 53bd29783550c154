//! The Tucker-O-Minus decomposition (TOMD) of a 4-way tensor and its ALS
//! fitting algorithm.
//!
//! The format places an "O-minus" core — a 4-node ring of factor tensors
//! G⁽¹⁾..G⁽⁴⁾ closed by ring bonds d₁..d₄, plus a bridge matrix G⁽⁵⁾ tied to
//! the two opposite 4-way ring nodes through bonds d₅, d₆ — inside Tucker
//! factor matrices U⁽¹⁾..U⁽⁴⁾:
//!
//! ```text
//!   G⁽¹⁾: d₄ × r₁ × d₁ × d₅      G⁽²⁾: d₁ × r₂ × d₂
//!   G⁽³⁾: d₂ × r₃ × d₃ × d₆      G⁽⁴⁾: d₃ × r₄ × d₄
//!   G⁽⁵⁾: d₅ × d₆                U⁽ⁿ⁾: I_n × R_n
//! ```
//!
//! All subproblem matrices are assembled through the generic network
//! contraction, so the mode bookkeeping lives in one table below.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, truncated_svd};
use crate::network::{ContractionNetwork, Edge};
use crate::tensor::{rse, DenseTensor};

/// The TOMD rank: outer ranks R₁..R₄ and internal bond dimensions D₁..D₆.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TomdRank {
    pub r: [usize; 4],
    pub d: [usize; 6],
}

impl TomdRank {
    pub fn new(r: [usize; 4], d: [usize; 6]) -> Self {
        Self { r, d }
    }

    /// All entries positive and R_n ≤ I_n (truncated-SVD initialization
    /// requires it).
    pub fn validate_for(&self, shape: &[usize]) -> Result<()> {
        if shape.len() != 4 {
            return Err(Error::Shape(format!(
                "TOMD fits 4-way tensors, got order {}",
                shape.len()
            )));
        }
        if self.r.contains(&0) || self.d.contains(&0) {
            return Err(Error::Rank(format!("rank entries must be ≥ 1: {self:?}")));
        }
        for (n, &extent) in shape.iter().enumerate() {
            if self.r[n] > extent {
                return Err(Error::Rank(format!(
                    "R{} = {} exceeds extent I{} = {}",
                    n + 1,
                    self.r[n],
                    n + 1,
                    extent
                )));
            }
        }
        Ok(())
    }

    /// Shapes of the five core factors under this rank.
    pub fn core_shapes(&self) -> [Vec<usize>; 5] {
        let [d1, d2, d3, d4, d5, d6] = self.d;
        let [r1, r2, r3, r4] = self.r;
        [
            vec![d4, r1, d1, d5],
            vec![d1, r2, d2],
            vec![d2, r3, d3, d6],
            vec![d3, r4, d4],
            vec![d5, d6],
        ]
    }
}

/// The nine factors of a TOMD: ring cores G⁽¹⁾..G⁽⁴⁾, bridge G⁽⁵⁾ and the
/// Tucker factor matrices U⁽¹⁾..U⁽⁴⁾.
#[derive(Debug, Clone, PartialEq)]
pub struct TomdFactors {
    pub cores: [DenseTensor; 4],
    pub bridge: DenseTensor,
    pub factors: [DenseTensor; 4],
}

/// Role of one axis of a core factor (bond ids are 1-based, d₁..d₆).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisKind {
    Bond(u8),
    Rank(u8),
}

use AxisKind::{Bond, Rank};

/// Axis layout of the five core factors, fixed by the format definition.
const FACTOR_AXES: [&[AxisKind]; 5] = [
    &[Bond(4), Rank(0), Bond(1), Bond(5)],
    &[Bond(1), Rank(1), Bond(2)],
    &[Bond(2), Rank(2), Bond(3), Bond(6)],
    &[Bond(3), Rank(3), Bond(4)],
    &[Bond(5), Bond(6)],
];

impl TomdFactors {
    /// All-zero factors for a given target shape and rank.
    pub fn zeros(shape: &[usize], rank: &TomdRank) -> Result<Self> {
        rank.validate_for(shape)?;
        let cs = rank.core_shapes();
        Ok(Self {
            cores: [
                DenseTensor::zeros(&cs[0]),
                DenseTensor::zeros(&cs[1]),
                DenseTensor::zeros(&cs[2]),
                DenseTensor::zeros(&cs[3]),
            ],
            bridge: DenseTensor::zeros(&cs[4]),
            factors: [
                DenseTensor::zeros(&[shape[0], rank.r[0]]),
                DenseTensor::zeros(&[shape[1], rank.r[1]]),
                DenseTensor::zeros(&[shape[2], rank.r[2]]),
                DenseTensor::zeros(&[shape[3], rank.r[3]]),
            ],
        })
    }

    fn core_factor(&self, i: usize) -> &DenseTensor {
        match i {
            4 => &self.bridge,
            _ => &self.cores[i],
        }
    }

    /// The rank implied by the factor shapes.
    pub fn rank(&self) -> TomdRank {
        TomdRank {
            r: [
                self.factors[0].cols(),
                self.factors[1].cols(),
                self.factors[2].cols(),
                self.factors[3].cols(),
            ],
            d: [
                self.cores[0].shape()[2],
                self.cores[1].shape()[2],
                self.cores[2].shape()[2],
                self.cores[3].shape()[2],
                self.cores[0].shape()[3],
                self.cores[2].shape()[3],
            ],
        }
    }

    /// Target shape (I₁, I₂, I₃, I₄) implied by the factor matrices.
    pub fn target_shape(&self) -> [usize; 4] {
        [
            self.factors[0].rows(),
            self.factors[1].rows(),
            self.factors[2].rows(),
            self.factors[3].rows(),
        ]
    }

    /// Check mutual consistency of all nine factor shapes.
    pub fn validate(&self) -> Result<()> {
        let rank = self.rank();
        let want = rank.core_shapes();
        for (i, want_i) in want.iter().take(4).enumerate() {
            if self.cores[i].shape() != want_i.as_slice() {
                return Err(Error::Shape(format!(
                    "core factor {} has shape {:?}, rank implies {:?}",
                    i + 1,
                    self.cores[i].shape(),
                    want_i
                )));
            }
            if self.factors[i].order() != 2 {
                return Err(Error::Shape(format!(
                    "factor matrix {} must be a matrix",
                    i + 1
                )));
            }
            if self.cores[i].shape()[1] != rank.r[i] {
                return Err(Error::Shape(format!(
                    "core factor {} rank axis {} disagrees with U{} columns {}",
                    i + 1,
                    self.cores[i].shape()[1],
                    i + 1,
                    rank.r[i]
                )));
            }
        }
        if self.bridge.shape() != want[4].as_slice() {
            return Err(Error::Shape(format!(
                "bridge has shape {:?}, rank implies {:?}",
                self.bridge.shape(),
                want[4]
            )));
        }
        Ok(())
    }

    /// Exact number of stored scalars across all nine factors.
    pub fn element_count(&self) -> usize {
        self.cores.iter().map(|t| t.len()).sum::<usize>()
            + self.bridge.len()
            + self.factors.iter().map(|m| m.len()).sum::<usize>()
    }

    /// Multiply the five core factors by a common scalar.
    fn scale_cores(&mut self, c: f64) {
        for g in self.cores.iter_mut() {
            *g = g.scale(c);
        }
        self.bridge = self.bridge.scale(c);
    }
}

/// Total scalars stored by a TOMD of the given rank:
/// Σ I_n·R_n + D₄R₁D₁D₅ + D₁R₂D₂ + D₂R₃D₃D₆ + D₃R₄D₄ + D₅D₆.
pub fn storage_cost(shape: &[usize], rank: &TomdRank) -> usize {
    let [d1, d2, d3, d4, d5, d6] = rank.d;
    let [r1, r2, r3, r4] = rank.r;
    let outer: usize = shape.iter().zip(rank.r).map(|(&i, r)| i * r).sum();
    outer + d4 * r1 * d1 * d5 + d1 * r2 * d2 + d2 * r3 * d3 * d6 + d3 * r4 * d4 + d5 * d6
}

/// Build the contraction network of the core factors, optionally excluding
/// one of them (`skip` ∈ 0..5, factor index).
///
/// Open-axis order: when a factor is skipped, its bonds dangle and come
/// first, ordered exactly as the skipped factor's own axes; the surviving
/// rank axes follow in ascending mode order. That makes the n-unfolding of
/// the result line up row-wise with the skipped factor's mode-2 unfolding.
fn core_subnetwork(f: &TomdFactors, skip: Option<usize>) -> ContractionNetwork {
    let included: Vec<usize> = (0..5).filter(|&i| Some(i) != skip).collect();
    let nodes: Vec<DenseTensor> = included.iter().map(|&i| f.core_factor(i).clone()).collect();
    let local = |global: usize| included.iter().position(|&i| i == global).unwrap();
    // endpoints of every bond among the included factors
    let mut endpoints: [Vec<(usize, usize)>; 6] = Default::default();
    let mut ranks: Vec<(u8, (usize, usize))> = Vec::new();
    for &i in &included {
        for (axis, kind) in FACTOR_AXES[i].iter().enumerate() {
            match kind {
                Bond(k) => endpoints[*k as usize - 1].push((local(i), axis)),
                Rank(m) => ranks.push((*m, (local(i), axis))),
            }
        }
    }
    let mut edges = Vec::new();
    let mut open = Vec::new();
    if let Some(s) = skip {
        // dangling bonds first, in the skipped factor's own axis order
        for kind in FACTOR_AXES[s] {
            if let Bond(k) = kind {
                let e = &endpoints[*k as usize - 1];
                debug_assert_eq!(e.len(), 1);
                open.push(e[0]);
            }
        }
    }
    for e in endpoints.iter() {
        if e.len() == 2 {
            edges.push(Edge::new(e[0].0, e[0].1, e[1].0, e[1].1));
        }
    }
    ranks.sort_by_key(|&(m, _)| m);
    open.extend(ranks.into_iter().map(|(_, ax)| ax));
    ContractionNetwork::new(nodes, edges, open)
}

/// Contract the five core factors into the R₁×R₂×R₃×R₄ core tensor.
pub fn tomd_core(f: &TomdFactors) -> Result<DenseTensor> {
    f.validate()?;
    core_subnetwork(f, None).contract()
}

/// Full reconstruction: core ×₁U⁽¹⁾ ×₂U⁽²⁾ ×₃U⁽³⁾ ×₄U⁽⁴⁾.
pub fn tomd_reconstruct(f: &TomdFactors) -> Result<DenseTensor> {
    let mut t = tomd_core(f)?;
    for n in 0..4 {
        t = t.mode_n_product(&f.factors[n], n)?;
    }
    Ok(t)
}

/// A₍ₙ₎ of the U-subproblem: the all-but-U⁽ⁿ⁾ contraction
/// A = core ×_{m≠n} U⁽ᵐ⁾, mode-n unfolded to R_n × ∏_{m≠n} I_m.
pub fn u_subproblem_matrix(f: &TomdFactors, n: usize) -> Result<DenseTensor> {
    let mut a = tomd_core(f)?;
    for m in 0..4 {
        if m != n {
            a = a.mode_n_product(&f.factors[m], m)?;
        }
    }
    a.mode_n_unfold(n)
}

/// A^{≠n} of the G-subproblem: contract everything except G⁽ⁿ⁾ and U⁽ⁿ⁾,
/// then take the n-unfolding whose rows match G⁽ⁿ⁾₍₂₎'s columns
/// (split 3 for the 4-way ring factors n ∈ {0, 2}, split 2 for n ∈ {1, 3})
/// and whose columns match X₍ₙ₎'s.
pub fn g_subproblem_matrix(f: &TomdFactors, n: usize) -> Result<DenseTensor> {
    debug_assert!(n < 4);
    let mut a = core_subnetwork(f, Some(n)).contract()?;
    let bonds = FACTOR_AXES[n].len() - 1; // all axes of G⁽ⁿ⁾ except its rank axis
    let mut axis = bonds;
    for m in 0..4 {
        if m != n {
            a = a.mode_n_product(&f.factors[m], axis)?;
            axis += 1;
        }
    }
    a.n_unfold(bonds)
}

/// Ã₍₂₎ of the bridge subproblem: contract the four ring factors (open
/// d₅, d₆, r₁..r₄), apply all U⁽ⁿ⁾, and 2-unfold to D₅D₆ × I₁I₂I₃I₄.
pub fn bridge_subproblem_matrix(f: &TomdFactors) -> Result<DenseTensor> {
    let mut a = core_subnetwork(f, Some(4)).contract()?;
    for m in 0..4 {
        a = a.mode_n_product(&f.factors[m], 2 + m)?;
    }
    a.n_unfold(2)
}

/// ALS controls. `seed` drives the pseudo-random core initialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlsConfig {
    pub iter_max: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AlsConfig {
    fn default() -> Self {
        Self {
            iter_max: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

impl AlsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iter_max == 0 {
            return Err(Error::InvalidArg("iter_max must be ≥ 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArg(format!(
                "tol_als must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Truncated-SVD initialization: U⁽ⁿ⁾ from the leading left singular vectors
/// of each mode unfolding, cores seeded pseudo-randomly and rescaled so the
/// initial reconstruction matches ‖x‖_F (unless x = 0, which yields zero
/// factors).
pub fn tomd_init(x: &DenseTensor, rank: &TomdRank, cfg: &AlsConfig) -> Result<TomdFactors> {
    rank.validate_for(x.shape())?;
    cfg.validate()?;
    let xnorm = x.frob_norm();
    let mut f = TomdFactors::zeros(x.shape(), rank)?;
    if xnorm == 0.0 {
        return Ok(f);
    }
    for n in 0..4 {
        let unfolding = x.mode_n_unfold(n)?;
        f.factors[n] = truncated_svd(&unfolding, rank.r[n])?.u;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for g in f.cores.iter_mut() {
        *g = DenseTensor::from_fn(g.shape(), |_| rng.random::<f64>() - 0.5);
    }
    f.bridge = DenseTensor::from_fn(f.bridge.shape(), |_| rng.random::<f64>() - 0.5);
    // match the initial reconstruction's norm to ‖x‖ by scaling the five
    // core factors uniformly (avoids scale collapse at large bond products)
    let rnorm = tomd_reconstruct(&f)?.frob_norm();
    if rnorm == 0.0 || !rnorm.is_finite() {
        return Err(Error::Numerical(
            "degenerate random initialization; try another seed".into(),
        ));
    }
    f.scale_cores(libm::pow(xnorm / rnorm, 0.2));
    Ok(f)
}

/// One exact U⁽ⁿ⁾ block update: min ‖X₍ₙ₎ − U⁽ⁿ⁾ A₍ₙ₎‖_F.
pub fn update_u(x: &DenseTensor, f: &mut TomdFactors, n: usize) -> Result<()> {
    let a = u_subproblem_matrix(f, n)?;
    let xt = x.mode_n_unfold(n)?.transpose()?;
    f.factors[n] = least_squares(&a.transpose()?, &xt)?.transpose()?;
    Ok(())
}

/// One exact G⁽ⁿ⁾ block update: min ‖X₍ₙ₎ − U⁽ⁿ⁾ G⁽ⁿ⁾₍₂₎ A^{≠n}‖_F, solved
/// as G⁽ⁿ⁾₍₂₎ = pinv(U⁽ⁿ⁾)·X₍ₙ₎·pinv(A^{≠n}) through the min-norm
/// least-squares contract, then folded back along mode 2.
pub fn update_g(x: &DenseTensor, f: &mut TomdFactors, n: usize) -> Result<()> {
    let a = g_subproblem_matrix(f, n)?;
    let xn = x.mode_n_unfold(n)?;
    let t = least_squares(&f.factors[n], &xn)?;
    let g2 = least_squares(&a.transpose()?, &t.transpose()?)?.transpose()?;
    f.cores[n] = DenseTensor::mode_n_fold(&g2, 1, f.cores[n].shape())?;
    Ok(())
}

/// The bridge update: min ‖vec(x) − g⁽⁵⁾ Ã₍₂₎‖_F, g⁽⁵⁾ folded back to D₅×D₆.
pub fn update_bridge(x: &DenseTensor, f: &mut TomdFactors) -> Result<()> {
    let a = bridge_subproblem_matrix(f)?;
    let xv = x.reshape(&[x.len(), 1])?;
    let g = least_squares(&a.transpose()?, &xv)?;
    f.bridge = g.reshape(f.bridge.shape())?;
    Ok(())
}

/// TOMD-ALS from a truncated-SVD initialization.
///
/// Per sweep: exact block updates of U⁽¹⁾..U⁽⁴⁾, then G⁽¹⁾..G⁽⁴⁾, then the
/// bridge. The returned trace holds the RSE after every sweep; iteration
/// stops once ‖X_last − X_new‖_F / ‖X_last‖_F ≤ tol or `iter_max` is reached.
pub fn tomd_als(
    x: &DenseTensor,
    rank: &TomdRank,
    cfg: &AlsConfig,
) -> Result<(TomdFactors, Vec<f64>)> {
    let f = tomd_init(x, rank, cfg)?;
    if x.frob_norm() == 0.0 {
        // exactly representable: every factor zero, nothing to iterate
        return Ok((f, Vec::new()));
    }
    tomd_als_warm(x, f, cfg)
}

/// TOMD-ALS from caller-supplied factors (warm start).
pub fn tomd_als_warm(
    x: &DenseTensor,
    mut f: TomdFactors,
    cfg: &AlsConfig,
) -> Result<(TomdFactors, Vec<f64>)> {
    cfg.validate()?;
    if x.shape() != f.target_shape() {
        return Err(Error::Shape(format!(
            "factors target shape {:?} but x is {:?}",
            f.target_shape(),
            x.shape()
        )));
    }
    let xnorm = x.frob_norm();
    let mut trace = Vec::new();
    if xnorm == 0.0 {
        return Ok((f, trace));
    }
    let mut x_new = tomd_reconstruct(&f)?;
    for _ in 0..cfg.iter_max {
        let x_last = x_new;
        for n in 0..4 {
            update_u(x, &mut f, n)?;
        }
        for n in 0..4 {
            update_g(x, &mut f, n)?;
        }
        update_bridge(x, &mut f)?;
        x_new = tomd_reconstruct(&f)?;
        trace.push(rse(&x_new, x)?);
        let last_norm = x_last.frob_norm();
        let delta = x_new.sub(&x_last)?.frob_norm();
        let f1 = if last_norm > 0.0 {
            delta / last_norm
        } else if delta == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if f1 <= cfg.tol {
            break;
        }
    }
    Ok((f, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::next_index;

    fn rank_all(r: usize, d: usize) -> TomdRank {
        TomdRank::new([r; 4], [d; 6])
    }

    fn random_factors(shape: &[usize], rank: &TomdRank, seed: u64) -> TomdFactors {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = TomdFactors::zeros(shape, rank).unwrap();
        for g in f.cores.iter_mut() {
            *g = DenseTensor::from_fn(g.shape(), |_| rng.random::<f64>() - 0.5);
        }
        f.bridge = DenseTensor::from_fn(f.bridge.shape(), |_| rng.random::<f64>() - 0.5);
        for u in f.factors.iter_mut() {
            *u = DenseTensor::from_fn(u.shape(), |_| rng.random::<f64>() - 0.5);
        }
        f
    }

    /// Direct six-fold summation of the core definition.
    fn core_oracle(f: &TomdFactors) -> DenseTensor {
        let rank = f.rank();
        let [d1, d2, d3, d4, d5, d6] = rank.d;
        DenseTensor::from_fn(&rank.r, |r| {
            let mut acc = 0.0;
            let dims = [d1, d2, d3, d4, d5, d6];
            let mut ix = [0usize; 6];
            loop {
                let [i1, i2, i3, i4, i5, i6] = ix;
                acc += f.cores[0].at(&[i4, r[0], i1, i5])
                    * f.cores[1].at(&[i1, r[1], i2])
                    * f.cores[2].at(&[i2, r[2], i3, i6])
                    * f.cores[3].at(&[i3, r[3], i4])
                    * f.bridge.at(&[i5, i6]);
                if !next_index(&mut ix, &dims) {
                    return acc;
                }
            }
        })
    }

    #[test]
    fn storage_cost_worked_examples() {
        assert_eq!(storage_cost(&[1, 1, 1, 1], &rank_all(1, 1)), 9);
        assert_eq!(storage_cost(&[16, 16, 16, 16], &rank_all(2, 2)), 180);
        assert_eq!(storage_cost(&[2, 2, 2, 2], &rank_all(1, 1)), 13);
    }

    #[test]
    fn storage_cost_counts_constructed_factors() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let shape: Vec<usize> = (0..4).map(|_| rng.random_range(1..=5)).collect();
            let rank = TomdRank::new(
                [
                    rng.random_range(1..=shape[0]),
                    rng.random_range(1..=shape[1]),
                    rng.random_range(1..=shape[2]),
                    rng.random_range(1..=shape[3]),
                ],
                core::array::from_fn(|_| rng.random_range(1..=3)),
            );
            let f = TomdFactors::zeros(&shape, &rank).unwrap();
            assert_eq!(storage_cost(&shape, &rank), f.element_count());
        }
    }

    #[test]
    fn unit_rank_core_is_product_of_ones() {
        let rank = rank_all(1, 1);
        let mut f = TomdFactors::zeros(&[1, 1, 1, 1], &rank).unwrap();
        for g in f.cores.iter_mut() {
            g.data_mut()[0] = 1.0;
        }
        f.bridge.data_mut()[0] = 1.0;
        let core = tomd_core(&f).unwrap();
        assert_eq!(core.shape(), &[1, 1, 1, 1]);
        assert_eq!(core.data(), &[1.0]);
    }

    #[test]
    fn bond_one_core_is_scaled_outer_product() {
        let rank = TomdRank::new([2, 3, 2, 3], [1; 6]);
        let f = random_factors(&[2, 3, 2, 3], &rank, 5);
        let core = tomd_core(&f).unwrap();
        let g5 = f.bridge.data()[0];
        let want = DenseTensor::from_fn(&rank.r, |r| {
            f.cores[0].at(&[0, r[0], 0, 0])
                * f.cores[1].at(&[0, r[1], 0])
                * f.cores[2].at(&[0, r[2], 0, 0])
                * f.cores[3].at(&[0, r[3], 0])
                * g5
        });
        assert!(core.sub(&want).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn core_matches_nested_loop_oracle() {
        let rank = rank_all(2, 2);
        let f = random_factors(&[3, 3, 3, 3], &rank, 6);
        let core = tomd_core(&f).unwrap();
        let want = core_oracle(&f);
        assert!(core.sub(&want).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn reconstruct_zero_bridge_vanishes_and_scales_multilinearly() {
        let rank = rank_all(2, 2);
        let mut f = random_factors(&[3, 4, 3, 4], &rank, 7);
        let base = tomd_reconstruct(&f).unwrap();
        let scaled_u = {
            let mut g = f.clone();
            g.factors[2] = g.factors[2].scale(3.0);
            tomd_reconstruct(&g).unwrap()
        };
        assert!(scaled_u.sub(&base.scale(3.0)).unwrap().max_abs() <= 1e-10);
        f.bridge = DenseTensor::zeros(f.bridge.shape());
        assert_eq!(tomd_reconstruct(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn exactly_representable_reconstruction_round_trips() {
        // identity-like factors with ranks = dims reproduce their own target
        let rank = rank_all(2, 2);
        let f = random_factors(&[2, 2, 2, 2], &rank, 8);
        let x = tomd_reconstruct(&f).unwrap();
        let back = tomd_reconstruct(&f).unwrap();
        assert!(rse(&back, &x).unwrap() <= 1e-12);
    }

    #[test]
    fn mode_unfolding_identities_hold() {
        // X₍ₙ₎ = U⁽ⁿ⁾ A₍ₙ₎ and X₍ₙ₎ = U⁽ⁿ⁾ G⁽ⁿ⁾₍₂₎ A^{≠n} for every mode,
        // plus the vectorized bridge identity — the whole mode bookkeeping.
        for seed in 0..3u64 {
            let rank = rank_all(2, 2);
            let f = random_factors(&[3, 4, 3, 4], &rank, 40 + seed);
            let x = tomd_reconstruct(&f).unwrap();
            for n in 0..4 {
                let xn = x.mode_n_unfold(n).unwrap();
                let norm = xn.frob_norm();
                let a = u_subproblem_matrix(&f, n).unwrap();
                let lhs = f.factors[n].matmul(&a).unwrap();
                assert!(
                    xn.sub(&lhs).unwrap().frob_norm() <= 1e-10 * norm,
                    "U identity fails at mode {n}"
                );
                let g2 = f.cores[n].mode_n_unfold(1).unwrap();
                let a_neq = g_subproblem_matrix(&f, n).unwrap();
                let rhs = f.factors[n].matmul(&g2).unwrap().matmul(&a_neq).unwrap();
                assert!(
                    xn.sub(&rhs).unwrap().frob_norm() <= 1e-10 * norm,
                    "G identity fails at mode {n}"
                );
            }
            let a2 = bridge_subproblem_matrix(&f).unwrap();
            let g5 = f.bridge.reshape(&[1, f.bridge.len()]).unwrap();
            let xv = x.reshape(&[1, x.len()]).unwrap();
            let lhs = g5.matmul(&a2).unwrap();
            assert!(xv.sub(&lhs).unwrap().frob_norm() <= 1e-10 * x.frob_norm());
        }
    }

    #[test]
    fn init_zero_tensor_gives_zero_factors() {
        let x = DenseTensor::zeros(&[3, 3, 3, 3]);
        let f = tomd_init(&x, &rank_all(2, 2), &AlsConfig::default()).unwrap();
        assert_eq!(tomd_reconstruct(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn init_recovers_rank_one_directions() {
        let u: [&[f64]; 4] = [
            &[1.0, 2.0, 3.0],
            &[2.0, -1.0, 1.0],
            &[1.0, 1.0, -1.0],
            &[3.0, 0.0, 1.0],
        ];
        let x = DenseTensor::from_fn(&[3, 3, 3, 3], |ix| {
            (0..4).map(|n| u[n][ix[n]]).product()
        });
        let f = tomd_init(&x, &rank_all(1, 1), &AlsConfig::default()).unwrap();
        for (n, un) in u.iter().enumerate() {
            let norm: f64 = libm::sqrt(un.iter().map(|&v| v * v).sum());
            let dot: f64 = (0..3).map(|i| f.factors[n].get2(i, 0) * un[i] / norm).sum();
            assert!((dot.abs() - 1.0).abs() <= 1e-10, "mode {n} direction lost");
        }
    }

    #[test]
    fn init_is_deterministic_and_norm_matched() {
        let rank = rank_all(2, 2);
        let f = random_factors(&[4, 4, 4, 4], &rank, 77);
        let x = tomd_reconstruct(&f).unwrap();
        let cfg = AlsConfig {
            seed: 3,
            ..AlsConfig::default()
        };
        let a = tomd_init(&x, &rank, &cfg).unwrap();
        let b = tomd_init(&x, &rank, &cfg).unwrap();
        assert_eq!(a, b);
        let rnorm = tomd_reconstruct(&a).unwrap().frob_norm();
        assert!((rnorm - x.frob_norm()).abs() <= 1e-8 * x.frob_norm());
    }

    #[test]
    fn init_rejects_oversized_rank() {
        let x = DenseTensor::zeros(&[2, 2, 2, 2]);
        let bad = TomdRank::new([3, 1, 1, 1], [1; 6]);
        assert!(matches!(
            tomd_init(&x, &bad, &AlsConfig::default()),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn als_recovers_exactly_representable_tensor() {
        let rank = rank_all(2, 2);
        let gen = random_factors(&[4, 4, 4, 4], &rank, 13);
        let x = tomd_reconstruct(&gen).unwrap();
        let (f, trace) = tomd_als(&x, &rank, &AlsConfig::default()).unwrap();
        let final_rse = rse(&tomd_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(
            final_rse <= 1e-6,
            "exact recovery failed: RSE {final_rse} after {} sweeps",
            trace.len()
        );
    }

    #[test]
    fn als_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let x = DenseTensor::from_fn(&[4, 4, 4, 4], |_| rng.random::<f64>() - 0.5);
        let cfg = AlsConfig {
            iter_max: 40,
            ..AlsConfig::default()
        };
        let (_, trace) = tomd_als(&x, &rank_all(2, 2), &cfg).unwrap();
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-300, "trace increased: {w:?}");
        }
    }

    #[test]
    fn als_zero_input_converges_immediately() {
        let x = DenseTensor::zeros(&[3, 3, 3, 3]);
        let (f, trace) = tomd_als(&x, &rank_all(2, 2), &AlsConfig::default()).unwrap();
        assert!(trace.is_empty());
        assert_eq!(tomd_reconstruct(&f).unwrap().max_abs(), 0.0);
    }
}
