//! Comparison decompositions: Tucker (HOOI-style ALS), Tucker with a
//! tensor-ring core (TuTR), and the bare O-minus network.
//!
//! TuTR is TOMD with the bridge removed; Ominus is TOMD with the outer
//! factor matrices fixed to identity. Both are realized by structural
//! embedding into [`TomdFactors`] — a unit bridge bond with G⁽⁵⁾ = 1 is the
//! bridgeless ring, and identity U⁽ⁿ⁾ leaves only the core factors free —
//! so they share the exact block solvers and stop rule of TOMD-ALS.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::truncated_svd;
use crate::tensor::{rse, DenseTensor};
use crate::tomd::{
    tomd_reconstruct, update_bridge, update_g, update_u, AlsConfig, TomdFactors, TomdRank,
};

/// Rank parameters of the three baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineRank {
    /// Outer ranks R₁..R₄; dense R₁×R₂×R₃×R₄ core.
    Tucker { r: [usize; 4] },
    /// Outer ranks R₁..R₄ and ring bonds D₁..D₄; cores D_{n-1}×R_n×D_n.
    Tutr { r: [usize; 4], d: [usize; 4] },
    /// Bonds D₁..D₆ only; the open core modes carry the full extents I_n.
    Ominus { d: [usize; 6] },
}

impl BaselineRank {
    pub fn validate_for(&self, shape: &[usize]) -> Result<()> {
        if shape.len() != 4 {
            return Err(Error::Shape(format!(
                "baselines fit 4-way tensors, got order {}",
                shape.len()
            )));
        }
        let check_outer = |r: &[usize; 4]| -> Result<()> {
            for n in 0..4 {
                if r[n] == 0 || r[n] > shape[n] {
                    return Err(Error::Rank(format!(
                        "R{} = {} out of range 1..={}",
                        n + 1,
                        r[n],
                        shape[n]
                    )));
                }
            }
            Ok(())
        };
        match self {
            BaselineRank::Tucker { r } => {
                check_outer(r)?;
                // no tensor has multilinear rank R_n > Π_{m≠n} R_m, and the
                // HOOI factor update cannot produce that many basis vectors
                for n in 0..4 {
                    let rest: usize = (0..4).filter(|&m| m != n).map(|m| r[m]).product();
                    if r[n] > rest {
                        return Err(Error::Rank(format!(
                            "R{} = {} exceeds the product {rest} of the other ranks",
                            n + 1,
                            r[n]
                        )));
                    }
                }
                Ok(())
            }
            BaselineRank::Tutr { r, d } => {
                check_outer(r)?;
                if d.contains(&0) {
                    return Err(Error::Rank(format!("ring bonds must be ≥ 1: {d:?}")));
                }
                Ok(())
            }
            BaselineRank::Ominus { d } => {
                if d.contains(&0) {
                    return Err(Error::Rank(format!("bonds must be ≥ 1: {d:?}")));
                }
                Ok(())
            }
        }
    }

    /// Stored scalar count of the fitted model on a tensor of this shape.
    pub fn storage_cost(&self, shape: &[usize]) -> usize {
        let outer = |r: &[usize; 4]| -> usize { shape.iter().zip(r).map(|(&i, &r)| i * r).sum() };
        match self {
            BaselineRank::Tucker { r } => outer(r) + r.iter().product::<usize>(),
            BaselineRank::Tutr { r, d } => {
                let [d1, d2, d3, d4] = *d;
                let [r1, r2, r3, r4] = *r;
                outer(r) + d4 * r1 * d1 + d1 * r2 * d2 + d2 * r3 * d3 + d3 * r4 * d4
            }
            BaselineRank::Ominus { d } => {
                let [d1, d2, d3, d4, d5, d6] = *d;
                let [i1, i2, i3, i4] = [shape[0], shape[1], shape[2], shape[3]];
                d4 * i1 * d1 * d5 + d1 * i2 * d2 + d2 * i3 * d3 * d6 + d3 * i4 * d4 + d5 * d6
            }
        }
    }
}

/// Tucker decomposition: dense core plus four factor matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerFactors {
    pub core: DenseTensor,
    pub factors: [DenseTensor; 4],
}

impl TuckerFactors {
    pub fn element_count(&self) -> usize {
        self.core.len() + self.factors.iter().map(|m| m.len()).sum::<usize>()
    }
}

pub fn tucker_reconstruct(f: &TuckerFactors) -> Result<DenseTensor> {
    let mut t = f.core.clone();
    for n in 0..4 {
        t = t.mode_n_product(&f.factors[n], n)?;
    }
    Ok(t)
}

/// HOOI-style Tucker-ALS: factor matrices from leading left singular vectors
/// of the partially projected unfoldings, then the fully projected core.
pub fn tucker_als(
    x: &DenseTensor,
    r: [usize; 4],
    cfg: &AlsConfig,
) -> Result<(TuckerFactors, Vec<f64>)> {
    BaselineRank::Tucker { r }.validate_for(x.shape())?;
    cfg.validate()?;
    let mut f = TuckerFactors {
        core: DenseTensor::zeros(&r),
        factors: core::array::from_fn(|n| DenseTensor::zeros(&[x.shape()[n], r[n]])),
    };
    let mut trace = Vec::new();
    if x.frob_norm() == 0.0 {
        return Ok((f, trace));
    }
    for (n, &rn) in r.iter().enumerate() {
        f.factors[n] = truncated_svd(&x.mode_n_unfold(n)?, rn)?.u;
    }
    let project = |f: &TuckerFactors| -> Result<DenseTensor> {
        let mut c = x.clone();
        for n in 0..4 {
            c = c.mode_n_product(&f.factors[n].transpose()?, n)?;
        }
        Ok(c)
    };
    f.core = project(&f)?;
    let mut x_new = tucker_reconstruct(&f)?;
    for _ in 0..cfg.iter_max {
        let x_last = x_new;
        for (n, &rn) in r.iter().enumerate() {
            let mut y = x.clone();
            for m in 0..4 {
                if m != n {
                    y = y.mode_n_product(&f.factors[m].transpose()?, m)?;
                }
            }
            f.factors[n] = truncated_svd(&y.mode_n_unfold(n)?, rn)?.u;
        }
        f.core = project(&f)?;
        x_new = tucker_reconstruct(&f)?;
        trace.push(rse(&x_new, x)?);
        let last_norm = x_last.frob_norm();
        if x_new.sub(&x_last)?.frob_norm() <= cfg.tol * last_norm {
            break;
        }
    }
    Ok((f, trace))
}

/// Tucker-with-tensor-ring-core: four 3-way ring cores H⁽ⁿ⁾ ∈ D_{n-1}×R_n×D_n
/// inside four factor matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TutrFactors {
    pub cores: [DenseTensor; 4],
    pub factors: [DenseTensor; 4],
}

impl TutrFactors {
    pub fn element_count(&self) -> usize {
        self.cores.iter().map(|t| t.len()).sum::<usize>()
            + self.factors.iter().map(|m| m.len()).sum::<usize>()
    }
}

/// Embed a bridgeless ring as a TOMD with unit bridge bonds and G⁽⁵⁾ = 1.
fn tutr_embed(f: &TutrFactors) -> Result<TomdFactors> {
    let c = &f.cores;
    let with_unit = |t: &DenseTensor| -> Result<DenseTensor> {
        let mut s = t.shape().to_vec();
        s.push(1);
        t.reshape(&s)
    };
    Ok(TomdFactors {
        cores: [
            with_unit(&c[0])?,
            c[1].clone(),
            with_unit(&c[2])?,
            c[3].clone(),
        ],
        bridge: DenseTensor::new(vec![1, 1], vec![1.0])?,
        factors: f.factors.clone(),
    })
}

fn tutr_strip(f: &TomdFactors) -> Result<TutrFactors> {
    let drop_unit = |t: &DenseTensor| -> Result<DenseTensor> {
        let s = t.shape();
        t.reshape(&s[..s.len() - 1])
    };
    Ok(TutrFactors {
        cores: [
            drop_unit(&f.cores[0])?,
            f.cores[1].clone(),
            drop_unit(&f.cores[2])?,
            f.cores[3].clone(),
        ],
        factors: f.factors.clone(),
    })
}

pub fn tutr_reconstruct(f: &TutrFactors) -> Result<DenseTensor> {
    tomd_reconstruct(&tutr_embed(f)?)
}

/// TuTR-ALS: the TOMD sweep with the bridge update removed (G⁽⁵⁾ pinned
/// to 1 over unit bonds).
pub fn tutr_als(
    x: &DenseTensor,
    r: [usize; 4],
    d: [usize; 4],
    cfg: &AlsConfig,
) -> Result<(TutrFactors, Vec<f64>)> {
    BaselineRank::Tutr { r, d }.validate_for(x.shape())?;
    cfg.validate()?;
    let rank = TomdRank::new(r, [d[0], d[1], d[2], d[3], 1, 1]);
    let mut f = TomdFactors::zeros(x.shape(), &rank)?;
    let mut trace = Vec::new();
    let xnorm = x.frob_norm();
    if xnorm == 0.0 {
        return Ok((tutr_strip(&f)?, trace));
    }
    for (n, &rn) in r.iter().enumerate() {
        f.factors[n] = truncated_svd(&x.mode_n_unfold(n)?, rn)?.u;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for g in f.cores.iter_mut() {
        *g = DenseTensor::from_fn(g.shape(), |_| rng.random::<f64>() - 0.5);
    }
    f.bridge = DenseTensor::new(vec![1, 1], vec![1.0])?;
    let rnorm = tomd_reconstruct(&f)?.frob_norm();
    if rnorm == 0.0 || !rnorm.is_finite() {
        return Err(Error::Numerical(
            "degenerate random initialization; try another seed".into(),
        ));
    }
    let alpha = libm::pow(xnorm / rnorm, 0.25);
    for g in f.cores.iter_mut() {
        *g = g.scale(alpha);
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
        x_new = tomd_reconstruct(&f)?;
        trace.push(rse(&x_new, x)?);
        if x_new.sub(&x_last)?.frob_norm() <= cfg.tol * x_last.frob_norm() {
            break;
        }
    }
    Ok((tutr_strip(&f)?, trace))
}

/// The bare O-minus network: five core factors, open modes at full extent.
#[derive(Debug, Clone, PartialEq)]
pub struct OminusFactors {
    pub cores: [DenseTensor; 4],
    pub bridge: DenseTensor,
}

impl OminusFactors {
    pub fn element_count(&self) -> usize {
        self.cores.iter().map(|t| t.len()).sum::<usize>() + self.bridge.len()
    }
}

fn ominus_embed(f: &OminusFactors, shape: &[usize]) -> TomdFactors {
    TomdFactors {
        cores: f.cores.clone(),
        bridge: f.bridge.clone(),
        factors: core::array::from_fn(|n| DenseTensor::identity(shape[n])),
    }
}

pub fn ominus_reconstruct(f: &OminusFactors) -> Result<DenseTensor> {
    let shape = [
        f.cores[0].shape()[1],
        f.cores[1].shape()[1],
        f.cores[2].shape()[1],
        f.cores[3].shape()[1],
    ];
    tomd_reconstruct(&ominus_embed(f, &shape))
}

/// Ominus-ALS: the TOMD sweep with U⁽ⁿ⁾ fixed to identity, fitting only
/// the five core factors.
pub fn ominus_als(
    x: &DenseTensor,
    d: [usize; 6],
    cfg: &AlsConfig,
) -> Result<(OminusFactors, Vec<f64>)> {
    BaselineRank::Ominus { d }.validate_for(x.shape())?;
    cfg.validate()?;
    let rank = TomdRank::new([x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]], d);
    let mut f = TomdFactors::zeros(x.shape(), &rank)?;
    let mut trace = Vec::new();
    let xnorm = x.frob_norm();
    let strip = |f: &TomdFactors| OminusFactors {
        cores: f.cores.clone(),
        bridge: f.bridge.clone(),
    };
    if xnorm == 0.0 {
        return Ok((strip(&f), trace));
    }
    for n in 0..4 {
        f.factors[n] = DenseTensor::identity(x.shape()[n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for g in f.cores.iter_mut() {
        *g = DenseTensor::from_fn(g.shape(), |_| rng.random::<f64>() - 0.5);
    }
    f.bridge = DenseTensor::from_fn(f.bridge.shape(), |_| rng.random::<f64>() - 0.5);
    let rnorm = tomd_reconstruct(&f)?.frob_norm();
    if rnorm == 0.0 || !rnorm.is_finite() {
        return Err(Error::Numerical(
            "degenerate random initialization; try another seed".into(),
        ));
    }
    let alpha = libm::pow(xnorm / rnorm, 0.2);
    for g in f.cores.iter_mut() {
        *g = g.scale(alpha);
    }
    f.bridge = f.bridge.scale(alpha);
    let mut x_new = tomd_reconstruct(&f)?;
    for _ in 0..cfg.iter_max {
        let x_last = x_new;
        for n in 0..4 {
            update_g(x, &mut f, n)?;
        }
        update_bridge(x, &mut f)?;
        x_new = tomd_reconstruct(&f)?;
        trace.push(rse(&x_new, x)?);
        if x_new.sub(&x_last)?.frob_norm() <= cfg.tol * x_last.frob_norm() {
            break;
        }
    }
    Ok((strip(&f), trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outer_product(u: [&[f64]; 4]) -> DenseTensor {
        let shape: Vec<usize> = u.iter().map(|v| v.len()).collect();
        DenseTensor::from_fn(&shape, |ix| (0..4).map(|n| u[n][ix[n]]).product())
    }

    #[test]
    fn tucker_recovers_rank_one_tensor() {
        let x = outer_product([
            &[1.0, 2.0, 3.0],
            &[2.0, -1.0, 0.5],
            &[1.0, 1.0, -1.0],
            &[3.0, 0.5, 1.0],
        ]);
        let (f, _) = tucker_als(&x, [1, 1, 1, 1], &AlsConfig::default()).unwrap();
        let err = rse(&tucker_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(err <= 1e-10, "rank-1 Tucker fit missed: RSE {err}");
    }

    #[test]
    fn tucker_recovers_exactly_representable_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let core = DenseTensor::from_fn(&[2, 2, 2, 2], |_| rng.random::<f64>() - 0.5);
        let factors: [DenseTensor; 4] =
            core::array::from_fn(|_| DenseTensor::from_fn(&[4, 2], |_| rng.random::<f64>() - 0.5));
        let x = tucker_reconstruct(&TuckerFactors { core, factors }).unwrap();
        let (f, trace) = tucker_als(&x, [2, 2, 2, 2], &AlsConfig::default()).unwrap();
        let err = rse(&tucker_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(err <= 1e-8, "Tucker exact fit missed: RSE {err}");
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-300);
        }
    }

    #[test]
    fn tucker_zero_input_gives_zero_core() {
        let x = DenseTensor::zeros(&[3, 3, 3, 3]);
        let (f, trace) = tucker_als(&x, [2, 2, 2, 2], &AlsConfig::default()).unwrap();
        assert_eq!(f.core.max_abs(), 0.0);
        assert!(trace.is_empty());
    }

    #[test]
    fn tucker_rejects_oversized_rank() {
        let x = DenseTensor::zeros(&[2, 2, 2, 2]);
        assert!(matches!(
            tucker_als(&x, [3, 2, 2, 2], &AlsConfig::default()),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn tucker_rejects_infeasible_multilinear_rank() {
        // R₁ = 3 > R₂R₃R₄ = 1 is not the multilinear rank of any tensor
        let x = DenseTensor::zeros(&[4, 4, 4, 4]);
        assert!(matches!(
            tucker_als(&x, [3, 1, 1, 1], &AlsConfig::default()),
            Err(Error::Rank(_))
        ));
    }

    #[test]
    fn storage_costs_match_element_counts() {
        let shape = [5, 4, 3, 6];
        let tucker = BaselineRank::Tucker { r: [2, 3, 1, 4] };
        let (f, _) = tucker_als(
            &DenseTensor::zeros(&shape),
            [2, 3, 1, 4],
            &AlsConfig::default(),
        )
        .unwrap();
        assert_eq!(tucker.storage_cost(&shape), f.element_count());
        assert_eq!(tucker.storage_cost(&shape), 5 * 2 + 4 * 3 + 3 + 6 * 4 + 24);

        let tutr = BaselineRank::Tutr {
            r: [2, 2, 2, 2],
            d: [2, 3, 2, 3],
        };
        let (f, _) = tutr_als(
            &DenseTensor::zeros(&shape),
            [2, 2, 2, 2],
            [2, 3, 2, 3],
            &AlsConfig::default(),
        )
        .unwrap();
        assert_eq!(tutr.storage_cost(&shape), f.element_count());

        let ominus = BaselineRank::Ominus { d: [2, 2, 2, 2, 2, 2] };
        let (f, _) = ominus_als(
            &DenseTensor::zeros(&shape),
            [2, 2, 2, 2, 2, 2],
            &AlsConfig::default(),
        )
        .unwrap();
        assert_eq!(ominus.storage_cost(&shape), f.element_count());
    }

    #[test]
    fn tutr_with_unit_bonds_matches_tucker_on_separable_input() {
        let x = outer_product([
            &[1.0, -2.0, 0.5],
            &[1.5, 1.0, 2.0],
            &[0.5, -1.0, 1.0],
            &[2.0, 1.0, -0.5],
        ]);
        let cfg = AlsConfig::default();
        let (tu, _) = tucker_als(&x, [1, 1, 1, 1], &cfg).unwrap();
        let (tr, _) = tutr_als(&x, [1, 1, 1, 1], [1, 1, 1, 1], &cfg).unwrap();
        let rse_tucker = rse(&tucker_reconstruct(&tu).unwrap(), &x).unwrap();
        let rse_tutr = rse(&tutr_reconstruct(&tr).unwrap(), &x).unwrap();
        assert!((rse_tucker - rse_tutr).abs() <= 1e-8);
        assert!(rse_tutr <= 1e-8);
    }

    #[test]
    fn tutr_recovers_exactly_representable_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut mk = |s: &[usize]| DenseTensor::from_fn(s, |_| rng.random::<f64>() - 0.5);
        let gen = TutrFactors {
            cores: [
                mk(&[2, 2, 2]),
                mk(&[2, 2, 2]),
                mk(&[2, 2, 2]),
                mk(&[2, 2, 2]),
            ],
            factors: core::array::from_fn(|_| {
                DenseTensor::from_fn(&[4, 2], |_| rng.random::<f64>() - 0.5)
            }),
        };
        let x = tutr_reconstruct(&gen).unwrap();
        let (f, _) = tutr_als(&x, [2, 2, 2, 2], [2, 2, 2, 2], &AlsConfig::default()).unwrap();
        let err = rse(&tutr_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(err <= 1e-6, "TuTR exact fit missed: RSE {err}");
    }

    #[test]
    fn tutr_zero_input_gives_zero_factors() {
        let x = DenseTensor::zeros(&[3, 3, 3, 3]);
        let (f, _) = tutr_als(&x, [2, 2, 2, 2], [1, 1, 1, 1], &AlsConfig::default()).unwrap();
        assert_eq!(tutr_reconstruct(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn ominus_recovers_outer_product_with_unit_bonds() {
        let x = outer_product([
            &[1.0, 2.0],
            &[2.0, -1.0, 0.5],
            &[1.0, -1.0],
            &[0.5, 1.0, 2.0],
        ]);
        let (f, _) = ominus_als(&x, [1; 6], &AlsConfig::default()).unwrap();
        let err = rse(&ominus_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(err <= 1e-10, "unit-bond Ominus fit missed: RSE {err}");
    }

    #[test]
    fn ominus_recovers_exactly_representable_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut mk = |s: &[usize]| DenseTensor::from_fn(s, |_| rng.random::<f64>() - 0.5);
        let gen = OminusFactors {
            cores: [
                mk(&[2, 3, 2, 2]),
                mk(&[2, 3, 2]),
                mk(&[2, 3, 2, 2]),
                mk(&[2, 3, 2]),
            ],
            bridge: mk(&[2, 2]),
        };
        let x = ominus_reconstruct(&gen).unwrap();
        let cfg = AlsConfig {
            iter_max: 4000,
            ..AlsConfig::default()
        };
        let (f, trace) = ominus_als(&x, [2; 6], &cfg).unwrap();
        let err = rse(&ominus_reconstruct(&f).unwrap(), &x).unwrap();
        assert!(
            err <= 1e-6,
            "Ominus exact fit missed: RSE {err} after {} sweeps",
            trace.len()
        );
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-300);
        }
    }

    #[test]
    fn ominus_zero_input_gives_zero_factors() {
        let x = DenseTensor::zeros(&[2, 3, 2, 3]);
        let (f, _) = ominus_als(&x, [1; 6], &AlsConfig::default()).unwrap();
        assert_eq!(ominus_reconstruct(&f).unwrap().max_abs(), 0.0);
    }
}
