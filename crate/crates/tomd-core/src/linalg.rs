//! Minimal dense linear-algebra kernels: thin SVD (one-sided Jacobi),
//! min-norm least squares, a symmetric Jacobi eigensolver and an SPD solve.
//!
//! Everything is deterministic: iteration orders are fixed and singular/eigen
//! vector signs are normalized so the same input always yields the same bits.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Orthogonality threshold for Jacobi rotations.
const JACOBI_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps; convergence is quadratic so this never binds.
const JACOBI_MAX_SWEEPS: usize = 64;
/// Relative cutoff below which singular values count as zero (min-norm rule).
const PINV_CUTOFF: f64 = 1e-12;

/// Thin singular value decomposition A = U·diag(s)·Vᵀ.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m×r left singular vectors, orthonormal columns.
    pub u: DenseTensor,
    /// r singular values, nonincreasing, ≥ 0.
    pub s: Vec<f64>,
    /// n×r right singular vectors, orthonormal columns.
    pub v: DenseTensor,
}

/// Full thin SVD with r = min(m, n).
///
/// One-sided Jacobi on the tall orientation: rotate column pairs until they
/// are mutually orthogonal, read off σ_j = ‖column‖ and accumulate V.
pub fn svd(a: &DenseTensor) -> Result<SvdResult> {
    if a.order() != 2 {
        return Err(Error::Shape(format!(
            "svd expects a matrix, got order {}",
            a.order()
        )));
    }
    let (m, n) = (a.rows(), a.cols());
    if m >= n {
        svd_tall(a)
    } else {
        let r = svd_tall(&a.transpose()?)?;
        Ok(SvdResult {
            u: r.v,
            s: r.s,
            v: r.u,
        })
    }
}

fn svd_tall(a: &DenseTensor) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    let mut b = a.data().to_vec(); // m×n, column-major
    let mut v = DenseTensor::identity(n).into_data();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let (x, y) = (b[i + m * p], b[i + m * q]);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= JACOBI_TOL * libm::sqrt(app * aqq) || apq == 0.0 {
                    continue;
                }
                rotated = true;
                // symmetric 2×2 eigenproblem of [[app,apq],[apq,aqq]]
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (b[i + m * p], b[i + m * q]);
                    b[i + m * p] = c * x - s * y;
                    b[i + m * q] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[i + n * p], v[i + n * q]);
                    v[i + n * p] = c * x - s * y;
                    v[i + n * q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    // singular values and left vectors from the rotated columns
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| {
            let col = &b[j * m..(j + 1) * m];
            libm::sqrt(col.iter().map(|&x| x * x).sum())
        })
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));
    let smax = norms[order[0]];
    let mut u = vec![0.0; m * n];
    let mut s_sorted = Vec::with_capacity(n);
    let mut v_sorted = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        s_sorted.push(norms[src]);
        v_sorted[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
        let sigma = norms[src];
        if sigma > smax * 1e-300 && sigma > 0.0 {
            for i in 0..m {
                u[i + m * dst] = b[i + m * src] / sigma;
            }
        }
    }
    complete_zero_columns(&mut u, m, n, &s_sorted, smax);
    let mut u = DenseTensor::new(vec![m, n], u)?;
    let mut v = DenseTensor::new(vec![n, n], v_sorted)?;
    fix_signs(&mut u, Some(&mut v));
    Ok(SvdResult { u, s: s_sorted, v })
}

/// Replace left-vector columns belonging to (numerically) zero singular
/// values with a deterministic orthonormal completion so U always has
/// orthonormal columns.
fn complete_zero_columns(u: &mut [f64], m: usize, n: usize, s: &[f64], smax: f64) {
    for j in 0..n {
        if s[j] > smax * 1e-300 && s[j] > 0.0 {
            continue;
        }
        // Gram–Schmidt a canonical basis vector against the previous columns.
        let mut chosen = None;
        for cand in 0..m {
            let mut col = vec![0.0; m];
            col[cand] = 1.0;
            for prev in 0..j {
                let dot: f64 = (0..m).map(|i| col[i] * u[i + m * prev]).sum();
                for i in 0..m {
                    col[i] -= dot * u[i + m * prev];
                }
            }
            let norm = libm::sqrt(col.iter().map(|&x| x * x).sum::<f64>());
            if norm > 0.5 {
                for x in col.iter_mut() {
                    *x /= norm;
                }
                chosen = Some(col);
                break;
            }
        }
        if let Some(col) = chosen {
            u[j * m..(j + 1) * m].copy_from_slice(&col);
        }
    }
}

/// Make the largest-magnitude entry of each column nonnegative.
/// With `partner`, its matching column is flipped too (SVD pairs).
fn fix_signs(mat: &mut DenseTensor, partner: Option<&mut DenseTensor>) {
    let m = mat.rows();
    let cols = mat.cols();
    let mut flips = Vec::new();
    for j in 0..cols {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for i in 0..m {
            let a = mat.get2(i, j).abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if mat.get2(best, j) < 0.0 {
            flips.push(j);
            for i in 0..m {
                let x = mat.get2(i, j);
                mat.set2(i, j, -x);
            }
        }
    }
    if let Some(p) = partner {
        let pm = p.rows();
        for &j in &flips {
            for i in 0..pm {
                let x = p.get2(i, j);
                p.set2(i, j, -x);
            }
        }
    }
}

/// Leading-r truncation of the thin SVD.
pub fn truncated_svd(a: &DenseTensor, r: usize) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    let rmax = m.min(n);
    if r == 0 || r > rmax {
        return Err(Error::Rank(format!(
            "target rank {r} out of range 1..={rmax} for a {m}×{n} matrix"
        )));
    }
    let full = svd(a)?;
    let u = keep_columns(&full.u, r)?;
    let v = keep_columns(&full.v, r)?;
    Ok(SvdResult {
        u,
        s: full.s[..r].to_vec(),
        v,
    })
}

fn keep_columns(m: &DenseTensor, r: usize) -> Result<DenseTensor> {
    let rows = m.rows();
    DenseTensor::new(vec![rows, r], m.data()[..rows * r].to_vec())
}

/// Minimum-Frobenius-norm minimizer of ‖B − A·X‖_F.
///
/// Singular values below `1e-12·σ_max` are treated as zero, which is what
/// keeps ALS stable on rank-deficient iterates.
pub fn least_squares(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    if a.order() != 2 || b.order() != 2 {
        return Err(Error::Shape(format!(
            "least_squares expects matrices, got orders {} and {}",
            a.order(),
            b.order()
        )));
    }
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "least_squares: A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    let k = a.cols();
    let n = b.cols();
    let dec = svd(a)?;
    let smax = dec.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(DenseTensor::zeros(&[k, n]));
    }
    let cutoff = PINV_CUTOFF * smax;
    // X = V · diag(1/σ) · Uᵀ · B over the retained spectrum
    let utb = dec.u.transpose()?.matmul(b)?;
    let mut scaled = utb;
    for (i, &sigma) in dec.s.iter().enumerate() {
        let g = if sigma > cutoff { 1.0 / sigma } else { 0.0 };
        for j in 0..n {
            let x = scaled.get2(i, j);
            scaled.set2(i, j, x * g);
        }
    }
    dec.v.matmul(&scaled)
}

/// The k smallest eigenpairs of a symmetric matrix, values ascending,
/// vectors orthonormal.
///
/// The input is symmetrized as (A+Aᵀ)/2 to absorb round-off; anything less
/// symmetric than `1e-10·max(1, ‖A‖_∞)` is rejected.
pub fn sym_eig_smallest(a: &DenseTensor, k: usize) -> Result<(Vec<f64>, DenseTensor)> {
    if a.order() != 2 || a.rows() != a.cols() {
        return Err(Error::Shape("sym_eig expects a square matrix".into()));
    }
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidArg(format!(
            "eigenpair count {k} out of range 1..={n}"
        )));
    }
    let scale = f64::max(1.0, a.max_abs());
    let at = a.transpose()?;
    if a.sub(&at)?.max_abs() > 1e-10 * scale {
        return Err(Error::Asymmetric);
    }
    let mut s = a.add(&at)?.scale(0.5).into_data();
    let mut v = DenseTensor::identity(n).into_data();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = s[p + n * q];
                let scale_pq = f64::max(s[p + n * p].abs(), s[q + n * q].abs());
                if apq.abs() <= JACOBI_TOL * f64::max(scale_pq, 1e-300) {
                    continue;
                }
                rotated = true;
                let theta = (s[q + n * q] - s[p + n * p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = c * t;
                // rows/columns p and q of S
                for i in 0..n {
                    let (x, y) = (s[i + n * p], s[i + n * q]);
                    s[i + n * p] = c * x - sn * y;
                    s[i + n * q] = sn * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (s[p + n * i], s[q + n * i]);
                    s[p + n * i] = c * x - sn * y;
                    s[q + n * i] = sn * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[i + n * p], v[i + n * q]);
                    v[i + n * p] = c * x - sn * y;
                    v[i + n * q] = sn * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        s[i + n * i]
            .partial_cmp(&s[j + n * j])
            .unwrap()
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().take(k).map(|&i| s[i + n * i]).collect();
    let mut vectors = DenseTensor::zeros(&[n, k]);
    for (dst, &src) in order.iter().take(k).enumerate() {
        for i in 0..n {
            vectors.set2(i, dst, v[i + n * src]);
        }
    }
    fix_signs(&mut vectors, None);
    Ok((values, vectors))
}

/// Solve A·X = B for symmetric positive definite A via Cholesky.
pub fn solve_spd(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    if a.order() != 2 || a.rows() != a.cols() {
        return Err(Error::Shape("solve_spd expects a square matrix".into()));
    }
    let n = a.rows();
    if b.order() != 2 || b.rows() != n {
        return Err(Error::Shape(format!(
            "solve_spd: right-hand side has {} rows, need {n}",
            b.rows()
        )));
    }
    // lower-triangular factor, column-major
    let mut l = vec![0.0; n * n];
    let ad = a.data();
    for j in 0..n {
        let mut diag = ad[j + n * j];
        for k in 0..j {
            diag -= l[j + n * k] * l[j + n * k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::Numerical(format!(
                "Cholesky pivot {diag:e} at row {j}; matrix is not positive definite"
            )));
        }
        let dj = libm::sqrt(diag);
        l[j + n * j] = dj;
        for i in j + 1..n {
            let mut x = ad[i + n * j];
            for k in 0..j {
                x -= l[i + n * k] * l[j + n * k];
            }
            l[i + n * j] = x / dj;
        }
    }
    let nrhs = b.cols();
    let mut x = b.data().to_vec();
    for col in 0..nrhs {
        let xc = &mut x[col * n..(col + 1) * n];
        // forward: L y = b
        for i in 0..n {
            let mut v = xc[i];
            for k in 0..i {
                v -= l[i + n * k] * xc[k];
            }
            xc[i] = v / l[i + n * i];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let mut v = xc[i];
            for k in i + 1..n {
                v -= l[k + n * i] * xc[k];
            }
            xc[i] = v / l[i + n * i];
        }
    }
    DenseTensor::new(vec![n, nrhs], x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseTensor {
        DenseTensor::from_fn(&[m, n], |_| rng.random::<f64>() - 0.5)
    }

    fn orthonormality_defect(m: &DenseTensor) -> f64 {
        let g = m.transpose().unwrap().matmul(m).unwrap();
        g.sub(&DenseTensor::identity(m.cols())).unwrap().max_abs()
    }

    fn reconstruct(d: &SvdResult) -> DenseTensor {
        let r = d.s.len();
        let mut sig = DenseTensor::zeros(&[r, r]);
        for i in 0..r {
            sig.set2(i, i, d.s[i]);
        }
        d.u.matmul(&sig)
            .unwrap()
            .matmul(&d.v.transpose().unwrap())
            .unwrap()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let d = truncated_svd(&DenseTensor::identity(3), 3).unwrap();
        for &s in &d.s {
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rank_one_svd_is_exact() {
        let u = DenseTensor::new(vec![4, 1], vec![1.0, 2.0, -1.0, 3.0]).unwrap();
        let v = DenseTensor::new(vec![3, 1], vec![2.0, -1.0, 2.0]).unwrap();
        let a = u.matmul(&v.transpose().unwrap()).unwrap();
        let d = truncated_svd(&a, 1).unwrap();
        let norm_product = u.frob_norm() * v.frob_norm();
        assert!((d.s[0] - norm_product).abs() <= 1e-10 * norm_product);
        let resid = a.sub(&reconstruct(&d)).unwrap().frob_norm();
        assert!(resid <= 1e-10 * norm_product);
    }

    #[test]
    fn full_svd_reconstructs_and_is_orthonormal() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (m, n) in [(6, 4), (4, 6), (5, 5), (7, 2)] {
                let a = random_matrix(&mut rng, m, n);
                let d = svd(&a).unwrap();
                assert!(orthonormality_defect(&d.u) <= 1e-10);
                assert!(orthonormality_defect(&d.v) <= 1e-10);
                for w in d.s.windows(2) {
                    assert!(w[0] >= w[1]);
                }
                let err = a.sub(&reconstruct(&d)).unwrap().max_abs();
                assert!(err <= 1e-10, "seed {seed} {m}×{n}: {err}");
            }
        }
    }

    #[test]
    fn truncation_keeps_leading_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 6, 4);
        let full = svd(&a).unwrap();
        let part = truncated_svd(&a, 2).unwrap();
        for i in 0..2 {
            assert!((full.s[i] - part.s[i]).abs() <= 1e-10);
        }
        assert!(truncated_svd(&a, 0).is_err());
        assert!(truncated_svd(&a, 5).is_err());
    }

    #[test]
    fn truncated_svd_beats_random_candidates() {
        // Eckart–Young: no random rank-2 candidate does better.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 6, 5);
        let d = truncated_svd(&a, 2).unwrap();
        let best = a.sub(&reconstruct(&d)).unwrap().frob_norm();
        for _ in 0..20 {
            let x = random_matrix(&mut rng, 6, 2);
            let y = random_matrix(&mut rng, 2, 5);
            let cand = a.sub(&x.matmul(&y).unwrap()).unwrap().frob_norm();
            assert!(best <= cand + 1e-12);
        }
    }

    #[test]
    fn zero_singular_directions_get_orthonormal_fill() {
        // column 2 = column 1 → rank 1, but U must stay orthonormal
        let a = DenseTensor::new(vec![3, 2], vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let d = svd(&a).unwrap();
        assert!(orthonormality_defect(&d.u) <= 1e-10);
        assert!(d.s[1] <= 1e-12 * d.s[0]);
    }

    #[test]
    fn svd_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 5, 4);
        let d1 = svd(&a).unwrap();
        let d2 = svd(&a).unwrap();
        assert_eq!(d1.u.data(), d2.u.data());
        assert_eq!(d1.s, d2.s);
        assert_eq!(d1.v.data(), d2.v.data());
    }

    #[test]
    fn least_squares_identity_and_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b = random_matrix(&mut rng, 4, 3);
        let x = least_squares(&DenseTensor::identity(4), &b).unwrap();
        assert!(x.sub(&b).unwrap().max_abs() <= 1e-12);

        // consistent overdetermined system recovers its generator
        let a = random_matrix(&mut rng, 5, 2);
        let x0 = random_matrix(&mut rng, 2, 3);
        let b = a.matmul(&x0).unwrap();
        let x = least_squares(&a, &b).unwrap();
        assert!(x.sub(&x0).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn least_squares_min_norm_on_singular_system() {
        // A = [[1,1],[1,1]], B = [2,2]ᵀ → min-norm X = [1,1]ᵀ
        let a = DenseTensor::new(vec![2, 2], vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let b = DenseTensor::new(vec![2, 1], vec![2.0, 2.0]).unwrap();
        let x = least_squares(&a, &b).unwrap();
        assert!((x.get2(0, 0) - 1.0).abs() <= 1e-12);
        assert!((x.get2(1, 0) - 1.0).abs() <= 1e-12);
        // zero A → zero X
        let z = least_squares(&DenseTensor::zeros(&[2, 2]), &b).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn least_squares_is_first_order_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let a = random_matrix(&mut rng, 6, 3);
        let b = random_matrix(&mut rng, 6, 2);
        let x = least_squares(&a, &b).unwrap();
        let base = b.sub(&a.matmul(&x).unwrap()).unwrap().frob_norm();
        for _ in 0..100 {
            let mut delta = random_matrix(&mut rng, 3, 2);
            let norm = delta.frob_norm();
            delta = delta.scale(1e-3 / norm);
            let xp = x.add(&delta).unwrap();
            let perturbed = b.sub(&a.matmul(&xp).unwrap()).unwrap().frob_norm();
            assert!(base <= perturbed + 1e-12);
        }
    }

    #[test]
    fn sym_eig_examples() {
        let d = DenseTensor::from_fn(&[3, 3], |ix| {
            if ix[0] == ix[1] {
                [3.0, 1.0, 2.0][ix[0]]
            } else {
                0.0
            }
        });
        let (vals, vecs) = sym_eig_smallest(&d, 2).unwrap();
        assert!((vals[0] - 1.0).abs() <= 1e-12);
        assert!((vals[1] - 2.0).abs() <= 1e-12);
        assert!(orthonormality_defect(&vecs) <= 1e-8);

        let (vals, _) = sym_eig_smallest(&DenseTensor::zeros(&[3, 3]), 3).unwrap();
        for v in vals {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn sym_eig_rejects_asymmetric_and_bad_k() {
        let mut a = DenseTensor::zeros(&[2, 2]);
        a.set2(0, 1, 1.0);
        assert!(matches!(sym_eig_smallest(&a, 1), Err(Error::Asymmetric)));
        let ok = DenseTensor::identity(2);
        assert!(sym_eig_smallest(&ok, 0).is_err());
        assert!(sym_eig_smallest(&ok, 3).is_err());
    }

    #[test]
    fn disconnected_laplacian_has_componentwise_constant_kernel() {
        // two components: {0,1} and {2,3}; Laplacian blocks [[1,-1],[-1,1]]
        let mut l = DenseTensor::zeros(&[4, 4]);
        for (i, j) in [(0, 1), (2, 3)] {
            l.set2(i, i, 1.0);
            l.set2(j, j, 1.0);
            l.set2(i, j, -1.0);
            l.set2(j, i, -1.0);
        }
        let (vals, vecs) = sym_eig_smallest(&l, 2).unwrap();
        for &v in &vals {
            assert!(v.abs() <= 1e-10);
        }
        for (col, &val) in vals.iter().enumerate() {
            // residual ‖L v − λ v‖
            let mut resid: f64 = 0.0;
            for i in 0..4 {
                let mut acc = 0.0;
                for j in 0..4 {
                    acc += l.get2(i, j) * vecs.get2(j, col);
                }
                resid = resid.max((acc - val * vecs.get2(i, col)).abs());
            }
            assert!(resid <= 1e-8);
            // constant within each component
            assert!((vecs.get2(0, col) - vecs.get2(1, col)).abs() <= 1e-8);
            assert!((vecs.get2(2, col) - vecs.get2(3, col)).abs() <= 1e-8);
        }
    }

    #[test]
    fn eigenvalues_ascend_on_random_symmetric_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_matrix(&mut rng, 6, 6);
        let sym = a.add(&a.transpose().unwrap()).unwrap().scale(0.5);
        let (vals, vecs) = sym_eig_smallest(&sym, 6).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        assert!(orthonormality_defect(&vecs) <= 1e-8);
        for (col, &val) in vals.iter().enumerate() {
            let mut resid: f64 = 0.0;
            for i in 0..6 {
                let mut acc = 0.0;
                for j in 0..6 {
                    acc += sym.get2(i, j) * vecs.get2(j, col);
                }
                resid = resid.max((acc - val * vecs.get2(i, col)).abs());
            }
            assert!(resid <= 1e-8);
        }
    }

    #[test]
    fn spd_solve_hits_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = random_matrix(&mut rng, 5, 5);
        let spd = g
            .transpose()
            .unwrap()
            .matmul(&g)
            .unwrap()
            .add(&DenseTensor::identity(5))
            .unwrap();
        let b = random_matrix(&mut rng, 5, 2);
        let x = solve_spd(&spd, &b).unwrap();
        let resid = spd.matmul(&x).unwrap().sub(&b).unwrap().max_abs();
        assert!(resid <= 1e-10);
        // not positive definite → numerical error
        let neg = DenseTensor::identity(2).scale(-1.0);
        assert!(matches!(solve_spd(&neg, &DenseTensor::zeros(&[2, 1])), Err(Error::Numerical(_))));
    }
}
