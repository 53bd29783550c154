//! Dense N-way tensors with a fixed first-index-fastest (column-major)
//! linearization, plus the unfolding/product primitives used everywhere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense real tensor of order N ≥ 1.
///
/// `data[i1 + I1*i2 + I1*I2*i3 + …]` holds entry `(i1, i2, i3, …)`; the first
/// index always varies fastest. Matrices are order-2 tensors, vectors order-1.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

/// Column-major strides of a shape: `stride[0] = 1`, `stride[k] = ∏_{m<k} I_m`.
pub fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(shape.len());
    let mut acc = 1usize;
    for &e in shape {
        s.push(acc);
        acc *= e;
    }
    s
}

/// Advance `idx` through `shape` in linearization order (first index fastest).
/// Returns false once the index space is exhausted.
pub fn next_index(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in 0..shape.len() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl DenseTensor {
    /// Build a tensor from a shape and its column-major buffer.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::Shape(format!(
                "extents must be positive, got {shape:?}"
            )));
        }
        let want: usize = shape.iter().product();
        if data.len() != want {
            return Err(Error::Shape(format!(
                "buffer holds {} scalars but shape {shape:?} needs {want}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    /// All-zero tensor of the given shape.
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    /// Fill a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(shape);
        let mut idx = vec![0usize; shape.len()];
        for pos in 0..t.data.len() {
            t.data[pos] = f(&idx);
            next_index(&mut idx, shape);
        }
        t
    }

    /// Order-1 singleton holding one scalar.
    pub fn scalar(x: f64) -> Self {
        Self {
            shape: vec![1],
            data: vec![x],
        }
    }

    /// n×n identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(&[n, n]);
        for i in 0..n {
            m.data[i + n * i] = 1.0;
        }
        m
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Linear position of a multi-index.
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut pos = 0;
        let mut stride = 1;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.shape[k]);
            pos += i * stride;
            stride *= self.shape[k];
        }
        pos
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn at_mut(&mut self, idx: &[usize]) -> &mut f64 {
        let pos = self.linear_index(idx);
        &mut self.data[pos]
    }

    /// Number of rows of an order-2 tensor.
    pub fn rows(&self) -> usize {
        debug_assert_eq!(self.order(), 2, "rows() needs a matrix");
        self.shape[0]
    }

    /// Number of columns of an order-2 tensor.
    pub fn cols(&self) -> usize {
        debug_assert_eq!(self.order(), 2, "cols() needs a matrix");
        self.shape[1]
    }

    /// Matrix entry accessor (order-2 only).
    pub fn get2(&self, i: usize, j: usize) -> f64 {
        self.data[i + self.shape[0] * j]
    }

    pub fn set2(&mut self, i: usize, j: usize, x: f64) {
        let r = self.shape[0];
        self.data[i + r * j] = x;
    }

    /// Reorder modes: output mode `k` is input mode `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order();
        if perm.len() != n {
            return Err(Error::Shape(format!(
                "permutation length {} does not match order {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Shape(format!("invalid mode permutation {perm:?}")));
            }
            seen[p] = true;
        }
        let out_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let out_strides = strides_of(&out_shape);
        // stride contribution of input mode m in the output buffer
        let mut scatter = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            scatter[p] = out_strides[k];
        }
        let mut out = vec![0.0; self.data.len()];
        let mut idx = vec![0usize; n];
        for pos in 0..self.data.len() {
            let mut opos = 0;
            for (m, &i) in idx.iter().enumerate() {
                opos += i * scatter[m];
            }
            out[opos] = self.data[pos];
            next_index(&mut idx, &self.shape);
        }
        Ok(Self {
            shape: out_shape,
            data: out,
        })
    }

    /// The reshape operator Φ: relabel the linear buffer under the fixed
    /// column-major order. Pure metadata change; the buffer is untouched.
    pub fn reshape(&self, shape: &[usize]) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::Shape(format!(
                "extents must be positive, got {shape:?}"
            )));
        }
        let want: usize = shape.iter().product();
        if want != self.data.len() {
            return Err(Error::Shape(format!(
                "cannot reshape {} elements into {shape:?}",
                self.data.len()
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data: self.data.clone(),
        })
    }

    /// Mode-n unfolding (Kolda–Bader): rows index mode `mode`, columns run
    /// over the remaining modes with lower modes varying fastest.
    /// `mode` is 0-based.
    pub fn mode_n_unfold(&self, mode: usize) -> Result<Self> {
        let n = self.order();
        if mode >= n {
            return Err(Error::ModeIndex { mode, order: n });
        }
        let mut perm = Vec::with_capacity(n);
        perm.push(mode);
        perm.extend((0..n).filter(|&m| m != mode));
        let rows = self.shape[mode];
        let cols = self.data.len() / rows;
        self.permute(&perm)?.reshape(&[rows, cols])
    }

    /// Inverse of [`mode_n_unfold`]: rebuild the tensor of `shape` from its
    /// mode-n unfolding.
    pub fn mode_n_fold(m: &DenseTensor, mode: usize, shape: &[usize]) -> Result<Self> {
        let n = shape.len();
        if mode >= n {
            return Err(Error::ModeIndex { mode, order: n });
        }
        if m.order() != 2 {
            return Err(Error::Shape(format!(
                "mode fold expects a matrix, got order {}",
                m.order()
            )));
        }
        let rows = shape[mode];
        let cols: usize = shape.iter().enumerate().filter(|&(k, _)| k != mode).map(|(_, &e)| e).product();
        if m.shape[0] != rows || m.shape[1] != cols {
            return Err(Error::Shape(format!(
                "unfolding is {}×{} but shape {shape:?} at mode {mode} needs {rows}×{cols}",
                m.shape[0], m.shape[1]
            )));
        }
        let mut permuted_shape = Vec::with_capacity(n);
        permuted_shape.push(shape[mode]);
        permuted_shape.extend(shape.iter().enumerate().filter(|&(k, _)| k != mode).map(|(_, &e)| e));
        let permuted = m.reshape(&permuted_shape)?;
        // invert perm = [mode, 0, …, mode-1, mode+1, …]
        let mut perm = Vec::with_capacity(n);
        perm.push(mode);
        perm.extend((0..n).filter(|&k| k != mode));
        let mut inv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        permuted.permute(&inv)
    }

    /// n-unfolding: group the first `split` modes as rows and the rest as
    /// columns. A pure reshape under the fixed linearization.
    pub fn n_unfold(&self, split: usize) -> Result<Self> {
        let n = self.order();
        if split == 0 || split >= n {
            return Err(Error::ModeIndex {
                mode: split,
                order: n,
            });
        }
        let rows: usize = self.shape[..split].iter().product();
        let cols: usize = self.shape[split..].iter().product();
        self.reshape(&[rows, cols])
    }

    /// Mode-n product `self ×_mode m` with `m`: J×I_mode.
    pub fn mode_n_product(&self, m: &DenseTensor, mode: usize) -> Result<Self> {
        let n = self.order();
        if mode >= n {
            return Err(Error::ModeIndex { mode, order: n });
        }
        if m.order() != 2 {
            return Err(Error::Shape(format!(
                "mode product expects a matrix, got order {}",
                m.order()
            )));
        }
        if m.shape[1] != self.shape[mode] {
            return Err(Error::Shape(format!(
                "mode-{mode} product: matrix has {} columns, tensor extent is {}",
                m.shape[1], self.shape[mode]
            )));
        }
        let unfolded = self.mode_n_unfold(mode)?;
        let product = m.matmul(&unfolded)?;
        let mut shape = self.shape.clone();
        shape[mode] = m.shape[0];
        Self::mode_n_fold(&product, mode, &shape)
    }

    /// Dense matrix product (order-2 × order-2).
    pub fn matmul(&self, rhs: &DenseTensor) -> Result<Self> {
        if self.order() != 2 || rhs.order() != 2 {
            return Err(Error::Shape(format!(
                "matmul needs matrices, got orders {} and {}",
                self.order(),
                rhs.order()
            )));
        }
        let (m, k) = (self.shape[0], self.shape[1]);
        let (k2, n) = (rhs.shape[0], rhs.shape[1]);
        if k != k2 {
            return Err(Error::Shape(format!(
                "matmul inner dimensions {k} and {k2} differ"
            )));
        }
        let mut out = vec![0.0; m * n];
        // column-major: walk output columns, accumulate rank-1 updates
        for j in 0..n {
            let out_col = &mut out[j * m..(j + 1) * m];
            for l in 0..k {
                let b = rhs.data[l + k * j];
                if b == 0.0 {
                    continue;
                }
                let a_col = &self.data[l * m..(l + 1) * m];
                for i in 0..m {
                    out_col[i] += a_col[i] * b;
                }
            }
        }
        Ok(Self {
            shape: vec![m, n],
            data: out,
        })
    }

    /// Matrix transpose (order-2 only).
    pub fn transpose(&self) -> Result<Self> {
        self.permute(&[1, 0])
    }

    pub fn add(&self, rhs: &DenseTensor) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseTensor) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| c * x).collect(),
        }
    }

    fn zip_with(&self, rhs: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape != rhs.shape {
            return Err(Error::Shape(format!(
                "elementwise op on shapes {:?} and {:?}",
                self.shape, rhs.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn dot(&self, rhs: &DenseTensor) -> Result<f64> {
        if self.shape != rhs.shape {
            return Err(Error::Shape(format!(
                "dot on shapes {:?} and {:?}",
                self.shape, rhs.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|&x| x * x).sum())
    }

    /// Entrywise ∞-norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| f64::max(m, x.abs()))
    }
}

/// Relative standard error ‖approx − reference‖_F / ‖reference‖_F.
pub fn rse(approx: &DenseTensor, reference: &DenseTensor) -> Result<f64> {
    let diff = approx.sub(reference)?;
    let denom = reference.frob_norm();
    if denom == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok(diff.frob_norm() / denom)
}
