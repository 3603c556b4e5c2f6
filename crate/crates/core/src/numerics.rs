//! Dense linear algebra, normal-distribution helpers and seeded sampling.
//!
//! Matrices are stored column-major: every consumer in this crate scans
//! columns (boosting correlations, least-squares projections), so a column
//! is a contiguous slice.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative rank tolerance applied to the diagonal of R in [`ols_solve`].
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from column-major storage, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        let mut out = Vec::with_capacity(data.len());
        for j in 0..cols {
            for i in 0..rows {
                out.push(data[i * cols + j]);
            }
        }
        Self::from_col_major(rows, cols, out)
    }

    /// Builds a matrix from a list of equally long columns.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::InvalidInput(alloc::format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.cols).map(move |j| self.col(j))
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(alloc::format!(
                "shape mismatch: {}x{} times {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = j * self.rows;
            for k in 0..self.cols {
                let b = other.get(k, j);
                if b == 0.0 {
                    continue;
                }
                let src = self.col(k);
                for (o, a) in out.data[dst..dst + self.rows].iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let mut out = vec![0.0; self.rows];
        for (j, &b) in v.iter().enumerate() {
            if b != 0.0 {
                axpy(b, self.col(j), &mut out);
            }
        }
        out
    }

    /// Copies the listed columns, in the given order, into a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Appends a column on the right.
    pub fn push_column(&mut self, col: &[f64]) -> Result<()> {
        if col.len() != self.rows {
            return Err(Error::InvalidInput(alloc::format!(
                "column has length {}, expected {}",
                col.len(),
                self.rows
            )));
        }
        check_finite(col)?;
        self.data.extend_from_slice(col);
        self.cols += 1;
        Ok(())
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(dot(&self.data, &self.data))
    }
}

pub fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sum_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

/// AR(1) Toeplitz covariance, `Σ_kj = rho^|j-k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzAr1Cov {
    dim: usize,
    rho: f64,
}

impl ToeplitzAr1Cov {
    pub fn new(dim: usize, rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidInput(alloc::format!(
                "AR(1) correlation must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(Self { dim, rho })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn entry(&self, k: usize, j: usize) -> f64 {
        libm::pow(self.rho, k.abs_diff(j) as f64)
    }

    pub fn to_matrix(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for k in 0..self.dim {
                m.set(k, j, self.entry(k, j));
            }
        }
        m
    }

    /// `ι_sᵀ Σ ι_s`: the sum of the leading `s × s` block.
    pub fn leading_block_sum(&self, s: usize) -> f64 {
        let s = s.min(self.dim);
        let mut total = 0.0;
        for k in 0..s {
            for j in 0..s {
                total += self.entry(k, j);
            }
        }
        total
    }

    /// `aᵀ Σ a`.
    pub fn quad_form(&self, a: &[f64]) -> f64 {
        assert_eq!(a.len(), self.dim);
        let mut total = 0.0;
        for k in 0..self.dim {
            if a[k] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                total += a[k] * self.entry(k, j) * a[j];
            }
        }
        total
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = cov`.
pub fn cholesky(cov: &RealMatrix) -> Result<RealMatrix> {
    let n = cov.nrows();
    if cov.ncols() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "cholesky needs a square matrix, got {}x{}",
            n,
            cov.ncols()
        )));
    }
    let scale = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(libm::fabs(cov.get(i, j))));
    for j in 0..n {
        for i in 0..j {
            if libm::fabs(cov.get(i, j) - cov.get(j, i)) > 1e-10 * scale.max(1.0) {
                return Err(Error::InvalidInput(alloc::format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let mut l = RealMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = cov.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            diag -= v * v;
        }
        if !(diag > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = libm::sqrt(diag);
        l.set(j, j, ljj);
        for i in j + 1..n {
            let mut s = cov.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(l)
}

/// Householder QR of a tall matrix, kept in compact form.
struct HouseholderQr {
    /// Reflector vectors, one per column, each of length `rows - j`.
    reflectors: Vec<Vec<f64>>,
    /// Upper triangle of R, column-major `k × k`.
    r: RealMatrix,
}

impl HouseholderQr {
    fn factor(x: &RealMatrix) -> Self {
        let k = x.ncols();
        let mut a = x.clone();
        let mut reflectors = Vec::with_capacity(k);
        let mut r = RealMatrix::zeros(k, k);
        for j in 0..k {
            let col = &a.col(j)[j..];
            let norm = libm::sqrt(dot(col, col));
            let mut v: Vec<f64> = col.to_vec();
            if norm == 0.0 {
                v.iter_mut().for_each(|e| *e = 0.0);
                reflectors.push(v);
                for c in j..k {
                    r.set(j, c, a.get(j, c));
                }
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vnorm = libm::sqrt(dot(&v, &v));
            v.iter_mut().for_each(|e| *e /= vnorm);
            for c in j..k {
                let seg = &mut a.col_mut(c)[j..];
                let proj = 2.0 * dot(&v, seg);
                axpy(-proj, &v, seg);
            }
            for c in j..k {
                r.set(j, c, a.get(j, c));
            }
            reflectors.push(v);
        }
        Self { reflectors, r }
    }

    /// Applies `Qᵀ` to `y` in place.
    fn apply_qt(&self, y: &mut [f64]) {
        for (j, v) in self.reflectors.iter().enumerate() {
            let seg = &mut y[j..];
            let proj = 2.0 * dot(v, seg);
            if proj != 0.0 {
                axpy(-proj, v, seg);
            }
        }
    }

    fn rank(&self) -> usize {
        let k = self.r.ncols();
        let max = (0..k).fold(0.0f64, |m, i| m.max(libm::fabs(self.r.get(i, i))));
        if max == 0.0 {
            return 0;
        }
        (0..k)
            .filter(|&i| libm::fabs(self.r.get(i, i)) > RANK_TOL * max)
            .count()
    }

    fn back_substitute(&self, qty: &[f64]) -> Vec<f64> {
        let k = self.r.ncols();
        let mut beta = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = qty[i];
            for c in i + 1..k {
                s -= self.r.get(i, c) * beta[c];
            }
            beta[i] = s / self.r.get(i, i);
        }
        beta
    }
}

/// Least-squares coefficients `argmin ‖y − X b‖²` via Householder QR.
///
/// Fails with [`Error::Singular`] when some diagonal entry of R falls below
/// `RANK_TOL` times the largest one.
pub fn ols_solve(x: &RealMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let (n, k) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::InvalidInput(alloc::format!(
            "response has length {}, design has {n} rows",
            y.len()
        )));
    }
    check_finite(y)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > n {
        return Err(Error::Singular { rank: n, cols: k });
    }
    let qr = HouseholderQr::factor(x);
    let rank = qr.rank();
    if rank < k {
        return Err(Error::Singular { rank, cols: k });
    }
    let mut qty = y.to_vec();
    qr.apply_qt(&mut qty);
    Ok(qr.back_substitute(&qty))
}

/// `y − X b`.
pub fn residuals(x: &RealMatrix, y: &[f64], coef: &[f64]) -> Vec<f64> {
    let mut r = y.to_vec();
    for (j, &b) in coef.iter().enumerate() {
        if b != 0.0 {
            axpy(-b, x.col(j), &mut r);
        }
    }
    r
}

/// Draws `n` i.i.d. rows from `N(0, Σ)` with `Σ` the given AR(1) Toeplitz covariance.
///
/// Each row consumes `dim` standard normals in order, so output is a pure
/// function of the generator state.
pub fn sample_mvn<R: Rng + ?Sized>(
    n: usize,
    cov: &ToeplitzAr1Cov,
    rng: &mut R,
) -> Result<RealMatrix> {
    let dim = cov.dim();
    let l = cholesky(&cov.to_matrix())?;
    let mut out = RealMatrix::zeros(n, dim);
    let mut z = vec![0.0; dim];
    for i in 0..n {
        for zk in z.iter_mut() {
            *zk = rng.sample(StandardNormal);
        }
        for r in 0..dim {
            let mut s = 0.0;
            for c in 0..=r {
                s += l.get(r, c) * z[c];
            }
            out.set(i, r, s);
        }
    }
    Ok(out)
}

/// Fills a vector with `n` standard-normal draws.
pub fn standard_normals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Independent generator for logical stream `stream` under `master_seed`.
///
/// The stream is selected by ChaCha's stream counter, so replication `r`
/// of a Monte Carlo run draws the same numbers no matter which thread runs it
/// or in which order.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Standard normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)`.
///
/// Rational approximation followed by one Halley refinement against
/// [`norm_cdf`], accurate to roughly 1e-15 in the central region.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p.is_nan() {
        return f64::NAN;
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(libm::sqrt(-2.0 * libm::log(p)))
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(libm::sqrt(-2.0 * libm::log(1.0 - p)))
    };

    let e = norm_cdf(x) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    x
}

/// Two-sided critical value `Φ⁻¹(1 − (1 − level)/2)` for a confidence level.
pub fn two_sided_critical(level: f64) -> f64 {
    norm_quantile(1.0 - 0.5 * (1.0 - level))
}

/// Two-sided normal p-value for a z statistic.
pub fn two_sided_p_value(z: f64) -> f64 {
    libm::erfc(libm::fabs(z) / core::f64::consts::SQRT_2).min(1.0)
}

/// Median of a slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
