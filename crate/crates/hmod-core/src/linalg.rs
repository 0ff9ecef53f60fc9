//! Dense complex matrices and the handful of kernels everything else uses.
//!
//! Storage is row-major `Vec<Complex<f64>>`. Shape mismatches in arithmetic
//! are programming errors and panic; operations whose failure is a meaningful
//! runtime condition (eigeniteration, norm of malformed data) return
//! [`crate::error::Result`].

use crate::eigh::eigh;
use crate::error::{Error, Result};
use num_complex::Complex;
use std::fmt;
use std::ops::{Index, IndexMut};

pub type C64 = Complex<f64>;

/// Shorthand constructor for a complex scalar.
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);

/// Standard relative singular-value cut for rank decisions and pseudo-
/// inverses. Rank detection goes through Gram matrices, where the noise floor
/// of genuinely zero singular values is about `1e-8 · σ_max`; instances at
/// desk scale keep true small singular values many orders above this.
pub const RANK_CUT: f64 = 1e-6;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; rows must be rectangular.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidMatrix(format!(
                    "ragged rows: expected width {c}, found {}",
                    row.len()
                )));
            }
        }
        let mut m = CMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    /// Build from a real matrix given as nested rows.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| c64(x, 0.0)).collect()).collect();
        CMat::from_rows(&complex)
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Row-major flattening as a column vector (rows*cols × 1).
    pub fn vectorize(&self) -> CMat {
        CMat { rows: self.rows * self.cols, cols: 1, data: self.data.clone() }
    }

    /// Inverse of [`CMat::vectorize`] for the given shape.
    pub fn from_vector(v: &CMat, rows: usize, cols: usize) -> Self {
        assert_eq!(v.cols, 1, "from_vector expects a column vector");
        assert_eq!(v.rows, rows * cols, "vector length does not match shape");
        CMat { rows, cols, data: v.data.clone() }
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * z).collect() }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Kronecker product, row-major block convention:
    /// `(A ⊗ B)[(i*rB + k, j*cB + l)] = A[i,j] * B[k,l]`.
    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Assemble a block matrix from a rectangular grid of equally-shaped-per-
    /// row/column blocks.
    pub fn from_blocks(grid: &[Vec<CMat>]) -> CMat {
        let block_rows: Vec<usize> = grid.iter().map(|row| row[0].rows).collect();
        let block_cols: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let total_r: usize = block_rows.iter().sum();
        let total_c: usize = block_cols.iter().sum();
        let mut out = CMat::zeros(total_r, total_c);
        let mut roff = 0;
        for (bi, row) in grid.iter().enumerate() {
            assert_eq!(row.len(), block_cols.len(), "from_blocks: ragged grid");
            let mut coff = 0;
            for (bj, blk) in row.iter().enumerate() {
                assert_eq!(blk.rows, block_rows[bi], "from_blocks: row height mismatch");
                assert_eq!(blk.cols, block_cols[bj], "from_blocks: column width mismatch");
                for i in 0..blk.rows {
                    for j in 0..blk.cols {
                        out[(roff + i, coff + j)] = blk[(i, j)];
                    }
                }
                coff += blk.cols;
            }
            roff += block_rows[bi];
        }
        out
    }

    /// Copy the sub-block with the given row/column ranges.
    pub fn slice(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> CMat {
        assert!(r1 <= self.rows && c1 <= self.cols && r0 <= r1 && c0 <= c1);
        CMat::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn column(&self, j: usize) -> CMat {
        self.slice(0, self.rows, j, j + 1)
    }

    pub fn set_column(&mut self, j: usize, col: &CMat) {
        assert_eq!(col.rows, self.rows);
        assert_eq!(col.cols, 1);
        for i in 0..self.rows {
            self[(i, j)] = col[(i, 0)];
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert–Schmidt (Frobenius) inner product `tr(self† other)`.
    pub fn hs_inner(&self, other: &CMat) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "hs_inner: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.sub(other).max_abs()
    }

    /// Hermitian part `(m + m†)/2`.
    pub fn hermitize(&self) -> CMat {
        assert!(self.is_square(), "hermitize of non-square matrix");
        self.add(&self.dagger()).scale(c64(0.5, 0.0))
    }

    /// Deviation from Hermitian-ness, `‖m − m†‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.dagger()).max_abs()
    }

    /// Operator (spectral) norm: the largest singular value, computed as the
    /// square root of the top eigenvalue of `m† m` (or `m m†`, whichever is
    /// smaller).
    pub fn operator_norm(&self) -> Result<f64> {
        if !self.all_finite() {
            return Err(Error::InvalidMatrix("non-finite entries in operator_norm".into()));
        }
        if self.rows == 0 || self.cols == 0 {
            return Ok(0.0);
        }
        let gram =
            if self.rows <= self.cols { self.mul(&self.dagger()) } else { self.dagger().mul(self) };
        let (values, _) = eigh(&gram)?;
        let top = values.last().copied().unwrap_or(0.0).max(0.0);
        Ok(top.sqrt())
    }

    /// Top singular triple `(σ, u, v)` with `m v = σ u`.
    pub fn top_singular_triple(&self) -> Result<(f64, CMat, CMat)> {
        let (values, vectors) = eigh(&self.dagger().mul(self))?;
        let idx = values.len() - 1;
        let sigma = values[idx].max(0.0).sqrt();
        let v = vectors.column(idx);
        let u = if sigma > 0.0 {
            self.mul(&v).scale(c64(1.0 / sigma, 0.0))
        } else {
            CMat::zeros(self.rows, 1)
        };
        Ok((sigma, u, v))
    }

    /// Moore–Penrose pseudo-inverse. Singular values below
    /// `rel_cut * σ_max` are treated as zero.
    pub fn pinv(&self, rel_cut: f64) -> Result<CMat> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(CMat::zeros(self.cols, self.rows));
        }
        // Eigendecompose the smaller Gram matrix.
        if self.rows <= self.cols {
            let (values, u) = eigh(&self.mul(&self.dagger()))?;
            let lam_max = values.last().copied().unwrap_or(0.0).max(0.0);
            let cut = (rel_cut * rel_cut) * lam_max;
            // pinv = m† U diag(1/λ on kept) U†
            let mut mid = CMat::zeros(u.cols, u.cols);
            for (i, &lam) in values.iter().enumerate() {
                if lam > cut && lam > 0.0 {
                    mid[(i, i)] = c64(1.0 / lam, 0.0);
                }
            }
            Ok(self.dagger().mul(&u).mul(&mid).mul(&u.dagger()))
        } else {
            let (values, v) = eigh(&self.dagger().mul(self))?;
            let lam_max = values.last().copied().unwrap_or(0.0).max(0.0);
            let cut = (rel_cut * rel_cut) * lam_max;
            let mut mid = CMat::zeros(v.cols, v.cols);
            for (i, &lam) in values.iter().enumerate() {
                if lam > cut && lam > 0.0 {
                    mid[(i, i)] = c64(1.0 / lam, 0.0);
                }
            }
            Ok(v.mul(&mid).mul(&v.dagger()).mul(&self.dagger()))
        }
    }

    /// Least-squares solution of `self · x = b`.
    pub fn lstsq(&self, b: &CMat, rel_cut: f64) -> Result<CMat> {
        Ok(self.pinv(rel_cut)?.mul(b))
    }

    /// Orthonormal basis of the column space, deterministic: eigenvectors of
    /// `m m†` with eigenvalue above `(rel_cut · σ_max)²`, ordered by
    /// descending eigenvalue (ties broken by the eigensolver's fixed
    /// ordering).
    pub fn column_space_basis(&self, rel_cut: f64) -> Result<CMat> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(CMat::zeros(self.rows, 0));
        }
        let (values, u) = eigh(&self.mul(&self.dagger()))?;
        let lam_max = values.last().copied().unwrap_or(0.0).max(0.0);
        let cut = (rel_cut * rel_cut) * lam_max;
        let kept: Vec<usize> =
            (0..values.len()).rev().filter(|&i| values[i] > cut && values[i] > 0.0).collect();
        let mut out = CMat::zeros(self.rows, kept.len());
        for (j, &i) in kept.iter().enumerate() {
            out.set_column(j, &u.column(i));
        }
        Ok(out)
    }

    /// Numerical rank with relative singular-value cut `rel_cut`.
    pub fn rank(&self, rel_cut: f64) -> Result<usize> {
        Ok(self.column_space_basis(rel_cut)?.cols)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Matrix of the level-`n` amplification `id_{M_n} ⊗ T` of a linear map `T`
/// given by `map` on a vectorized domain: the amplified map acts entrywise on
/// n×n block matrices whose entries are domain vectors, vectorized in
/// row-major block order.
pub fn amplify(map: &CMat, level: usize) -> Result<CMat> {
    if level == 0 {
        return Err(Error::InvalidLevel("amplification level must be at least 1".into()));
    }
    Ok(CMat::identity(level * level).kron(map))
}

#[cfg(test)]
pub mod testutil {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        random_cmat(rng, n, n).hermitize()
    }

    /// Independent σ_max oracle: power iteration on m†m with many steps.
    pub fn power_iteration_norm(m: &CMat, steps: usize, seed: u64) -> f64 {
        let mut r = rng(seed);
        let gram = m.dagger().mul(m);
        if gram.rows == 0 {
            return 0.0;
        }
        let mut v = random_cmat(&mut r, gram.rows, 1);
        let mut lam = 0.0;
        for _ in 0..steps {
            let w = gram.mul(&v);
            let norm = w.frob_norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = w.scale(c64(1.0 / norm, 0.0));
            lam = norm;
        }
        lam.sqrt()
    }
}
