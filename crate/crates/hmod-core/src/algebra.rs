//! Finite-dimensional C*-algebras presented as direct sums of full complex
//! matrix blocks, their elements, and their central ideals.
//!
//! The canonical linear basis consists of the matrix units of each block, in
//! block order and row-major within a block; coordinates of an element in
//! this basis are just its entries, which keeps conversion between abstract
//! elements and coordinate vectors trivial. The faithful representation is
//! the block-diagonal embedding into `M_N` with `N` the sum of block sizes;
//! it is isometric, so every algebra norm is a spectral norm of a concrete
//! matrix.

use crate::eigh::is_psd;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::tol::Tolerance;
use std::collections::BTreeSet;

/// A direct sum `⊕_b M_{n_b}(ℂ)` of full matrix blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiMatrixAlgebra {
    blocks: Vec<usize>,
}

impl MultiMatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDocument("algebra needs at least one block".into()));
        }
        if blocks.iter().any(|&n| n == 0) {
            return Err(Error::InvalidDocument("algebra block sizes must be positive".into()));
        }
        Ok(MultiMatrixAlgebra { blocks })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Linear dimension `Σ n_b²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size `N = Σ n_b` of the block-diagonal faithful representation.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Row offset of block `b` inside the faithful representation.
    pub fn rep_offset(&self, b: usize) -> usize {
        self.blocks[..b].iter().sum()
    }

    /// One block only?
    pub fn is_simple(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Index of the matrix unit `E^{(b)}_{ij}` in the canonical basis.
    pub fn basis_index(&self, b: usize, i: usize, j: usize) -> usize {
        let offset: usize = self.blocks[..b].iter().map(|n| n * n).sum();
        offset + i * self.blocks[b] + j
    }

    /// Inverse of [`MultiMatrixAlgebra::basis_index`].
    pub fn basis_unpack(&self, k: usize) -> (usize, usize, usize) {
        let mut rest = k;
        for (b, &n) in self.blocks.iter().enumerate() {
            if rest < n * n {
                return (b, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("basis index {k} out of range for algebra of dimension {}", self.dim());
    }

    pub fn basis_element(&self, k: usize) -> AlgebraElement {
        let (b, i, j) = self.basis_unpack(k);
        let mut el = self.zero();
        el.blocks[b][(i, j)] = crate::linalg::ONE;
        el
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.blocks.iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.clone(),
            blocks: self.blocks.iter().map(|&n| CMat::identity(n)).collect(),
        }
    }

    pub fn element_from_blocks(&self, blocks: Vec<CMat>) -> Result<AlgebraElement> {
        if blocks.len() != self.blocks.len() {
            return Err(Error::AlgebraMismatch(format!(
                "expected {} blocks, got {}",
                self.blocks.len(),
                blocks.len()
            )));
        }
        for (b, m) in blocks.iter().enumerate() {
            if m.rows != self.blocks[b] || m.cols != self.blocks[b] {
                return Err(Error::AlgebraMismatch(format!(
                    "block {b} must be {0}x{0}, got {1}x{2}",
                    self.blocks[b], m.rows, m.cols
                )));
            }
            if !m.all_finite() {
                return Err(Error::InvalidMatrix(format!("non-finite entries in block {b}")));
            }
        }
        Ok(AlgebraElement { algebra: self.clone(), blocks })
    }

    /// Element from coordinates in the canonical matrix-unit basis.
    pub fn element_from_coords(&self, coords: &[C64]) -> Result<AlgebraElement> {
        if coords.len() != self.dim() {
            return Err(Error::AlgebraMismatch(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        let mut el = self.zero();
        let mut k = 0;
        for (b, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    el.blocks[b][(i, j)] = coords[k];
                    k += 1;
                }
            }
        }
        Ok(el)
    }

    /// Recover an element from its faithful-representation matrix by
    /// extracting the diagonal blocks (off-diagonal-block content is
    /// discarded; callers that need it checked should compare `rep()`
    /// round-trip).
    pub fn element_from_rep(&self, rep: &CMat) -> Result<AlgebraElement> {
        let n = self.rep_dim();
        if rep.rows != n || rep.cols != n {
            return Err(Error::AlgebraMismatch(format!(
                "representation matrix must be {n}x{n}, got {}x{}",
                rep.rows, rep.cols
            )));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (b, &nb) in self.blocks.iter().enumerate() {
            let off = self.rep_offset(b);
            blocks.push(rep.slice(off, off + nb, off, off + nb));
        }
        self.element_from_blocks(blocks)
    }
}

/// An element of a [`MultiMatrixAlgebra`]: one matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: MultiMatrixAlgebra,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn block(&self, b: usize) -> &CMat {
        &self.blocks[b]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(
                "elements belong to different algebras".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, z: C64) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m.scale(z)).collect(),
        }
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(b)).collect(),
        })
    }

    /// The C*-involution: blockwise conjugate transpose.
    pub fn star(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m.dagger()).collect(),
        }
    }

    /// C*-norm: the largest block spectral norm (equals the spectral norm of
    /// the faithful representation).
    pub fn norm(&self) -> Result<f64> {
        let mut best = 0.0f64;
        for m in &self.blocks {
            best = best.max(m.operator_norm()?);
        }
        Ok(best)
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|m| m.trace()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    /// Positive as an algebra element: every block PSD.
    pub fn is_positive(&self, tol: &Tolerance) -> Result<bool> {
        for m in &self.blocks {
            if !is_psd(m, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates in the canonical matrix-unit basis.
    pub fn coords(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.algebra.dim());
        for m in &self.blocks {
            out.extend_from_slice(m.data());
        }
        out
    }

    /// Block-diagonal faithful representation in `M_N`.
    pub fn rep(&self) -> CMat {
        let n = self.algebra.rep_dim();
        let mut out = CMat::zeros(n, n);
        for (b, m) in self.blocks.iter().enumerate() {
            let off = self.algebra.rep_offset(b);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out[(off + i, off + j)] = m[(i, j)];
                }
            }
        }
        out
    }
}

/// A two-sided ideal of a multi-matrix algebra: a subset of its blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralIdeal {
    algebra: MultiMatrixAlgebra,
    members: BTreeSet<usize>,
}

impl CentralIdeal {
    pub fn new(algebra: &MultiMatrixAlgebra, members: BTreeSet<usize>) -> Result<Self> {
        if let Some(&b) = members.iter().find(|&&b| b >= algebra.num_blocks()) {
            return Err(Error::InvalidDocument(format!(
                "ideal references block {b}, but the algebra has {} blocks",
                algebra.num_blocks()
            )));
        }
        Ok(CentralIdeal { algebra: algebra.clone(), members })
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn complement(&self) -> CentralIdeal {
        let members =
            (0..self.algebra.num_blocks()).filter(|b| !self.members.contains(b)).collect();
        CentralIdeal { algebra: self.algebra.clone(), members }
    }

    /// The central projection supported on the member blocks.
    pub fn central_projection(&self) -> AlgebraElement {
        let mut el = self.algebra.zero();
        for &b in &self.members {
            let n = self.algebra.block_sizes()[b];
            el.blocks[b] = CMat::identity(n);
        }
        el
    }

    /// Linear dimension of the ideal.
    pub fn dim(&self) -> usize {
        self.members.iter().map(|&b| self.algebra.block_sizes()[b].pow(2)).sum()
    }

    /// Does the element lie in the ideal (all non-member blocks vanish)?
    pub fn contains(&self, el: &AlgebraElement, slack: f64) -> bool {
        el.blocks
            .iter()
            .enumerate()
            .all(|(b, m)| self.members.contains(&b) || m.max_abs() <= slack)
    }
}

/// Assemble the smallest central ideal containing every element of `span`:
/// the set of blocks where some element has mass above `slack`.
pub fn central_ideal_spanned_by(
    algebra: &MultiMatrixAlgebra,
    span: &[AlgebraElement],
    slack: f64,
) -> Result<CentralIdeal> {
    let mut members = BTreeSet::new();
    for el in span {
        if el.algebra() != algebra {
            return Err(Error::AlgebraMismatch("span element over wrong algebra".into()));
        }
        for (b, m) in el.blocks.iter().enumerate() {
            if m.max_abs() > slack {
                members.insert(b);
            }
        }
    }
    CentralIdeal::new(algebra, members)
}
