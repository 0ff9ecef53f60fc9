//! Explicit block decomposition of concrete operator algebras.
//!
//! Input: matrices on a finite-dimensional Hilbert space whose linear span
//! is a unital *-closed algebra. Output: a multi-matrix model of that
//! algebra together with coordinate maps in both directions, so elements
//! can be moved between the concrete picture and the abstract one at will.
//!
//! The method is spectral: the center is cut out by a linear commutation
//! system, a random self-adjoint central element splits the space into the
//! block ideals, and inside each ideal a second random self-adjoint element
//! produces a minimal projection whose cyclic subspace carries the
//! irreducible representation. Compression to that subspace is the
//! isomorphism onto full matrices. Randomness is seeded and the
//! construction retries deterministically on the rare degenerate draw;
//! the result is validated (multiplicativity, star, unit) before returning.

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, RANK_CUT, ZERO};
use crate::tol::Tolerance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A multi-matrix model of a concrete *-closed span, with coordinate maps
/// between the two pictures.
#[derive(Debug, Clone)]
pub struct WedderburnDecomposition {
    pub algebra: MultiMatrixAlgebra,
    carrier_dim: usize,
    /// `h² × s`: orthonormalized vectorized span basis.
    span_basis: CMat,
    /// `s × s`: span coefficients → model coordinates.
    to_model_mat: CMat,
    /// `s × s`: model coordinates → span coefficients.
    from_model_mat: CMat,
}

impl WedderburnDecomposition {
    pub fn carrier_dim(&self) -> usize {
        self.carrier_dim
    }

    /// Model element of a concrete matrix; fails if the matrix is not in
    /// the span.
    pub fn to_model(&self, m: &CMat) -> Result<AlgebraElement> {
        if m.rows != self.carrier_dim || m.cols != self.carrier_dim {
            return Err(Error::DegenerateRepresentation(format!(
                "matrix is {}x{}, carrier is {}-dimensional",
                m.rows, m.cols, self.carrier_dim
            )));
        }
        let v = m.vectorize();
        let coeffs = self.span_basis.dagger().mul(&v);
        let residual = self.span_basis.mul(&coeffs).max_abs_diff(&v);
        let scale = m.max_abs().max(1.0);
        if residual > 1e-8 * scale {
            return Err(Error::DegenerateRepresentation(format!(
                "matrix lies outside the span (residual {residual:.3e})"
            )));
        }
        let coords = self.to_model_mat.mul(&coeffs);
        self.algebra.element_from_coords(&(0..coords.rows).map(|i| coords[(i, 0)]).collect::<Vec<_>>())
    }

    /// Concrete matrix of a model element.
    pub fn from_model(&self, el: &AlgebraElement) -> Result<CMat> {
        if el.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch("element not over the model algebra".into()));
        }
        let coords = el.coords();
        let cv = CMat::from_fn(coords.len(), 1, |i, _| coords[i]);
        let coeffs = self.from_model_mat.mul(&cv);
        Ok(CMat::from_vector(
            &self.span_basis.mul(&coeffs),
            self.carrier_dim,
            self.carrier_dim,
        ))
    }
}

/// Decompose the span of the given matrices. The span must be a unital
/// *-closed algebra of operators on `ℂ^h` containing the identity; this is
/// checked, and a [`Error::DegenerateRepresentation`] is returned otherwise.
pub fn decompose(
    span: &[CMat],
    tol: &Tolerance,
    seed: u64,
) -> Result<WedderburnDecomposition> {
    let h = match span.first() {
        Some(m) if m.is_square() => m.rows,
        _ => {
            return Err(Error::DegenerateRepresentation(
                "span must consist of square matrices".into(),
            ))
        }
    };
    for m in span {
        if m.rows != h || m.cols != h || !m.all_finite() {
            return Err(Error::DegenerateRepresentation(
                "span matrices must be finite and of a common size".into(),
            ));
        }
    }
    // Orthonormal basis of the span.
    let mut stacked = CMat::zeros(h * h, span.len());
    for (j, m) in span.iter().enumerate() {
        stacked.set_column(j, &m.vectorize());
    }
    let span_basis = stacked.column_space_basis(RANK_CUT)?;
    let s = span_basis.cols;
    let basis_mats: Vec<CMat> =
        (0..s).map(|j| CMat::from_vector(&span_basis.column(j), h, h)).collect();
    let scale = basis_mats.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
    let in_span = |m: &CMat| -> f64 {
        let v = m.vectorize();
        span_basis.mul(&span_basis.dagger().mul(&v)).max_abs_diff(&v)
    };
    let closure_slack = 1e-9 * scale.powi(2) * h as f64;
    // Algebra checks: unit, products, stars.
    if in_span(&CMat::identity(h)) > closure_slack {
        return Err(Error::DegenerateRepresentation(
            "span does not contain the identity".into(),
        ));
    }
    for a in &basis_mats {
        if in_span(&a.dagger()) > closure_slack {
            return Err(Error::DegenerateRepresentation("span is not star-closed".into()));
        }
        for b in &basis_mats {
            let r = in_span(&a.mul(b));
            if r > closure_slack {
                return Err(Error::DegenerateRepresentation(format!(
                    "span is not closed under products (residual {r:.3e})"
                )));
            }
        }
    }
    // Center: elements commuting with every basis matrix.
    let center = center_basis(&basis_mats, &span_basis, h)?;
    let z = center.len();
    let mut last_err =
        Error::DegenerateRepresentation("decomposition failed on every attempt".into());
    for attempt in 0..8u64 {
        match decompose_attempt(
            &basis_mats,
            &span_basis,
            &center,
            h,
            s,
            z,
            tol,
            seed.wrapping_add(attempt),
        ) {
            Ok(d) => return Ok(d),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn center_basis(basis_mats: &[CMat], span_basis: &CMat, h: usize) -> Result<Vec<CMat>> {
    let s = basis_mats.len();
    let mut constraint = CMat::zeros(s * h * h, s);
    for (i, b) in basis_mats.iter().enumerate() {
        for (k, c) in basis_mats.iter().enumerate() {
            let comm = c.mul(b).sub(&b.mul(c)).vectorize();
            for row in 0..h * h {
                constraint[(i * h * h + row, k)] = comm[(row, 0)];
            }
        }
    }
    let gram = constraint.dagger().mul(&constraint);
    let (vals, vecs) = crate::eigh::eigh(&gram)?;
    let lam_max = vals.last().copied().unwrap_or(0.0).max(1.0);
    let cut = (RANK_CUT * RANK_CUT) * lam_max;
    let mut out = Vec::new();
    for i in 0..vals.len() {
        if vals[i] <= cut {
            let coeffs = vecs.column(i);
            out.push(CMat::from_vector(&span_basis.mul(&coeffs), h, h));
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateRepresentation("empty center".into()));
    }
    Ok(out)
}

/// Cluster the ascending eigenvalues into groups separated by a relative
/// gap; returns the member index ranges.
fn cluster(vals: &[f64]) -> Vec<(usize, usize)> {
    let spread = (vals.last().unwrap() - vals[0]).max(1e-12);
    let gap = (1e-6 * spread).max(1e-10);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn decompose_attempt(
    basis_mats: &[CMat],
    span_basis: &CMat,
    center: &[CMat],
    h: usize,
    s: usize,
    z: usize,
    tol: &Tolerance,
    seed: u64,
) -> Result<WedderburnDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_self_adjoint = |mats: &[CMat]| -> CMat {
        let mut acc = CMat::zeros(h, h);
        for m in mats {
            let g = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            acc = acc.add(&m.scale(g));
        }
        acc.add(&acc.dagger()).scale(c64(0.5, 0.0))
    };
    // Central projections from the spectral clusters of a random
    // self-adjoint central element.
    let zel = random_self_adjoint(center);
    let (zvals, zvecs) = crate::eigh::eigh(&zel)?;
    let clusters = cluster(&zvals);
    if clusters.len() != z {
        return Err(Error::DegenerateRepresentation(format!(
            "central element split into {} clusters, center has dimension {z}",
            clusters.len()
        )));
    }
    struct Block {
        size: usize,
        w: CMat,
    }
    let mut blocks = Vec::with_capacity(z);
    for &(lo, hi) in &clusters {
        // Orthonormal basis of the ideal's carrier subspace.
        let rb = hi - lo;
        let mut wp = CMat::zeros(h, rb);
        for (j, i) in (lo..hi).enumerate() {
            wp.set_column(j, &zvecs.column(i));
        }
        // Basis of the compressed block algebra.
        let mut comp = CMat::zeros(rb * rb, s);
        for (k, b) in basis_mats.iter().enumerate() {
            comp.set_column(k, &wp.dagger().mul(b).mul(&wp).vectorize());
        }
        let block_basis = comp.column_space_basis(RANK_CUT)?;
        let sb = block_basis.cols;
        let n = (sb as f64).sqrt().round() as usize;
        if n * n != sb {
            return Err(Error::DegenerateRepresentation(format!(
                "block algebra dimension {sb} is not a perfect square"
            )));
        }
        if rb % n != 0 {
            return Err(Error::DegenerateRepresentation(format!(
                "carrier dimension {rb} is not a multiple of the block size {n}"
            )));
        }
        let mult = rb / n;
        // Minimal projection: lowest spectral cluster of a random
        // self-adjoint block element must have the multiplicity's rank.
        let block_mats: Vec<CMat> =
            (0..sb).map(|j| CMat::from_vector(&block_basis.column(j), rb, rb)).collect();
        let x = {
            let mut acc = CMat::zeros(rb, rb);
            for m in &block_mats {
                let g = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                acc = acc.add(&m.scale(g));
            }
            acc.add(&acc.dagger()).scale(c64(0.5, 0.0))
        };
        let (xvals, xvecs) = crate::eigh::eigh(&x)?;
        let xclusters = cluster(&xvals);
        if xclusters.len() != n || xclusters.iter().any(|&(lo, hi)| hi - lo != mult) {
            return Err(Error::DegenerateRepresentation(
                "random block element has a degenerate spectrum".into(),
            ));
        }
        // Cyclic subspace of a vector in the minimal projection's range.
        let xi_small = xvecs.column(xclusters[0].0);
        let mut orbit = CMat::zeros(h, sb);
        for (j, m) in block_mats.iter().enumerate() {
            orbit.set_column(j, &wp.mul(&m.mul(&xi_small)));
        }
        let w = orbit.column_space_basis(RANK_CUT)?;
        if w.cols != n {
            return Err(Error::DegenerateRepresentation(format!(
                "cyclic subspace has dimension {}, expected {n}",
                w.cols
            )));
        }
        blocks.push(Block { size: n, w });
    }
    blocks.sort_by_key(|b| b.size);
    let sizes: Vec<usize> = blocks.iter().map(|b| b.size).collect();
    if sizes.iter().map(|n| n * n).sum::<usize>() != s {
        return Err(Error::DegenerateRepresentation(format!(
            "block sizes {sizes:?} do not account for the span dimension {s}"
        )));
    }
    let algebra = MultiMatrixAlgebra::new(sizes)?;
    // Model coordinates of every span basis matrix.
    let mut to_model_mat = CMat::zeros(s, s);
    for (k, m) in basis_mats.iter().enumerate() {
        for (b, block) in blocks.iter().enumerate() {
            let compressed = block.w.dagger().mul(m).mul(&block.w);
            for i in 0..block.size {
                for j in 0..block.size {
                    to_model_mat[(algebra.basis_index(b, i, j), k)] = compressed[(i, j)];
                }
            }
        }
    }
    let from_model_mat = to_model_mat.pinv(RANK_CUT)?;
    let inv_defect =
        to_model_mat.mul(&from_model_mat).max_abs_diff(&CMat::identity(s));
    if inv_defect > 1e-8 {
        return Err(Error::DegenerateRepresentation(format!(
            "coordinate change is not invertible (defect {inv_defect:.3e})"
        )));
    }
    let d = WedderburnDecomposition {
        algebra,
        carrier_dim: h,
        span_basis: span_basis.clone(),
        to_model_mat,
        from_model_mat,
    };
    validate_isomorphism(&d, basis_mats, tol)?;
    Ok(d)
}

fn validate_isomorphism(
    d: &WedderburnDecomposition,
    basis_mats: &[CMat],
    _tol: &Tolerance,
) -> Result<()> {
    let scale = basis_mats.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
    let slack = 1e-8 * scale * scale * basis_mats.len() as f64;
    let unit = d.to_model(&CMat::identity(d.carrier_dim))?;
    if unit.max_abs_diff(&d.algebra.unit()) > slack {
        return Err(Error::DegenerateRepresentation("model map does not preserve the unit".into()));
    }
    for a in basis_mats {
        let ma = d.to_model(a)?;
        if ma.star().max_abs_diff(&d.to_model(&a.dagger())?) > slack {
            return Err(Error::DegenerateRepresentation("model map does not preserve stars".into()));
        }
        if d.from_model(&ma)?.max_abs_diff(a) > slack {
            return Err(Error::DegenerateRepresentation("model round-trip failed".into()));
        }
        for b in basis_mats {
            let lhs = d.to_model(&a.mul(b))?;
            let rhs = ma.mul(&d.to_model(b)?)?;
            if lhs.max_abs_diff(&rhs) > slack {
                return Err(Error::DegenerateRepresentation(
                    "model map is not multiplicative".into(),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rep_span(a: &MultiMatrixAlgebra) -> Vec<CMat> {
        (0..a.dim()).map(|k| a.basis_element(k).rep()).collect()
    }

    #[test]
    fn recovers_block_sizes_of_a_representation() {
        for sizes in [vec![1usize], vec![3], vec![1, 2], vec![2, 2, 1]] {
            let a = MultiMatrixAlgebra::new(sizes.clone()).unwrap();
            let d = decompose(&rep_span(&a), &tol(), 7).unwrap();
            let mut expect = sizes.clone();
            expect.sort();
            assert_eq!(d.algebra.block_sizes(), expect.as_slice(), "sizes {sizes:?}");
        }
    }

    #[test]
    fn isomorphism_is_isometric_and_multiplicative() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let d = decompose(&rep_span(&a), &tol(), 3).unwrap();
        let mut r = rng(17);
        for _ in 0..10 {
            let el = a
                .element_from_blocks(vec![random_cmat(&mut r, 1, 1), random_cmat(&mut r, 2, 2)])
                .unwrap();
            let m = el.rep();
            let model = d.to_model(&m).unwrap();
            assert_abs_diff_eq!(model.norm().unwrap(), el.norm().unwrap(), epsilon = 1e-9);
            assert!(d.from_model(&model).unwrap().max_abs_diff(&m) < 1e-9);
        }
        let x = a
            .element_from_blocks(vec![random_cmat(&mut r, 1, 1), random_cmat(&mut r, 2, 2)])
            .unwrap();
        let y = a
            .element_from_blocks(vec![random_cmat(&mut r, 1, 1), random_cmat(&mut r, 2, 2)])
            .unwrap();
        let lhs = d.to_model(&x.mul(&y).unwrap().rep()).unwrap();
        let rhs = d.to_model(&x.rep()).unwrap().mul(&d.to_model(&y.rep()).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    #[test]
    fn handles_multiplicity() {
        // M_2 acting on ℂ²⊗ℂ³ via x ↦ x⊗I.
        let a = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let span: Vec<CMat> = (0..a.dim())
            .map(|k| a.basis_element(k).rep().kron(&CMat::identity(3)))
            .collect();
        let d = decompose(&span, &tol(), 11).unwrap();
        assert_eq!(d.algebra.block_sizes(), &[2]);
        assert_eq!(d.carrier_dim(), 6);
        let mut r = rng(4);
        let x = random_cmat(&mut r, 2, 2);
        let big = x.kron(&CMat::identity(3));
        let model = d.to_model(&big).unwrap();
        assert_abs_diff_eq!(
            model.norm().unwrap(),
            big.operator_norm().unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn compacts_of_the_standard_module_recover_the_algebra() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let m = crate::module::standard_module(&b, &tol()).unwrap();
        let compacts = crate::module::compacts_basis(&m, &m).unwrap();
        let span: Vec<CMat> = compacts
            .iter()
            .map(|t| crate::module::localized_map(&m, &m, t).unwrap())
            .collect();
        let d = decompose(&span, &tol(), 5).unwrap();
        assert_eq!(d.algebra.block_sizes(), b.block_sizes());
    }

    #[test]
    fn non_star_closed_span_is_rejected() {
        let e12 = CMat::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                c64(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let err = decompose(&[CMat::identity(2), e12], &tol(), 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateRepresentation(_)));
    }

    #[test]
    fn span_without_identity_is_rejected() {
        let e11 = CMat::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                c64(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let err = decompose(&[e11], &tol(), 0).unwrap_err();
        assert!(matches!(err, Error::DegenerateRepresentation(_)));
    }

    #[test]
    fn scrambled_representation_still_decomposes() {
        // Conjugate the block representation by a random unitary; block
        // sizes and norms are unchanged.
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let mut r = rng(23);
        let g = random_cmat(&mut r, 3, 3);
        // Unitary from the polar part of a random matrix via its Gram
        // decomposition.
        let (vals, vecs) = crate::eigh::eigh(&g.dagger().mul(&g)).unwrap();
        let mut inv_sqrt = CMat::zeros(3, 3);
        for i in 0..3 {
            let col = vecs.column(i);
            inv_sqrt = inv_sqrt.add(&col.mul(&col.dagger()).scale(c64(1.0 / vals[i].sqrt(), 0.0)));
        }
        let u = g.mul(&inv_sqrt);
        let span: Vec<CMat> = (0..a.dim())
            .map(|k| u.dagger().mul(&a.basis_element(k).rep()).mul(&u))
            .collect();
        let d = decompose(&span, &tol(), 29).unwrap();
        assert_eq!(d.algebra.block_sizes(), &[1, 2]);
    }
}
