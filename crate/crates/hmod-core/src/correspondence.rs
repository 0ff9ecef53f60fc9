//! Correspondences: Hilbert modules with a compatible left action.
//!
//! A correspondence from `A` to `B` is a Hilbert `B`-module together with a
//! unital *-homomorphism of `A` into its adjointable operators. The left
//! action is stored as one coordinate matrix per canonical `A`-basis element;
//! validation checks multiplicativity, unitality, commutation with the right
//! action, and adjointability against the module inner product.
//!
//! The conjugate of a correspondence reverses the two algebras: coordinates
//! are conjugated, the old left action (starred) becomes the right action,
//! and the inner product is *not* determined by the original one — it is a
//! separate piece of data, the candidate inner product, supplied by the
//! caller and validated here.

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{CMat, ZERO};
use crate::module::{localized_map, standard_module, HilbertModule};
use crate::tol::Tolerance;

/// A correspondence from one multi-matrix algebra to another.
#[derive(Debug, Clone)]
pub struct Correspondence {
    from: MultiMatrixAlgebra,
    module: HilbertModule,
    /// `left_action[k]`: the matrix of `f ↦ e_k · f` for the k-th canonical
    /// basis element of the source algebra.
    left_action: Vec<CMat>,
}

impl Correspondence {
    pub fn new(
        from: MultiMatrixAlgebra,
        module: HilbertModule,
        left_action: Vec<CMat>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let d = module.dim();
        if left_action.len() != from.dim() {
            return Err(Error::InvalidAction(format!(
                "expected {} left-action matrices, got {}",
                from.dim(),
                left_action.len()
            )));
        }
        for (k, m) in left_action.iter().enumerate() {
            if m.rows != d || m.cols != d || !m.all_finite() {
                return Err(Error::InvalidAction(format!(
                    "left-action matrix {k} must be finite {d}x{d}"
                )));
            }
        }
        let corr = Correspondence { from, module, left_action };
        corr.validate(tol)?;
        Ok(corr)
    }

    fn validate(&self, tol: &Tolerance) -> Result<()> {
        let d = self.module.dim();
        let left_scale = self.left_action.iter().map(|m| m.max_abs()).fold(1.0, f64::max);
        let inner_scale = (0..d)
            .flat_map(|p| (0..d).map(move |q| (p, q)))
            .map(|(p, q)| self.module.inner_tensor(p, q).max_abs())
            .fold(1.0, f64::max);
        let slack = tol.eq_slack(left_scale * left_scale * inner_scale * d as f64);
        // Unital.
        let unit = self.left_action_matrix(&self.from.unit());
        let defect = unit.max_abs_diff(&CMat::identity(d));
        if defect > slack {
            return Err(Error::InvalidAction(format!(
                "left action is not unital (defect {defect:.3e})"
            )));
        }
        // Multiplicative: (e_k e_l)·f = e_k·(e_l·f).
        for k in 0..self.from.dim() {
            for l in 0..self.from.dim() {
                let prod = self.from.basis_element(k).mul(&self.from.basis_element(l))?;
                let lhs = self.left_action_matrix(&prod);
                let rhs = self.left_action[k].mul(&self.left_action[l]);
                let defect = lhs.max_abs_diff(&rhs);
                if defect > slack {
                    return Err(Error::InvalidAction(format!(
                        "left action not multiplicative on basis pair ({k},{l}), defect {defect:.3e}"
                    )));
                }
            }
        }
        // Commutes with the right action.
        for k in 0..self.from.dim() {
            for l in 0..self.module.algebra().dim() {
                let right = &self.module.action_matrices()[l];
                let defect = self.left_action[k].mul(right).max_abs_diff(&right.mul(&self.left_action[k]));
                if defect > slack {
                    return Err(Error::InvalidAction(format!(
                        "left action does not commute with the right action on pair ({k},{l}), defect {defect:.3e}"
                    )));
                }
            }
        }
        // Adjointable with adjoint given by the star: ⟨a·f, g⟩ = ⟨f, a*·g⟩.
        for k in 0..self.from.dim() {
            let star_mat = self.left_action_matrix(&self.from.basis_element(k).star());
            for p in 0..d {
                let ep = basis_column(d, p);
                let lhs_vec = self.left_action[k].mul(&ep);
                for q in 0..d {
                    let eq = basis_column(d, q);
                    let lhs = self.module.inner_product(&lhs_vec, &eq);
                    let rhs = self.module.inner_product(&ep, &star_mat.mul(&eq));
                    let defect = lhs.max_abs_diff(&rhs);
                    if defect > slack {
                        return Err(Error::InvalidAction(format!(
                            "left action of basis element {k} is not star-adjointable at ({p},{q}), defect {defect:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Source algebra (acting on the left).
    pub fn from_algebra(&self) -> &MultiMatrixAlgebra {
        &self.from
    }

    /// Target algebra (acting on the right, carrying the inner product).
    pub fn to_algebra(&self) -> &MultiMatrixAlgebra {
        self.module.algebra()
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn left_matrices(&self) -> &[CMat] {
        &self.left_action
    }

    /// The matrix of `f ↦ a·f`.
    pub fn left_action_matrix(&self, a: &AlgebraElement) -> CMat {
        let coords = a.coords();
        let mut out = CMat::zeros(self.dim(), self.dim());
        for (k, z) in coords.iter().enumerate() {
            if *z != ZERO {
                out = out.add(&self.left_action[k].scale(*z));
            }
        }
        out
    }

    /// Localized matrix of the left action of `a`.
    pub fn localized_left(&self, a: &AlgebraElement) -> Result<CMat> {
        localized_map(&self.module, &self.module, &self.left_action_matrix(a))
    }
}

fn basis_column(d: usize, p: usize) -> CMat {
    CMat::from_fn(d, 1, |i, _| if i == p { crate::linalg::c64(1.0, 0.0) } else { ZERO })
}

/// The algebra itself as the identity correspondence from `a` to `a`.
pub fn identity_correspondence(a: &MultiMatrixAlgebra, tol: &Tolerance) -> Result<Correspondence> {
    let module = standard_module(a, tol)?;
    let d = a.dim();
    let mut left = Vec::with_capacity(d);
    for k in 0..d {
        let ek = a.basis_element(k);
        let mut m = CMat::zeros(d, d);
        for c in 0..d {
            let prod = ek.mul(&a.basis_element(c))?;
            for (row, z) in prod.coords().into_iter().enumerate() {
                m[(row, c)] = z;
            }
        }
        left.push(m);
    }
    Correspondence::new(a.clone(), module, left, tol)
}

/// The block-diagonal faithful representation of `b` as a correspondence
/// from `b` to the scalars. This is how a Hilbert-space representation
/// enters tensor computations.
pub fn rep_correspondence(b: &MultiMatrixAlgebra, tol: &Tolerance) -> Result<Correspondence> {
    let n = b.rep_dim();
    let module = crate::module::hilbert_space(n, tol)?;
    let left: Vec<CMat> = (0..b.dim()).map(|k| b.basis_element(k).rep()).collect();
    Correspondence::new(b.clone(), module, left, tol)
}

/// Candidate inner product for the conjugate of a correspondence: a full
/// Gram tensor with values in the *source* algebra of the original
/// correspondence, indexed against the conjugated coordinate basis.
#[derive(Debug, Clone)]
pub struct InnerProductCandidate {
    /// Row-major `d×d` entries, `entries[p*d+q] = ⟨ē_p, ē_q⟩`.
    pub entries: Vec<AlgebraElement>,
}

impl InnerProductCandidate {
    pub fn new(entries: Vec<AlgebraElement>) -> Self {
        InnerProductCandidate { entries }
    }

    pub fn dim(&self) -> Option<usize> {
        let d2 = self.entries.len();
        let d = (d2 as f64).sqrt().round() as usize;
        (d * d == d2).then_some(d)
    }
}

/// Build the conjugate correspondence of `f` with the given candidate inner
/// product. If `f` goes from `A` to `B`, the result goes from `B` to `A`:
/// conjugated coordinates, right `A`-action `x̄·a = conj(a*·x)`, left
/// `B`-action `b·x̄ = conj(x·b*)`, inner product from the candidate.
///
/// Fails when the candidate does not satisfy the Hilbert-module axioms for
/// this action or leaves the left action non-adjointable.
pub fn conjugate_correspondence(
    f: &Correspondence,
    candidate: &InnerProductCandidate,
    tol: &Tolerance,
) -> Result<Correspondence> {
    let a = f.from_algebra().clone();
    let b = f.to_algebra().clone();
    let d = f.dim();
    if candidate.dim() != Some(d) {
        return Err(Error::CandidateInvalid(format!(
            "candidate inner product has {} entries, expected {}",
            candidate.entries.len(),
            d * d
        )));
    }
    for e in &candidate.entries {
        if e.algebra() != &a {
            return Err(Error::CandidateInvalid(
                "candidate inner product valued in the wrong algebra".into(),
            ));
        }
    }
    let right: Vec<CMat> = (0..a.dim())
        .map(|k| f.left_action_matrix(&a.basis_element(k).star()).conj())
        .collect();
    let left: Vec<CMat> = (0..b.dim())
        .map(|l| f.module().action_matrix(&b.basis_element(l).star()).conj())
        .collect();
    let module = HilbertModule::new(a, d, right, candidate.entries.clone(), tol).map_err(|e| {
        match e {
            Error::InvalidModule(msg) | Error::DegenerateInnerProduct(msg) => {
                Error::CandidateInvalid(format!("candidate inner product rejected: {msg}"))
            }
            other => other,
        }
    })?;
    Correspondence::new(b, module, left, tol).map_err(|e| match e {
        Error::InvalidAction(msg) => Error::CandidateInvalid(format!(
            "left action not compatible with candidate inner product: {msg}"
        )),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_correspondence_validates() {
        let a = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let c = identity_correspondence(&a, &tol()).unwrap();
        assert_eq!(c.from_algebra(), c.to_algebra());
        assert_eq!(c.dim(), a.dim());
    }

    #[test]
    fn rep_correspondence_left_action_is_isometric() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let c = rep_correspondence(&b, &tol()).unwrap();
        assert_eq!(c.to_algebra().dim(), 1);
        let mut r = crate::linalg::testutil::rng(3);
        let el = b
            .element_from_blocks(vec![
                crate::linalg::testutil::random_cmat(&mut r, 1, 1),
                crate::linalg::testutil::random_cmat(&mut r, 2, 2),
            ])
            .unwrap();
        let loc = c.localized_left(&el).unwrap();
        assert_abs_diff_eq!(loc.operator_norm().unwrap(), el.norm().unwrap(), epsilon = 1e-11);
        // Multiplicativity in the localized picture.
        let sq = el.mul(&el).unwrap();
        assert!(c.localized_left(&sq).unwrap().max_abs_diff(&loc.mul(&loc)) < 1e-10);
    }

    #[test]
    fn non_star_preserving_left_action_is_rejected() {
        let a = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let module = standard_module(&a, &tol()).unwrap();
        // Conjugation by an invertible non-unitary s stays multiplicative,
        // unital, and commutes with right multiplication, but is not
        // star-adjointable.
        let s = CMat::from_rows(&[
            vec![c64(1.0, 0.0), c64(1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        ])
        .unwrap();
        let s_inv = CMat::from_rows(&[
            vec![c64(1.0, 0.0), c64(-1.0, 0.0)],
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        ])
        .unwrap();
        let mut left = Vec::new();
        for k in 0..a.dim() {
            let (_, i, j) = a.basis_unpack(k);
            let eij = CMat::from_fn(2, 2, |r, c| {
                if r == i && c == j {
                    c64(1.0, 0.0)
                } else {
                    c64(0.0, 0.0)
                }
            });
            let twisted = s.mul(&eij).mul(&s_inv);
            // Left multiplication by `twisted` on coordinates of M_2.
            let mut m = CMat::zeros(4, 4);
            for c in 0..4 {
                let (_, ci, cj) = a.basis_unpack(c);
                let ec = CMat::from_fn(2, 2, |r, cc| {
                    if r == ci && cc == cj {
                        c64(1.0, 0.0)
                    } else {
                        c64(0.0, 0.0)
                    }
                });
                let prod = twisted.mul(&ec);
                let el = a.element_from_blocks(vec![prod]).unwrap();
                for (row, z) in el.coords().into_iter().enumerate() {
                    m[(row, c)] = z;
                }
            }
            left.push(m);
        }
        let err = Correspondence::new(a, module, left, &tol()).unwrap_err();
        assert!(matches!(err, Error::InvalidAction(_)));
    }

    #[test]
    fn conjugate_of_identity_with_product_candidate_validates() {
        let a = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let f = identity_correspondence(&a, &tol()).unwrap();
        // Candidate ⟨x̄, ȳ⟩ = x y* over the source algebra.
        let d = a.dim();
        let mut entries = Vec::with_capacity(d * d);
        for p in 0..d {
            for q in 0..d {
                entries.push(a.basis_element(p).mul(&a.basis_element(q).star()).unwrap());
            }
        }
        let candidate = InnerProductCandidate::new(entries);
        let fc = conjugate_correspondence(&f, &candidate, &tol()).unwrap();
        assert_eq!(fc.from_algebra(), &a);
        assert_eq!(fc.to_algebra(), &a);
        assert_eq!(fc.dim(), d);
    }

    #[test]
    fn degenerate_candidate_is_rejected() {
        let a = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let f = identity_correspondence(&a, &tol()).unwrap();
        let d = a.dim();
        let entries = vec![a.zero(); d * d];
        let err =
            conjugate_correspondence(&f, &InnerProductCandidate::new(entries), &tol()).unwrap_err();
        assert!(matches!(err, Error::CandidateInvalid(_)));
    }
}
