//! Hilbert modules over multi-matrix algebras.
//!
//! A module is a finite-dimensional complex vector space with a right action
//! of the base algebra and an algebra-valued inner product, *antilinear in
//! the first slot*: `⟨x, y·a⟩ = ⟨x,y⟩·a` and `⟨x,y⟩* = ⟨y,x⟩`. Elements are
//! coordinate vectors against a fixed basis; the action is stored as one
//! matrix per canonical algebra basis element and the inner product as the
//! full basis Gram tensor.
//!
//! Construction validates the axioms and builds the localization: the Hilbert
//! space obtained by tensoring with the block-diagonal faithful
//! representation and quotienting null vectors at the positivity threshold.
//! Every norm — of elements, of module maps, of amplified matrices — is the
//! spectral norm of a localized matrix. For module maps this equals the
//! completely bounded norm, so no separate cb machinery is needed at this
//! level.

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra};
use crate::eigh::eigh;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, RANK_CUT, ZERO};
use crate::tol::Tolerance;

/// Orthonormal-coordinate presentation of the localized Hilbert space
/// `X ⊗_A ℂ^N`.
#[derive(Debug, Clone)]
pub struct Localization {
    /// Rank of the localized space.
    pub rank: usize,
    /// `rank × (d·N)`: semi-inner-product coordinates → orthonormal coordinates.
    pub to_ortho: CMat,
    /// `(d·N) × rank`: orthonormal coordinates → representative vectors;
    /// `to_ortho · from_ortho = I`.
    pub from_ortho: CMat,
}

/// A Hilbert module over a multi-matrix algebra.
#[derive(Debug, Clone)]
pub struct HilbertModule {
    algebra: MultiMatrixAlgebra,
    dim: usize,
    /// `action[k]`: the matrix of `x ↦ x · e_k` for the k-th canonical basis
    /// element of the algebra.
    action: Vec<CMat>,
    /// Row-major `d×d` Gram tensor: `inner[p*d + q] = ⟨e_p, e_q⟩`.
    inner: Vec<AlgebraElement>,
    loc: Localization,
}

impl HilbertModule {
    /// Validate module data and precompute the localization.
    pub fn new(
        algebra: MultiMatrixAlgebra,
        dim: usize,
        action: Vec<CMat>,
        inner: Vec<AlgebraElement>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModule("module dimension must be positive".into()));
        }
        if action.len() != algebra.dim() {
            return Err(Error::InvalidModule(format!(
                "expected {} action matrices (one per algebra basis element), got {}",
                algebra.dim(),
                action.len()
            )));
        }
        for (k, m) in action.iter().enumerate() {
            if m.rows != dim || m.cols != dim || !m.all_finite() {
                return Err(Error::InvalidModule(format!(
                    "action matrix {k} must be finite {dim}x{dim}"
                )));
            }
        }
        if inner.len() != dim * dim {
            return Err(Error::InvalidModule(format!(
                "expected {} inner-product entries, got {}",
                dim * dim,
                inner.len()
            )));
        }
        for el in &inner {
            if el.algebra() != &algebra {
                return Err(Error::AlgebraMismatch(
                    "inner-product entry over the wrong algebra".into(),
                ));
            }
        }
        let module = {
            let loc = Localization { rank: 0, to_ortho: CMat::zeros(0, 0), from_ortho: CMat::zeros(0, 0) };
            HilbertModule { algebra, dim, action, inner, loc }
        };
        module.validate_action(tol)?;
        module.validate_inner(tol)?;
        let loc = module.build_localization(tol)?;
        Ok(HilbertModule { loc, ..module })
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action_matrices(&self) -> &[CMat] {
        &self.action
    }

    pub fn inner_tensor(&self, p: usize, q: usize) -> &AlgebraElement {
        &self.inner[p * self.dim + q]
    }

    pub fn localization(&self) -> &Localization {
        &self.loc
    }

    /// The matrix of `x ↦ x·a`.
    pub fn action_matrix(&self, a: &AlgebraElement) -> CMat {
        let coords = a.coords();
        let mut out = CMat::zeros(self.dim, self.dim);
        for (k, z) in coords.iter().enumerate() {
            if *z != ZERO {
                out = out.add(&self.action[k].scale(*z));
            }
        }
        out
    }

    pub fn apply_action(&self, x: &CMat, a: &AlgebraElement) -> CMat {
        self.action_matrix(a).mul(x)
    }

    /// Algebra-valued inner product of coordinate vectors (columns).
    pub fn inner_product(&self, x: &CMat, y: &CMat) -> AlgebraElement {
        assert_eq!(x.rows, self.dim, "inner_product: wrong x length");
        assert_eq!(y.rows, self.dim, "inner_product: wrong y length");
        let mut acc = self.algebra.zero();
        for p in 0..self.dim {
            let xp = x[(p, 0)].conj();
            if xp == ZERO {
                continue;
            }
            for q in 0..self.dim {
                let w = xp * y[(q, 0)];
                if w != ZERO {
                    acc = acc.add(&self.inner[p * self.dim + q].scale(w)).unwrap();
                }
            }
        }
        acc
    }

    /// Module norm `‖x‖ = ‖⟨x,x⟩‖^{1/2}`.
    pub fn element_norm(&self, x: &CMat) -> Result<f64> {
        Ok(self.inner_product(x, x).norm()?.max(0.0).sqrt())
    }

    /// The localized operator `x̂ : ℂ^N → X⊗_Aℂ^N` as a `rank × N` matrix.
    pub fn localize_vector(&self, x: &CMat) -> CMat {
        let n = self.algebra.rep_dim();
        self.loc.to_ortho.mul(&x.kron(&CMat::identity(n)))
    }

    fn validate_action(&self, tol: &Tolerance) -> Result<()> {
        let slack = tol.eq_slack(self.max_action_scale());
        // Unit acts as the identity.
        let unit_mat = self.action_matrix(&self.algebra.unit());
        let defect = unit_mat.max_abs_diff(&CMat::identity(self.dim));
        if defect > slack {
            return Err(Error::InvalidModule(format!(
                "unit does not act as identity (defect {defect:.3e})"
            )));
        }
        // Right-action axiom x·(ab) = (x·a)·b on basis pairs.
        for k in 0..self.algebra.dim() {
            let ek = self.algebra.basis_element(k);
            for l in 0..self.algebra.dim() {
                let el = self.algebra.basis_element(l);
                let prod = ek.mul(&el)?;
                let lhs = self.action_matrix(&prod);
                let rhs = self.action[l].mul(&self.action[k]);
                let defect = lhs.max_abs_diff(&rhs);
                if defect > slack {
                    return Err(Error::InvalidModule(format!(
                        "right action is not multiplicative on basis pair ({k},{l}), defect {defect:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn max_action_scale(&self) -> f64 {
        self.action.iter().map(|m| m.max_abs()).fold(1.0, f64::max)
    }

    fn validate_inner(&self, tol: &Tolerance) -> Result<()> {
        let scale = self.inner.iter().map(|e| e.max_abs()).fold(1.0, f64::max);
        let slack = tol.eq_slack(scale * self.max_action_scale() * self.dim as f64);
        let d = self.dim;
        // Hermitian symmetry ⟨e_p, e_q⟩* = ⟨e_q, e_p⟩.
        for p in 0..d {
            for q in 0..d {
                let defect = self.inner[p * d + q].star().max_abs_diff(&self.inner[q * d + p]);
                if defect > slack {
                    return Err(Error::InvalidModule(format!(
                        "inner product not Hermitian at ({p},{q}), defect {defect:.3e}"
                    )));
                }
            }
        }
        // Compatibility ⟨e_p, e_q · e_k⟩ = ⟨e_p, e_q⟩ e_k.
        for k in 0..self.algebra.dim() {
            let ek = self.algebra.basis_element(k);
            for p in 0..d {
                for q in 0..d {
                    let mut lhs = self.algebra.zero();
                    for v in 0..d {
                        let w = self.action[k][(v, q)];
                        if w != ZERO {
                            lhs = lhs.add(&self.inner[p * d + v].scale(w))?;
                        }
                    }
                    let rhs = self.inner[p * d + q].mul(&ek)?;
                    let defect = lhs.max_abs_diff(&rhs);
                    if defect > slack {
                        return Err(Error::InvalidModule(format!(
                            "inner product incompatible with the action at ({p},{q}) against basis element {k}, defect {defect:.3e}"
                        )));
                    }
                }
            }
        }
        // Definiteness through the trace Gram.
        let trace_gram = CMat::from_fn(d, d, |p, q| self.inner[p * d + q].trace());
        let (tvals, _) = eigh(&trace_gram)?;
        let tmax = tvals.last().copied().unwrap_or(0.0).max(0.0);
        let floor = tol.psd_floor(d, tmax);
        if tvals[0] < -floor {
            return Err(Error::InvalidModule(format!(
                "inner product not positive (trace Gram eigenvalue {:.3e})",
                tvals[0]
            )));
        }
        if tvals[0] <= floor {
            return Err(Error::DegenerateInnerProduct(format!(
                "smallest trace-Gram eigenvalue {:.3e} below threshold {floor:.3e}",
                tvals[0]
            )));
        }
        Ok(())
    }

    /// Build the big localization Gram and its orthonormal quotient basis,
    /// kept eigenvectors ordered by descending eigenvalue.
    fn build_localization(&self, tol: &Tolerance) -> Result<Localization> {
        let d = self.dim;
        let n = self.algebra.rep_dim();
        let mut gram = CMat::zeros(d * n, d * n);
        for p in 0..d {
            for q in 0..d {
                let rep = self.inner[p * d + q].rep();
                for s in 0..n {
                    for t in 0..n {
                        gram[(p * n + s, q * n + t)] = rep[(s, t)];
                    }
                }
            }
        }
        let (vals, vecs) = eigh(&gram)?;
        let lam_max = vals.last().copied().unwrap_or(0.0).max(0.0);
        let floor = tol.psd_floor(d * n, lam_max);
        if vals[0] < -floor {
            return Err(Error::InvalidModule(format!(
                "localization Gram not positive (eigenvalue {:.3e})",
                vals[0]
            )));
        }
        let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > floor).collect();
        let rank = kept.len();
        if rank == 0 {
            return Err(Error::DegenerateInnerProduct(
                "localization collapses to the zero space".into(),
            ));
        }
        let mut to_ortho = CMat::zeros(rank, d * n);
        let mut from_ortho = CMat::zeros(d * n, rank);
        for (a, &i) in kept.iter().enumerate() {
            let sqrt_l = vals[i].sqrt();
            let u = vecs.column(i);
            for row in 0..d * n {
                to_ortho[(a, row)] = u[(row, 0)].conj() * sqrt_l;
                from_ortho[(row, a)] = u[(row, 0)] / sqrt_l;
            }
        }
        Ok(Localization { rank, to_ortho, from_ortho })
    }
}

/// Localized matrix of a module map `t : source → target` (given on
/// coordinates) between modules over the same algebra.
pub fn localized_map(source: &HilbertModule, target: &HilbertModule, t: &CMat) -> Result<CMat> {
    if source.algebra() != target.algebra() {
        return Err(Error::AlgebraMismatch("localized_map across different algebras".into()));
    }
    assert_eq!(t.rows, target.dim(), "map has wrong target dimension");
    assert_eq!(t.cols, source.dim(), "map has wrong source dimension");
    let n = source.algebra().rep_dim();
    let big = t.kron(&CMat::identity(n));
    Ok(target.loc.to_ortho.mul(&big).mul(&source.loc.from_ortho))
}

/// Operator norm of a module map. By the localization this is also its
/// completely bounded norm.
pub fn map_op_norm(source: &HilbertModule, target: &HilbertModule, t: &CMat) -> Result<f64> {
    localized_map(source, target, t)?.operator_norm()
}

/// Adjoint of a module map, solved from `⟨t e_p, e_q⟩ = ⟨e_p, s e_q⟩`, with
/// the achieved residual. Fails with [`Error::NotAdjointable`] when the
/// residual exceeds the tolerance.
pub fn adjoint_of(
    source: &HilbertModule,
    target: &HilbertModule,
    t: &CMat,
    tol: &Tolerance,
) -> Result<(CMat, f64)> {
    if source.algebra() != target.algebra() {
        return Err(Error::AlgebraMismatch("adjoint_of across different algebras".into()));
    }
    let (ds, dt) = (source.dim(), target.dim());
    assert_eq!(t.rows, dt, "map has wrong target dimension");
    assert_eq!(t.cols, ds, "map has wrong source dimension");
    let adim = source.algebra().dim();
    // K[(p,coord), v] = coords(⟨e_p, e_v⟩_source)[coord]; same system for
    // every column of the unknown.
    let mut k = CMat::zeros(ds * adim, ds);
    for p in 0..ds {
        for v in 0..ds {
            for (coord, z) in source.inner_tensor(p, v).coords().into_iter().enumerate() {
                k[(p * adim + coord, v)] = z;
            }
        }
    }
    let kp = k.pinv(RANK_CUT)?;
    let mut s = CMat::zeros(ds, dt);
    let mut residual = 0.0f64;
    let mut scale = 1.0f64;
    for q in 0..dt {
        let eq = CMat::from_fn(dt, 1, |i, _| if i == q { c64(1.0, 0.0) } else { ZERO });
        let mut rhs = CMat::zeros(ds * adim, 1);
        for p in 0..ds {
            let ep = CMat::from_fn(ds, 1, |i, _| if i == p { c64(1.0, 0.0) } else { ZERO });
            let val = target.inner_product(&t.mul(&ep), &eq);
            for (coord, z) in val.coords().into_iter().enumerate() {
                rhs[(p * adim + coord, 0)] = z;
                scale = scale.max(z.norm());
            }
        }
        let col = kp.mul(&rhs);
        residual = residual.max(k.mul(&col).max_abs_diff(&rhs));
        s.set_column(q, &col);
    }
    let slack = tol.eq_slack(scale) * 1e3;
    if residual > slack {
        return Err(Error::NotAdjointable(format!(
            "adjoint system residual {residual:.3e} exceeds {slack:.3e}"
        )));
    }
    Ok((s, residual))
}

/// Rank-one operator `z ↦ y·⟨x, z⟩` from `source` to `target`.
pub fn rank_one(
    target: &HilbertModule,
    source: &HilbertModule,
    y: &CMat,
    x: &CMat,
) -> CMat {
    assert_eq!(y.rows, target.dim(), "rank_one: wrong y length");
    assert_eq!(x.rows, source.dim(), "rank_one: wrong x length");
    let mut out = CMat::zeros(target.dim(), source.dim());
    for q in 0..source.dim() {
        let eq = CMat::from_fn(source.dim(), 1, |i, _| if i == q { c64(1.0, 0.0) } else { ZERO });
        let a = source.inner_product(x, &eq);
        out.set_column(q, &target.apply_action(y, &a));
    }
    out
}

/// Orthonormal basis (in the Hilbert–Schmidt sense, as vectorized matrices)
/// of the span of basis rank-one operators from `source` to `target`. In
/// finite dimension this span is all bounded module maps.
pub fn compacts_basis(source: &HilbertModule, target: &HilbertModule) -> Result<Vec<CMat>> {
    let (ds, dt) = (source.dim(), target.dim());
    let mut columns = CMat::zeros(dt * ds, dt * ds);
    let mut col = 0;
    for b in 0..dt {
        let eb = CMat::from_fn(dt, 1, |i, _| if i == b { c64(1.0, 0.0) } else { ZERO });
        for p in 0..ds {
            let ep = CMat::from_fn(ds, 1, |i, _| if i == p { c64(1.0, 0.0) } else { ZERO });
            let op = rank_one(target, source, &eb, &ep);
            let v = op.vectorize();
            for row in 0..dt * ds {
                columns[(row, col)] = v[(row, 0)];
            }
            col += 1;
        }
    }
    let basis = columns.column_space_basis(RANK_CUT)?;
    Ok((0..basis.cols).map(|j| CMat::from_vector(&basis.column(j), dt, ds)).collect())
}

/// The compact operators `𝔎(F,F)` of a module in both pictures at once: an
/// orthonormal coordinate-map basis together with the localized matrices,
/// and the residual-checked inversion from the localized picture back to
/// coordinate maps.
#[derive(Debug, Clone)]
pub struct CompactsPicture {
    /// Orthonormal (Hilbert–Schmidt) coordinate-map basis of the compacts.
    pub coord_basis: Vec<CMat>,
    /// Localized matrices of the basis, same order.
    pub localized: Vec<CMat>,
    /// Localized carrier dimension.
    pub carrier_dim: usize,
    stack: CMat,
    stack_pinv: CMat,
}

impl CompactsPicture {
    pub fn build(module: &HilbertModule) -> Result<Self> {
        let coord_basis = compacts_basis(module, module)?;
        let localized: Vec<CMat> = coord_basis
            .iter()
            .map(|t| localized_map(module, module, t))
            .collect::<Result<_>>()?;
        let h = module.localization().rank;
        let mut stack = CMat::zeros(h * h, coord_basis.len());
        for (j, l) in localized.iter().enumerate() {
            stack.set_column(j, &l.vectorize());
        }
        let stack_pinv = stack.pinv(RANK_CUT)?;
        Ok(CompactsPicture { coord_basis, localized, carrier_dim: h, stack, stack_pinv })
    }

    pub fn dim(&self) -> usize {
        self.coord_basis.len()
    }

    /// Coordinate map whose localization is the given matrix; fails when the
    /// matrix is not in the localized compacts span.
    pub fn coordinate_map_of(&self, loc: &CMat) -> Result<CMat> {
        let v = loc.vectorize();
        let coeffs = self.stack_pinv.mul(&v);
        let residual = self.stack.mul(&coeffs).max_abs_diff(&v);
        if residual > 1e-8 * loc.max_abs().max(1.0) {
            return Err(Error::DegenerateRepresentation(format!(
                "matrix lies outside the localized compacts (residual {residual:.3e})"
            )));
        }
        let mut t = CMat::zeros(self.coord_basis[0].rows, self.coord_basis[0].cols);
        for (j, b) in self.coord_basis.iter().enumerate() {
            t = t.add(&b.scale(coeffs[(j, 0)]));
        }
        Ok(t)
    }
}

/// Orthonormal basis of the space of all module maps `source → target`
/// (solutions of the intertwining equations with the two actions).
pub fn module_map_space(source: &HilbertModule, target: &HilbertModule) -> Result<Vec<CMat>> {
    if source.algebra() != target.algebra() {
        return Err(Error::AlgebraMismatch("module_map_space across different algebras".into()));
    }
    let (ds, dt) = (source.dim(), target.dim());
    let adim = source.algebra().dim();
    // Constraint rows: for every algebra basis element k and every entry
    // (i,j): (T · act_s(e_k) − act_t(e_k) · T)[i,j] = 0.
    let unknowns = dt * ds;
    let mut constraint = CMat::zeros(adim * unknowns, unknowns);
    for k in 0..adim {
        let s_act = &source.action_matrices()[k];
        let t_act = &target.action_matrices()[k];
        for i in 0..dt {
            for j in 0..ds {
                let row = k * unknowns + i * ds + j;
                // Σ_v T[i,v] s_act[v,j] − Σ_u t_act[i,u] T[u,j].
                for v in 0..ds {
                    constraint[(row, i * ds + v)] += s_act[(v, j)];
                }
                for u in 0..dt {
                    constraint[(row, u * ds + j)] -= t_act[(i, u)];
                }
            }
        }
    }
    // Null space = column space of (I − pinv·constraint)… simpler: eigenvectors
    // of constraint†·constraint with negligible eigenvalue.
    let gram = constraint.dagger().mul(&constraint);
    let (vals, vecs) = eigh(&gram)?;
    let lam_max = vals.last().copied().unwrap_or(0.0).max(1.0);
    let cut = (RANK_CUT * RANK_CUT) * lam_max;
    let mut out = Vec::new();
    for i in 0..vals.len() {
        if vals[i] <= cut {
            out.push(CMat::from_vector(&vecs.column(i), dt, ds));
        }
    }
    Ok(out)
}

/// Direct sum of modules over a common algebra.
pub fn direct_sum(parts: &[&HilbertModule], tol: &Tolerance) -> Result<HilbertModule> {
    let algebra = match parts.first() {
        Some(m) => m.algebra().clone(),
        None => return Err(Error::InvalidModule("direct sum of no modules".into())),
    };
    for m in parts {
        if m.algebra() != &algebra {
            return Err(Error::AlgebraMismatch("direct sum across different algebras".into()));
        }
    }
    let dim: usize = parts.iter().map(|m| m.dim()).sum();
    let mut action = Vec::with_capacity(algebra.dim());
    for k in 0..algebra.dim() {
        let blocks: Vec<Vec<CMat>> = parts
            .iter()
            .enumerate()
            .map(|(i, m)| {
                parts
                    .iter()
                    .enumerate()
                    .map(|(j, mj)| {
                        if i == j {
                            m.action_matrices()[k].clone()
                        } else {
                            CMat::zeros(m.dim(), mj.dim())
                        }
                    })
                    .collect()
            })
            .collect();
        action.push(CMat::from_blocks(&blocks));
    }
    let mut inner = vec![algebra.zero(); dim * dim];
    let mut off_p = 0;
    for part in parts {
        for p in 0..part.dim() {
            for q in 0..part.dim() {
                inner[(off_p + p) * dim + (off_p + q)] = part.inner_tensor(p, q).clone();
            }
        }
        off_p += part.dim();
    }
    HilbertModule::new(algebra, dim, action, inner, tol)
}

/// The algebra itself as the standard right module over itself, with
/// `⟨a, b⟩ = a* b`.
pub fn standard_module(algebra: &MultiMatrixAlgebra, tol: &Tolerance) -> Result<HilbertModule> {
    let d = algebra.dim();
    let mut action = Vec::with_capacity(d);
    for k in 0..d {
        let ek = algebra.basis_element(k);
        let mut m = CMat::zeros(d, d);
        for c in 0..d {
            let prod = algebra.basis_element(c).mul(&ek)?;
            for (row, z) in prod.coords().into_iter().enumerate() {
                m[(row, c)] = z;
            }
        }
        action.push(m);
    }
    let mut inner = Vec::with_capacity(d * d);
    for p in 0..d {
        let ep = algebra.basis_element(p);
        for q in 0..d {
            let eq = algebra.basis_element(q);
            inner.push(ep.star().mul(&eq)?);
        }
    }
    HilbertModule::new(algebra.clone(), d, action, inner, tol)
}

/// `ℂ^n` as a Hilbert space, i.e. the standard module over the one-block
/// algebra `M_1`.
pub fn hilbert_space(n: usize, tol: &Tolerance) -> Result<HilbertModule> {
    let algebra = MultiMatrixAlgebra::new(vec![1])?;
    let action = vec![CMat::identity(n)];
    let mut inner = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            inner.push(if p == q {
                algebra.unit()
            } else {
                algebra.zero()
            });
        }
    }
    HilbertModule::new(algebra, n, action, inner, tol)
}
