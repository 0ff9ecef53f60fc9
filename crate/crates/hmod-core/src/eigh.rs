//! Hermitian eigendecomposition, implemented in-house.
//!
//! Pipeline: complex Householder reduction to Hermitian tridiagonal form,
//! diagonal phase rotation to make the off-diagonal real non-negative, then
//! implicit-shift QL iteration on the real symmetric tridiagonal matrix with
//! eigenvector accumulation. Eigenvalues are returned in ascending order with
//! ties broken by the deterministic iteration order, so repeated runs produce
//! bit-identical output.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, C64, ONE};
use crate::tol::Tolerance;

/// Maximum QL iterations per eigenvalue before reporting failure.
const MAX_QL_ITER: usize = 80;

/// Eigendecomposition of (the Hermitian part of) a square matrix.
///
/// Returns `(values, vectors)` with `values` ascending and `vectors` unitary,
/// columns matching `values`, so `m ≈ V diag(values) V†`. The input is
/// symmetrized as `(m + m†)/2` first; callers that need Hermitian-ness
/// *checked* should go through [`hermitian_spectrum`].
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    assert!(m.is_square(), "eigh requires a square matrix");
    if !m.all_finite() {
        return Err(Error::InvalidMatrix("non-finite entries in eigh".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let mut h = m.hermitize();
    let mut q = CMat::identity(n);

    // Householder reduction to Hermitian tridiagonal form.
    for k in 0..n.saturating_sub(2) {
        let mut xnorm_sq = 0.0;
        for i in k + 1..n {
            xnorm_sq += h[(i, k)].norm_sqr();
        }
        let xnorm = xnorm_sq.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = h[(k + 1, k)];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { ONE };
        // Reflector v, supported on rows k+1..n.
        let mut v = vec![c64(0.0, 0.0); n - k - 1];
        for i in 0..v.len() {
            v[i] = h[(k + 1 + i, k)];
        }
        v[0] += phase * xnorm;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // p = β · H_sub · v on the trailing block.
        let sub = n - k - 1;
        let mut p = vec![c64(0.0, 0.0); sub];
        for i in 0..sub {
            let mut acc = c64(0.0, 0.0);
            for j in 0..sub {
                acc += h[(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = acc * beta;
        }
        let vp: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kappa = vp * (beta / 2.0);
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        // H_sub ← H_sub − v w† − w v†.
        for i in 0..sub {
            for j in 0..sub {
                let delta = v[i] * w[j].conj() + w[i] * v[j].conj();
                let entry = h[(k + 1 + i, k + 1 + j)] - delta;
                h[(k + 1 + i, k + 1 + j)] = entry;
            }
        }
        // Column k collapses onto the sub-diagonal.
        let head = -phase * xnorm;
        h[(k + 1, k)] = head;
        h[(k, k + 1)] = head.conj();
        for i in k + 2..n {
            h[(i, k)] = c64(0.0, 0.0);
            h[(k, i)] = c64(0.0, 0.0);
        }
        // Accumulate Q ← Q · (I − β v v†) on columns k+1..n.
        for row in 0..n {
            let mut t = c64(0.0, 0.0);
            for j in 0..sub {
                t += q[(row, k + 1 + j)] * v[j];
            }
            let t = t * beta;
            for j in 0..sub {
                let upd = q[(row, k + 1 + j)] - t * v[j].conj();
                q[(row, k + 1 + j)] = upd;
            }
        }
    }

    // Extract the tridiagonal data and rotate the off-diagonal real.
    let mut d: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut e = vec![0.0f64; n];
    let mut ph = ONE;
    for j in 0..n.saturating_sub(1) {
        let off = h[(j + 1, j)];
        let m_abs = off.norm();
        let step = if m_abs > 0.0 { off / m_abs } else { ONE };
        e[j] = m_abs;
        let next_ph = ph * step;
        // Column j+1 of Q absorbs the accumulated phase.
        for row in 0..n {
            let upd = q[(row, j + 1)] * next_ph;
            q[(row, j + 1)] = upd;
        }
        ph = next_ph;
    }

    tqli(&mut d, &mut e, &mut q)?;

    // Sort ascending, deterministically.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap().then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        vectors.set_column(new_col, &q.column(old_col));
    }
    Ok((values, vectors))
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, accumulating the
/// real rotations into the complex eigenvector matrix `q`.
///
/// `d` holds the diagonal, `e[i]` couples `d[i]` and `d[i+1]` (the last slot
/// is workspace).
fn tqli(d: &mut [f64], e: &mut [f64], q: &mut CMat) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let fsign = |a: f64, b: f64| if b >= 0.0 { a.abs() } else { -a.abs() };
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < 1e-300 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::NumericalFailure(format!(
                    "QL iteration did not converge for eigenvalue index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + fsign(r, g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut restarted = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    restarted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..q.rows {
                    let f2 = q[(row, i + 1)];
                    let qi = q[(row, i)];
                    q[(row, i + 1)] = qi.scale(s) + f2.scale(c);
                    q[(row, i)] = qi.scale(c) - f2.scale(s);
                }
            }
            if restarted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Validated Hermitian spectrum: checks Hermitian-ness against the tolerance,
/// decomposes, and enforces the reconstruction residual
/// `‖m − V diag(λ) V†‖_F ≤ 1e-10 · ‖m‖_F`.
pub fn hermitian_spectrum(m: &CMat, tol: &Tolerance) -> Result<(Vec<f64>, CMat)> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "hermitian_spectrum needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let scale = m.frob_norm();
    let defect = m.hermitian_defect();
    if defect > tol.eq_slack(scale) {
        return Err(Error::NotHermitian(format!(
            "defect {defect:.3e} exceeds slack {:.3e}",
            tol.eq_slack(scale)
        )));
    }
    let (values, vectors) = eigh(m)?;
    let recon = reconstruct(&values, &vectors);
    let residual = recon.sub(&m.hermitize()).frob_norm();
    if residual > 1e-10 * scale.max(f64::MIN_POSITIVE) && residual > 0.0 {
        return Err(Error::NumericalFailure(format!(
            "eigendecomposition residual {residual:.3e} exceeds 1e-10 · ‖m‖"
        )));
    }
    Ok((values, vectors))
}

/// `V diag(values) V†`.
pub fn reconstruct(values: &[f64], vectors: &CMat) -> CMat {
    let n = vectors.rows;
    let mut lam = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        lam[(i, i)] = c64(v, 0.0);
    }
    vectors.mul(&lam).mul(&vectors.dagger())
}

/// PSD check: Hermitian within the equality tolerance, then smallest
/// eigenvalue at least `-tol.psd_floor(dim, ‖m‖)`.
pub fn is_psd(m: &CMat, tol: &Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix("is_psd needs a square matrix".into()));
    }
    let defect = m.hermitian_defect();
    if defect > tol.eq_slack(m.frob_norm()) {
        return Err(Error::NotHermitian(format!("defect {defect:.3e} in is_psd")));
    }
    if m.rows == 0 {
        return Ok(true);
    }
    let (values, _) = eigh(m)?;
    let spec_norm = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let floor = tol.psd_floor(m.rows, spec_norm);
    Ok(values[0] >= -floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::*;
    use crate::linalg::RANK_CUT;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn check_decomposition(m: &CMat, tag: &str) {
        let (values, vectors) = eigh(m).unwrap();
        let n = m.rows;
        // Ascending.
        for w in values.windows(2) {
            assert!(w[0] <= w[1], "{tag}: eigenvalues not ascending");
        }
        // Unitary.
        let unitary_defect =
            vectors.dagger().mul(&vectors).max_abs_diff(&CMat::identity(n));
        assert!(unitary_defect < 1e-11, "{tag}: vectors not unitary ({unitary_defect:.2e})");
        // Reconstruction.
        let residual = reconstruct(&values, &vectors).sub(&m.hermitize()).frob_norm();
        let scale = m.frob_norm().max(1.0);
        assert!(residual < 1e-11 * scale, "{tag}: residual {residual:.2e}");
    }

    #[test]
    fn hand_values_two_by_two_real() {
        let m = CMat::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (values, _) = eigh(&m).unwrap();
        assert_abs_diff_eq!(values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(values[1], 1.0, epsilon = 1e-14);
        check_decomposition(&m, "flip");
    }

    #[test]
    fn hand_values_two_by_two_complex() {
        // [[2, i], [−i, 2]] has eigenvalues 1 and 3.
        let m = CMat::from_rows(&[
            vec![c64(2.0, 0.0), c64(0.0, 1.0)],
            vec![c64(0.0, -1.0), c64(2.0, 0.0)],
        ])
        .unwrap();
        let (values, _) = eigh(&m).unwrap();
        assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(values[1], 3.0, epsilon = 1e-13);
        check_decomposition(&m, "pauli-like");
    }

    #[test]
    fn hand_values_three_by_three() {
        // Circulant-flavored symmetric matrix with known spectrum:
        // [[0,1,0],[1,0,1],[0,1,0]] has eigenvalues −√2, 0, √2.
        let m = CMat::from_real(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let (values, _) = eigh(&m).unwrap();
        assert_abs_diff_eq!(values[0], -(2.0f64.sqrt()), epsilon = 1e-13);
        assert_abs_diff_eq!(values[1], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(values[2], 2.0f64.sqrt(), epsilon = 1e-13);
        check_decomposition(&m, "path graph");
    }

    #[test]
    fn diagonal_and_degenerate_spectra() {
        let m = CMat::from_real(&[
            vec![5.0, 0.0, 0.0],
            vec![0.0, -2.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        let (values, _) = eigh(&m).unwrap();
        assert_eq!(values.len(), 3);
        assert_abs_diff_eq!(values[0], -2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(values[1], 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(values[2], 5.0, epsilon = 1e-14);
        check_decomposition(&m, "degenerate diag");
        check_decomposition(&CMat::identity(6), "identity");
        check_decomposition(&CMat::zeros(4, 4), "zero");
    }

    #[test]
    fn tiny_sizes() {
        let (values, vectors) = eigh(&CMat::zeros(0, 0)).unwrap();
        assert!(values.is_empty());
        assert_eq!(vectors.rows, 0);
        let one = CMat::from_rows(&[vec![c64(-3.5, 0.0)]]).unwrap();
        let (values, _) = eigh(&one).unwrap();
        assert_abs_diff_eq!(values[0], -3.5, epsilon = 1e-15);
    }

    #[test]
    fn random_hermitian_fuzz() {
        for seed in 0..12u64 {
            let mut r = rng(seed);
            let n = 2 + (seed as usize % 9);
            let m = random_hermitian(&mut r, n);
            check_decomposition(&m, &format!("fuzz seed {seed}"));
        }
    }

    #[test]
    fn clustered_spectrum_from_constructed_unitary() {
        // Build U D U† with D = diag(1,1,1,4,4,9) from a Householder-generated
        // unitary and make sure the spectrum comes back.
        let mut r = rng(99);
        let g = random_cmat(&mut r, 6, 6);
        // Orthonormalize columns through our own eigensolver-based basis.
        let u = g.column_space_basis(RANK_CUT).unwrap();
        assert_eq!(u.cols, 6);
        let d = CMat::from_real(&[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 4.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 4.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 9.0],
        ])
        .unwrap();
        let m = u.mul(&d).mul(&u.dagger());
        let (values, _) = eigh(&m).unwrap();
        let expect = [1.0, 1.0, 1.0, 4.0, 4.0, 9.0];
        for (got, want) in values.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        check_decomposition(&m, "clustered");
    }

    #[test]
    fn hermitian_spectrum_rejects_non_hermitian() {
        let m = CMat::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let err = hermitian_spectrum(&m, &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NotHermitian(_)));
    }

    #[test]
    fn is_psd_cases() {
        let tol = Tolerance::default();
        let mut r = rng(3);
        let g = random_cmat(&mut r, 4, 3);
        let gram = g.mul(&g.dagger());
        assert!(is_psd(&gram, &tol).unwrap());
        let m = CMat::from_real(&[vec![1.0, 0.0], vec![0.0, -1e-6]]).unwrap();
        assert!(!is_psd(&m, &tol).unwrap());
        // Borderline negative within the scaled floor passes.
        let m2 = CMat::from_real(&[vec![1.0, 0.0], vec![0.0, -1e-12]]).unwrap();
        assert!(is_psd(&m2, &tol).unwrap());
        let non_herm = CMat::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(is_psd(&non_herm, &tol), Err(Error::NotHermitian(_))));
    }

    proptest! {
        #[test]
        fn trace_and_frobenius_match_spectrum(seed in 0u64..300) {
            // Independent spectral invariants: Σλ = tr m and Σλ² = ‖m‖_F².
            let mut r = rng(seed);
            let n = 2 + (seed as usize % 5);
            let m = random_hermitian(&mut r, n);
            let (values, _) = eigh(&m).unwrap();
            let tr: f64 = values.iter().sum();
            prop_assert!((tr - m.trace().re).abs() < 1e-10 * (1.0 + tr.abs()));
            let f2: f64 = values.iter().map(|v| v * v).sum();
            let mf2 = m.frob_norm().powi(2);
            prop_assert!((f2 - mf2).abs() < 1e-9 * (1.0 + mf2));
        }

        #[test]
        fn spectrum_invariant_under_permutation_conjugation(seed in 0u64..100) {
            let mut r = rng(seed);
            let m = random_hermitian(&mut r, 5);
            // Conjugate by a permutation matrix: spectrum must be unchanged.
            let perm = CMat::from_fn(5, 5, |i, j| if (i + 2) % 5 == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
            let conj = perm.mul(&m).mul(&perm.dagger());
            let (v1, _) = eigh(&m).unwrap();
            let (v2, _) = eigh(&conj).unwrap();
            for (a, b) in v1.iter().zip(&v2) {
                prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
            }
        }
    }
}
