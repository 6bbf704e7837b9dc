//! Nomura algebras of a matrix pair, the duality map, and Bose-Mesner
//! structure built on top of them.
//!
//! For matrices `A` (invertible) and `B` (Schur invertible), `N(A,B)` is the
//! set of matrices having every `A e_i ∘ B e_j` as an eigenvector. The
//! duality map stores the eigenvalue tables.

mod bose_mesner;
pub mod oracle;

pub use bose_mesner::{
    check_formal_self_duality, duality_pairing, is_bose_mesner, principal_idempotents,
    scheme_from_space, schur_idempotent_basis, BoseMesnerCheck, FormalSelfDuality, SchemeData,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::endo::{words_equal, Factor};
use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::subspace::MatrixSubspace;

/// The Nomura algebra of a pair together with its duality data.
#[derive(Debug, Clone)]
pub struct NomuraData {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// `N(A,B)`, orthonormal basis.
    pub space: MatrixSubspace,
    /// Duality images of each basis element, in basis order.
    pub theta_images: Vec<ComplexMatrix>,
    /// `N'(A,B)`, the span of the duality images.
    pub dual_space: MatrixSubspace,
    /// Worst eigen-residual seen while reading off the duality tables.
    pub max_eigen_residual: f64,
    /// Column tables `P_j` whose `i`-th column is `A e_i ∘ B e_j`.
    tables: Vec<ComplexMatrix>,
}

impl NomuraData {
    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Eigenvalue table of `m` on the eigenvectors of the pair, with the
    /// worst relative eigen-residual.
    pub fn read_theta(&self, m: &ComplexMatrix) -> (ComplexMatrix, f64) {
        read_theta_from_tables(&self.tables, m)
    }

    /// Duality image of a matrix in the algebra. Verifies membership by
    /// projection and then checks `X_M D_B X_A = D_B X_A D_S` on the whole
    /// `E_ij` basis.
    pub fn duality_map(&self, m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
        let residual = self.space.residual(m);
        if residual > tol.abs_eps + tol.rel_eps * m.frobenius_norm() {
            return Err(Error::NotInAlgebra { residual });
        }
        let (s, eig_res) = self.read_theta(m);
        if eig_res > tol.abs_eps.max(tol.rel_eps) * 100.0 {
            return Err(Error::NotInAlgebra { residual: eig_res });
        }
        let lhs = [Factor::X(m), Factor::D(&self.b), Factor::X(&self.a)];
        let rhs = [Factor::D(&self.b), Factor::X(&self.a), Factor::D(&s)];
        if !words_equal(&lhs, &rhs, self.order(), tol) {
            return Err(Error::VerificationFailure(
                "duality operator identity failed".into(),
            ));
        }
        Ok(s)
    }

    /// Principal idempotents of `N(A,B)` paired with the Schur idempotents
    /// of the dual: returns `(F_k, S_k)` with `theta(F_k) = S_k`,
    /// `F_k F_l = delta_kl F_k` and `sum F_k = I`.
    pub fn principal_idempotent_pairs(
        &self,
        tol: &Tolerance,
    ) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
        let schur = schur_idempotent_basis(&self.dual_space, tol)?;
        if schur.len() != self.dim() {
            return Err(Error::StructureMismatch(format!(
                "dual Schur idempotent count {} != dim {}",
                schur.len(),
                self.dim()
            )));
        }
        let n = self.order();
        // solve S_k = sum_i c_i theta(M_i) in the least-squares sense
        let cols = self.theta_images.len();
        let mut t = DMatrix::zeros(n * n, cols);
        for (k, img) in self.theta_images.iter().enumerate() {
            for (r, z) in img.vectorize().into_iter().enumerate() {
                t[(r, k)] = z;
            }
        }
        let th = t.adjoint();
        let gram = &th * &t;
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::NotInvertible("duality images are dependent".into()))?;
        let mut out = Vec::with_capacity(schur.len());
        for s in schur {
            let rhs = DMatrix::from_column_slice(n * n, 1, &s.vectorize());
            let coeffs = &gram_inv * (&th * rhs);
            let mut f = ComplexMatrix::zeros(n);
            for (i, basis_m) in self.space.basis().iter().enumerate() {
                f = f.add(&basis_m.scale(coeffs[(i, 0)]));
            }
            // confirm the reconstruction reproduces s
            let (img, _) = self.read_theta(&f);
            if img.max_abs_diff(&s) > 1e-6 {
                return Err(Error::StructureMismatch(
                    "duality preimage of a Schur idempotent failed to verify".into(),
                ));
            }
            out.push((f, s));
        }
        // idempotency and resolution of identity
        let mut total = ComplexMatrix::zeros(n);
        for (f, _) in &out {
            total = total.add(f);
        }
        if total.max_abs_diff(&ComplexMatrix::identity(n)) > 1e-7 {
            return Err(Error::StructureMismatch(
                "principal idempotents do not sum to I".into(),
            ));
        }
        for (k, (fk, _)) in out.iter().enumerate() {
            for (l, (fl, _)) in out.iter().enumerate() {
                let prod = fk.matmul(fl);
                let expect = if k == l { fk.clone() } else { ComplexMatrix::zeros(n) };
                if prod.max_abs_diff(&expect) > 1e-7 {
                    return Err(Error::StructureMismatch(
                        "principal idempotents are not orthogonal".into(),
                    ));
                }
            }
        }
        Ok(out)
    }
}

fn read_theta_from_tables(
    tables: &[ComplexMatrix],
    m: &ComplexMatrix,
) -> (ComplexMatrix, f64) {
    let n = m.order();
    let mut s = ComplexMatrix::zeros(n);
    let mut worst: f64 = 0.0;
    let mnorm = m.max_abs().max(1e-300);
    for (j, pj) in tables.iter().enumerate() {
        let mp = m.matmul(pj);
        for i in 0..n {
            let y = pj.column(i);
            let my = mp.column(i);
            let mut num = cr(0.0);
            let mut den = cr(0.0);
            for k in 0..n {
                num += y[k].conj() * my[k];
                den += y[k].conj() * y[k];
            }
            let theta = num / den;
            s.set(i, j, theta);
            let ynorm = den.re.sqrt().max(1e-300);
            let mut res: f64 = 0.0;
            for k in 0..n {
                res = res.max((my[k] - theta * y[k]).norm());
            }
            worst = worst.max(res / (mnorm * ynorm));
        }
    }
    (s, worst)
}

/// Compute `N(A,B)` with duality data.
///
/// For each fixed `j` the eigenvector columns form an invertible matrix
/// `P_j`, so the matrices having those columns as eigenvectors are exactly
/// `P_j D P_j^{-1}` with `D` diagonal. The algebra is the intersection over
/// `j`, computed incrementally by imposing, per new `j`, the vanishing of
/// the off-diagonal part of `P_j^{-1} M P_j` as linear constraints on the
/// coefficients of the running basis.
pub fn nomura_algebra(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<NomuraData> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    if !a.is_invertible(tol) {
        return Err(Error::NotInvertible("first matrix of the pair".into()));
    }
    if !b.is_schur_invertible(tol) {
        return Err(Error::NotSchurInvertible("second matrix of the pair".into()));
    }

    let mut tables = Vec::with_capacity(n);
    for j in 0..n {
        let pj = ComplexMatrix::from_fn(n, |k, i| a.get(k, i) * b.get(k, j));
        let cond = pj.condition_number();
        if !cond.is_finite() || cond > 1.0 / tol.rank_eps {
            return Err(Error::IllConditioned { j, cond });
        }
        tables.push(pj);
    }

    // j = 0 seeds the space with the rank-one spectral projections
    let p0_inv = tables[0].inverse(tol)?;
    let mut gens = Vec::with_capacity(n);
    for i in 0..n {
        let y = tables[0].column(i);
        gens.push(ComplexMatrix::from_fn(n, |r, c| y[r] * p0_inv.get(i, c)));
    }
    let mut space = MatrixSubspace::span(n, &gens, tol)?;

    for pj in tables.iter().skip(1) {
        if space.dim() == 0 {
            break;
        }
        let pj_inv = pj.inverse(tol)?;
        let dim = space.dim();
        let mut constraints = DMatrix::zeros(n * n - n, dim);
        for (k, basis_m) in space.basis().iter().enumerate() {
            let q = pj_inv.matmul(basis_m).matmul(pj);
            let mut row = 0;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        constraints[(row, k)] = q.get(r, c);
                        row += 1;
                    }
                }
            }
        }
        space = space.restrict(&constraints, tol)?;
    }

    let mut theta_images = Vec::with_capacity(space.dim());
    let mut max_eigen_residual: f64 = 0.0;
    for m in space.basis() {
        let (s, res) = read_theta_from_tables(&tables, m);
        max_eigen_residual = max_eigen_residual.max(res);
        theta_images.push(s);
    }
    let dual_space = MatrixSubspace::span(n, &theta_images, tol)?;

    Ok(NomuraData {
        a: a.clone(),
        b: b.clone(),
        space,
        theta_images,
        dual_space,
        max_eigen_residual,
        tables,
    })
}

/// `N(A)` for a type-II matrix: the pair `(A, Schur-inverse(A))`.
pub fn nomura_algebra_type_ii(a: &ComplexMatrix, tol: &Tolerance) -> Result<NomuraData> {
    let sinv = a.schur_inverse(tol)?;
    nomura_algebra(a, &sinv, tol)
}

/// Check the two monomial-equivalence laws.
///
/// Scaling by invertible diagonals leaves both algebras unchanged:
/// `N(DAE, D^{-1}BF) = N(A,B)` and likewise for the duals. Permutations
/// conjugate: `N(PAQ, PBR) = P N(A,B) P^{-1}` and
/// `N'(PAQ, PBR) = Q^{-1} N'(A,B) R`.
pub struct MonomialCheck {
    pub space_ok: bool,
    pub dual_ok: bool,
}

pub fn monomial_transform_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    diag: Option<(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix)>,
    perm: Option<(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix)>,
    tol: &Tolerance,
) -> Result<MonomialCheck> {
    let base = nomura_algebra(a, b, tol)?;
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    let mut space_ok = true;
    let mut dual_ok = true;

    if let Some((d, e, f)) = diag {
        for m in [d, e, f] {
            if !m.is_invertible(tol) {
                return Err(Error::SingularD);
            }
        }
        cur_a = d.matmul(&cur_a).matmul(e);
        cur_b = d.inverse(tol)?.matmul(&cur_b).matmul(f);
        let scaled = nomura_algebra(&cur_a, &cur_b, tol)?;
        space_ok &= scaled.space.equals(&base.space, tol);
        dual_ok &= scaled.dual_space.equals(&base.dual_space, tol);
    }

    if let Some((p, q, r)) = perm {
        for m in [p, q, r] {
            m.as_permutation(tol)?;
        }
        // conjugate the reference algebra of the (possibly scaled) pair
        let reference = nomura_algebra(&cur_a, &cur_b, tol)?;
        let pa = p.matmul(&cur_a).matmul(q);
        let pb = p.matmul(&cur_b).matmul(r);
        let transformed = nomura_algebra(&pa, &pb, tol)?;
        let p_inv = p.transpose();
        let conj_basis: Vec<ComplexMatrix> = reference
            .space
            .basis()
            .iter()
            .map(|m| p.matmul(m).matmul(&p_inv))
            .collect();
        let conj_space = MatrixSubspace::span(a.order(), &conj_basis, tol)?;
        space_ok &= transformed.space.equals(&conj_space, tol);
        let q_inv = q.transpose();
        let dual_basis: Vec<ComplexMatrix> = reference
            .dual_space
            .basis()
            .iter()
            .map(|m| q_inv.matmul(m).matmul(r))
            .collect();
        let dual_ref = MatrixSubspace::span(a.order(), &dual_basis, tol)?;
        dual_ok &= transformed.dual_space.equals(&dual_ref, tol);
    }

    Ok(MonomialCheck { space_ok, dual_ok })
}

/// Verify `N(A1⊗A2, B1⊗B2) = N(A1,B1) ⊗ N(A2,B2)`, and the same for duals.
pub fn tensor_nomura_check(
    a1: &ComplexMatrix,
    b1: &ComplexMatrix,
    a2: &ComplexMatrix,
    b2: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<bool> {
    let n1 = nomura_algebra(a1, b1, tol)?;
    let n2 = nomura_algebra(a2, b2, tol)?;
    let big = nomura_algebra(&a1.kron(a2), &b1.kron(b2), tol)?;
    let tensored = n1.space.tensor(&n2.space, tol)?;
    let dual_tensored = n1.dual_space.tensor(&n2.dual_space, tol)?;
    Ok(big.space.equals(&tensored, tol) && big.dual_space.equals(&dual_tensored, tol))
}

/// Eigenvalue table for a matrix known to act on the pair's eigenvectors,
/// without requiring a full `NomuraData` (used for cross-pair dualities).
pub fn theta_table(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    m: &ComplexMatrix,
) -> (ComplexMatrix, f64) {
    let n = a.order();
    let tables: Vec<ComplexMatrix> = (0..n)
        .map(|j| ComplexMatrix::from_fn(n, |k, i| a.get(k, i) * b.get(k, j)))
        .collect();
    read_theta_from_tables(&tables, m)
}

/// Coefficients of `m` over a Schur-orthogonal 01 basis, with residual.
pub fn schur_basis_coefficients(
    basis: &[ComplexMatrix],
    m: &ComplexMatrix,
) -> (Vec<Complex64>, f64) {
    let mut coeffs = Vec::with_capacity(basis.len());
    let mut recon = ComplexMatrix::zeros(m.order());
    for a in basis {
        let w = a.inner_product(m) / a.inner_product(a);
        coeffs.push(w);
        recon = recon.add(&a.scale(w));
    }
    let residual = recon.max_abs_diff(m);
    (coeffs, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_ones_pair_is_diagonal_algebra() {
        let nd = nomura_algebra(&ComplexMatrix::identity(4), &ComplexMatrix::ones(4), &tol())
            .unwrap();
        assert_eq!(nd.dim(), 4);
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 0.0), c(0.5, 0.0)]);
        assert!(nd.space.contains(&d, &tol()));
        // theta(D) = DJ
        let s = nd.duality_map(&d, &tol()).unwrap();
        let dj = d.matmul(&ComplexMatrix::ones(4));
        assert!(s.approx_eq(&dj, &tol()));
    }

    #[test]
    fn hadamard_pair_has_dim_two() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let nd = nomura_algebra_type_ii(&h, &tol()).unwrap();
        assert_eq!(nd.dim(), 2);
        assert!(nd.space.contains(&ComplexMatrix::identity(2), &tol()));
        assert!(nd.space.contains(&ComplexMatrix::ones(2), &tol()));
        // theta(I) = J and theta(J) = nI
        let ti = nd.duality_map(&ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(ti.approx_eq(&ComplexMatrix::ones(2), &tol()));
        let tj = nd.duality_map(&ComplexMatrix::ones(2), &tol()).unwrap();
        assert!(tj.approx_eq(&ComplexMatrix::identity(2).scale(cr(2.0)), &tol()));
    }

    #[test]
    fn potts_dual_is_span_i_j() {
        // tI + (J-I) at n = 5, t a root of t + 1/t - 2 + n = 0
        let n = 5;
        let t = (-3.0 + 5.0_f64.sqrt()) / 2.0;
        let a = ComplexMatrix::from_fn(n, |i, j| if i == j { cr(t) } else { cr(1.0) });
        let nd = nomura_algebra_type_ii(&a, &tol()).unwrap();
        assert_eq!(nd.dim(), 2);
        let expect = MatrixSubspace::span(
            n,
            &[ComplexMatrix::identity(n), ComplexMatrix::ones(n)],
            &tol(),
        )
        .unwrap();
        assert!(nd.dual_space.equals(&expect, &tol()));
    }

    #[test]
    fn theta_against_oracle_space() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let hs = h.schur_inverse(&tol()).unwrap();
        let nd = nomura_algebra(&h, &hs, &tol()).unwrap();
        let brute = oracle::nomura_space_bruteforce(&h, &hs, &tol()).unwrap();
        assert!(nd.space.equals(&brute, &tol()));
    }

    #[test]
    fn rejects_singular_and_zero_entry_inputs() {
        let sing = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            nomura_algebra(&sing, &ComplexMatrix::ones(2), &tol()),
            Err(Error::NotInvertible(_))
        ));
        let zero_entry =
            ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            nomura_algebra(&ComplexMatrix::identity(2), &zero_entry, &tol()),
            Err(Error::NotSchurInvertible(_))
        ));
    }

    #[test]
    fn monomial_transforms_preserve_the_algebra() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let hs = h.schur_inverse(&tol()).unwrap();
        let d = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let e = ComplexMatrix::diagonal(&[c(1.0, -1.0), c(3.0, 0.0)]);
        let f = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(1.0, 1.0)]);
        let chk = monomial_transform_check(&h, &hs, Some((&d, &e, &f)), None, &tol()).unwrap();
        assert!(chk.space_ok && chk.dual_ok);

        let p = ComplexMatrix::permutation_from(&[1, 0]);
        let chk2 =
            monomial_transform_check(&h, &hs, None, Some((&p, &p, &p)), &tol()).unwrap();
        assert!(chk2.space_ok && chk2.dual_ok);
    }

    #[test]
    fn tensor_of_identity_ones_pairs() {
        let i2 = ComplexMatrix::identity(2);
        let j2 = ComplexMatrix::ones(2);
        assert!(tensor_nomura_check(&i2, &j2, &i2, &j2, &tol()).unwrap());
        let big = nomura_algebra(&i2.kron(&i2), &j2.kron(&j2), &tol()).unwrap();
        assert_eq!(big.dim(), 4);
    }

    #[test]
    fn principal_idempotent_pairs_of_hadamard() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let nd = nomura_algebra_type_ii(&h, &tol()).unwrap();
        let pairs = nd.principal_idempotent_pairs(&tol()).unwrap();
        assert_eq!(pairs.len(), 2);
        let total = pairs[0].0.add(&pairs[1].0);
        assert!(total.approx_eq(&ComplexMatrix::identity(2), &tol()));
    }
}
