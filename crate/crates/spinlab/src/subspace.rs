//! Subspaces of the `n^2`-dimensional space of `n x n` complex matrices,
//! carried as orthonormal bases of vectorized matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};

/// Structural flags verified by projection.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubspaceFlags {
    pub contains_identity: bool,
    pub contains_all_ones: bool,
    pub schur_closed: bool,
    pub transpose_closed: bool,
    pub mult_closed: bool,
    pub commutative: bool,
}

#[derive(Debug, Clone)]
pub struct MatrixSubspace {
    n: usize,
    basis: Vec<ComplexMatrix>,
    pub flags: SubspaceFlags,
}

impl MatrixSubspace {
    /// Orthonormalized span of the given matrices; order of the input fixes
    /// the basis deterministically.
    pub fn span(n: usize, generators: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        for g in generators {
            if g.order() != n {
                return Err(Error::OrderMismatch(n, g.order()));
            }
        }
        let basis = orthonormalize(generators, tol);
        let mut space = MatrixSubspace { n, basis, flags: SubspaceFlags::default() };
        space.compute_flags(tol);
        Ok(space)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Coefficients of the orthogonal projection onto the span.
    pub fn project_coeffs(&self, m: &ComplexMatrix) -> Vec<Complex64> {
        self.basis.iter().map(|b| b.inner_product(m)).collect()
    }

    pub fn reconstruct(&self, coeffs: &[Complex64]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            acc = acc.add(&b.scale(*c));
        }
        acc
    }

    /// Frobenius norm of `M - proj(M)`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        let proj = self.reconstruct(&self.project_coeffs(m));
        m.sub(&proj).frobenius_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.residual(m) <= tol.abs_eps + tol.rel_eps * m.frobenius_norm()
    }

    /// Mutual containment of two spans.
    pub fn equals(&self, other: &MatrixSubspace, tol: &Tolerance) -> bool {
        self.dim() == other.dim()
            && self.basis.iter().all(|b| other.contains(b, tol))
            && other.basis.iter().all(|b| self.contains(b, tol))
    }

    pub fn compute_flags(&mut self, tol: &Tolerance) {
        let n = self.n;
        let id = ComplexMatrix::identity(n);
        let ones = ComplexMatrix::ones(n);
        let mut f = SubspaceFlags {
            contains_identity: self.contains(&id, tol),
            contains_all_ones: self.contains(&ones, tol),
            schur_closed: true,
            transpose_closed: true,
            mult_closed: true,
            commutative: true,
        };
        for b in &self.basis {
            if !self.contains(&b.transpose(), tol) {
                f.transpose_closed = false;
                break;
            }
        }
        'outer: for (i, bi) in self.basis.iter().enumerate() {
            for bj in &self.basis[i..] {
                let s = bi.schur_product(bj).expect("orders match");
                if !self.contains(&s, tol) {
                    f.schur_closed = false;
                    break 'outer;
                }
            }
        }
        'outer2: for bi in &self.basis {
            for bj in &self.basis {
                let p = bi.matmul(bj);
                if !self.contains(&p, tol) {
                    f.mult_closed = false;
                    break 'outer2;
                }
            }
        }
        'outer3: for (i, bi) in self.basis.iter().enumerate() {
            for bj in &self.basis[i + 1..] {
                let comm = bi.matmul(bj).sub(&bj.matmul(bi));
                let scale = bi.frobenius_norm() * bj.frobenius_norm();
                if comm.frobenius_norm() > tol.abs_eps + tol.rel_eps * scale {
                    f.commutative = false;
                    break 'outer3;
                }
            }
        }
        self.flags = f;
    }

    /// Intersection of two spans, computed from the nullspace of `[U | -V]`.
    pub fn intersect(&self, other: &MatrixSubspace, tol: &Tolerance) -> Result<MatrixSubspace> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        if self.dim() == 0 || other.dim() == 0 {
            return MatrixSubspace::span(self.n, &[], tol);
        }
        let nn = self.n * self.n;
        let p = self.dim();
        let q = other.dim();
        let mut stacked = DMatrix::zeros(nn, p + q);
        for (k, b) in self.basis.iter().enumerate() {
            for (r, z) in b.vectorize().into_iter().enumerate() {
                stacked[(r, k)] = z;
            }
        }
        for (k, b) in other.basis.iter().enumerate() {
            for (r, z) in b.vectorize().into_iter().enumerate() {
                stacked[(r, p + k)] = -z;
            }
        }
        let null = nullspace(&stacked, tol.rank_eps);
        let members: Vec<ComplexMatrix> = null
            .iter()
            .map(|w| {
                let mut acc = ComplexMatrix::zeros(self.n);
                for (k, b) in self.basis.iter().enumerate() {
                    acc = acc.add(&b.scale(w[k]));
                }
                acc
            })
            .collect();
        MatrixSubspace::span(self.n, &members, tol)
    }

    /// Restrict the span by homogeneous linear constraints on coefficients:
    /// keep `sum_k c_k basis[k]` for `c` in the nullspace of `constraints`.
    pub fn restrict(&self, constraints: &DMatrix<Complex64>, tol: &Tolerance) -> Result<MatrixSubspace> {
        assert_eq!(constraints.ncols(), self.dim());
        if self.dim() == 0 {
            return MatrixSubspace::span(self.n, &[], tol);
        }
        let null = nullspace(constraints, tol.rank_eps);
        let members: Vec<ComplexMatrix> =
            null.iter().map(|c| self.reconstruct(c)).collect();
        MatrixSubspace::span(self.n, &members, tol)
    }

    /// Kronecker product of two spans.
    pub fn tensor(&self, other: &MatrixSubspace, tol: &Tolerance) -> Result<MatrixSubspace> {
        let mut gens = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                gens.push(a.kron(b));
            }
        }
        MatrixSubspace::span(self.n * other.n, &gens, tol)
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; drops vectors
/// whose remaining norm falls below `rank_eps` times the largest input norm.
fn orthonormalize(generators: &[ComplexMatrix], tol: &Tolerance) -> Vec<ComplexMatrix> {
    let scale = generators
        .iter()
        .map(|g| g.frobenius_norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let cutoff = tol.rank_eps * scale;
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for g in generators {
        let mut v = g.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.inner_product(&v);
                v = v.sub(&b.scale(coeff));
            }
        }
        let norm = v.frobenius_norm();
        if norm > cutoff {
            basis.push(v.scale(cr(1.0 / norm)));
        }
    }
    basis
}

/// Orthonormal basis of the (right) nullspace of `m`, via SVD.
///
/// The cutoff is `rank_eps * max(sigma_max, 1)`: callers keep their columns
/// at unit scale, so a numerically zero constraint matrix (all rows already
/// satisfied) must yield the full space rather than none of it.
pub fn nullspace(m: &DMatrix<Complex64>, rank_eps: f64) -> Vec<Vec<Complex64>> {
    let rows = m.nrows();
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if rows == 0 {
        return (0..cols)
            .map(|k| (0..cols).map(|j| if j == k { cr(1.0) } else { cr(0.0) }).collect())
            .collect();
    }
    // pad to at least square so the thin SVD carries all right vectors
    let work = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rank_eps * smax.max(1.0);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            out.push((0..cols).map(|j| v_t[(k, j)].conj()).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn span_dedups_dependent_generators() {
        let i = ComplexMatrix::identity(3);
        let j = ComplexMatrix::ones(3);
        let both = i.add(&j);
        let s = MatrixSubspace::span(3, &[i.clone(), j.clone(), both], &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.flags.contains_identity);
        assert!(s.flags.contains_all_ones);
        assert!(s.flags.schur_closed);
        assert!(s.flags.mult_closed);
        assert!(s.flags.commutative);
        assert!(s.flags.transpose_closed);
    }

    #[test]
    fn projection_and_containment() {
        let i = ComplexMatrix::identity(2);
        let s = MatrixSubspace::span(2, &[i.clone()], &tol()).unwrap();
        assert!(s.contains(&i.scale(c(2.0, -1.0)), &tol()));
        let mut off = ComplexMatrix::zeros(2);
        off.set(0, 1, cr(1.0));
        assert!(!s.contains(&off, &tol()));
        assert!((s.residual(&off) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_of_diagonal_and_symmetric() {
        // diagonal 2x2 matrices meet span{J, I} in span{I}
        let e00 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let e11 = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let diag = MatrixSubspace::span(2, &[e00, e11], &tol()).unwrap();
        let ij = MatrixSubspace::span(
            2,
            &[ComplexMatrix::ones(2), ComplexMatrix::identity(2)],
            &tol(),
        )
        .unwrap();
        let meet = diag.intersect(&ij, &tol()).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains(&ComplexMatrix::identity(2), &tol()));
    }

    #[test]
    fn nullspace_of_rank_one() {
        // [1 1] has nullspace (1, -1)/sqrt(2)
        let m = DMatrix::from_row_slice(1, 2, &[cr(1.0), cr(1.0)]);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((v[0] + v[1]).norm() < 1e-12);
    }

    #[test]
    fn diagonal_space_is_not_bose_mesner_like() {
        let e00 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let e11 = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let diag = MatrixSubspace::span(2, &[e00, e11], &tol()).unwrap();
        assert!(!diag.flags.contains_all_ones);
        assert!(diag.flags.contains_identity);
    }
}
