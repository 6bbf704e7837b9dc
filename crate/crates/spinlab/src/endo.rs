//! Endomorphisms of the space of `n x n` matrices: left multiplication
//! `X_C(M) = CM`, Schur multiplication `D_C(M) = C ∘ M`, right
//! multiplication by the transpose `Y_C(M) = M C^T`, and their composites.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};

#[derive(Debug, Clone)]
pub enum Endomorphism {
    LeftMult(ComplexMatrix),
    SchurMult(ComplexMatrix),
    RightMultTranspose(ComplexMatrix),
    /// Applied right-to-left: `Composite([f, g])` maps `M` to `f(g(M))`.
    Composite(Vec<Endomorphism>),
}

impl Endomorphism {
    pub fn order(&self) -> Option<usize> {
        match self {
            Endomorphism::LeftMult(c)
            | Endomorphism::SchurMult(c)
            | Endomorphism::RightMultTranspose(c) => Some(c.order()),
            Endomorphism::Composite(fs) => fs.iter().find_map(|f| f.order()),
        }
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if let Some(n) = self.order() {
            if n != m.order() {
                return Err(Error::OrderMismatch(n, m.order()));
            }
        }
        Ok(match self {
            Endomorphism::LeftMult(c) => c.matmul(m),
            Endomorphism::SchurMult(c) => c.schur_product(m)?,
            Endomorphism::RightMultTranspose(c) => m.matmul(&c.transpose()),
            Endomorphism::Composite(fs) => {
                let mut acc = m.clone();
                for f in fs.iter().rev() {
                    acc = f.apply(&acc)?;
                }
                acc
            }
        })
    }

    /// Dense matrix of the endomorphism acting on row-major vectorized
    /// matrices; order `n^2`.
    pub fn materialize(&self, n: usize) -> Result<ComplexMatrix> {
        match self {
            Endomorphism::LeftMult(c) => Ok(c.kron(&ComplexMatrix::identity(n))),
            Endomorphism::SchurMult(c) => {
                Ok(ComplexMatrix::diagonal(&c.vectorize()))
            }
            Endomorphism::RightMultTranspose(c) => {
                Ok(ComplexMatrix::identity(n).kron(c))
            }
            Endomorphism::Composite(fs) => {
                let mut acc = ComplexMatrix::identity(n * n);
                for f in fs.iter().rev() {
                    acc = f.materialize(n)?.matmul(&acc);
                }
                Ok(acc)
            }
        }
    }
}

/// One factor of an alternating word in `X` and `D` operators.
///
/// Words in these two kinds map `E_ij = e_i e_j^T` to `v e_j^T`, so they are
/// evaluated column-wise without ever forming `n x n` intermediates.
#[derive(Clone, Copy)]
pub enum Factor<'a> {
    X(&'a ComplexMatrix),
    D(&'a ComplexMatrix),
}

/// Apply the word (right-to-left) to `E_ij`; returns `v` with result `v e_j^T`.
pub fn word_on_basis(word: &[Factor<'_>], n: usize, i: usize, j: usize) -> Vec<Complex64> {
    let mut v = vec![cr(0.0); n];
    v[i] = cr(1.0);
    for f in word.iter().rev() {
        match f {
            Factor::X(m) => v = m.apply_vec(&v),
            Factor::D(c) => {
                for (k, vk) in v.iter_mut().enumerate() {
                    *vk *= c.get(k, j);
                }
            }
        }
    }
    v
}

/// Max-norm difference of two operator words over the whole `E_ij` basis.
pub fn word_difference(lhs: &[Factor<'_>], rhs: &[Factor<'_>], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = word_on_basis(lhs, n, i, j);
            let b = word_on_basis(rhs, n, i, j);
            for k in 0..n {
                worst = worst.max((a[k] - b[k]).norm());
            }
        }
    }
    worst
}

fn word_scale(word: &[Factor<'_>]) -> f64 {
    word.iter()
        .map(|f| match f {
            Factor::X(m) | Factor::D(m) => m.max_abs().max(1e-300),
        })
        .product()
}

/// Whether two operator words agree on every `E_ij` within `tol`.
pub fn words_equal(lhs: &[Factor<'_>], rhs: &[Factor<'_>], n: usize, tol: &Tolerance) -> bool {
    let diff = word_difference(lhs, rhs, n);
    let scale = word_scale(lhs).max(word_scale(rhs));
    diff <= tol.abs_eps + tol.rel_eps * scale
}

/// Report from checking the two operator identities that exchange the inner
/// pair of matrices.
#[derive(Debug, Clone)]
pub struct ExchangeReport {
    pub first_holds: bool,
    pub first_residual: f64,
    pub second_holds: bool,
    pub second_residual: f64,
    /// `first <=> second`.
    pub biconditional: bool,
}

/// Check `X_A D_B X_C = D_Q X_R D_S` against `X_A D_C X_B = D_R X_Q D_{S^T}`
/// on the full `E_ij` basis. The two identities hold or fail together.
pub fn verify_exchange(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    q: &ComplexMatrix,
    r: &ComplexMatrix,
    s: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ExchangeReport> {
    let n = a.order();
    for m in [b, c, q, r, s] {
        if m.order() != n {
            return Err(Error::OrderMismatch(n, m.order()));
        }
    }
    let st = s.transpose();
    let first = (
        [Factor::X(a), Factor::D(b), Factor::X(c)],
        [Factor::D(q), Factor::X(r), Factor::D(s)],
    );
    let second = (
        [Factor::X(a), Factor::D(c), Factor::X(b)],
        [Factor::D(r), Factor::X(q), Factor::D(&st)],
    );
    let r1 = word_difference(&first.0, &first.1, n);
    let r2 = word_difference(&second.0, &second.1, n);
    let scale = word_scale(&first.0).max(word_scale(&first.1));
    let thr = tol.abs_eps + tol.rel_eps * scale;
    let first_holds = r1 <= thr;
    let second_holds = r2 <= thr;
    Ok(ExchangeReport {
        first_holds,
        first_residual: r1,
        second_holds,
        second_residual: r2,
        biconditional: first_holds == second_holds,
    })
}

/// Evaluate a word on every `E_ij` and demand the image be `s_ij E_ij`;
/// returns the scalar table `S` and the worst off-axis residual.
pub fn word_as_schur_table(
    word: &[Factor<'_>],
    n: usize,
) -> (ComplexMatrix, f64) {
    let mut s = ComplexMatrix::zeros(n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = word_on_basis(word, n, i, j);
            s.set(i, j, v[i]);
            for (k, z) in v.iter().enumerate() {
                if k != i {
                    worst = worst.max(z.norm());
                }
            }
        }
    }
    (s, worst)
}
