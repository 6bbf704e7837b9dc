//! Dense square complex matrices with the Schur calculus used everywhere
//! else in the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Comparison and rank thresholds threaded through every operation.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute entrywise tolerance.
    pub abs_eps: f64,
    /// Relative entrywise tolerance.
    pub rel_eps: f64,
    /// Singular-value cutoff, relative to the largest singular value.
    pub rank_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_eps: 1e-9, rel_eps: 1e-9, rank_eps: 1e-8 }
    }
}

impl Tolerance {
    pub fn with_abs(abs_eps: f64) -> Self {
        Tolerance { abs_eps, rel_eps: abs_eps, ..Default::default() }
    }

    /// Entrywise `|x - y| <= abs + rel * max(|x|, |y|)`.
    pub fn close(&self, x: Complex64, y: Complex64) -> bool {
        (x - y).norm() <= self.abs_eps + self.rel_eps * x.norm().max(y.norm())
    }
}

/// A square matrix over `C` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<Complex64>,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::OrderMismatch(m.nrows(), m.ncols()));
        }
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if !m[(i, j)].re.is_finite() || !m[(i, j)].im.is_finite() {
                    return Err(Error::NonFiniteEntry(i, j));
                }
            }
        }
        Ok(ComplexMatrix { m })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix { m: DMatrix::from_fn(n, n, f) }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::OrderMismatch(n, r.len()));
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let c: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| cr(x)).collect()).collect();
        Self::from_rows(&c)
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix { m: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { m: DMatrix::zeros(n, n) }
    }

    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| cr(1.0))
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { cr(0.0) })
    }

    pub fn scalar(n: usize, s: Complex64) -> Self {
        Self::from_fn(n, |i, j| if i == j { s } else { cr(0.0) })
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.m[(i, j)] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.order()).map(|i| self.m[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix { m: self.m.transpose() }
    }

    pub fn conjugate(&self) -> Self {
        ComplexMatrix { m: self.m.map(|z| z.conj()) }
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix { m: self.m.adjoint() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix { m: self.m.map(|z| z * s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        ComplexMatrix { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ComplexMatrix { m: &self.m - &other.m }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        ComplexMatrix { m: &self.m * &other.m }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix { m: self.m.map(f) }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|x - y|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.order(), other.order());
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise equality under `tol` (absolute plus relative mode).
    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.order() == other.order()
            && self
                .m
                .iter()
                .zip(other.m.iter())
                .all(|(&x, &y)| tol.close(x, y))
    }

    pub fn is_symmetric(&self, tol: &Tolerance) -> bool {
        self.approx_eq(&self.transpose(), tol)
    }

    /// Vector `A e_i ∘ B e_j` used as an eigenvector throughout.
    pub fn eigvec(&self, other: &Self, i: usize, j: usize) -> Result<Vec<Complex64>> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok((0..self.order())
            .map(|k| self.m[(k, i)] * other.m[(k, j)])
            .collect())
    }

    /// `n x n` table of vectors, entry `(i, j)` being `A e_i ∘ B e_j`.
    pub fn eigvec_table(&self, other: &Self) -> Result<Vec<Vec<Vec<Complex64>>>> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        let n = self.order();
        let mut table = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.eigvec(other, i, j)?);
            }
            table.push(row);
        }
        Ok(table)
    }

    /// Entrywise product.
    pub fn schur_product(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(ComplexMatrix { m: self.m.component_mul(&other.m) })
    }

    /// Entrywise reciprocal; requires every `|entry| > abs_eps`.
    pub fn schur_inverse(&self, tol: &Tolerance) -> Result<Self> {
        let n = self.order();
        for i in 0..n {
            for j in 0..n {
                let mag = self.m[(i, j)].norm();
                if mag <= tol.abs_eps {
                    return Err(Error::ZeroEntry { i, j, magnitude: mag });
                }
            }
        }
        Ok(self.map(|z| z.inv()))
    }

    pub fn is_schur_invertible(&self, tol: &Tolerance) -> bool {
        self.m.iter().all(|z| z.norm() > tol.abs_eps)
    }

    /// Inverse via LU; errors when the matrix is numerically singular.
    pub fn inverse(&self, _tol: &Tolerance) -> Result<Self> {
        self.m
            .clone()
            .try_inverse()
            .map(|m| ComplexMatrix { m })
            .ok_or_else(|| Error::NotInvertible("LU factorization failed".into()))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.m.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        let sv = self.singular_values();
        let cutoff = tol.rank_eps * sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn is_invertible(&self, tol: &Tolerance) -> bool {
        self.rank(tol) == self.order()
    }

    /// `sigma_max / sigma_min`, `inf` when singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Check `A (A^-)^T = nI`; never errors, reports residual and reason.
    pub fn type_ii_check(&self, tol: &Tolerance) -> TypeIiCheck {
        let n = self.order();
        let sinv = match self.schur_inverse(tol) {
            Ok(s) => s,
            Err(e) => {
                return TypeIiCheck {
                    ok: false,
                    residual: f64::INFINITY,
                    reason: Some(format!("not Schur invertible: {e}")),
                }
            }
        };
        let prod = self.matmul(&sinv.transpose());
        let target = Self::scalar(n, cr(n as f64));
        let residual = prod.max_abs_diff(&target);
        let ok = residual <= tol.abs_eps + tol.rel_eps * n as f64;
        TypeIiCheck { ok, residual, reason: None }
    }

    pub fn is_type_ii(&self, tol: &Tolerance) -> bool {
        self.type_ii_check(tol).ok
    }

    pub fn kron(&self, other: &Self) -> Self {
        ComplexMatrix { m: self.m.kronecker(&other.m) }
    }

    /// Assemble a square matrix from a square grid of equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<ComplexMatrix>]) -> Result<Self> {
        let k = blocks.len();
        if k == 0 {
            return Err(Error::InvalidInput("empty block grid".into()));
        }
        let b = blocks[0][0].order();
        let n = k * b;
        let mut m = DMatrix::zeros(n, n);
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != k {
                return Err(Error::OrderMismatch(k, row.len()));
            }
            for (bj, blk) in row.iter().enumerate() {
                if blk.order() != b {
                    return Err(Error::OrderMismatch(b, blk.order()));
                }
                for i in 0..b {
                    for j in 0..b {
                        m[(bi * b + i, bj * b + j)] = blk.m[(i, j)];
                    }
                }
            }
        }
        Ok(ComplexMatrix { m })
    }

    /// Extract the `(bi, bj)` block of size `b` from a block-partitioned matrix.
    pub fn block(&self, bi: usize, bj: usize, b: usize) -> Self {
        Self::from_fn(b, |i, j| self.m[(bi * b + i, bj * b + j)])
    }

    /// Submatrix on the rows and columns indexed by `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.m[(idx[i], idx[j])])
    }

    pub fn row_sums(&self) -> Vec<Complex64> {
        (0..self.order())
            .map(|i| (0..self.order()).map(|j| self.m[(i, j)]).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Complex64> {
        (0..self.order())
            .map(|j| (0..self.order()).map(|i| self.m[(i, j)]).sum())
            .collect()
    }

    /// Apply to a vector.
    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.order();
        assert_eq!(v.len(), n);
        let mut out = vec![cr(0.0); n];
        for j in 0..n {
            let vj = v[j];
            if vj == cr(0.0) {
                continue;
            }
            for i in 0..n {
                out[i] += self.m[(i, j)] * vj;
            }
        }
        out
    }

    /// Flatten row-major into a vector of length `n^2`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let n = self.order();
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                v.push(self.m[(i, j)]);
            }
        }
        v
    }

    pub fn from_vectorized(n: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), n * n);
        Self::from_fn(n, |i, j| v[i * n + j])
    }

    /// Frobenius inner product `<X, Y> = sum conj(x_ij) y_ij`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// True when every entry is 0 or 1 within `tol`.
    pub fn is_zero_one(&self, tol: &Tolerance) -> bool {
        self.m
            .iter()
            .all(|&z| tol.close(z, cr(0.0)) || tol.close(z, cr(1.0)))
    }

    /// Check the matrix is a permutation matrix; returns the column
    /// permutation `p` with `M e_j = e_{p[j]}`.
    pub fn as_permutation(&self, tol: &Tolerance) -> Result<Vec<usize>> {
        let n = self.order();
        let mut perm = vec![usize::MAX; n];
        let mut residual: f64 = 0.0;
        for j in 0..n {
            let mut hit = None;
            for i in 0..n {
                let z = self.m[(i, j)];
                if tol.close(z, cr(1.0)) {
                    if hit.is_some() {
                        return Err(Error::NotPermutation((z - cr(1.0)).norm()));
                    }
                    hit = Some(i);
                    residual = residual.max((z - cr(1.0)).norm());
                } else if !tol.close(z, cr(0.0)) {
                    return Err(Error::NotPermutation(z.norm()));
                } else {
                    residual = residual.max(z.norm());
                }
            }
            let i = hit.ok_or(Error::NotPermutation(1.0))?;
            if perm.contains(&i) {
                return Err(Error::NotPermutation(1.0));
            }
            perm[j] = i;
        }
        Ok(perm)
    }

    pub fn permutation_from(perm: &[usize]) -> Self {
        // column j carries a one in row perm[j]
        Self::from_fn(perm.len(), |i, j| if perm[j] == i { cr(1.0) } else { cr(0.0) })
    }
}

/// Outcome of the type-II test.
#[derive(Debug, Clone)]
pub struct TypeIiCheck {
    pub ok: bool,
    pub residual: f64,
    pub reason: Option<String>,
}

/// Multiplicative order of a permutation given as `j -> p[j]`.
pub fn permutation_order(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut order: usize = 1;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        order = lcm(order, len);
    }
    order
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
