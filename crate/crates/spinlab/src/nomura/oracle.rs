//! Reference implementations kept independent of the production paths, for
//! cross-checking in tests.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::subspace::{nullspace, MatrixSubspace};

/// Brute-force Nomura algebra over the full `n^2`-dimensional matrix space.
///
/// A vector `y` is an eigenvector of `M` exactly when `z^H M y = 0` for
/// every `z` orthogonal to `y`; stacking those rows over all eigenvectors
/// `A e_i ∘ B e_j` and solving for the nullspace gives the algebra without
/// any conjugation or intersection shortcuts.
pub fn nomura_space_bruteforce(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<MatrixSubspace> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let y = a.eigvec(b, i, j)?;
            for z in orthogonal_complement(&y) {
                // row entries for unknown M_{rs}: conj(z_r) * y_s
                let mut row = vec![cr(0.0); n * n];
                for r in 0..n {
                    if z[r].norm() == 0.0 {
                        continue;
                    }
                    for s in 0..n {
                        row[r * n + s] = z[r].conj() * y[s];
                    }
                }
                rows.push(row);
            }
        }
    }
    let mut constraint = DMatrix::zeros(rows.len(), n * n);
    for (r, row) in rows.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            constraint[(r, c)] = *z;
        }
    }
    let null = nullspace(&constraint, tol.rank_eps);
    let members: Vec<ComplexMatrix> = null
        .iter()
        .map(|v| ComplexMatrix::from_vectorized(n, v))
        .collect();
    MatrixSubspace::span(n, &members, tol)
}

/// Orthonormal basis of the complement of a single vector.
fn orthogonal_complement(y: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = y.len();
    let ynorm2: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..n {
        // e_k minus its projection on y
        let coeff = y[k].conj() / cr(ynorm2);
        let mut v: Vec<Complex64> = (0..n).map(|r| -coeff * y[r]).collect();
        v[k] += cr(1.0);
        for b in &basis {
            let inner: Complex64 = b.iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
            for (r, br) in b.iter().enumerate() {
                v[r] -= inner * br;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for z in v.iter_mut() {
                *z /= cr(norm);
            }
            basis.push(v);
        }
    }
    basis
}

/// Random-combination route to the Schur idempotents: the distinct-entry
/// classes of a generic element of a Schur-closed space.
pub fn schur_idempotents_by_generic_element(
    space: &MatrixSubspace,
    seed: u64,
    tol: &Tolerance,
) -> Vec<ComplexMatrix> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = space.order();
    let mut generic = ComplexMatrix::zeros(n);
    for b in space.basis() {
        generic = generic.add(&b.scale(cr(rng.gen_range(0.25..4.0))));
    }
    let mut reps: Vec<Complex64> = Vec::new();
    let mut classes: Vec<ComplexMatrix> = Vec::new();
    let eps = tol.abs_eps.max(1e-9);
    for i in 0..n {
        for j in 0..n {
            let v = generic.get(i, j);
            let idx = reps.iter().position(|&r| (r - v).norm() <= eps * (1.0 + r.norm()));
            let idx = match idx {
                Some(k) => k,
                None => {
                    reps.push(v);
                    classes.push(ComplexMatrix::zeros(n));
                    classes.len() - 1
                }
            };
            classes[idx].set(i, j, cr(1.0));
        }
    }
    classes
}
