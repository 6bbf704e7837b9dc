//! Association-scheme validation from raw 01 matrices, triple regularity,
//! and the hyper-duality check for spin models.

use std::collections::BTreeMap;

use crate::endo::Endomorphism;
use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::nomura::{nomura_algebra_type_ii, scheme_from_space, SchemeData};
use crate::spin::SpinModel;
use crate::subspace::MatrixSubspace;

/// A candidate scheme given by its 01 matrices.
#[derive(Debug, Clone)]
pub struct RawScheme {
    pub matrices: Vec<ComplexMatrix>,
}

impl RawScheme {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidInput("no matrices".into()));
        }
        let n = matrices[0].order();
        for m in &matrices {
            if m.order() != n {
                return Err(Error::OrderMismatch(n, m.order()));
            }
        }
        Ok(RawScheme { matrices })
    }
}

/// Check the scheme axioms directly: (a) the identity is one of the
/// matrices, (b) they are 01 with disjoint supports summing to `J`, (c)
/// transpose closure, (d) products expand with non-negative integer
/// coefficients, (e) commutativity. Assembles full `SchemeData`.
pub fn validate_scheme(rs: &RawScheme, tol: &Tolerance) -> Result<SchemeData> {
    let n = rs.matrices[0].order();
    for (k, m) in rs.matrices.iter().enumerate() {
        if !m.is_zero_one(tol) {
            return Err(Error::AxiomFailure {
                axiom: 'b',
                witness: format!("matrix {k} is not a 01 matrix"),
            });
        }
    }
    if !rs
        .matrices
        .iter()
        .any(|m| m.max_abs_diff(&ComplexMatrix::identity(n)) <= tol.abs_eps)
    {
        return Err(Error::AxiomFailure {
            axiom: 'a',
            witness: "identity matrix missing".into(),
        });
    }
    let mut sum = ComplexMatrix::zeros(n);
    for m in &rs.matrices {
        sum = sum.add(m);
    }
    if sum.max_abs_diff(&ComplexMatrix::ones(n)) > tol.abs_eps {
        return Err(Error::AxiomFailure {
            axiom: 'b',
            witness: "supports do not partition all positions".into(),
        });
    }
    for (k, m) in rs.matrices.iter().enumerate() {
        let mt = m.transpose();
        if !rs.matrices.iter().any(|c| c.max_abs_diff(&mt) <= tol.abs_eps) {
            return Err(Error::AxiomFailure {
                axiom: 'c',
                witness: format!("transpose of matrix {k} missing"),
            });
        }
    }
    for (i, mi) in rs.matrices.iter().enumerate() {
        for (j, mj) in rs.matrices.iter().enumerate() {
            let prod = mi.matmul(mj);
            let comm = mj.matmul(mi);
            if prod.max_abs_diff(&comm) > tol.abs_eps * (n as f64) {
                return Err(Error::AxiomFailure {
                    axiom: 'e',
                    witness: format!("matrices {i} and {j} do not commute"),
                });
            }
            let mut recon = ComplexMatrix::zeros(n);
            for mk in &rs.matrices {
                let w = mk.inner_product(&prod) / mk.inner_product(mk);
                if w.im.abs() > 1e-6 || (w.re - w.re.round()).abs() > 1e-6 || w.re < -1e-6 {
                    return Err(Error::AxiomFailure {
                        axiom: 'd',
                        witness: format!("p_{{{i}{j}}} coefficient {w} not a non-negative integer"),
                    });
                }
                recon = recon.add(&mk.scale(cr(w.re.round())));
            }
            if recon.max_abs_diff(&prod) > 1e-7 {
                return Err(Error::AxiomFailure {
                    axiom: 'd',
                    witness: format!("product {i}*{j} not in the span"),
                });
            }
        }
    }
    let space = MatrixSubspace::span(n, &rs.matrices, tol)?;
    scheme_from_space(&space, tol)
}

/// Triple-regularity data: the common count for each
/// `(i, j, k | r, s, t)` signature.
#[derive(Debug, Clone)]
pub struct KappaTable {
    pub counts: BTreeMap<(usize, usize, usize, usize, usize, usize), u64>,
}

/// Brute-force triple regularity: for every point triple with pairwise
/// relation types `(r, s, t)` the histogram of
/// `|{w : (A_i)_{w,x} = (A_j)_{w,y} = (A_k)_{w,z} = 1}|` over `(i, j, k)`
/// must depend on `(r, s, t)` alone.
pub fn triply_regular_check(sd: &SchemeData) -> (bool, Option<KappaTable>) {
    let n = sd.n;
    let m = sd.schur_basis.len();
    // class matrix
    let mut class = vec![vec![0usize; n]; n];
    for (k, a) in sd.schur_basis.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                if a.get(x, y).norm() > 0.5 {
                    class[x][y] = k;
                }
            }
        }
    }
    let mut table: BTreeMap<(usize, usize, usize), Vec<u64>> = BTreeMap::new();
    let mut hist = vec![0u64; m * m * m];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let key = (class[x][y], class[x][z], class[y][z]);
                hist.iter_mut().for_each(|h| *h = 0);
                for w in 0..n {
                    let (i, j, k) = (class[w][x], class[w][y], class[w][z]);
                    hist[i * m * m + j * m + k] += 1;
                }
                match table.get(&key) {
                    None => {
                        table.insert(key, hist.clone());
                    }
                    Some(stored) => {
                        if stored != &hist {
                            return (false, None);
                        }
                    }
                }
            }
        }
    }
    let mut counts = BTreeMap::new();
    for ((r, s, t), hist) in table {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let c = hist[i * m * m + j * m + k];
                    if c > 0 {
                        counts.insert((i, j, k, r, s, t), c);
                    }
                }
            }
        }
    }
    (true, Some(KappaTable { counts }))
}

/// Independent check of the operator span condition behind triple
/// regularity: every `X_{A_i} D_{A_j} X_{A_k}` lies in the span of the
/// `D_{A_r} X_{A_s} D_{A_t}`, decided by a dense linear solve at `n^2`
/// dimension.
pub fn triply_span_check(sd: &SchemeData, cap: usize, tol: &Tolerance) -> Result<bool> {
    let n = sd.n;
    if n * n > cap {
        return Err(Error::DimensionTooLarge(n * n, cap));
    }
    let m = sd.schur_basis.len();
    let mut span_cols: Vec<ComplexMatrix> = Vec::with_capacity(m * m * m);
    for r in &sd.schur_basis {
        for s in &sd.schur_basis {
            for t in &sd.schur_basis {
                let op = Endomorphism::Composite(vec![
                    Endomorphism::SchurMult(r.clone()),
                    Endomorphism::LeftMult(s.clone()),
                    Endomorphism::SchurMult(t.clone()),
                ]);
                span_cols.push(op.materialize(n)?);
            }
        }
    }
    let span = MatrixSubspace::span(n * n, &span_cols, tol)?;
    for i in &sd.schur_basis {
        for j in &sd.schur_basis {
            for k in &sd.schur_basis {
                let op = Endomorphism::Composite(vec![
                    Endomorphism::LeftMult(i.clone()),
                    Endomorphism::SchurMult(j.clone()),
                    Endomorphism::LeftMult(k.clone()),
                ]);
                let dense = op.materialize(n)?;
                if !span.contains(&dense, tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Report of the hyper-duality conjugation identities.
#[derive(Debug, Clone)]
pub struct HyperDualityReport {
    pub holds: bool,
    /// worst residual among the conjugation identities, relative to the
    /// operator scale
    pub max_residual: f64,
    /// residual of the two expressions for the conjugating operator
    pub lambda_consistency: f64,
}

/// Check that conjugation by `Lambda = X_{W^T} D_{W^-} X_W` exchanges the
/// multiplication and Schur-multiplication operators of the Nomura algebra
/// of a spin model: for each basis `M` with `S = theta(M)`,
/// `X_M Lambda = Lambda D_S` and `D_{S^T} Lambda = Lambda X_M`, and the
/// square of the conjugation sends `X_M` to `X_{M^T}`.
pub fn hyper_duality_check(
    model: &SpinModel,
    cap: usize,
    tol: &Tolerance,
) -> Result<HyperDualityReport> {
    let n = model.order();
    if n > cap {
        return Err(Error::DimensionTooLarge(n, cap));
    }
    let w = &model.w;
    let w_sinv = w.schur_inverse(tol)?;
    let lambda = Endomorphism::Composite(vec![
        Endomorphism::LeftMult(w.transpose()),
        Endomorphism::SchurMult(w_sinv.clone()),
        Endomorphism::LeftMult(w.clone()),
    ])
    .materialize(n)?;
    // the alternative expression through theta(W^T) = d (W^-)^T must agree
    let alt = Endomorphism::Composite(vec![
        Endomorphism::SchurMult(w_sinv.clone()),
        Endomorphism::LeftMult(w.clone()),
        Endomorphism::SchurMult(w_sinv.transpose().scale(model.d)),
    ])
    .materialize(n)?;
    let lambda_consistency = lambda.max_abs_diff(&alt);
    let scale = lambda.max_abs().max(1.0);
    if lambda_consistency > tol.abs_eps * scale * 100.0 + tol.rel_eps * scale * (n as f64) {
        return Ok(HyperDualityReport {
            holds: false,
            max_residual: f64::INFINITY,
            lambda_consistency,
        });
    }

    let nd = nomura_algebra_type_ii(w, tol)?;
    let mut max_residual: f64 = 0.0;
    for basis_m in nd.space.basis() {
        let (s, eig_res) = nd.read_theta(basis_m);
        max_residual = max_residual.max(eig_res * scale);
        let x_m = Endomorphism::LeftMult(basis_m.clone()).materialize(n)?;
        let d_s = Endomorphism::SchurMult(s.clone()).materialize(n)?;
        let d_st = Endomorphism::SchurMult(s.transpose()).materialize(n)?;
        // Lambda^{-1} X_M Lambda = D_S
        let r1 = x_m.matmul(&lambda).max_abs_diff(&lambda.matmul(&d_s));
        // Lambda^{-1} D_{S^T} Lambda = X_M
        let r2 = d_st.matmul(&lambda).max_abs_diff(&lambda.matmul(&x_m));
        // Psi^2(X_M) = X_{M^T}
        let x_mt = Endomorphism::LeftMult(basis_m.transpose()).materialize(n)?;
        let l2 = lambda.matmul(&lambda);
        let r3 = x_m.matmul(&l2).max_abs_diff(&l2.matmul(&x_mt));
        max_residual = max_residual.max(r1).max(r2).max(r3 / scale);
    }
    let thr = (tol.abs_eps + tol.rel_eps * scale * scale) * 100.0;
    Ok(HyperDualityReport {
        holds: max_residual <= thr.max(1e-8 * scale * scale),
        max_residual,
        lambda_consistency,
    })
}

/// The pentagon scheme: identity, the 5-cycle, and its complement.
pub fn pentagon_scheme() -> RawScheme {
    let n = 5;
    let a1 = ComplexMatrix::from_fn(n, |i, j| {
        let d = (n + i - j) % n;
        if d == 1 || d == 4 {
            cr(1.0)
        } else {
            cr(0.0)
        }
    });
    let a2 = ComplexMatrix::ones(n)
        .sub(&ComplexMatrix::identity(n))
        .sub(&a1);
    RawScheme { matrices: vec![ComplexMatrix::identity(n), a1, a2] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pentagon_scheme_validates() {
        let sd = validate_scheme(&pentagon_scheme(), &tol()).unwrap();
        assert_eq!(sd.classes(), 2);
        assert_eq!(sd.transpose_perm, vec![0, 1, 2]);
    }

    #[test]
    fn trivial_scheme_validates() {
        let i = ComplexMatrix::identity(4);
        let jmi = ComplexMatrix::ones(4).sub(&i);
        let sd = validate_scheme(&RawScheme::new(vec![i, jmi]).unwrap(), &tol()).unwrap();
        assert_eq!(sd.classes(), 1);
    }

    #[test]
    fn transpose_closure_failure_detected() {
        let n = 3;
        let shift = ComplexMatrix::from_fn(n, |i, j| {
            if (i + 1) % n == j {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let rest = ComplexMatrix::ones(n)
            .sub(&ComplexMatrix::identity(n))
            .sub(&shift);
        let rs = RawScheme::new(vec![ComplexMatrix::identity(n), shift, rest]).unwrap();
        // Z_3 group scheme is fine (transpose of the shift is its square)
        assert!(validate_scheme(&rs, &tol()).is_ok());

        // dropping closure breaks axiom (c): merge shift^2 into a non-01 mix
        let bad = ComplexMatrix::from_fn(3, |i, j| {
            if i == 0 && j == 1 {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let rest2 = ComplexMatrix::ones(3)
            .sub(&ComplexMatrix::identity(3))
            .sub(&bad);
        let rs2 = RawScheme::new(vec![ComplexMatrix::identity(3), bad, rest2]).unwrap();
        assert!(matches!(
            validate_scheme(&rs2, &tol()),
            Err(Error::AxiomFailure { .. })
        ));
    }

    #[test]
    fn pentagon_is_triply_regular() {
        let sd = validate_scheme(&pentagon_scheme(), &tol()).unwrap();
        let (ok, table) = triply_regular_check(&sd);
        assert!(ok);
        let table = table.unwrap();
        // counting identity: summing kappa over (i,j,k) for a realized
        // signature gives n
        let mut per_rst: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
        for (&(_, _, _, r, s, t), &c) in &table.counts {
            *per_rst.entry((r, s, t)).or_insert(0) += c;
        }
        assert!(per_rst.values().all(|&v| v == 5));
    }

    #[test]
    fn trivial_scheme_is_triply_regular() {
        let i = ComplexMatrix::identity(5);
        let jmi = ComplexMatrix::ones(5).sub(&i);
        let sd = validate_scheme(&RawScheme::new(vec![i, jmi]).unwrap(), &tol()).unwrap();
        let (ok, _) = triply_regular_check(&sd);
        assert!(ok);
    }

    #[test]
    fn rook_4x4_scheme_is_triply_regular() {
        // the 4x4 rook's graph SRG(16,6,2,2) is locally strongly regular on
        // both sides (neighbourhoods 2K_3 and L_2(3)-like), so the counts
        // come out consistent
        let n = 16;
        let a1 = ComplexMatrix::from_fn(n, |u, v| {
            let (r1, c1) = (u / 4, u % 4);
            let (r2, c2) = (v / 4, v % 4);
            if u != v && (r1 == r2 || c1 == c2) {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let a2 = ComplexMatrix::ones(n)
            .sub(&ComplexMatrix::identity(n))
            .sub(&a1);
        let sd = validate_scheme(
            &RawScheme::new(vec![ComplexMatrix::identity(n), a1, a2]).unwrap(),
            &tol(),
        )
        .unwrap();
        let (ok, _) = triply_regular_check(&sd);
        assert!(ok);
    }

    #[test]
    fn shrikhande_scheme_is_not_triply_regular() {
        // same parameters SRG(16,6,2,2) but locally a hexagon, which is not
        // strongly regular
        let n = 16;
        let a1 = ComplexMatrix::from_fn(n, |u, v| {
            let (r1, c1) = ((u / 4) as i32, (u % 4) as i32);
            let (r2, c2) = ((v / 4) as i32, (v % 4) as i32);
            let dr = (r2 - r1).rem_euclid(4);
            let dc = (c2 - c1).rem_euclid(4);
            let adj = matches!((dr, dc), (0, 1) | (0, 3) | (1, 0) | (3, 0) | (1, 1) | (3, 3));
            if adj {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let a2 = ComplexMatrix::ones(n)
            .sub(&ComplexMatrix::identity(n))
            .sub(&a1);
        let sd = validate_scheme(
            &RawScheme::new(vec![ComplexMatrix::identity(n), a1, a2]).unwrap(),
            &tol(),
        )
        .unwrap();
        let (ok, _) = triply_regular_check(&sd);
        assert!(!ok);
    }

    #[test]
    fn pentagon_span_condition() {
        let sd = validate_scheme(&pentagon_scheme(), &tol()).unwrap();
        assert!(triply_span_check(&sd, 1 << 10, &tol()).unwrap());
    }

    #[test]
    fn hyper_duality_for_potts() {
        let m = crate::spin::potts(4, Default::default()).unwrap();
        let rep = hyper_duality_check(&m, 12, &tol()).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn hyper_duality_rejects_non_spin_type_ii() {
        // a generic order-4 type-II matrix is not a spin model and the two
        // expressions for the conjugating operator disagree
        let lam = cr(2.0);
        let generic = ComplexMatrix::from_rows(&[
            vec![cr(1.0), cr(1.0), cr(1.0), cr(1.0)],
            vec![cr(1.0), cr(1.0), cr(-1.0), cr(-1.0)],
            vec![cr(1.0), cr(-1.0), lam, -lam],
            vec![cr(1.0), cr(-1.0), -lam, lam],
        ])
        .unwrap();
        let fake = SpinModel { w: generic, d: cr(2.0), a: cr(1.0) };
        let rep = hyper_duality_check(&fake, 12, &tol()).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn cap_is_enforced() {
        let m = crate::spin::potts(4, Default::default()).unwrap();
        assert!(matches!(
            hyper_duality_check(&m, 3, &tol()),
            Err(Error::DimensionTooLarge(4, 3))
        ));
    }
}
