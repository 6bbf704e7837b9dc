//! Schur/principal idempotent bases, Bose-Mesner predicates, and assembly
//! of association-scheme data from a subspace.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::subspace::MatrixSubspace;

/// Diagnostics from the Bose-Mesner predicate.
#[derive(Debug, Clone)]
pub struct BoseMesnerCheck {
    pub is_bose_mesner: bool,
    pub failing: Vec<&'static str>,
}

/// A Bose-Mesner algebra is commutative, contains `I` and `J`, and is closed
/// under multiplication, the Schur product, and the transpose.
pub fn is_bose_mesner(space: &MatrixSubspace, tol: &Tolerance) -> BoseMesnerCheck {
    let mut s = space.clone();
    s.compute_flags(tol);
    let f = s.flags;
    let mut failing = Vec::new();
    if !f.contains_identity {
        failing.push("contains_identity");
    }
    if !f.contains_all_ones {
        failing.push("contains_all_ones");
    }
    if !f.schur_closed {
        failing.push("schur_closed");
    }
    if !f.mult_closed {
        failing.push("mult_closed");
    }
    if !f.transpose_closed {
        failing.push("transpose_closed");
    }
    if !f.commutative {
        failing.push("commutative");
    }
    BoseMesnerCheck { is_bose_mesner: failing.is_empty(), failing }
}

/// 01 basis of a Schur-closed subspace containing `J`.
///
/// Positions `(i,j)` are grouped by the joint value pattern of all basis
/// matrices, merged under tolerance; the class indicators are the Schur
/// idempotents, ordered by smallest row-major position.
pub fn schur_idempotent_basis(
    space: &MatrixSubspace,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let n = space.order();
    let ones = ComplexMatrix::ones(n);
    if !space.contains(&ones, tol) {
        return Err(Error::NotSchurClosed(space.residual(&ones)));
    }
    for (i, bi) in space.basis().iter().enumerate() {
        for bj in &space.basis()[i..] {
            let s = bi.schur_product(bj)?;
            if !space.contains(&s, tol) {
                return Err(Error::NotSchurClosed(space.residual(&s)));
            }
        }
    }

    let dim = space.dim();
    let scale = space
        .basis()
        .iter()
        .map(|b| b.max_abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let merge_eps = (tol.abs_eps + tol.rel_eps * scale).max(1e-12 * scale);

    // joint value keys per position
    let total = n * n;
    let mut keys: Vec<Vec<Complex64>> = Vec::with_capacity(total);
    for i in 0..n {
        for j in 0..n {
            keys.push(space.basis().iter().map(|b| b.get(i, j)).collect());
        }
    }
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for p in 0..total {
        for q in (p + 1)..total {
            let dist = (0..dim)
                .map(|k| (keys[p][k] - keys[q][k]).norm())
                .fold(0.0, f64::max);
            if dist <= merge_eps {
                let rp = find(&mut parent, p);
                let rq = find(&mut parent, q);
                if rp != rq {
                    parent[rq.max(rp)] = rq.min(rp);
                }
            }
        }
    }
    let mut class_of_root: Vec<(usize, usize)> = Vec::new(); // (root, class index)
    let mut indicators: Vec<ComplexMatrix> = Vec::new();
    for p in 0..total {
        let r = find(&mut parent, p);
        let idx = match class_of_root.iter().find(|(root, _)| *root == r) {
            Some(&(_, idx)) => idx,
            None => {
                class_of_root.push((r, indicators.len()));
                indicators.push(ComplexMatrix::zeros(n));
                indicators.len() - 1
            }
        };
        indicators[idx].set(p / n, p % n, cr(1.0));
    }

    if indicators.len() != dim {
        return Err(Error::StructureMismatch(format!(
            "entry-pattern classes {} != dimension {}",
            indicators.len(),
            dim
        )));
    }
    for ind in &indicators {
        if !space.contains(ind, tol) {
            return Err(Error::NotSchurClosed(space.residual(ind)));
        }
    }
    Ok(indicators)
}

/// Principal idempotents of a commutative, transpose- and multiplication-
/// closed subspace containing `I`, by simultaneous diagonalization.
///
/// The joint eigenspaces are refined block by block against the Hermitian
/// generators `(R + R^T)/2` and `i (R - R^T)/2` extracted from a real basis
/// of the space; the orthogonal projections onto the final blocks are the
/// idempotents.
pub fn principal_idempotents(
    space: &MatrixSubspace,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let n = space.order();
    let mut s = space.clone();
    s.compute_flags(tol);
    if !s.flags.commutative {
        return Err(Error::NotCommutative(0.0));
    }
    if !s.flags.mult_closed || !s.flags.transpose_closed || !s.flags.contains_identity {
        return Err(Error::NotClosed(0.0));
    }
    // real basis: the space must be closed under conjugation
    let mut real_gens: Vec<ComplexMatrix> = Vec::new();
    for b in space.basis() {
        if !space.contains(&b.conjugate(), tol) {
            return Err(Error::NotClosed(space.residual(&b.conjugate())));
        }
        real_gens.push(b.map(|z| cr(z.re)));
        real_gens.push(b.map(|z| cr(z.im)));
    }
    let real_space = MatrixSubspace::span(n, &real_gens, tol)?;
    let mut hermitian_gens: Vec<ComplexMatrix> = Vec::new();
    for r in real_space.basis() {
        let sym = r.add(&r.transpose()).scale(cr(0.5));
        let skew = r.sub(&r.transpose()).scale(Complex64::new(0.0, 0.5));
        for g in [sym, skew] {
            if g.max_abs() > tol.abs_eps {
                hermitian_gens.push(g);
            }
        }
    }

    for cluster_eps in [1e-9, 1e-7, 1e-5] {
        if let Some(idems) = refine_blocks(n, &hermitian_gens, cluster_eps) {
            // validate against the space
            let mut total = ComplexMatrix::zeros(n);
            let mut ok = true;
            for e in &idems {
                total = total.add(e);
                if !space.contains(e, tol) {
                    ok = false;
                    break;
                }
            }
            ok &= total.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-8;
            ok &= idems.len() == space.dim();
            if ok {
                return Ok(idems);
            }
        }
    }
    Err(Error::NotClosed(f64::NAN))
}

fn refine_blocks(
    n: usize,
    gens: &[ComplexMatrix],
    cluster_eps: f64,
) -> Option<Vec<ComplexMatrix>> {
    // each block is an n x b matrix with orthonormal columns
    let mut blocks: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(n, n)];
    for g in gens {
        let gd = g.inner();
        let mut next = Vec::new();
        for v in &blocks {
            if v.ncols() == 1 {
                next.push(v.clone());
                continue;
            }
            let compressed = v.adjoint() * gd * v;
            let eig = compressed.symmetric_eigen();
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
            let scale = eig
                .eigenvalues
                .iter()
                .map(|x| x.abs())
                .fold(0.0, f64::max)
                .max(1.0);
            let mut group: Vec<usize> = vec![order[0]];
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for w in order.windows(2) {
                if (eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]]).abs() > cluster_eps * scale {
                    groups.push(std::mem::take(&mut group));
                }
                group.push(w[1]);
            }
            groups.push(group);
            for idxs in groups {
                let mut sub = DMatrix::zeros(v.ncols(), idxs.len());
                for (c, &k) in idxs.iter().enumerate() {
                    sub.set_column(c, &eig.eigenvectors.column(k));
                }
                next.push(v * sub);
            }
        }
        blocks = next;
    }
    let mut idems = Vec::with_capacity(blocks.len());
    for v in &blocks {
        let proj = v * v.adjoint();
        idems.push(ComplexMatrix::new(proj).ok()?);
    }
    Some(idems)
}

/// Association-scheme data: Schur idempotents, principal idempotents,
/// eigenvalue matrices, transpose permutation, intersection numbers.
#[derive(Debug, Clone)]
pub struct SchemeData {
    pub n: usize,
    /// `A_0 = I, ..., A_d`, pairwise Schur-orthogonal 01 matrices summing to `J`.
    pub schur_basis: Vec<ComplexMatrix>,
    /// `E_0 = J/n, ..., E_d`, orthogonal projections summing to `I`.
    pub principal_basis: Vec<ComplexMatrix>,
    /// `(d+1) x (d+1)` matrix of eigenvalues: `A_i = sum_j P_{j,i} E_j`.
    pub p: ComplexMatrix,
    /// Dual eigenvalues, `Q = n P^{-1}`.
    pub q: ComplexMatrix,
    /// `A_i^T = A_{T(i)}`.
    pub transpose_perm: Vec<usize>,
    /// `p_{ij}^k`, flattened as `i * (d+1)^2 + j * (d+1) + k`.
    pub intersection_numbers: Vec<u64>,
}

impl SchemeData {
    pub fn classes(&self) -> usize {
        self.schur_basis.len() - 1
    }

    pub fn p_number(&self, i: usize, j: usize, k: usize) -> u64 {
        let m = self.schur_basis.len();
        self.intersection_numbers[i * m * m + j * m + k]
    }

    /// Indicator matrix of the transpose map on the Schur basis.
    pub fn transpose_matrix(&self) -> ComplexMatrix {
        let m = self.schur_basis.len();
        ComplexMatrix::from_fn(m, |i, j| {
            if self.transpose_perm[j] == i {
                cr(1.0)
            } else {
                cr(0.0)
            }
        })
    }
}

/// Assemble `SchemeData` from a Bose-Mesner subspace.
pub fn scheme_from_space(space: &MatrixSubspace, tol: &Tolerance) -> Result<SchemeData> {
    let check = is_bose_mesner(space, tol);
    if !check.is_bose_mesner {
        return Err(Error::NotBoseMesner { failing: check.failing.join(", ") });
    }
    let n = space.order();
    let mut schur = schur_idempotent_basis(space, tol)?;

    // identity class first
    let id = ComplexMatrix::identity(n);
    let pos = schur
        .iter()
        .position(|a| a.max_abs_diff(&id) <= 1e-9)
        .ok_or(Error::AxiomFailure { axiom: 'a', witness: "diagonal is not a class".into() })?;
    schur.swap(0, pos);
    schur[1..].sort_by_key(first_support_position);

    // transpose permutation
    let m = schur.len();
    let mut transpose_perm = vec![usize::MAX; m];
    for (i, a) in schur.iter().enumerate() {
        let at = a.transpose();
        let j = schur
            .iter()
            .position(|b| b.max_abs_diff(&at) <= 1e-9)
            .ok_or(Error::AxiomFailure { axiom: 'c', witness: format!("class {i}") })?;
        transpose_perm[i] = j;
    }

    // principal idempotents with J/n first
    let mut principal = principal_idempotents(space, tol)?;
    let jn = ComplexMatrix::ones(n).scale(cr(1.0 / n as f64));
    let pos = principal
        .iter()
        .position(|e| e.max_abs_diff(&jn) <= 1e-7)
        .ok_or(Error::AxiomFailure {
            axiom: 'b',
            witness: "all-ones eigenprojection missing".into(),
        })?;
    principal.swap(0, pos);

    let (p, q) = eigenmatrices(&schur, &principal, n)?;

    // intersection numbers
    let mut inter = vec![0u64; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let prod = schur[i].matmul(&schur[j]);
            for k in 0..m {
                let w = schur[k].inner_product(&prod) / schur[k].inner_product(&schur[k]);
                if w.im.abs() > 1e-6 || (w.re - w.re.round()).abs() > 1e-6 || w.re < -1e-6 {
                    return Err(Error::AxiomFailure {
                        axiom: 'd',
                        witness: format!("p_{{{i}{j}}}^{k} = {w}"),
                    });
                }
                inter[i * m * m + j * m + k] = w.re.round() as u64;
            }
        }
    }

    Ok(SchemeData {
        n,
        schur_basis: schur,
        principal_basis: principal,
        p,
        q,
        transpose_perm,
        intersection_numbers: inter,
    })
}

fn first_support_position(a: &ComplexMatrix) -> usize {
    let n = a.order();
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j).norm() > 0.5 {
                return i * n + j;
            }
        }
    }
    n * n
}

fn eigenmatrices(
    schur: &[ComplexMatrix],
    principal: &[ComplexMatrix],
    n: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let m = schur.len();
    if principal.len() != m {
        return Err(Error::StructureMismatch(format!(
            "{} Schur vs {} principal idempotents",
            m,
            principal.len()
        )));
    }
    let mut p = ComplexMatrix::zeros(m);
    for (i, a) in schur.iter().enumerate() {
        for (j, e) in principal.iter().enumerate() {
            let ae = a.matmul(e);
            let lambda = e.inner_product(&ae) / e.inner_product(e);
            if ae.max_abs_diff(&e.scale(lambda)) > 1e-6 {
                return Err(Error::StructureMismatch(format!(
                    "A_{i} does not act as a scalar on eigenspace {j}"
                )));
            }
            p.set(j, i, lambda);
        }
    }
    let q = p
        .inverse(&Tolerance::default())?
        .scale(cr(n as f64));
    Ok((p, q))
}

/// Result of checking a duality candidate for formal self-duality.
#[derive(Debug, Clone)]
pub struct FormalSelfDuality {
    pub holds: bool,
    /// worst residual among the three functional identities
    pub residual: f64,
    /// `P^2 - nT` residual under the induced idempotent ordering
    pub p_squared_residual: f64,
}

/// Verify that `theta` (given by its images on the Schur basis) is a duality
/// with `theta^2 = n * transpose`, and that `P^2 = nT` under the ordering
/// induced by pairing principal idempotents with Schur idempotents.
pub fn check_formal_self_duality(
    sd: &SchemeData,
    theta: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<FormalSelfDuality> {
    let m = sd.schur_basis.len();
    if theta.len() != m {
        return Err(Error::InvalidInput("one duality image per Schur idempotent".into()));
    }
    let n = sd.n;
    let mut residual: f64 = 0.0;

    // theta maps into the algebra
    let coeffs: Vec<Vec<Complex64>> = theta
        .iter()
        .map(|t| {
            let (c, res) = super::schur_basis_coefficients(&sd.schur_basis, t);
            residual = residual.max(res);
            c
        })
        .collect();

    for i in 0..m {
        for j in 0..m {
            // theta(A_i A_j) = theta(A_i) ∘ theta(A_j)
            let mut lhs = ComplexMatrix::zeros(n);
            for k in 0..m {
                let pnum = sd.p_number(i, j, k);
                if pnum != 0 {
                    lhs = lhs.add(&theta[k].scale(cr(pnum as f64)));
                }
            }
            let rhs = theta[i].schur_product(&theta[j])?;
            residual = residual.max(lhs.max_abs_diff(&rhs));

            // theta(A_i ∘ A_j) = n^{-1} theta(A_i) theta(A_j)
            let lhs2 = if i == j { theta[i].clone() } else { ComplexMatrix::zeros(n) };
            let rhs2 = theta[i].matmul(&theta[j]).scale(cr(1.0 / n as f64));
            residual = residual.max(lhs2.max_abs_diff(&rhs2));
        }
    }

    // theta^2 = n * transpose
    for i in 0..m {
        let mut t2 = ComplexMatrix::zeros(n);
        for (k, w) in coeffs[i].iter().enumerate() {
            t2 = t2.add(&theta[k].scale(*w));
        }
        let expect = sd.schur_basis[i].transpose().scale(cr(n as f64));
        residual = residual.max(t2.max_abs_diff(&expect));
    }

    let (_, p_ordered) = duality_pairing(sd, theta)?;
    let p2 = p_ordered.matmul(&p_ordered);
    let nt = sd.transpose_matrix().scale(cr(n as f64));
    let p_squared_residual = p2.max_abs_diff(&nt);

    let thr = tol.abs_eps * (n as f64) * 100.0 + tol.rel_eps * (n as f64) * (n as f64);
    Ok(FormalSelfDuality {
        holds: residual <= thr && p_squared_residual <= thr,
        residual,
        p_squared_residual,
    })
}

/// Pair principal idempotents with Schur idempotents through a duality:
/// returns the permutation `pi` with `theta(E_{pi(i)}) = A_i` (nearest
/// match, ambiguity is an error) and the matrix of eigenvalues `P` in the
/// reordered principal basis, so that `A_i = sum_j P_{j,i} E'_j` with
/// `E'_j = E_{pi(j)}`.
pub fn duality_pairing(
    sd: &SchemeData,
    theta: &[ComplexMatrix],
) -> Result<(Vec<usize>, ComplexMatrix)> {
    let m = sd.schur_basis.len();
    let n = sd.n;
    // theta(E_i) = n^{-1} sum_j Q_{j,i} theta(A_j)
    let mut pairing = vec![usize::MAX; m];
    for i in 0..m {
        let mut img = ComplexMatrix::zeros(n);
        for j in 0..m {
            img = img.add(&theta[j].scale(sd.q.get(j, i) / cr(n as f64)));
        }
        let mut dists: Vec<(usize, f64)> = sd
            .schur_basis
            .iter()
            .enumerate()
            .map(|(k, a)| (k, img.max_abs_diff(a)))
            .collect();
        dists.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        let (best, best_d) = dists[0];
        if best_d > 1e-6 {
            return Err(Error::AmbiguousPairing(format!(
                "theta(E_{i}) is {best_d:.3e} away from the nearest Schur idempotent"
            )));
        }
        if dists.len() > 1 && dists[1].1 < 1e-6 {
            return Err(Error::AmbiguousPairing(format!(
                "theta(E_{i}) matches two Schur idempotents"
            )));
        }
        // theta(E_i) = A_best, so E' at position `best` is E_i
        pairing[best] = i;
    }
    if pairing.iter().any(|&x| x == usize::MAX) {
        return Err(Error::AmbiguousPairing("pairing is not a bijection".into()));
    }
    let mut p = ComplexMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            p.set(j, i, sd.p.get(pairing[j], i));
        }
    }
    Ok((pairing, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn trivial_space(n: usize) -> MatrixSubspace {
        MatrixSubspace::span(
            n,
            &[ComplexMatrix::identity(n), ComplexMatrix::ones(n)],
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn schur_idempotents_of_span_i_j() {
        let s = trivial_space(4);
        let basis = schur_idempotent_basis(&s, &tol()).unwrap();
        assert_eq!(basis.len(), 2);
        let i4 = ComplexMatrix::identity(4);
        let jmi = ComplexMatrix::ones(4).sub(&i4);
        assert!(basis.iter().any(|b| b.max_abs_diff(&i4) < 1e-12));
        assert!(basis.iter().any(|b| b.max_abs_diff(&jmi) < 1e-12));
    }

    #[test]
    fn schur_idempotents_of_span_j() {
        let s = MatrixSubspace::span(3, &[ComplexMatrix::ones(3)], &tol()).unwrap();
        let basis = schur_idempotent_basis(&s, &tol()).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0].max_abs_diff(&ComplexMatrix::ones(3)) < 1e-12);
    }

    #[test]
    fn principal_idempotents_of_span_i_j() {
        let n = 5;
        let s = trivial_space(n);
        let idems = principal_idempotents(&s, &tol()).unwrap();
        assert_eq!(idems.len(), 2);
        let jn = ComplexMatrix::ones(n).scale(cr(1.0 / n as f64));
        let rest = ComplexMatrix::identity(n).sub(&jn);
        assert!(idems.iter().any(|e| e.max_abs_diff(&jn) < 1e-9));
        assert!(idems.iter().any(|e| e.max_abs_diff(&rest) < 1e-9));
    }

    #[test]
    fn principal_idempotents_of_span_i() {
        let s = MatrixSubspace::span(3, &[ComplexMatrix::identity(3)], &tol()).unwrap();
        let idems = principal_idempotents(&s, &tol()).unwrap();
        assert_eq!(idems.len(), 1);
        assert!(idems[0].max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn pentagon_scheme_has_three_idempotents_of_ranks_1_2_2() {
        let n = 5;
        let a1 = ComplexMatrix::from_fn(n, |i, j| {
            let d = (n + i - j) % n;
            if d == 1 || d == 4 {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let a2 = ComplexMatrix::ones(n).sub(&ComplexMatrix::identity(n)).sub(&a1);
        let space =
            MatrixSubspace::span(n, &[ComplexMatrix::identity(n), a1, a2], &tol()).unwrap();
        let idems = principal_idempotents(&space, &tol()).unwrap();
        assert_eq!(idems.len(), 3);
        let mut ranks: Vec<usize> = idems
            .iter()
            .map(|e| e.trace().re.round() as usize)
            .collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 2, 2]);
    }

    #[test]
    fn diagonal_space_is_not_bose_mesner() {
        let n = 3;
        let gens: Vec<ComplexMatrix> = (0..n)
            .map(|k| {
                ComplexMatrix::from_fn(n, |i, j| if i == j && i == k { cr(1.0) } else { cr(0.0) })
            })
            .collect();
        let s = MatrixSubspace::span(n, &gens, &tol()).unwrap();
        let chk = is_bose_mesner(&s, &tol());
        assert!(!chk.is_bose_mesner);
        assert!(chk.failing.contains(&"contains_all_ones"));
    }

    #[test]
    fn trivial_scheme_data_n3() {
        let sd = scheme_from_space(&trivial_space(3), &tol()).unwrap();
        assert_eq!(sd.classes(), 1);
        // P = [[1, 2], [1, -1]]
        let expect =
            ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![1.0, -1.0]]).unwrap();
        assert!(sd.p.approx_eq(&expect, &tol()));
        let qexpect = sd.p.inverse(&tol()).unwrap().scale(cr(3.0));
        assert!(sd.q.approx_eq(&qexpect, &tol()));
        assert_eq!(sd.transpose_perm, vec![0, 1]);
    }

    #[test]
    fn non_transpose_closed_input_is_rejected() {
        let n = 3;
        let shift = ComplexMatrix::from_fn(n, |i, j| {
            if (i + 1) % n == j {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        // span{I, S, S^2} is closed but span{I, S} alone is not transpose closed
        let s = MatrixSubspace::span(n, &[ComplexMatrix::identity(n), shift], &tol()).unwrap();
        assert!(scheme_from_space(&s, &tol()).is_err());
    }

    #[test]
    fn trivial_scheme_self_duality() {
        // theta(I) = J, theta(J - I) = (n-1)I - (J-I); P = [[1, n-1], [1, -1]]
        let n = 4;
        let sd = scheme_from_space(&trivial_space(n), &tol()).unwrap();
        let i = ComplexMatrix::identity(n);
        let jmi = ComplexMatrix::ones(n).sub(&i);
        let theta = vec![
            ComplexMatrix::ones(n),
            i.scale(cr((n - 1) as f64)).sub(&jmi),
        ];
        let fsd = check_formal_self_duality(&sd, &theta, &tol()).unwrap();
        assert!(fsd.holds, "residuals {} / {}", fsd.residual, fsd.p_squared_residual);

        // a mismatched assignment must fail
        let bad = vec![theta[1].clone(), theta[0].clone()];
        let fsd_bad = check_formal_self_duality(&sd, &bad, &tol());
        assert!(fsd_bad.is_err() || !fsd_bad.unwrap().holds);
    }
}
