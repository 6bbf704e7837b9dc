//! Braid-group representations from a matrix pair, braid-relation checks,
//! and normalized Markov traces.
//!
//! On `m` strands with `k = ceil(m/2)` tensor factors, the odd generator
//! `g_{2h-1}` applies `A` to factor `h` and the even generator `g_{2h}`
//! scales the basis tensor `e_{r_1} ⊗ .. ⊗ e_{r_k}` by `B_{r_h, r_{h+1}}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jones::{check_one_sided, link_normalize, JonesPair};
use crate::matrix::{cr, ComplexMatrix, Tolerance};

pub const DEFAULT_DIMENSION_CAP: usize = 1 << 18;

/// A word in the braid generators: letters `±1..±(m-1)`, applied
/// right-to-left; the empty word is the identity braid.
#[derive(Debug, Clone)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::InvalidInput("need at least two strands".into()));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidInput(format!("letter {l} out of range")));
            }
        }
        Ok(BraidWord { strands, letters })
    }
}

/// Generator actions on `V^{⊗k}`, realized factor-wise.
#[derive(Debug, Clone)]
pub struct BraidRep {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    a_inv: ComplexMatrix,
    b_sinv: ComplexMatrix,
    pub strands: usize,
    pub factors: usize,
    dim: usize,
}

/// Build the representation; the `n^k`-dimensional carrier is never
/// materialized as a dense operator.
pub fn build_rep(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    strands: usize,
    cap: usize,
    tol: &Tolerance,
) -> Result<BraidRep> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    if strands < 2 {
        return Err(Error::InvalidInput("need at least two strands".into()));
    }
    let factors = strands.div_ceil(2);
    let dim = n
        .checked_pow(factors as u32)
        .filter(|&d| d <= cap)
        .ok_or(Error::DimensionTooLarge(n.pow(factors as u32), cap))?;
    let a_inv = a
        .inverse(tol)
        .map_err(|_| Error::NotInvertible("first matrix of the pair".into()))?;
    let b_sinv = b.schur_inverse(tol)?;
    Ok(BraidRep {
        a: a.clone(),
        b: b.clone(),
        a_inv,
        b_sinv,
        strands,
        factors,
        dim,
    })
}

impl BraidRep {
    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Apply one signed generator to a state vector.
    pub fn apply_letter(&self, letter: i32, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx >= self.strands {
            return Err(Error::InvalidInput(format!("letter {letter} out of range")));
        }
        if v.len() != self.dim {
            return Err(Error::OrderMismatch(self.dim, v.len()));
        }
        let n = self.order();
        if idx % 2 == 1 {
            // odd generator 2h-1: matrix on factor h (1-based)
            let h = (idx + 1) / 2;
            let mat = if letter > 0 { &self.a } else { &self.a_inv };
            Ok(self.apply_factor(mat, h, v))
        } else {
            // even generator 2h: diagonal weight B_{r_h, r_{h+1}}
            let h = idx / 2;
            let mat = if letter > 0 { &self.b } else { &self.b_sinv };
            let stride_h = n.pow((self.factors - h) as u32);
            let stride_h1 = n.pow((self.factors - h - 1) as u32);
            let mut out = v.to_vec();
            for (x, entry) in out.iter_mut().enumerate() {
                let rh = (x / stride_h) % n;
                let rh1 = (x / stride_h1) % n;
                *entry *= mat.get(rh, rh1);
            }
            Ok(out)
        }
    }

    /// Apply `M` to tensor factor `h` (1-based) of the state.
    fn apply_factor(&self, m: &ComplexMatrix, h: usize, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.order();
        let stride = n.pow((self.factors - h) as u32);
        let mut out = vec![cr(0.0); v.len()];
        let block = stride * n;
        for base in (0..v.len()).step_by(block) {
            for offset in 0..stride {
                for i in 0..n {
                    let mut acc = cr(0.0);
                    for j in 0..n {
                        let vj = v[base + offset + j * stride];
                        if vj != cr(0.0) {
                            acc += m.get(i, j) * vj;
                        }
                    }
                    out[base + offset + i * stride] = acc;
                }
            }
        }
        out
    }

    /// Apply a word (letters right-to-left) to a state vector.
    pub fn apply_word(&self, word: &BraidWord, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if word.strands != self.strands {
            return Err(Error::OrderMismatch(word.strands, self.strands));
        }
        let mut state = v.to_vec();
        for &letter in word.letters.iter().rev() {
            state = self.apply_letter(letter, &state)?;
        }
        Ok(state)
    }

    /// Trace of the represented word, summed over the standard basis
    /// tensors without a dense operator.
    pub fn trace(&self, word: &BraidWord) -> Result<Complex64> {
        let mut total = cr(0.0);
        let mut basis = vec![cr(0.0); self.dim];
        for x in 0..self.dim {
            basis[x] = cr(1.0);
            let image = self.apply_word(word, &basis)?;
            total += image[x];
            basis[x] = cr(0.0);
        }
        Ok(total)
    }
}

/// Residuals of the braid relations, with the one-sided cross-checks.
#[derive(Debug, Clone)]
pub struct BraidRelationReport {
    /// residual of `g_i g_{i+1} g_i = g_{i+1} g_i g_{i+1}` per `i` (1-based)
    pub adjacent: Vec<f64>,
    /// worst far-commutation residual over `|i - j| >= 2`
    pub far_commutation: f64,
    /// every relation holds within tolerance
    pub all_hold: bool,
    /// the `(1,2)` relation matches the one-sided check of `(A, B)`
    pub one_sided_consistent: bool,
    /// the `(2,3)` relation (when present) matches the one-sided check of
    /// `(A, B^T)`
    pub transposed_consistent: bool,
}

/// Check every adjacent braid relation and far commutation on the full
/// standard basis, and cross-check the operator criteria: relation `(1,2)`
/// holds exactly when `(A,B)` is one-sided and `(2,3)` exactly when
/// `(A,B^T)` is.
pub fn verify_braid_relations(rep: &BraidRep, tol: &Tolerance) -> Result<BraidRelationReport> {
    let m = rep.strands;
    let scale = rep.a.max_abs().max(rep.b.max_abs()).powi(3).max(1.0);
    let thr = tol.abs_eps + tol.rel_eps * scale * rep.order() as f64;

    let mut adjacent = Vec::new();
    for i in 1..m.saturating_sub(1) {
        let w1 = BraidWord::new(m, vec![i as i32, (i + 1) as i32, i as i32])?;
        let w2 = BraidWord::new(m, vec![(i + 1) as i32, i as i32, (i + 1) as i32])?;
        adjacent.push(word_difference(rep, &w1, &w2)?);
    }
    let mut far = 0.0f64;
    for i in 1..m {
        for j in (i + 2)..m {
            let w1 = BraidWord::new(m, vec![i as i32, j as i32])?;
            let w2 = BraidWord::new(m, vec![j as i32, i as i32])?;
            far = far.max(word_difference(rep, &w1, &w2)?);
        }
    }
    let all_hold = adjacent.iter().all(|&r| r <= thr) && far <= thr;

    let os = check_one_sided(&rep.a, &rep.b, tol)?;
    let one_sided_consistent = adjacent
        .first()
        .map(|&r| (r <= thr) == os.holds)
        .unwrap_or(true);
    let transposed_consistent = if adjacent.len() >= 2 {
        let os_t = check_one_sided(&rep.a, &rep.b.transpose(), tol)?;
        (adjacent[1] <= thr) == os_t.holds
    } else {
        true
    };

    Ok(BraidRelationReport {
        adjacent,
        far_commutation: far,
        all_hold,
        one_sided_consistent,
        transposed_consistent,
    })
}

fn word_difference(rep: &BraidRep, w1: &BraidWord, w2: &BraidWord) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut basis = vec![cr(0.0); rep.dim()];
    for x in 0..rep.dim() {
        basis[x] = cr(1.0);
        let im1 = rep.apply_word(w1, &basis)?;
        let im2 = rep.apply_word(w2, &basis)?;
        for (a, b) in im1.iter().zip(&im2) {
            worst = worst.max((a - b).norm());
        }
        basis[x] = cr(0.0);
    }
    Ok(worst)
}

/// Trace of the represented braid word, optionally after rescaling the
/// pair so that the Markov conditions hold (`A ∘ I = A^{-1} ∘ I =
/// n^{-1/2} I` and `BJ = B^- J = sqrt(n) J`).
pub fn braid_trace(
    jp: &JonesPair,
    word: &BraidWord,
    normalize: bool,
    cap: usize,
    tol: &Tolerance,
) -> Result<Complex64> {
    let pair = if normalize { link_normalize(jp, tol)? } else { jp.clone() };
    let rep = build_rep(&pair.a, &pair.b, word.strands, cap, tol)?;
    rep.trace(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::potts_pair;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn cap() -> usize {
        DEFAULT_DIMENSION_CAP
    }

    #[test]
    fn identity_pair_acts_trivially() {
        let rep = build_rep(
            &ComplexMatrix::identity(2),
            &ComplexMatrix::ones(2),
            3,
            cap(),
            &tol(),
        )
        .unwrap();
        let mut v = vec![cr(0.0); 4];
        v[1] = cr(1.0);
        for letter in [1, 2, -1, -2] {
            let out = rep.apply_letter(letter, &v).unwrap();
            assert_eq!(out, v);
        }
    }

    #[test]
    fn generator_actions_unwind_definitions() {
        // m = 3, k = 2: g1 is A on the left factor, g2 the diagonal weight
        let (jp, _) = potts_pair(2);
        let rep = build_rep(&jp.a, &jp.b, 3, cap(), &tol()).unwrap();
        let n = 2;
        // basis tensor e_0 ⊗ e_1 has index 0*2 + 1
        let mut v = vec![cr(0.0); 4];
        v[1] = cr(1.0);
        let g1 = rep.apply_letter(1, &v).unwrap();
        for i in 0..n {
            assert!((g1[i * 2 + 1] - jp.a.get(i, 0)).norm() < 1e-12);
        }
        let g2 = rep.apply_letter(2, &v).unwrap();
        assert!((g2[1] - jp.b.get(0, 1)).norm() < 1e-12);

        // m = 4 needs k = 2 and g3 acts on the right factor
        let rep4 = build_rep(&jp.a, &jp.b, 4, cap(), &tol()).unwrap();
        let g3 = rep4.apply_letter(3, &v).unwrap();
        for j in 0..n {
            assert!((g3[j] - jp.a.get(j, 1)).norm() < 1e-12);
        }
    }

    #[test]
    fn homomorphism_and_inverses() {
        let (jp, _) = potts_pair(2);
        let rep = build_rep(&jp.a, &jp.b, 4, cap(), &tol()).unwrap();
        let w_uv = BraidWord::new(4, vec![1, 2, 3, -1]).unwrap();
        let w_u = BraidWord::new(4, vec![1, 2]).unwrap();
        let w_v = BraidWord::new(4, vec![3, -1]).unwrap();
        let mut basis = vec![cr(0.0); rep.dim()];
        for x in 0..rep.dim() {
            basis[x] = cr(1.0);
            let direct = rep.apply_word(&w_uv, &basis).unwrap();
            let composed = rep
                .apply_word(&w_u, &rep.apply_word(&w_v, &basis).unwrap())
                .unwrap();
            for (a, b) in direct.iter().zip(&composed) {
                assert!((a - b).norm() < 1e-10);
            }
            // sigma sigma^{-1} is the identity
            let cancel = BraidWord::new(4, vec![2, -2]).unwrap();
            let same = rep.apply_word(&cancel, &basis).unwrap();
            for (k, z) in same.iter().enumerate() {
                let expect = if k == x { cr(1.0) } else { cr(0.0) };
                assert!((z - expect).norm() < 1e-10);
            }
            basis[x] = cr(0.0);
        }
    }

    #[test]
    fn far_commutation_holds_for_any_pair() {
        // g1 and g3 commute regardless of the Jones condition
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = ComplexMatrix::from_fn(3, |_, _| {
            Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0))
        });
        let b = ComplexMatrix::from_fn(3, |_, _| {
            Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0))
        });
        let rep = build_rep(&a, &b, 4, cap(), &tol()).unwrap();
        let rel = verify_braid_relations(&rep, &tol()).unwrap();
        assert!(rel.far_commutation < 1e-10);
        assert!(rel.one_sided_consistent);
        assert!(rel.transposed_consistent);
    }

    #[test]
    fn jones_pair_satisfies_all_relations() {
        let (jp, _) = potts_pair(4);
        let rep = build_rep(&jp.a, &jp.b, 4, cap(), &tol()).unwrap();
        let rel = verify_braid_relations(&rep, &tol()).unwrap();
        assert!(rel.all_hold, "{rel:?}");
    }

    #[test]
    fn one_sided_only_pair_fails_second_relation() {
        let (jp, _) = potts_pair(4);
        let n = jp.order();
        // (A, D_1 J) is one-sided but its transpose partner is not
        let d1 = ComplexMatrix::from_fn(n, |h, k| {
            if h == k {
                jp.b.get(h, 0)
            } else {
                cr(0.0)
            }
        });
        let b = d1.matmul(&ComplexMatrix::ones(n));
        let rep = build_rep(&jp.a, &b, 4, cap(), &tol()).unwrap();
        let rel = verify_braid_relations(&rep, &tol()).unwrap();
        assert!(rel.adjacent[0] < 1e-9);
        assert!(rel.adjacent[1] > 1e-3, "{rel:?}");
        assert!(rel.one_sided_consistent && rel.transposed_consistent);
    }

    #[test]
    fn empty_word_trace_is_dimension() {
        let (jp, _) = potts_pair(2);
        let rep = build_rep(&jp.a, &jp.b, 3, cap(), &tol()).unwrap();
        let w = BraidWord::new(3, vec![]).unwrap();
        let tr = rep.trace(&w).unwrap();
        assert!((tr - cr(4.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_matches_dense_oracle() {
        // materialize the full operator column by column and compare
        let (jp, _) = potts_pair(2);
        let norm = crate::jones::link_normalize(&jp, &tol()).unwrap();
        let rep = build_rep(&norm.a, &norm.b, 3, cap(), &tol()).unwrap();
        for letters in [vec![1, 1, 1], vec![1, 2, -1, 2], vec![2, 2]] {
            let w = BraidWord::new(3, letters).unwrap();
            let mut dense_tr = cr(0.0);
            let mut basis = vec![cr(0.0); rep.dim()];
            for x in 0..rep.dim() {
                basis[x] = cr(1.0);
                let col = rep.apply_word(&w, &basis).unwrap();
                dense_tr += col[x];
                basis[x] = cr(0.0);
            }
            let streamed = rep.trace(&w).unwrap();
            assert!((dense_tr - streamed).norm() < 1e-12);
        }
    }

    #[test]
    fn markov_property_under_normalization() {
        use rand::{Rng, SeedableRng};
        let (jp, _) = potts_pair(4);
        let norm = link_normalize(&jp, &tol()).unwrap();
        let rep = build_rep(&norm.a, &norm.b, 4, cap(), &tol()).unwrap();
        let n = cr(4.0);
        let tr_a = norm.a.trace();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let letters: Vec<i32> = (0..6)
                .map(|_| {
                    let g = rng.gen_range(1..=2i32);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let h = BraidWord::new(4, letters.clone()).unwrap();
            let mut extended = letters.clone();
            extended.push(3);
            let hg = BraidWord::new(4, extended).unwrap();
            let lhs = rep.trace(&hg).unwrap();
            let rhs = rep.trace(&h).unwrap() * tr_a / n;
            assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
        }
        // the normalization pins the scale so that positive and inverse
        // moves both multiply the trace by exactly n^{-1/2}
        let root_n = cr(2.0);
        let h = BraidWord::new(4, vec![1, 2, -1]).unwrap();
        let hg = BraidWord::new(4, vec![1, 2, -1, 3]).unwrap();
        let hg_inv = BraidWord::new(4, vec![1, 2, -1, -3]).unwrap();
        let tr_h = rep.trace(&h).unwrap();
        assert!((rep.trace(&hg).unwrap() - tr_h / root_n).norm() < 1e-9);
        assert!((rep.trace(&hg_inv).unwrap() - tr_h / root_n).norm() < 1e-9);
        // at any other scale the absolute factor is wrong
        let scaled = crate::jones::check_jones_pair(
            &norm.a.scale(cr(2.0)),
            &norm.b.scale(cr(2.0)),
            crate::jones::DSign::Minus,
            &tol(),
        )
        .unwrap();
        let rep_raw = build_rep(&scaled.a, &scaled.b, 4, cap(), &tol()).unwrap();
        let tr_h_raw = rep_raw.trace(&h).unwrap();
        let lhs_raw = rep_raw.trace(&hg).unwrap();
        assert!((lhs_raw - tr_h_raw / root_n).norm() > 1e-3);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let (jp, _) = potts_pair(4);
        assert!(matches!(
            build_rep(&jp.a, &jp.b, 20, 1 << 10, &tol()),
            Err(Error::DimensionTooLarge(_, _))
        ));
    }
}
