//! Spin-model verification and the construction families: Potts models,
//! Abelian-group models, and the symmetric/non-symmetric Hadamard models.

use num_complex::Complex64;

use crate::endo::{words_equal, Factor};
use crate::error::{Error, Result};
use crate::jones::{check_jones_pair, DSign};
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::nomura::nomura_algebra_type_ii;

/// A verified spin model: conditions (I) constant diagonal `a` with row and
/// column sums `d a^{-1}`, (II) type II, and (III) the triple-sum identity
/// with loop variable `d`.
#[derive(Debug, Clone)]
pub struct SpinModel {
    pub w: ComplexMatrix,
    pub d: Complex64,
    pub a: Complex64,
}

impl SpinModel {
    pub fn order(&self) -> usize {
        self.w.order()
    }

    /// The invertible Jones pair `(d^{-1} W, (W^-)^T)` attached to the model.
    pub fn jones_pair(&self, tol: &Tolerance) -> Result<crate::jones::JonesPair> {
        let a = self.w.scale(self.d.inv());
        let b = self.w.schur_inverse(tol)?.transpose();
        let sign = if self.d.re < 0.0 { DSign::Minus } else { DSign::Plus };
        let jp = check_jones_pair(&a, &b, sign, tol)?;
        if !jp.invertible {
            return Err(Error::VerificationFailure(
                "spin model does not yield an invertible Jones pair".into(),
            ));
        }
        Ok(jp)
    }
}

/// Worst residual of condition (III) with a witness triple.
fn type_iii_residual(w: &ComplexMatrix, d: Complex64) -> (f64, (usize, usize, usize)) {
    let n = w.order();
    let mut worst = 0.0f64;
    let mut witness = (0, 0, 0);
    for j in 0..n {
        // column i of yj is W e_i ∘ (W^-)^T e_j, scaled by nothing
        let yj = ComplexMatrix::from_fn(n, |x, i| w.get(x, i) / w.get(j, x));
        let wyj = w.matmul(&yj);
        for i in 0..n {
            let target = d / w.get(j, i);
            for k in 0..n {
                let res = (wyj.get(k, i) - target * yj.get(k, i)).norm();
                if res > worst {
                    worst = res;
                    witness = (i, j, k);
                }
            }
        }
    }
    (worst, witness)
}

/// Check conditions (I)-(III) for `W` with the given loop variable, then
/// cross-check that `(d^{-1} W, (W^-)^T)` is an invertible Jones pair.
pub fn verify_spin_model(
    w: &ComplexMatrix,
    d: Complex64,
    tol: &Tolerance,
) -> Result<SpinModel> {
    let n = w.order();
    let a = w.get(0, 0);
    if a.norm() <= tol.abs_eps {
        return Err(Error::ConditionFailure { condition: "I", i: 0, j: 0, k: 0, residual: a.norm() });
    }
    for i in 0..n {
        let res = (w.get(i, i) - a).norm();
        if res > tol.abs_eps + tol.rel_eps * a.norm() {
            return Err(Error::ConditionFailure { condition: "I", i, j: i, k: 0, residual: res });
        }
    }
    let target = d * a.inv();
    let sum_thr = tol.abs_eps + tol.rel_eps * (n as f64) * w.max_abs();
    for (i, s) in w.row_sums().into_iter().enumerate() {
        let res = (s - target).norm();
        if res > sum_thr {
            return Err(Error::ConditionFailure { condition: "I", i, j: 0, k: 0, residual: res });
        }
    }
    for (j, s) in w.col_sums().into_iter().enumerate() {
        let res = (s - target).norm();
        if res > sum_thr {
            return Err(Error::ConditionFailure { condition: "I", i: 0, j, k: 0, residual: res });
        }
    }
    let t2 = w.type_ii_check(tol);
    if !t2.ok {
        return Err(Error::ConditionFailure {
            condition: "II",
            i: 0,
            j: 0,
            k: 0,
            residual: t2.residual,
        });
    }
    let (res3, (i, j, k)) = type_iii_residual(w, d);
    let scale = (n as f64) * w.max_abs() * w.max_abs() * w.schur_inverse(tol)?.max_abs();
    if res3 > tol.abs_eps + tol.rel_eps * scale {
        return Err(Error::ConditionFailure { condition: "III", i, j, k, residual: res3 });
    }

    let model = SpinModel { w: w.clone(), d, a };
    // dual route: the attached pair must certify as an invertible Jones pair
    model.jones_pair(tol)?;
    Ok(model)
}

/// Potts root selection: which root of `t + 1/t - 2 + n = 0` and which
/// fourth root of `-t`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PottsParams {
    /// take the `-` branch of the quadratic instead of `+`
    pub t_minus: bool,
    /// multiply the principal fourth root of `-t` by `i^k`
    pub u_branch: u8,
}

/// The Potts model `W = -u^3 I + u^{-1}(J - I)` with `u^4 = -t`,
/// `t + 1/t - 2 + n = 0` and loop variable `d = -u^2 - u^{-2}`.
pub fn potts(n: usize, params: PottsParams) -> Result<SpinModel> {
    if n < 2 {
        return Err(Error::BadParameters("order must be at least 2".into()));
    }
    let tol = Tolerance::default();
    let nf = n as f64;
    // t^2 + (n - 2) t + 1 = 0
    let disc = Complex64::new(nf * nf - 4.0 * nf, 0.0).sqrt();
    let t = if params.t_minus {
        (cr(2.0 - nf) - disc) / cr(2.0)
    } else {
        (cr(2.0 - nf) + disc) / cr(2.0)
    };
    let mut u = (-t).powf(0.25);
    for _ in 0..(params.u_branch % 4) {
        u *= Complex64::new(0.0, 1.0);
    }
    let d = -u * u - (u * u).inv();
    let diag = -u * u * u;
    let off = u.inv();
    let w = ComplexMatrix::from_fn(n, |i, j| if i == j { diag } else { off });
    verify_spin_model(&w, d, &tol)
}

/// Mixed-radix index order for products of cyclic groups.
fn mixed_radix(orders: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = orders.iter().product();
    let mut out = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut digits = Vec::with_capacity(orders.len());
        for &m in orders.iter().rev() {
            digits.push(k % m);
            k /= m;
        }
        digits.reverse();
        out.push(digits);
    }
    out
}

/// Character table of a product of cyclic groups: rows are the characters.
pub fn abelian_character_matrix(orders: &[usize]) -> Result<ComplexMatrix> {
    if orders.is_empty() || orders.iter().any(|&m| m == 0) {
        return Err(Error::BadParameters("cyclic orders must be positive".into()));
    }
    let elems = mixed_radix(orders);
    let n = elems.len();
    let omegas: Vec<Complex64> = orders
        .iter()
        .map(|&m| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / m as f64))
        .collect();
    Ok(ComplexMatrix::from_fn(n, |x, y| {
        let mut v = cr(1.0);
        for (k, om) in omegas.iter().enumerate() {
            v *= om.powu((elems[x][k] * elems[y][k]) as u32);
        }
        v
    }))
}

/// Permutation basis of the group scheme of a product of cyclic groups:
/// `(A_z)_{x,y} = 1` iff `y - x = z`.
pub fn abelian_scheme_matrices(orders: &[usize]) -> Result<Vec<ComplexMatrix>> {
    if orders.is_empty() || orders.iter().any(|&m| m == 0) {
        return Err(Error::BadParameters("cyclic orders must be positive".into()));
    }
    let elems = mixed_radix(orders);
    let n = elems.len();
    let mut out = Vec::with_capacity(n);
    for z in &elems {
        out.push(ComplexMatrix::from_fn(n, |x, y| {
            let diff_is_z = elems[y]
                .iter()
                .zip(&elems[x])
                .zip(z.iter().zip(orders))
                .all(|((ye, xe), (ze, m))| (ye + m - xe) % m == *ze);
            if diff_is_z {
                cr(1.0)
            } else {
                cr(0.0)
            }
        }));
    }
    Ok(out)
}

/// The cyclic-group model `W_{x,y} = omega^{(x-y)^2}` for odd `n`, with
/// `omega = exp(2 pi i a / n)`, `gcd(a, n) = 1`. The loop variable is the
/// quadratic sum `sum_z omega^{z^2}`, computed and then verified, never
/// assumed.
pub fn cyclic_spin_model(n: usize, omega_power: usize, tol: &Tolerance) -> Result<SpinModel> {
    if n % 2 == 0 {
        return Err(Error::BadParameters(
            "cyclic construction with an n-th root needs odd order".into(),
        ));
    }
    if n < 3 || gcd(omega_power % n, n) != 1 {
        return Err(Error::BadParameters("omega must be a primitive n-th root".into()));
    }
    let omega = Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * (omega_power % n) as f64 / n as f64,
    );
    let w = ComplexMatrix::from_fn(n, |x, y| {
        let diff = (n + x - y) % n;
        omega.powu(((diff * diff) % n) as u32)
    });
    let d: Complex64 = (0..n).map(|z| omega.powu(((z * z) % n) as u32)).sum();
    let model = verify_spin_model(&w, d, tol)?;
    // the model must lie in its own Nomura algebra
    let nd = nomura_algebra_type_ii(&w, tol)?;
    if !nd.space.contains(&w, tol) {
        return Err(Error::VerificationFailure(
            "cyclic model is not in its Nomura algebra".into(),
        ));
    }
    Ok(model)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-condition report for the four-block Hadamard-type assembly.
#[derive(Debug, Clone)]
pub struct HadamardBlockReport {
    /// (a) `B` is type II
    pub b_type_ii: bool,
    /// (b) `A` and `C` are symmetric spin models with loop `d`
    pub a_c_symmetric_spin: bool,
    /// (c) `X_C D_{(B^-)^T} X_{B^T} = d D_{(B^-)^T} X_{B^T} D_{A^-}`
    pub cond_c: bool,
    /// (d) `X_C D_{(B^-)^T} X_{(B^-)^T} = eps d D_{B^T} X_{B^T} D_{A^-}`
    pub cond_d: bool,
    /// the assembled `4n x 4n` matrix verifies as a spin model with loop `2d`
    pub assembled_is_spin_model: bool,
    /// assembled result agrees with the conjunction of (a)-(d)
    pub consistent: bool,
}

impl HadamardBlockReport {
    pub fn all_conditions(&self) -> bool {
        self.b_type_ii && self.a_c_symmetric_spin && self.cond_c && self.cond_d
    }
}

/// Assemble the four-block matrix
/// `[[A, A, B, -B], [A, A, -B, B], [eB^T, -eB^T, C, C], [-eB^T, eB^T, C, C]]`.
pub fn hadamard_block_matrix(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c_blk: &ComplexMatrix,
    epsilon: f64,
) -> Result<ComplexMatrix> {
    let bt = b.transpose().scale(cr(epsilon));
    let nbt = bt.scale(cr(-1.0));
    let nb = b.scale(cr(-1.0));
    ComplexMatrix::from_blocks(&[
        vec![a.clone(), a.clone(), b.clone(), nb.clone()],
        vec![a.clone(), a.clone(), nb, b.clone()],
        vec![bt.clone(), nbt.clone(), c_blk.clone(), c_blk.clone()],
        vec![nbt, bt, c_blk.clone(), c_blk.clone()],
    ])
}

/// Evaluate the four equivalent conditions for the block assembly to be a
/// spin model with loop `2d`, and independently verify the assembled matrix.
pub fn general_hadamard_block_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c_blk: &ComplexMatrix,
    epsilon: f64,
    d: Complex64,
    tol: &Tolerance,
) -> Result<HadamardBlockReport> {
    let n = a.order();
    if b.order() != n || c_blk.order() != n {
        return Err(Error::OrderMismatch(n, b.order().max(c_blk.order())));
    }
    let b_type_ii = b.is_type_ii(tol);
    let a_spin = a.is_symmetric(tol) && verify_spin_model(a, d, tol).is_ok();
    let c_spin = c_blk.is_symmetric(tol) && verify_spin_model(c_blk, d, tol).is_ok();
    let a_c_symmetric_spin = a_spin && c_spin;

    let mut cond_c = false;
    let mut cond_d = false;
    if b.is_schur_invertible(tol) && a.is_schur_invertible(tol) {
        let bsit = b.schur_inverse(tol)?.transpose();
        let bt = b.transpose();
        let asinv = a.schur_inverse(tol)?;
        let d_asinv = asinv.scale(d);
        cond_c = words_equal(
            &[Factor::X(c_blk), Factor::D(&bsit), Factor::X(&bt)],
            &[Factor::D(&bsit), Factor::X(&bt), Factor::D(&d_asinv)],
            n,
            tol,
        );
        let ed_asinv = asinv.scale(d * cr(epsilon));
        cond_d = words_equal(
            &[Factor::X(c_blk), Factor::D(&bsit), Factor::X(&bsit)],
            &[Factor::D(&bt), Factor::X(&bt), Factor::D(&ed_asinv)],
            n,
            tol,
        );
    }

    let w = hadamard_block_matrix(a, b, c_blk, epsilon)?;
    let assembled_is_spin_model = verify_spin_model(&w, cr(2.0) * d, tol).is_ok();
    let all = b_type_ii && a_c_symmetric_spin && cond_c && cond_d;
    Ok(HadamardBlockReport {
        b_type_ii,
        a_c_symmetric_spin,
        cond_c,
        cond_d,
        assembled_is_spin_model,
        consistent: all == assembled_is_spin_model,
    })
}

/// The `4n x 4n` Hadamard spin model built from an `n x n` Hadamard matrix:
/// symmetric for `epsilon = 1`, non-symmetric for `epsilon = -1`.
/// Requires `omega^4 = epsilon` and `(u^2 + u^{-2})^2 = n`.
pub fn hadamard_spin_model(
    h: &ComplexMatrix,
    epsilon: f64,
    omega: Complex64,
    u: Complex64,
    tol: &Tolerance,
) -> Result<SpinModel> {
    let n = h.order();
    if !h.map(|z| cr(z.re.signum())).approx_eq(h, tol)
        || h.inner().iter().any(|z| z.im.abs() > tol.abs_eps || (z.re.abs() - 1.0).abs() > tol.abs_eps)
    {
        return Err(Error::NotHadamard("entries must be +1 or -1".into()));
    }
    let hht = h.matmul(&h.transpose());
    if hht.max_abs_diff(&ComplexMatrix::scalar(n, cr(n as f64))) > tol.abs_eps * n as f64 {
        return Err(Error::NotHadamard("H H^T != nI".into()));
    }
    if (epsilon - 1.0).abs() > tol.abs_eps && (epsilon + 1.0).abs() > tol.abs_eps {
        return Err(Error::BadParameters("epsilon must be +1 or -1".into()));
    }
    if (omega.powu(4) - cr(epsilon)).norm() > 1e-9 {
        return Err(Error::BadParameters("omega^4 must equal epsilon".into()));
    }
    let u2 = u * u;
    let s = u2 + u2.inv();
    if (s * s - cr(n as f64)).norm() > 1e-9 {
        return Err(Error::BadParameters("(u^2 + u^{-2})^2 must equal n".into()));
    }
    let d = -s;
    let a = ComplexMatrix::from_fn(n, |i, j| if i == j { -u * u * u } else { u.inv() });
    let b = h.scale(omega);
    let w = hadamard_block_matrix(&a, &b, &a, epsilon)?;
    verify_spin_model(&w, cr(2.0) * d, tol)
}

/// Project `W` onto its Nomura algebra; when it lies inside, solve for the
/// scalar making `cW` a spin model and verify it.
#[derive(Debug, Clone)]
pub struct WInNomura {
    pub in_algebra: bool,
    pub residual: f64,
    pub scalar: Option<Complex64>,
    pub loop_variable: Option<Complex64>,
}

pub fn w_in_nomura_check(w: &ComplexMatrix, tol: &Tolerance) -> Result<WInNomura> {
    if !w.is_type_ii(tol) {
        return Err(Error::VerificationFailure("input is not type II".into()));
    }
    let nd = nomura_algebra_type_ii(w, tol)?;
    let residual = nd.space.residual(w);
    if residual > tol.abs_eps + tol.rel_eps * w.frobenius_norm() {
        return Ok(WInNomura { in_algebra: false, residual, scalar: None, loop_variable: None });
    }
    // membership forces constant diagonal and row sums; read them off
    let n = w.order();
    let alpha = w.get(0, 0);
    let row_sum: Complex64 = (0..n).map(|j| w.get(0, j)).sum();
    for d_sign in [cr((n as f64).sqrt()), cr(-(n as f64).sqrt())] {
        if alpha.norm() <= tol.abs_eps || row_sum.norm() <= tol.abs_eps {
            break;
        }
        let c2 = d_sign / (row_sum * alpha);
        let c_scalar = c2.sqrt();
        if verify_spin_model(&w.scale(c_scalar), d_sign, tol).is_ok() {
            return Ok(WInNomura {
                in_algebra: true,
                residual,
                scalar: Some(c_scalar),
                loop_variable: Some(d_sign),
            });
        }
    }
    Ok(WInNomura { in_algebra: true, residual, scalar: None, loop_variable: None })
}

/// `(5t - 3) I + t A1 + t^{-1} A2` for a strongly regular graph given by its
/// adjacency matrix, with `t^2 + t^{-2} = -3`; verified as a spin model with
/// the loop variable read off the row sums.
pub fn higman_sims_model(
    adjacency: &ComplexMatrix,
    t: Complex64,
    tol: &Tolerance,
) -> Result<SpinModel> {
    let n = adjacency.order();
    if !adjacency.is_zero_one(tol) || !adjacency.is_symmetric(tol) {
        return Err(Error::BadParameters("adjacency must be a symmetric 01 matrix".into()));
    }
    if (t * t + (t * t).inv() + cr(3.0)).norm() > 1e-9 {
        return Err(Error::BadParameters("t^2 + t^{-2} must equal -3".into()));
    }
    let i = ComplexMatrix::identity(n);
    let a2 = ComplexMatrix::ones(n).sub(&i).sub(adjacency);
    let w = i
        .scale(cr(5.0) * t - cr(3.0))
        .add(&adjacency.scale(t))
        .add(&a2.scale(t.inv()));
    let a_scalar = w.get(0, 0);
    let row_sum: Complex64 = (0..n).map(|j| w.get(0, j)).sum();
    let d = a_scalar * row_sum;
    verify_spin_model(&w, d, tol)
}
