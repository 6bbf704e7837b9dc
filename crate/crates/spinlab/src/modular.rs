//! The modular invariance equation `(PD)^3 = t_0 d^3 I`, its twisted pair
//! for imprimitive schemes, and the search pipeline that recovers
//! invertible Jones pairs from formally self-dual Bose-Mesner algebras.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::extract_pair_from_v;
use crate::error::{Error, Result};
use crate::jones::JonesPair;
use crate::matrix::{cr, ComplexMatrix, Tolerance};
use crate::nomura::{duality_pairing, scheme_from_space, NomuraData, SchemeData};

/// Matrix of eigenvalues of a formally self-dual algebra together with the
/// loop variable and, for imprimitive schemes, the two index classes.
#[derive(Debug, Clone)]
pub struct ModularInvarianceProblem {
    /// `(m+1) x (m+1)` matrix of eigenvalues in the duality ordering.
    pub p: ComplexMatrix,
    /// Number of scheme points; the loop variable satisfies `d^2 = n`.
    pub n_points: usize,
    pub d: Complex64,
    /// Transpose permutation on the Schur basis.
    pub transpose_perm: Vec<usize>,
    /// Partition of `{0..m}` into the diagonal-block and off-block classes.
    pub index_sets: Option<(Vec<usize>, Vec<usize>)>,
}

impl ModularInvarianceProblem {
    pub fn size(&self) -> usize {
        self.p.order()
    }

    /// `P^2 = nT` residual.
    pub fn self_duality_residual(&self) -> f64 {
        let m = self.size();
        let t = ComplexMatrix::from_fn(m, |i, j| {
            if self.transpose_perm[j] == i {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        self.p
            .matmul(&self.p)
            .max_abs_diff(&t.scale(cr(self.n_points as f64)))
    }

    pub fn require_self_dual(&self, tol: &Tolerance) -> Result<()> {
        let res = self.self_duality_residual();
        if res > tol.abs_eps * self.n_points as f64 * 100.0 + 1e-7 * self.n_points as f64 {
            return Err(Error::VerificationFailure(format!(
                "P^2 != nT (residual {res:.3e})"
            )));
        }
        Ok(())
    }
}

/// A weight vector together with its residual under the equation.
#[derive(Debug, Clone)]
pub struct MiSolution {
    pub t: Vec<Complex64>,
    pub residual: f64,
}

/// `max |(PD)^3 - t_0 d^3 I|` for `D = diag(t)`.
pub fn check_modular_invariance(
    problem: &ModularInvarianceProblem,
    t: &[Complex64],
    tol: &Tolerance,
) -> Result<f64> {
    let m = problem.size();
    if t.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} weights")));
    }
    for (i, w) in t.iter().enumerate() {
        if w.norm() <= tol.abs_eps {
            return Err(Error::ZeroWeight(i));
        }
    }
    let pd = ComplexMatrix::from_fn(m, |i, j| problem.p.get(i, j) * t[j]);
    let cube = pd.matmul(&pd).matmul(&pd);
    let target = ComplexMatrix::scalar(m, t[0] * problem.d.powu(3));
    Ok(cube.max_abs_diff(&target))
}

/// Residuals of the two coupled equations for the twisted weights:
/// `D_I P D_I + D_J P D_J = d^3 t_0 P^{-1} D_J^- P^{-1}` and
/// `D_I P D_J + D_J P D_I = d^3 t_0 P^{-1} D_I^- P^{-1}`.
pub fn check_twisted_equations(
    problem: &ModularInvarianceProblem,
    t: &[Complex64],
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    let (set_i, set_j) = problem
        .index_sets
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("index sets required".into()))?;
    let m = problem.size();
    if t.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} weights")));
    }
    for (i, w) in t.iter().enumerate() {
        if w.norm() <= tol.abs_eps {
            return Err(Error::ZeroWeight(i));
        }
    }
    let mut di = vec![cr(0.0); m];
    let mut dj = vec![cr(0.0); m];
    let mut di_minus = vec![cr(0.0); m];
    let mut dj_minus = vec![cr(0.0); m];
    for &k in set_i {
        di[k] = t[k];
        di_minus[k] = t[k].inv();
    }
    for &k in set_j {
        dj[k] = t[k];
        dj_minus[k] = t[k].inv();
    }
    let di = ComplexMatrix::diagonal(&di);
    let dj = ComplexMatrix::diagonal(&dj);
    let di_minus = ComplexMatrix::diagonal(&di_minus);
    let dj_minus = ComplexMatrix::diagonal(&dj_minus);
    let p_inv = problem.p.inverse(tol)?;
    let factor = problem.d.powu(3) * t[0];
    let lhs1 = di.matmul(&problem.p).matmul(&di).add(&dj.matmul(&problem.p).matmul(&dj));
    let rhs1 = p_inv.matmul(&dj_minus).matmul(&p_inv).scale(factor);
    let lhs2 = di.matmul(&problem.p).matmul(&dj).add(&dj.matmul(&problem.p).matmul(&di));
    let rhs2 = p_inv.matmul(&di_minus).matmul(&p_inv).scale(factor);
    Ok((lhs1.max_abs_diff(&rhs1), lhs2.max_abs_diff(&rhs2)))
}

/// Multi-start damped Gauss-Newton configuration; deterministic given the
/// seed.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub converge_eps: f64,
    pub dedup_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 64,
            seed: 0,
            max_iter: 150,
            converge_eps: 1e-11,
            dedup_eps: 1e-6,
        }
    }
}

/// Solve `(P diag(t))^3 = t_0 d^3 I` projectively (`s_0 = 1`, extra unknown
/// `mu` with `(P diag(s))^3 = mu I`, then `t_0^2 = d^3 / mu`). Closed form
/// for two classes, multi-start Newton otherwise. Both `t_0` signs are
/// reported.
pub fn solve_modular_invariance(
    problem: &ModularInvarianceProblem,
    tol: &Tolerance,
    config: &SolverConfig,
) -> Result<Vec<MiSolution>> {
    problem.require_self_dual(tol)?;
    let m = problem.size();
    let projective: Vec<(Vec<Complex64>, Complex64)> = if m == 2 {
        closed_form_two_classes(problem)?
    } else {
        newton_projective_solutions(problem, false, tol, config)?
    };
    expand_and_verify(problem, projective, false, tol, config)
}

/// Solve the coupled pair
/// `(P(D_I + D_J))^3 = d^3 t_0 I`, `(P(D_I - D_J))^3 = -d^3 t_0 I`.
pub fn solve_twisted(
    problem: &ModularInvarianceProblem,
    tol: &Tolerance,
    config: &SolverConfig,
) -> Result<Vec<MiSolution>> {
    problem.require_self_dual(tol)?;
    if problem.index_sets.is_none() {
        return Err(Error::InvalidInput("index sets required for the twisted solve".into()));
    }
    let projective = newton_projective_solutions(problem, true, tol, config)?;
    expand_and_verify(problem, projective, true, tol, config)
}

/// `sigma` roots of `sigma^2 + (n-2) sigma + 1 = 0` for the two-class case
/// with `P = [[1, n-1], [1, -1]]`.
fn closed_form_two_classes(
    problem: &ModularInvarianceProblem,
) -> Result<Vec<(Vec<Complex64>, Complex64)>> {
    let n = problem.n_points as f64;
    let expect =
        ComplexMatrix::from_real_rows(&[vec![1.0, n - 1.0], vec![1.0, -1.0]]).unwrap();
    if problem.p.max_abs_diff(&expect) > 1e-8 * n {
        return Err(Error::VerificationFailure(
            "two-class matrix of eigenvalues is not the trivial-scheme one".into(),
        ));
    }
    let disc = (cr(n - 2.0) * cr(n - 2.0) - cr(4.0)).sqrt();
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let sigma = (cr(2.0 - n) + disc.scale_re(sign)) / cr(2.0);
        let mu = cr(n) * sigma * (cr(1.0) - sigma);
        out.push((vec![cr(1.0), sigma], mu));
    }
    Ok(out)
}

trait ScaleRe {
    fn scale_re(self, s: f64) -> Self;
}

impl ScaleRe for Complex64 {
    fn scale_re(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
}

/// Sign pattern for the twisted second equation: `+1` on the diagonal-block
/// classes, `-1` on the off-block classes.
fn twist_signs(problem: &ModularInvarianceProblem) -> Vec<f64> {
    let m = problem.size();
    match &problem.index_sets {
        Some((_, set_j)) => {
            let mut signs = vec![1.0; m];
            for &k in set_j {
                signs[k] = -1.0;
            }
            signs
        }
        None => vec![1.0; m],
    }
}

/// Residual vector of the polynomial system at `z = (s_1..s_{m-1}, nu)`:
/// `nu (P diag(s))^3 - I` (and, twisted, `nu (P diag(s ∘ signs))^3 + I`).
///
/// The reciprocal scale `nu = 1/mu` is the unknown: with `mu` itself the
/// system has huge attracting families of nilpotent configurations with
/// zero weights and `mu = 0`; in this form any such configuration leaves
/// `nu * cube` singular, which keeps the residual bounded away from zero.
fn system_residual(
    p: &ComplexMatrix,
    signs: &[f64],
    twisted: bool,
    z: &[Complex64],
) -> Vec<Complex64> {
    let m = p.order();
    let mut s = vec![cr(1.0); m];
    s[1..].copy_from_slice(&z[..m - 1]);
    let nu = z[m - 1];
    let pd = ComplexMatrix::from_fn(m, |i, j| p.get(i, j) * s[j]);
    let cube = pd.matmul(&pd).matmul(&pd);
    let mut out = Vec::with_capacity(if twisted { 2 * m * m } else { m * m });
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { cr(1.0) } else { cr(0.0) };
            out.push(nu * cube.get(i, j) - target);
        }
    }
    if twisted {
        let pd2 = ComplexMatrix::from_fn(m, |i, j| p.get(i, j) * s[j] * cr(signs[j]));
        let cube2 = pd2.matmul(&pd2).matmul(&pd2);
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { cr(-1.0) } else { cr(0.0) };
                out.push(nu * cube2.get(i, j) - target);
            }
        }
    }
    out
}

/// Holomorphic Jacobian of the system above.
fn system_jacobian(
    p: &ComplexMatrix,
    signs: &[f64],
    twisted: bool,
    z: &[Complex64],
) -> DMatrix<Complex64> {
    let m = p.order();
    let rows = if twisted { 2 * m * m } else { m * m };
    let mut jac = DMatrix::zeros(rows, m);
    let mut s = vec![cr(1.0); m];
    s[1..].copy_from_slice(&z[..m - 1]);
    let nu = z[m - 1];

    // d(M^3)/ds_k = (P E_k) M^2 + M (P E_k) M + M^2 (P E_k), where P E_k
    // carries column k of P only; rows get scaled by nu, and the nu-column
    // holds the cube itself
    let fill = |jac: &mut DMatrix<Complex64>, row_off: usize, weights: &[Complex64], outer: Complex64| {
        let pd = ComplexMatrix::from_fn(m, |i, j| p.get(i, j) * weights[j]);
        let pd2 = pd.matmul(&pd);
        for k in 1..m {
            for i in 0..m {
                for j in 0..m {
                    let mut v = p.get(i, k) * pd2.get(k, j);
                    let mpik: Complex64 =
                        (0..m).map(|x| pd.get(i, x) * p.get(x, k)).sum();
                    v += mpik * pd.get(k, j);
                    if j == k {
                        let m2pik: Complex64 =
                            (0..m).map(|x| pd2.get(i, x) * p.get(x, k)).sum();
                        v += m2pik;
                    }
                    jac[(row_off + i * m + j, k - 1)] += outer * v;
                }
            }
        }
        let cube = pd2.matmul(&pd);
        for i in 0..m {
            for j in 0..m {
                jac[(row_off + i * m + j, m - 1)] = cube.get(i, j);
            }
        }
    };

    fill(&mut jac, 0, &s, nu);
    if twisted {
        let weights2: Vec<Complex64> =
            s.iter().zip(signs).map(|(w, &sg)| w * cr(sg)).collect();
        fill(&mut jac, m * m, &weights2, nu);
        // chain rule through the signs on the weight columns
        for k in 1..m {
            for row in m * m..2 * m * m {
                jac[(row, k - 1)] *= cr(signs[k]);
            }
        }
    }
    jac
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn newton_projective_solutions(
    problem: &ModularInvarianceProblem,
    twisted: bool,
    _tol: &Tolerance,
    config: &SolverConfig,
) -> Result<Vec<(Vec<Complex64>, Complex64)>> {
    let m = problem.size();
    let signs = twist_signs(problem);
    let p = &problem.p;
    let unknowns = m; // s_1..s_{m-1}, nu
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut found: Vec<(Vec<Complex64>, Complex64)> = Vec::new();

    for start in 0..config.starts {
        let radius = [1.0, 0.5, 2.0][start % 3];
        let mut z: Vec<Complex64> = (0..unknowns)
            .map(|_| Complex64::from_polar(radius, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        z[unknowns - 1] = problem.d.powu(3).inv()
            * Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));

        let mut f = system_residual(p, &signs, twisted, &z);
        let mut fnorm = norm_sq(&f);
        let mut converged = false;
        for _ in 0..config.max_iter {
            if max_abs(&f) < config.converge_eps {
                converged = true;
                break;
            }
            let jac = system_jacobian(p, &signs, twisted, &z);
            let jh = jac.adjoint();
            let gram = &jh * &jac;
            let rhs_vec = DMatrix::from_column_slice(f.len(), 1, &f);
            let grad = &jh * rhs_vec;
            // Levenberg damping keeps the step well-defined near rank drops
            let mut lm = 1e-12;
            let delta = loop {
                let mut damped = gram.clone();
                for k in 0..unknowns {
                    damped[(k, k)] += cr(lm * (1.0 + gram[(k, k)].norm()));
                }
                if let Some(inv) = damped.try_inverse() {
                    break inv * &grad;
                }
                lm *= 100.0;
                if lm > 1e6 {
                    break DMatrix::zeros(unknowns, 1);
                }
            };
            if delta.iter().all(|z: &Complex64| z.norm() == 0.0) {
                break;
            }
            // backtracking line search on the residual norm
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<Complex64> = z
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| v - delta[(k, 0)] * cr(step))
                    .collect();
                let fc = system_residual(p, &signs, twisted, &cand);
                let fcn = norm_sq(&fc);
                if fcn < fnorm {
                    z = cand;
                    f = fc;
                    fnorm = fcn;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if max_abs(&f) < config.converge_eps {
            converged = true;
        }
        if converged {
            let nu = z[unknowns - 1];
            if nu.norm() < 1e-12 {
                continue;
            }
            let mu = nu.inv();
            let mut s = vec![cr(1.0); m];
            s[1..].copy_from_slice(&z[..unknowns - 1]);
            if s.iter().any(|w| !(1e-9..=1e9).contains(&w.norm())) {
                continue;
            }
            let is_new = found.iter().all(|(s_old, mu_old)| {
                let dist = s
                    .iter()
                    .zip(s_old)
                    .map(|(x, y)| (x - y).norm())
                    .fold((mu - mu_old).norm(), f64::max);
                dist > config.dedup_eps
            });
            if is_new {
                found.push((s, mu));
            }
        }
    }
    Ok(found)
}

/// Recover the scale `t_0 = ±sqrt(d^3 / mu)`, build the full weight
/// vectors, and keep the ones that re-check under the stated equations.
fn expand_and_verify(
    problem: &ModularInvarianceProblem,
    projective: Vec<(Vec<Complex64>, Complex64)>,
    twisted: bool,
    tol: &Tolerance,
    config: &SolverConfig,
) -> Result<Vec<MiSolution>> {
    let mut out: Vec<MiSolution> = Vec::new();
    for (s, mu) in projective {
        let t0 = (problem.d.powu(3) / mu).sqrt();
        for sign in [1.0, -1.0] {
            let t: Vec<Complex64> = s.iter().map(|&w| w * t0.scale_re(sign)).collect();
            let residual = check_modular_invariance(problem, &t, tol)?;
            let residual = if twisted {
                let (r1, r2) = check_twisted_equations(problem, &t, tol)?;
                residual.max(r1).max(r2)
            } else {
                residual
            };
            let thr = 1e-8 * (problem.n_points as f64).powi(2).max(1.0);
            if residual <= thr {
                let is_new = out.iter().all(|sol| {
                    sol.t
                        .iter()
                        .zip(&t)
                        .map(|(x, y)| (x - y).norm())
                        .fold(0.0, f64::max)
                        > config.dedup_eps
                });
                if is_new {
                    out.push(MiSolution { t, residual });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap()
            .then_with(|| {
                for (x, y) in a.t.iter().zip(&b.t) {
                    let ord = x
                        .re
                        .partial_cmp(&y.re)
                        .unwrap()
                        .then(x.im.partial_cmp(&y.im).unwrap());
                    if ord != std::cmp::Ordering::Equal {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    Ok(out)
}

/// Scheme data plus duality images of the Schur basis, read off a Nomura
/// algebra.
pub fn scheme_with_duality(
    nd: &NomuraData,
    tol: &Tolerance,
) -> Result<(SchemeData, Vec<ComplexMatrix>)> {
    let sd = scheme_from_space(&nd.space, tol)?;
    let mut theta = Vec::with_capacity(sd.schur_basis.len());
    for a in &sd.schur_basis {
        let (img, res) = nd.read_theta(a);
        if res > 1e-6 {
            return Err(Error::VerificationFailure(format!(
                "duality image of a Schur idempotent has eigen-residual {res:.3e}"
            )));
        }
        theta.push(img);
    }
    Ok((sd, theta))
}

/// Per-candidate outcome of the search pipeline.
#[derive(Debug, Clone)]
pub enum SearchStage {
    /// step (d): the twisted equations had no solutions
    NoSolutions,
    /// step (f): the assembled matrix does not have the block structure
    WrongStructure(String),
    /// step (g): the recovered pair failed Jones-pair verification
    NotJonesPair,
    /// full recovery
    Recovered,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub candidates: Vec<JonesPair>,
    pub log: Vec<(usize, SearchStage)>,
}

/// Steps (a)-(g): classify the Schur idempotents into diagonal-block and
/// off-block families, form `P` from the supplied duality, solve the
/// twisted equations, assemble each candidate `V = sum t_k A_k^T`, match
/// the block structure, and verify the recovered pair.
pub fn search_four_weight(
    sd: &SchemeData,
    theta: &[ComplexMatrix],
    d_base: Complex64,
    tol: &Tolerance,
    config: &SolverConfig,
) -> Result<SearchOutcome> {
    let n_points = sd.n;
    if n_points % 4 != 0 {
        return Err(Error::NotImprimitive(format!(
            "point count {n_points} is not divisible by 4"
        )));
    }
    let half = n_points / 2;
    let quarter = n_points / 4;
    if (d_base * d_base - cr(quarter as f64)).norm() > 1e-8 * quarter as f64 {
        return Err(Error::BadParameters("d^2 must equal n/4".into()));
    }

    // (a) index classes from the block support of each Schur idempotent
    let mut set_i = Vec::new();
    let mut set_j = Vec::new();
    for (k, a) in sd.schur_basis.iter().enumerate() {
        let mut diag_support = false;
        let mut off_support = false;
        for i in 0..n_points {
            for j in 0..n_points {
                if a.get(i, j).norm() > 0.5 {
                    if (i < half) == (j < half) {
                        diag_support = true;
                    } else {
                        off_support = true;
                    }
                }
            }
        }
        match (diag_support, off_support) {
            (true, false) => set_i.push(k),
            (false, true) => set_j.push(k),
            _ => {
                return Err(Error::NotImprimitive(format!(
                    "Schur idempotent {k} mixes the diagonal blocks"
                )))
            }
        }
    }
    let mut diag_sum = ComplexMatrix::zeros(n_points);
    for &k in &set_i {
        diag_sum = diag_sum.add(&sd.schur_basis[k].transpose());
    }
    let i2j = ComplexMatrix::identity(2).kron(&ComplexMatrix::ones(half));
    if diag_sum.max_abs_diff(&i2j) > 1e-9 {
        return Err(Error::NotImprimitive(
            "diagonal-block idempotents do not sum to I_2 ⊗ J".into(),
        ));
    }

    // (b), (c) duality ordering and matrix of eigenvalues
    let (_, p_ordered) =
        duality_pairing(sd, theta).map_err(|e| Error::NoDuality(e.to_string()))?;
    let problem = ModularInvarianceProblem {
        p: p_ordered,
        n_points,
        d: cr(2.0) * d_base,
        transpose_perm: sd.transpose_perm.clone(),
        index_sets: Some((set_i, set_j)),
    };
    problem.require_self_dual(tol).map_err(|e| Error::NoDuality(e.to_string()))?;

    // (d) twisted modular invariance
    let solutions = solve_twisted(&problem, tol, config)?;
    let mut log = Vec::new();
    let mut candidates = Vec::new();
    if solutions.is_empty() {
        log.push((0, SearchStage::NoSolutions));
        return Ok(SearchOutcome { candidates, log });
    }

    for (idx, sol) in solutions.iter().enumerate() {
        // (e) assemble the candidate
        let mut v = ComplexMatrix::zeros(n_points);
        for (k, a) in sd.schur_basis.iter().enumerate() {
            v = v.add(&a.transpose().scale(sol.t[k]));
        }
        // (f) structural match, trying both loop signs
        let mut matched = None;
        let mut shape_err = String::new();
        for d_try in [d_base, -d_base] {
            match extract_pair_from_v(&v, d_try, tol) {
                Ok(jp) => {
                    matched = Some(jp);
                    break;
                }
                Err(e) => shape_err = e.to_string(),
            }
        }
        let Some(jp) = matched else {
            log.push((idx, SearchStage::WrongStructure(shape_err)));
            continue;
        };
        // (g) Jones-pair verification
        if jp.invertible {
            log.push((idx, SearchStage::Recovered));
            candidates.push(jp);
        } else {
            log.push((idx, SearchStage::NotJonesPair));
        }
    }
    Ok(SearchOutcome { candidates, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::potts_pair;
    use crate::nomura::schur_basis_coefficients;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn trivial_problem(n: usize, d: Complex64) -> ModularInvarianceProblem {
        let p = ComplexMatrix::from_real_rows(&[vec![1.0, n as f64 - 1.0], vec![1.0, -1.0]])
            .unwrap();
        ModularInvarianceProblem {
            p,
            n_points: n,
            d,
            transpose_perm: vec![0, 1],
            index_sets: None,
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use crate::matrix::c;
        let p = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.5), c(-1.0, 1.0)],
            vec![c(0.5, -1.0), c(1.5, 0.0), c(0.0, 2.0)],
            vec![c(-0.5, 0.5), c(1.0, 1.0), c(2.0, -1.0)],
        ])
        .unwrap();
        let signs = vec![1.0, -1.0, 1.0];
        for twisted in [false, true] {
            let z = vec![c(0.7, 0.2), c(-0.3, 0.9), c(1.1, -0.4)];
            let jac = system_jacobian(&p, &signs, twisted, &z);
            let f0 = system_residual(&p, &signs, twisted, &z);
            let eps = 1e-7;
            for k in 0..z.len() {
                let mut zp = z.clone();
                zp[k] += cr(eps);
                let fp = system_residual(&p, &signs, twisted, &zp);
                for r in 0..f0.len() {
                    let fd = (fp[r] - f0[r]) / cr(eps);
                    assert!(
                        (jac[(r, k)] - fd).norm() < 1e-5,
                        "twisted={twisted} row {r} col {k}: {} vs {}",
                        jac[(r, k)],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn zero_weight_configurations_are_floored() {
        let p = ComplexMatrix::from_real_rows(&[vec![1.0, 3.0], vec![1.0, -1.0]]).unwrap();
        let signs = vec![1.0, -1.0];
        let z = vec![cr(0.0), cr(0.0)]; // s = (1, 0), mu = 0
        let f = system_residual(&p, &signs, true, &z);
        assert!(max_abs(&f) > 0.5, "degenerate point must not satisfy the system");
    }

    #[test]
    fn potts_weights_satisfy_the_equation() {
        // decompose the verified Potts model over {I, J - I}
        let m = crate::spin::potts(4, Default::default()).unwrap();
        let i = ComplexMatrix::identity(4);
        let jmi = ComplexMatrix::ones(4).sub(&i);
        let (coeffs, res) = schur_basis_coefficients(&[i, jmi], &m.w);
        assert!(res < 1e-12);
        let problem = trivial_problem(4, m.d);
        let residual = check_modular_invariance(&problem, &coeffs, &tol()).unwrap();
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn all_ones_weights_fail() {
        let problem = trivial_problem(5, cr(5.0_f64.sqrt()));
        let res = check_modular_invariance(&problem, &[cr(1.0), cr(1.0)], &tol()).unwrap();
        assert!(res > 1e-3);
    }

    #[test]
    fn trivial_solve_n4_gives_potts_weights() {
        let problem = trivial_problem(4, cr(-2.0));
        let sols = solve_modular_invariance(&problem, &tol(), &SolverConfig::default()).unwrap();
        assert_eq!(sols.len(), 2, "{sols:?}");
        // the Potts model weights (-1, 1) are among them
        let hit = sols.iter().any(|s| {
            (s.t[0] - cr(-1.0)).norm() < 1e-9 && (s.t[1] - cr(1.0)).norm() < 1e-9
        });
        assert!(hit, "{sols:?}");
    }

    #[test]
    fn trivial_solve_n5_gives_surds() {
        let problem = trivial_problem(5, cr(5.0_f64.sqrt()));
        let sols = solve_modular_invariance(&problem, &tol(), &SolverConfig::default()).unwrap();
        // projective ratios t_1 / t_0 must hit both surd roots
        let surd_plus = (-3.0 + 5.0_f64.sqrt()) / 2.0;
        let surd_minus = (-3.0 - 5.0_f64.sqrt()) / 2.0;
        for target in [surd_plus, surd_minus] {
            assert!(
                sols.iter().any(|s| ((s.t[1] / s.t[0]) - cr(target)).norm() < 1e-9),
                "missing ratio {target}: {sols:?}"
            );
        }
    }

    #[test]
    fn cyclic_scheme_solve_contains_model_weights() {
        let t = tol();
        let m = crate::spin::cyclic_spin_model(5, 1, &t).unwrap();
        let nd = crate::nomura::nomura_algebra_type_ii(&m.w, &t).unwrap();
        let (sd, theta) = scheme_with_duality(&nd, &t).unwrap();
        let (_, p) = duality_pairing(&sd, &theta).unwrap();
        let problem = ModularInvarianceProblem {
            p,
            n_points: 5,
            d: m.d,
            transpose_perm: sd.transpose_perm.clone(),
            index_sets: None,
        };
        // weights of the model in the Schur basis (W = sum t_i A_i^T; the
        // scheme is symmetric so transposes do not matter here)
        let (coeffs, res) = schur_basis_coefficients(&sd.schur_basis, &m.w);
        assert!(res < 1e-10);
        let check = check_modular_invariance(&problem, &coeffs, &t).unwrap();
        assert!(check < 1e-9, "model weights residual {check}");
        let sols =
            solve_modular_invariance(&problem, &t, &SolverConfig::default()).unwrap();
        let hit = sols.iter().any(|s| {
            s.t.iter()
                .zip(&coeffs)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                < 1e-7
        });
        assert!(hit, "cyclic model weights not among {} solutions", sols.len());
    }

    #[test]
    fn twisted_solve_recovers_potts_v() {
        let t = tol();
        let (jp, _) = potts_pair(4);
        let vb = crate::construct::build_v(&jp, &t).unwrap();
        let nd_v = crate::nomura::nomura_algebra_type_ii(&vb.v, &t).unwrap();
        let (sd, theta) = scheme_with_duality(&nd_v, &t).unwrap();
        let outcome =
            search_four_weight(&sd, &theta, vb.d, &t, &SolverConfig::default()).unwrap();
        assert!(
            !outcome.candidates.is_empty(),
            "no candidates recovered; log: {:?}",
            outcome.log
        );
        // at least one candidate is odd-gauge equivalent to the source
        let hit = outcome
            .candidates
            .iter()
            .any(|cand| crate::jones::odd_gauge_equivalent(&jp, cand, &t).is_ok());
        assert!(hit, "no candidate odd-gauge equivalent to the source");
    }
}
