//! Independent reference solutions: exact box-constrained QP, primal-dual optimum
//! of the coupled problem, exact dual function and the general polyhedral
//! normal-cone distance. Used for verification and reporting, never inside the
//! certified iteration.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ActiveBound, BoxSet};
use crate::inner::InnerReference;
use crate::linalg::{dot, lu_solve, norm, norm_inf, sqrt, Cholesky, Matrix};
use crate::problem::{AugmentedLagrangianParams, ProblemInstance};

/// Largest `n` handled by active-set enumeration.
pub const ENUMERATION_MAX_N: usize = 12;
/// Acceptance level for the KKT residual of a reference solution.
pub const KKT_TOL: f64 = 1e-9;

/// Primal-dual optimum of `min ½zᵀHz + qᵀz s.t. Az = b, z ∈ Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub z_star: Vec<f64>,
    pub lambda_star: Vec<f64>,
    pub f_star: f64,
    pub active_set: Vec<(usize, ActiveBound)>,
    pub kkt_residual: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Free,
    Lower,
    Upper,
}

/// Exact minimizer of `½zᵀMz + cᵀz` over a box for positive definite `M`
/// (primal active-set method).
pub fn solve_box_qp(m: &Matrix, c: &[f64], bounds: &BoxSet, start: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = bounds.dim();
    check_dim("box QP matrix", n, m.rows())?;
    check_dim("box QP linear term", n, c.len())?;
    let (lb, ub) = (bounds.lower(), bounds.upper());
    let mut z = match start {
        Some(s) => bounds.project(s)?,
        None => bounds.project(&vec![0.0; n])?,
    };
    let mut status: Vec<Status> = (0..n)
        .map(|i| {
            if lb[i] == ub[i] || z[i] <= lb[i] {
                z[i] = lb[i];
                Status::Lower
            } else if z[i] >= ub[i] {
                z[i] = ub[i];
                Status::Upper
            } else {
                Status::Free
            }
        })
        .collect();
    let scale = 1.0 + m.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs())) + norm_inf(c);
    let mult_tol = 1e-13 * scale * (1.0 + norm_inf(&z));
    let max_iter = 20 * n + 100;
    for _ in 0..max_iter {
        let free: Vec<usize> = (0..n).filter(|&i| status[i] == Status::Free).collect();
        if !free.is_empty() {
            // M_FF y = −(c_F + M_FW z_W)
            let mut rhs = Vec::with_capacity(free.len());
            for &i in &free {
                let mut r = -c[i];
                for j in 0..n {
                    if status[j] != Status::Free {
                        r -= m[(i, j)] * z[j];
                    }
                }
                rhs.push(r);
            }
            let y = Cholesky::factor(&m.principal(&free))?.solve(&rhs);
            let mut t = 1.0;
            let mut blocking = None;
            for (k, &i) in free.iter().enumerate() {
                let d = y[k] - z[i];
                if d < 0.0 && y[k] < lb[i] {
                    let ti = (lb[i] - z[i]) / d;
                    if ti < t {
                        t = ti;
                        blocking = Some((i, Status::Lower));
                    }
                } else if d > 0.0 && y[k] > ub[i] {
                    let ti = (ub[i] - z[i]) / d;
                    if ti < t {
                        t = ti;
                        blocking = Some((i, Status::Upper));
                    }
                }
            }
            for (k, &i) in free.iter().enumerate() {
                z[i] = (z[i] + t.max(0.0) * (y[k] - z[i])).clamp(lb[i], ub[i]);
            }
            if let Some((i, s)) = blocking {
                z[i] = if s == Status::Lower { lb[i] } else { ub[i] };
                status[i] = s;
                continue;
            }
        }
        let g = {
            let mut g = m.mul_vec(&z);
            g.iter_mut().zip(c).for_each(|(gi, ci)| *gi += ci);
            g
        };
        let mut worst = (mult_tol, None);
        for i in 0..n {
            if lb[i] == ub[i] {
                continue;
            }
            let violation = match status[i] {
                Status::Lower => -g[i],
                Status::Upper => g[i],
                Status::Free => continue,
            };
            if violation > worst.0 {
                worst = (violation, Some(i));
            }
        }
        match worst.1 {
            Some(i) => status[i] = Status::Free,
            None => return Ok(z),
        }
    }
    Err(Error::NotConverged("box QP active-set method"))
}

/// Exact `d_ρ(λ)` and `∇d_ρ(λ)` with `H + ρAᵀA` assembled once.
#[derive(Debug, Clone)]
pub struct DualOracle<'a> {
    problem: &'a ProblemInstance,
    rho: f64,
    hessian: Matrix,
    base: Vec<f64>,
}

/// Exact inner minimizer with the dual value and gradient it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub z: Vec<f64>,
}

impl<'a> DualOracle<'a> {
    pub fn new(problem: &'a ProblemInstance, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter("rho must be positive"));
        }
        let hessian = problem.hessian().add_scaled(rho, &problem.coupling().gram())?;
        let atb = problem.coupling().tr_mul_vec(problem.rhs());
        let base = problem.linear().iter().zip(&atb).map(|(q, v)| q - rho * v).collect();
        Ok(Self {
            problem,
            rho,
            hessian,
            base,
        })
    }

    pub fn evaluate(&self, lambda: &[f64], warm: Option<&[f64]>) -> Result<DualEvaluation> {
        check_dim("lambda", self.problem.m(), lambda.len())?;
        let mut c = self.problem.coupling().tr_mul_vec(lambda);
        c.iter_mut().zip(&self.base).for_each(|(ci, b)| *ci += b);
        let z = solve_box_qp(&self.hessian, &c, self.problem.bounds(), warm)?;
        let par = AugmentedLagrangianParams {
            rho: self.rho,
            lambda: lambda.to_vec(),
        };
        let value = self.problem.eval_aug_lagrangian(&par, &z)?;
        let gradient = self.problem.residual(&z)?;
        Ok(DualEvaluation { value, gradient, z })
    }
}

/// `(d_ρ(λ), ∇d_ρ(λ))` from the exact inner minimizer.
pub fn exact_dual_value_and_gradient(p: &ProblemInstance, rho: f64, lambda: &[f64]) -> Result<(f64, Vec<f64>)> {
    let e = DualOracle::new(p, rho)?.evaluate(lambda, None)?;
    Ok((e.value, e.gradient))
}

/// Exact inner optimum `z*(λ)` and `d_ρ(λ)`.
pub fn inner_reference(p: &ProblemInstance, rho: f64, lambda: &[f64]) -> Result<InnerReference> {
    let e = DualOracle::new(p, rho)?.evaluate(lambda, None)?;
    Ok(InnerReference {
        z_star: e.z,
        value: e.value,
    })
}

fn activity(bounds: &BoxSet, z: &[f64], tol: f64) -> Vec<Status> {
    z.iter()
        .enumerate()
        .map(|(i, zi)| {
            let (l, u) = (bounds.lower()[i], bounds.upper()[i]);
            if (zi - l).abs() <= tol {
                Status::Lower
            } else if (u - zi).abs() <= tol {
                Status::Upper
            } else {
                Status::Free
            }
        })
        .collect()
}

/// Max of stationarity, sign, feasibility and box violations (infinity norm).
pub fn kkt_residual(p: &ProblemInstance, z: &[f64], lambda: &[f64]) -> Result<f64> {
    check_dim("z", p.n(), z.len())?;
    check_dim("lambda", p.m(), lambda.len())?;
    let mut g = p.objective_gradient(z)?;
    let atl = p.coupling().tr_mul_vec(lambda);
    g.iter_mut().zip(&atl).for_each(|(gi, a)| *gi += a);
    let bounds = p.bounds();
    let mut worst = norm_inf(&p.residual(z)?);
    for (i, st) in activity(bounds, z, KKT_TOL).into_iter().enumerate() {
        let (l, u) = (bounds.lower()[i], bounds.upper()[i]);
        worst = worst.max(l - z[i]).max(z[i] - u);
        let stat = if l == u {
            0.0
        } else {
            match st {
                Status::Free => g[i].abs(),
                Status::Lower => (-g[i]).max(0.0),
                Status::Upper => g[i].max(0.0),
            }
        };
        worst = worst.max(stat);
    }
    Ok(worst)
}

/// Solves the equality-constrained KKT system with the coordinates outside `free`
/// fixed at `z`. Returns `(z, λ)` or `None` if singular.
fn solve_pattern(p: &ProblemInstance, free: &[usize], fixed_z: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (n, m) = (p.n(), p.m());
    let nf = free.len();
    let size = nf + m;
    let h = p.hessian();
    let a = p.coupling();
    let mut is_free = vec![false; n];
    free.iter().for_each(|&i| is_free[i] = true);
    let mut k = Matrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    for (r, &i) in free.iter().enumerate() {
        for (s, &j) in free.iter().enumerate() {
            k[(r, s)] = h[(i, j)];
        }
        for l in 0..m {
            k[(r, nf + l)] = a[(l, i)];
            k[(nf + l, r)] = a[(l, i)];
        }
        let mut v = -p.linear()[i];
        for j in 0..n {
            if !is_free[j] {
                v -= h[(i, j)] * fixed_z[j];
            }
        }
        rhs[r] = v;
    }
    for l in 0..m {
        let mut v = p.rhs()[l];
        for j in 0..n {
            if !is_free[j] {
                v -= a[(l, j)] * fixed_z[j];
            }
        }
        rhs[nf + l] = v;
    }
    let sol = lu_solve(&k, &rhs).ok()?;
    let mut z = fixed_z.to_vec();
    for (r, &i) in free.iter().enumerate() {
        z[i] = sol[r];
    }
    Some((z, sol[nf..].to_vec()))
}

fn finish_reference(p: &ProblemInstance, mut z: Vec<f64>, lambda: Vec<f64>) -> Result<ReferenceSolution> {
    p.bounds().project_in_place(&mut z);
    let kkt = kkt_residual(p, &z, &lambda)?;
    if !(kkt <= KKT_TOL) {
        return Err(Error::NotConverged("reference KKT residual"));
    }
    let active_set = activity(p.bounds(), &z, KKT_TOL)
        .into_iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            Status::Free => None,
            Status::Lower => Some((i, ActiveBound::Lower)),
            Status::Upper => Some((i, ActiveBound::Upper)),
        })
        .collect();
    Ok(ReferenceSolution {
        f_star: p.eval_objective(&z)?,
        z_star: z,
        lambda_star: lambda,
        active_set,
        kkt_residual: kkt,
    })
}

/// Reference optimum: enumeration for `n ≤ 12`, exact method of multipliers beyond.
pub fn solve_reference(p: &ProblemInstance) -> Result<ReferenceSolution> {
    if p.n() <= ENUMERATION_MAX_N {
        solve_reference_enumeration(p)
    } else {
        solve_reference_multipliers(p)
    }
}

/// Brute force over all `3ⁿ` lower/upper/free activity patterns, first valid KKT
/// point in pattern order.
pub fn solve_reference_enumeration(p: &ProblemInstance) -> Result<ReferenceSolution> {
    let n = p.n();
    if n > ENUMERATION_MAX_N {
        return Err(Error::EnumerationBudget {
            n,
            max: ENUMERATION_MAX_N,
        });
    }
    let (lb, ub) = (p.bounds().lower(), p.bounds().upper());
    let total = 3usize.pow(n as u32);
    let mut fixed = vec![0.0; n];
    let mut statuses = vec![Status::Free; n];
    let mut free = Vec::with_capacity(n);
    for pattern in 0..total {
        let mut code = pattern;
        free.clear();
        for i in 0..n {
            statuses[i] = match code % 3 {
                0 => Status::Free,
                1 => Status::Lower,
                _ => Status::Upper,
            };
            code /= 3;
            match statuses[i] {
                Status::Free => {
                    free.push(i);
                    fixed[i] = 0.0;
                }
                Status::Lower => fixed[i] = lb[i],
                Status::Upper => fixed[i] = ub[i],
            }
        }
        if free.len() < p.m() {
            continue;
        }
        let Some((z, lambda)) = solve_pattern(p, &free, &fixed) else {
            continue;
        };
        let inside = free.iter().all(|&i| z[i] >= lb[i] - KKT_TOL && z[i] <= ub[i] + KKT_TOL);
        if !inside {
            continue;
        }
        let mut g = p.objective_gradient(&z)?;
        let atl = p.coupling().tr_mul_vec(&lambda);
        g.iter_mut().zip(&atl).for_each(|(gi, a)| *gi += a);
        let scale = 1.0 + norm_inf(&g);
        let signs = (0..n).all(|i| match statuses[i] {
            Status::Free => true,
            Status::Lower => g[i] >= -KKT_TOL * scale,
            Status::Upper => g[i] <= KKT_TOL * scale,
        });
        if signs {
            return finish_reference(p, z, lambda);
        }
    }
    Err(Error::Infeasible)
}

/// Method of multipliers with exact box-QP inner solves, finished by a KKT solve on
/// the identified active set.
pub fn solve_reference_multipliers(p: &ProblemInstance) -> Result<ReferenceSolution> {
    let (n, m) = (p.n(), p.m());
    let h_scale = p.hessian().symmetric_eigenvalues()?.last().copied().unwrap_or(0.0).max(1.0);
    let a_ev = p.coupling().outer_gram().symmetric_eigenvalues()?;
    let a_max = a_ev.last().copied().unwrap_or(1.0);
    let rho = 1e3 * h_scale / a_max;
    let oracle = DualOracle::new(p, rho)?;
    let mut lambda = vec![0.0; m];
    let mut z = vec![0.0; n];
    let mut history: Vec<f64> = Vec::new();
    for it in 0..2000 {
        let e = oracle.evaluate(&lambda, Some(&z))?;
        z = e.z;
        for (l, g) in lambda.iter_mut().zip(&e.gradient) {
            *l += rho * g;
        }
        let infeas = norm(&e.gradient);
        history.push(infeas);

        // polish on the identified activity pattern
        let status = activity(p.bounds(), &z, 1e-7 * (1.0 + norm_inf(&z)));
        let free: Vec<usize> = (0..n).filter(|&i| status[i] == Status::Free).collect();
        if free.len() >= m {
            let mut fixed = z.clone();
            for i in 0..n {
                match status[i] {
                    Status::Lower => fixed[i] = p.bounds().lower()[i],
                    Status::Upper => fixed[i] = p.bounds().upper()[i],
                    Status::Free => {}
                }
            }
            if let Some((zp, lp)) = solve_pattern(p, &free, &fixed) {
                if let Ok(r) = finish_reference(p, zp, lp) {
                    return Ok(r);
                }
            }
        }
        if let Ok(r) = finish_reference(p, z.clone(), lambda.clone()) {
            return Ok(r);
        }
        if it >= 60 && infeas > 1e-7 {
            let old = history[it - 30];
            if infeas > 0.999 * old {
                return Err(Error::Infeasible);
            }
        }
    }
    Err(Error::NotConverged("method of multipliers"))
}

/// Box as `{z : Cz ≤ c}` with `C = [I; −I]`, `c = [ub; −lb]`.
pub fn box_as_polyhedron(bounds: &BoxSet) -> (Matrix, Vec<f64>) {
    let n = bounds.dim();
    let mut c_mat = Matrix::zeros(2 * n, n);
    let mut c = Vec::with_capacity(2 * n);
    for i in 0..n {
        c_mat[(i, i)] = 1.0;
        c_mat[(n + i, i)] = -1.0;
    }
    c.extend_from_slice(bounds.upper());
    c.extend(bounds.lower().iter().map(|l| -l));
    (c_mat, c)
}

/// `min_{μ≥0} ‖Eμ − t‖` by Lawson–Hanson active-set NNLS.
pub fn nnls(e: &Matrix, t: &[f64]) -> Result<Vec<f64>> {
    let (rows, p) = (e.rows(), e.cols());
    check_dim("nnls target", rows, t.len())?;
    let et = e.transpose();
    let mut mu = vec![0.0; p];
    let mut passive = vec![false; p];
    let scale = 1.0 + norm_inf(t) * (1.0 + e.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let tol = 1e-14 * scale * (rows.max(p) as f64);
    let residual_grad = |mu: &[f64]| {
        let em = e.mul_vec(mu);
        let r: Vec<f64> = t.iter().zip(&em).map(|(ti, v)| ti - v).collect();
        et.mul_vec(&r)
    };
    let solve_passive = |passive: &[bool]| -> Result<Vec<f64>> {
        let idx: Vec<usize> = (0..p).filter(|&j| passive[j]).collect();
        let mut gram = Matrix::zeros(idx.len(), idx.len());
        let mut rhs = vec![0.0; idx.len()];
        for (a, &ja) in idx.iter().enumerate() {
            rhs[a] = dot(et.row(ja), t);
            for (b, &jb) in idx.iter().enumerate() {
                gram[(a, b)] = dot(et.row(ja), et.row(jb));
            }
        }
        let s = match Cholesky::factor(&gram) {
            Ok(c) => c.solve(&rhs),
            Err(_) => lu_solve(&gram, &rhs)?,
        };
        let mut full = vec![0.0; p];
        for (a, &j) in idx.iter().enumerate() {
            full[j] = s[a];
        }
        Ok(full)
    };
    for _ in 0..(3 * p + 10) {
        let w = residual_grad(&mu);
        let candidate = (0..p)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = candidate else {
            return Ok(mu);
        };
        passive[j] = true;
        loop {
            let s = solve_passive(&passive)?;
            if (0..p).filter(|&i| passive[i]).all(|i| s[i] > 0.0) {
                mu = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for i in 0..p {
                if passive[i] && s[i] <= 0.0 {
                    alpha = alpha.min(mu[i] / (mu[i] - s[i]));
                }
            }
            for i in 0..p {
                if passive[i] {
                    mu[i] += alpha * (s[i] - mu[i]);
                    if mu[i] <= tol {
                        mu[i] = 0.0;
                        passive[i] = false;
                    }
                }
            }
            if !passive.iter().any(|&b| b) {
                break;
            }
        }
    }
    Err(Error::NotConverged("NNLS"))
}

/// `dist(0, g + N_P(z̄))` for `P = {z : Cz ≤ c}` via NNLS over the active rows.
pub fn polyhedral_normal_cone_distance(c_mat: &Matrix, c: &[f64], z_bar: &[f64], g: &[f64], active_tol: f64) -> Result<f64> {
    check_dim("constraint rhs", c_mat.rows(), c.len())?;
    check_dim("z_bar", c_mat.cols(), z_bar.len())?;
    check_dim("gradient", c_mat.cols(), g.len())?;
    let cz = c_mat.mul_vec(z_bar);
    let mut active = Vec::new();
    for i in 0..c.len() {
        let slack = c[i] - cz[i];
        if slack < -active_tol {
            return Err(Error::InvalidParameter("point violates the polyhedron"));
        }
        if slack <= active_tol {
            active.push(i);
        }
    }
    let n = z_bar.len();
    let mut e = Matrix::zeros(n, active.len());
    for (col, &i) in active.iter().enumerate() {
        for j in 0..n {
            e[(j, col)] = c_mat[(i, j)];
        }
    }
    let t: Vec<f64> = g.iter().map(|v| -v).collect();
    let mu = nnls(&e, &t)?;
    let em = e.mul_vec(&mu);
    Ok(sqrt(g.iter().zip(&em).map(|(gi, v)| (gi + v) * (gi + v)).sum()))
}

/// Radius `δ·σ_min(A)` of a ball around the origin inside `{Az − b : z ∈ Z}`, where
/// `δ` is the distance of the feasible point `z0` to the box boundary in the max-norm.
pub fn interior_ball_radius(p: &ProblemInstance, z0: &[f64]) -> Result<f64> {
    check_dim("z0", p.n(), z0.len())?;
    if p.infeasibility(z0)? > 1e-9 * (1.0 + norm(p.rhs())) {
        return Err(Error::InvalidParameter("z0 must satisfy Az = b"));
    }
    let (lb, ub) = (p.bounds().lower(), p.bounds().upper());
    let delta = z0
        .iter()
        .enumerate()
        .map(|(i, z)| (z - lb[i]).min(ub[i] - z))
        .fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("z0 must lie in the interior of the box"));
    }
    let ev = p.coupling().outer_gram().symmetric_eigenvalues()?;
    Ok(delta * sqrt(ev[0].max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic() -> ProblemInstance {
        ProblemInstance::new(
            Matrix::identity(2),
            vec![0.0; 2],
            Matrix::from_rows(&[&[1.0, 1.0]]).unwrap(),
            vec![1.0],
            BoxSet::uniform(2, -10.0, 10.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn analytic_reference() {
        let p = analytic();
        for r in [solve_reference_enumeration(&p).unwrap(), solve_reference_multipliers(&p).unwrap()] {
            assert!((r.z_star[0] - 0.5).abs() < 1e-10 && (r.z_star[1] - 0.5).abs() < 1e-10);
            assert!((r.lambda_star[0] + 0.5).abs() < 1e-9);
            assert!((r.f_star - 0.25).abs() < 1e-10);
            assert!(r.active_set.is_empty());
        }
    }

    #[test]
    fn infeasible_detected() {
        let p = ProblemInstance::new(
            Matrix::identity(1),
            vec![0.0],
            Matrix::from_rows(&[&[1.0]]).unwrap(),
            vec![2.0],
            BoxSet::uniform(1, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(solve_reference_enumeration(&p).unwrap_err(), Error::Infeasible);
        assert_eq!(solve_reference_multipliers(&p).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn box_qp_clamps_to_boundary() {
        // ½z² − 2z over [−1, 1] → z = 1
        let z = solve_box_qp(&Matrix::identity(1), &[-2.0], &BoxSet::uniform(1, -1.0, 1.0).unwrap(), None).unwrap();
        assert_eq!(z, vec![1.0]);
        // coupled 2-D: M = [[2,1],[1,2]], c = (−10, 1) over [−1,1]²: z₁ = 1, z₂ = −1
        let m = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let z = solve_box_qp(&m, &[-10.0, 1.0], &BoxSet::uniform(2, -1.0, 1.0).unwrap(), None).unwrap();
        assert_eq!(z[0], 1.0);
        assert!((z[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn dual_at_optimum_is_stationary() {
        let p = analytic();
        let (v, g) = exact_dual_value_and_gradient(&p, 1.0, &[-0.5]).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        assert!(norm(&g) < 1e-12);
    }

    #[test]
    fn nnls_matches_box_clamp() {
        let b = BoxSet::uniform(2, -1.0, 1.0).unwrap();
        let (c_mat, c) = box_as_polyhedron(&b);
        let d = polyhedral_normal_cone_distance(&c_mat, &c, &[1.0, 0.0], &[-2.0, 1.0], 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let d = polyhedral_normal_cone_distance(&c_mat, &c, &[0.2, 0.1], &[3.0, 4.0], 1e-9).unwrap();
        assert!((d - 5.0).abs() < 1e-12);
        let d = polyhedral_normal_cone_distance(&c_mat, &c, &[1.0, 0.0], &[-3.0, 0.0], 1e-9).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn ball_radius_of_unit_square() {
        let p = analytic();
        // z0 = (½,½): δ = 9.5, σ_min([1 1]) = √2
        let r = interior_ball_radius(&p, &[0.5, 0.5]).unwrap();
        assert!((r - 9.5 * 2f64.sqrt()).abs() < 1e-12);
    }
}
