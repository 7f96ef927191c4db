//! Problem data model: `min ½zᵀHz + qᵀz  s.t.  Az = b, z ∈ Z` with `Z` a box,
//! plus objective / augmented Lagrangian evaluation and the solver report record.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::geometry::BoxSet;
use crate::inner::{InnerProblem, StoppingCriterion};
use crate::linalg::{dot, sqrt, Matrix};

/// Maximum absolute asymmetry accepted in `H`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `A` must satisfy `σ_min(A) > RANK_TOL · σ_max(A)`.
pub const RANK_TOL: f64 = 1e-10;

/// Quadratic-plus-box problem data. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    h: Matrix,
    q: Vec<f64>,
    a: Matrix,
    b: Vec<f64>,
    bounds: BoxSet,
}

impl ProblemInstance {
    pub fn new(h: Matrix, q: Vec<f64>, a: Matrix, b: Vec<f64>, bounds: BoxSet) -> Result<Self> {
        let n = q.len();
        check_dim("H rows", n, h.rows())?;
        check_dim("H cols", n, h.cols())?;
        check_dim("A cols", n, a.cols())?;
        check_dim("b", a.rows(), b.len())?;
        check_dim("box", n, bounds.dim())?;
        if !h.is_finite() {
            return Err(Error::NonFinite("H"));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("A"));
        }
        if !q.iter().chain(&b).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("q or b"));
        }
        let asym = h.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        let m = a.rows();
        if m == 0 || m > n {
            return Err(Error::RankDeficient { rows: m, cols: n });
        }
        // singular values of A are square roots of the eigenvalues of AAᵀ
        let ev = a.outer_gram().symmetric_eigenvalues()?;
        let (lo, hi) = (ev[0].max(0.0), ev[m - 1]);
        if hi <= 0.0 || sqrt(lo) <= RANK_TOL * sqrt(hi) {
            return Err(Error::RankDeficient { rows: m, cols: n });
        }
        Ok(Self { h, q, a, b, bounds })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.q.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.h
    }

    pub fn linear(&self) -> &[f64] {
        &self.q
    }

    pub fn coupling(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn bounds(&self) -> &BoxSet {
        &self.bounds
    }

    /// Same data with a different right-hand side (e.g. a new initial state).
    pub fn with_rhs(&self, b: Vec<f64>) -> Result<Self> {
        check_dim("b", self.m(), b.len())?;
        if !b.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        Ok(Self { b, ..self.clone() })
    }

    /// `f(z) = ½zᵀHz + qᵀz`
    pub fn eval_objective(&self, z: &[f64]) -> Result<f64> {
        check_dim("z", self.n(), z.len())?;
        Ok(self.objective_unchecked(z))
    }

    pub(crate) fn objective_unchecked(&self, z: &[f64]) -> f64 {
        let hz = self.h.mul_vec(z);
        0.5 * dot(z, &hz) + dot(&self.q, z)
    }

    /// `∇f(z) = Hz + q`
    pub fn objective_gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim("z", self.n(), z.len())?;
        let mut g = self.h.mul_vec(z);
        g.iter_mut().zip(&self.q).for_each(|(gi, qi)| *gi += qi);
        Ok(g)
    }

    /// `Az − b`
    pub fn residual(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim("z", self.n(), z.len())?;
        Ok(self.residual_unchecked(z))
    }

    pub(crate) fn residual_unchecked(&self, z: &[f64]) -> Vec<f64> {
        let mut r = self.a.mul_vec(z);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        r
    }

    pub fn infeasibility(&self, z: &[f64]) -> Result<f64> {
        Ok(crate::linalg::norm(&self.residual(z)?))
    }

    /// `L_ρ(z, λ) = f(z) + ⟨λ, Az − b⟩ + ρ/2 ‖Az − b‖²`
    pub fn eval_aug_lagrangian(&self, par: &AugmentedLagrangianParams, z: &[f64]) -> Result<f64> {
        check_dim("lambda", self.m(), par.lambda.len())?;
        let f = self.eval_objective(z)?;
        let r = self.residual_unchecked(z);
        Ok(f + dot(&par.lambda, &r) + 0.5 * par.rho * dot(&r, &r))
    }

    /// `∇_z L_ρ(z, λ) = Hz + q + Aᵀ(λ + ρ(Az − b))`
    pub fn eval_aug_lagrangian_gradient(
        &self,
        par: &AugmentedLagrangianParams,
        z: &[f64],
    ) -> Result<Vec<f64>> {
        check_dim("lambda", self.m(), par.lambda.len())?;
        let mut g = self.objective_gradient(z)?;
        let r = self.residual_unchecked(z);
        let w: Vec<f64> = par
            .lambda
            .iter()
            .zip(&r)
            .map(|(l, ri)| l + par.rho * ri)
            .collect();
        let atw = self.a.tr_mul_vec(&w);
        g.iter_mut().zip(&atw).for_each(|(gi, a)| *gi += a);
        Ok(g)
    }

    /// Approximates `d_ρ(λ) = min_{z∈Z} L_ρ(z, λ)`.
    ///
    /// Returns `L_ρ(z̄, λ)` for a point whose certified gap is at most `tol²`,
    /// so the value lies in `[d_ρ(λ), d_ρ(λ) + tol²]`.
    pub fn dual_function_value(&self, par: &AugmentedLagrangianParams, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive"));
        }
        let inner = InnerProblem::new(self, par.rho)?;
        let start = inner.default_start();
        let crit = StoppingCriterion::function_gap(tol)?;
        let sol = inner.solve(&par.lambda, crit, &start, inner.default_max_iters(tol))?;
        Ok(sol.approx_dual_value)
    }
}

/// Penalty parameter and multiplier of the augmented Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedLagrangianParams {
    pub rho: f64,
    pub lambda: Vec<f64>,
}

impl AugmentedLagrangianParams {
    pub fn new(rho: f64, lambda: Vec<f64>) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter("rho must be positive"));
        }
        Ok(Self { rho, lambda })
    }

    /// Lipschitz constant of the augmented dual gradient, `1/ρ`.
    pub fn dual_lipschitz(&self) -> f64 {
        1.0 / self.rho
    }
}

/// Direction in which a bound constrains its measured quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundSense {
    /// measured ≤ certified
    Upper,
    /// measured ≥ certified
    Lower,
}

/// One line of the bound-vs-measured table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundRow {
    pub name: String,
    pub sense: BoundSense,
    pub certified: f64,
    pub measured: Option<f64>,
}

impl BoundRow {
    pub fn upper(name: &str, certified: f64, measured: Option<f64>) -> Self {
        Self {
            name: name.into(),
            sense: BoundSense::Upper,
            certified,
            measured,
        }
    }

    pub fn lower(name: &str, certified: f64, measured: Option<f64>) -> Self {
        Self {
            name: name.into(),
            sense: BoundSense::Lower,
            certified,
            measured,
        }
    }

    /// `None` when nothing was measured.
    pub fn holds(&self, slack: f64) -> Option<bool> {
        self.measured.map(|m| match self.sense {
            BoundSense::Upper => m <= self.certified + slack,
            BoundSense::Lower => m >= self.certified - slack,
        })
    }
}

/// Final primal/dual pair with measured quality and the certified bounds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub z_hat: Vec<f64>,
    /// `λ̂_k` for the gradient scheme, `μ_k` for the fast gradient scheme.
    pub lambda_out: Vec<f64>,
    pub infeasibility: f64,
    pub primal_gap: Option<f64>,
    pub dual_gap: Option<f64>,
    /// Number of dual updates performed (inner solves).
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    pub inner_iters_max: usize,
    /// Index `k` of the reported averages `ẑ_k`.
    pub final_k: usize,
    pub eps_in: f64,
    pub rho: f64,
    /// The run executed the full certified schedule.
    pub certified: bool,
    /// The measured stopping rule was met (always `false` for certified runs).
    pub converged: bool,
    pub bound_table: Vec<BoundRow>,
}

impl SolveReport {
    /// `false` if any measured value violates its certified bound beyond `slack`.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.bound_table.iter().all(|r| r.holds(slack) != Some(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn diag_problem(h: &[f64], q: Vec<f64>, a: &[&[f64]], b: Vec<f64>, lo: f64, hi: f64) -> ProblemInstance {
        let n = h.len();
        ProblemInstance::new(
            Matrix::from_diagonal(h),
            q,
            Matrix::from_rows(a).unwrap(),
            b,
            BoxSet::uniform(n, lo, hi).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let p = diag_problem(&[0.0, 0.0], vec![0.0, 0.0], &[&[1.0, 0.0]], vec![0.0], -5.0, 5.0);
        assert_eq!(p.eval_objective(&[3.0, -2.0]).unwrap(), 0.0);
        let p = diag_problem(&[1.0, 1.0], vec![0.0, 0.0], &[&[1.0, 0.0]], vec![0.0], -5.0, 5.0);
        assert_eq!(p.eval_objective(&[1.0, 1.0]).unwrap(), 1.0);
        let p = diag_problem(&[2.0, 4.0], vec![1.0, -1.0], &[&[1.0, 0.0]], vec![0.0], -5.0, 5.0);
        assert_eq!(p.eval_objective(&[1.0, 2.0]).unwrap(), 8.0);
        assert!(matches!(
            p.eval_objective(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn aug_lagrangian_examples() {
        let p = diag_problem(&[1.0], vec![0.0], &[&[1.0]], vec![1.0], -5.0, 5.0);
        let par = AugmentedLagrangianParams::new(1.0, vec![1.0]).unwrap();
        assert_eq!(p.eval_aug_lagrangian(&par, &[0.0]).unwrap(), -0.5);
        // feasible point: penalty terms vanish
        assert_eq!(
            p.eval_aug_lagrangian(&par, &[1.0]).unwrap(),
            p.eval_objective(&[1.0]).unwrap()
        );
        // pure penalty
        let p = diag_problem(&[0.0], vec![0.0], &[&[1.0]], vec![1.0], -5.0, 5.0);
        let par = AugmentedLagrangianParams::new(2.0, vec![0.0]).unwrap();
        assert_eq!(p.eval_aug_lagrangian(&par, &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn gradient_reduces_to_objective_gradient() {
        let p = diag_problem(&[2.0, 3.0], vec![1.0, -1.0], &[&[1.0, 1.0]], vec![1.0], -5.0, 5.0);
        // rho must be positive; use the smallest representable penalty with zero multiplier
        let par = AugmentedLagrangianParams::new(f64::MIN_POSITIVE, vec![0.0]).unwrap();
        let g = p.eval_aug_lagrangian_gradient(&par, &[0.5, 0.25]).unwrap();
        assert_eq!(g, p.objective_gradient(&[0.5, 0.25]).unwrap());
    }

    #[test]
    fn invalid_problems_rejected() {
        let asym = Matrix::from_rows(&[&[1.0, 0.5], &[0.4, 1.0]]).unwrap();
        let a = Matrix::from_rows(&[&[1.0, 0.0]]).unwrap();
        let bx = BoxSet::uniform(2, -1.0, 1.0).unwrap();
        assert!(matches!(
            ProblemInstance::new(asym, vec![0.0; 2], a.clone(), vec![0.0], bx.clone()),
            Err(Error::NotSymmetric { .. })
        ));
        let rank1 = Matrix::from_rows(&[&[1.0, 1.0], &[2.0, 2.0]]).unwrap();
        assert!(matches!(
            ProblemInstance::new(Matrix::identity(2), vec![0.0; 2], rank1, vec![0.0; 2], bx.clone()),
            Err(Error::RankDeficient { .. })
        ));
        assert!(AugmentedLagrangianParams::new(0.0, vec![]).is_err());
    }

    #[test]
    fn bound_row_semantics() {
        assert_eq!(BoundRow::upper("x", 1.0, Some(1.0 + 1e-9)).holds(1e-8), Some(true));
        assert_eq!(BoundRow::upper("x", 1.0, Some(1.1)).holds(1e-8), Some(false));
        assert_eq!(BoundRow::lower("x", -1.0, Some(-1.1)).holds(1e-8), Some(false));
        assert_eq!(BoundRow::lower("x", -1.0, None).holds(1e-8), None);
    }
}
