//! Inner problem `min_{z∈Z} L_ρ(z, λ)`: projected fast gradient with a
//! computable stopping certificate.

use alloc::vec;
use alloc::vec::Vec;

use crate::certify;
use crate::error::{check_dim, Error, Result};
use crate::geometry::DEFAULT_ACTIVE_TOL;
use crate::linalg::{sqrt, Matrix};
use crate::problem::{AugmentedLagrangianParams, ProblemInstance};

/// Curvature constants of `L_ρ(·, λ)` over `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnerConstants {
    /// `λ_max(H + ρAᵀA)`
    pub l_p: f64,
    /// `λ_min(H + ρAᵀA)`, clamped at zero
    pub sigma_p: f64,
    /// Diameter of `Z`
    pub r_p: f64,
}

impl InnerConstants {
    pub fn new(l_p: f64, sigma_p: f64, r_p: f64) -> Result<Self> {
        if !(l_p > 0.0) || !(sigma_p >= 0.0) || sigma_p > l_p || !(r_p >= 0.0) {
            return Err(Error::InvalidParameter("inner constants need L_p >= sigma_p >= 0, L_p > 0, R_p >= 0"));
        }
        Ok(Self { l_p, sigma_p, r_p })
    }

    /// `C_Z = 1 + √(2 L_p) R_p`
    pub fn c_z(&self) -> f64 {
        1.0 + sqrt(2.0 * self.l_p) * self.r_p
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.sigma_p > 0.0
    }
}

/// The four inner stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CriterionKind {
    /// `L_ρ(z̄) − L_ρ(z*) ≤ ε²`
    FunctionGap,
    /// `dist(z̄, Z*) ≤ ε` (reference-only)
    SolutionDistance,
    /// `h_Z(−∇L_ρ(z̄)) + ⟨∇L_ρ(z̄), z̄⟩ ≤ C_Z ε`
    VariationalInequality,
    /// `dist(0, ∇L_ρ(z̄) + N_Z(z̄)) ≤ ε`
    NormalConeDistance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StoppingCriterion {
    pub kind: CriterionKind,
    pub eps_in: f64,
}

impl StoppingCriterion {
    pub fn new(kind: CriterionKind, eps_in: f64) -> Result<Self> {
        if !(eps_in > 0.0) {
            return Err(Error::InvalidParameter("eps_in must be positive"));
        }
        Ok(Self { kind, eps_in })
    }

    pub fn function_gap(eps_in: f64) -> Result<Self> {
        Self::new(CriterionKind::FunctionGap, eps_in)
    }

    pub fn normal_cone(eps_in: f64) -> Result<Self> {
        Self::new(CriterionKind::NormalConeDistance, eps_in)
    }

    pub fn variational(eps_in: f64) -> Result<Self> {
        Self::new(CriterionKind::VariationalInequality, eps_in)
    }

    /// Threshold the criterion's measured quantity is compared against.
    pub fn threshold(&self, consts: &InnerConstants) -> f64 {
        match self.kind {
            CriterionKind::FunctionGap => self.eps_in * self.eps_in,
            CriterionKind::VariationalInequality => consts.c_z() * self.eps_in,
            CriterionKind::SolutionDistance | CriterionKind::NormalConeDistance => self.eps_in,
        }
    }
}

/// True inner minimizer, used only to check reference-based criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerReference {
    pub z_star: Vec<f64>,
    pub value: f64,
}

/// Approximate inner minimizer with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub z_bar: Vec<f64>,
    pub criterion: StoppingCriterion,
    /// Measured criterion quantity (a certified upper bound for `FunctionGap`).
    pub certified_value: f64,
    pub iters: usize,
    /// `d̄_ρ(λ) = L_ρ(z̄, λ)`
    pub approx_dual_value: f64,
    /// `∇d̄_ρ(λ) = Az̄ − b`
    pub approx_dual_gradient: Vec<f64>,
    /// `max_{z∈Z} ⟨∇L_ρ(z̄), z̄ − z⟩`, the quantity the inexact dual oracle needs.
    pub variational_gap: f64,
}

/// `L_ρ(·, λ)` for a fixed problem and penalty, with `H + ρAᵀA` assembled once.
#[derive(Debug, Clone)]
pub struct InnerProblem<'a> {
    problem: &'a ProblemInstance,
    rho: f64,
    hessian: Matrix,
    /// `q − ρAᵀb`
    base_linear: Vec<f64>,
    consts: InnerConstants,
}

impl<'a> InnerProblem<'a> {
    /// Assembles `H + ρAᵀA` and computes its extremal eigenvalues.
    pub fn new(problem: &'a ProblemInstance, rho: f64) -> Result<Self> {
        let hessian = Self::assemble(problem, rho)?;
        let consts = constants_of(&hessian, problem.bounds().diameter())?;
        Ok(Self::build(problem, rho, hessian, consts))
    }

    /// Uses caller-supplied constants (valid bounds: `l_p` ≥ true, `sigma_p` ≤ true).
    pub fn with_constants(problem: &'a ProblemInstance, rho: f64, consts: InnerConstants) -> Result<Self> {
        let hessian = Self::assemble(problem, rho)?;
        Ok(Self::build(problem, rho, hessian, consts))
    }

    fn assemble(problem: &ProblemInstance, rho: f64) -> Result<Matrix> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter("rho must be positive"));
        }
        problem.hessian().add_scaled(rho, &problem.coupling().gram())
    }

    fn build(problem: &'a ProblemInstance, rho: f64, hessian: Matrix, consts: InnerConstants) -> Self {
        let atb = problem.coupling().tr_mul_vec(problem.rhs());
        let base_linear = problem
            .linear()
            .iter()
            .zip(&atb)
            .map(|(q, ab)| q - rho * ab)
            .collect();
        Self {
            problem,
            rho,
            hessian,
            base_linear,
            consts,
        }
    }

    pub fn problem(&self) -> &'a ProblemInstance {
        self.problem
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn constants(&self) -> &InnerConstants {
        &self.consts
    }

    /// `H + ρAᵀA`
    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    /// Linear term of `L_ρ(·, λ)`: `q + Aᵀλ − ρAᵀb`.
    pub fn linear_term(&self, lambda: &[f64]) -> Vec<f64> {
        let mut c = self.problem.coupling().tr_mul_vec(lambda);
        c.iter_mut().zip(&self.base_linear).for_each(|(ci, b)| *ci += b);
        c
    }

    /// Projection of the origin onto `Z`.
    pub fn default_start(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.problem.n()];
        self.problem.bounds().project_in_place(&mut z);
        z
    }

    /// Ten times the a-priori fast-gradient bound for accuracy `eps_in`.
    pub fn default_max_iters(&self, eps_in: f64) -> usize {
        let bound = certify::inner_iteration_bound(&self.consts, eps_in);
        bound.saturating_mul(10).max(1000) as usize
    }

    fn gradient_into(&self, c: &[f64], z: &[f64], out: &mut [f64]) {
        self.hessian.mul_vec_into(z, out);
        out.iter_mut().zip(c).for_each(|(o, ci)| *o += ci);
    }

    fn measure(&self, crit: &StoppingCriterion, z: &[f64], g: &[f64]) -> Result<f64> {
        let bounds = self.problem.bounds();
        Ok(match crit.kind {
            CriterionKind::FunctionGap => bounds.strong_convexity_gap_bound(z, g, self.consts.sigma_p),
            CriterionKind::VariationalInequality => bounds.variational_gap(z, g),
            CriterionKind::NormalConeDistance => {
                bounds.normal_cone_distance(z, g, DEFAULT_ACTIVE_TOL)?.distance
            }
            CriterionKind::SolutionDistance => return Err(Error::MissingReference),
        })
    }

    /// Runs projected fast gradient from `z_warm` until `crit` is certified.
    ///
    /// `FunctionGap` is certified through the strongly convex lower model of
    /// `L_ρ` over the box, which never exceeds `dist(0, ∇L_ρ + N_Z)² / (2σ_p)`.
    pub fn solve(
        &self,
        lambda: &[f64],
        crit: StoppingCriterion,
        z_warm: &[f64],
        max_iters: usize,
    ) -> Result<InnerSolution> {
        let n = self.problem.n();
        check_dim("lambda", self.problem.m(), lambda.len())?;
        check_dim("warm start", n, z_warm.len())?;
        if crit.kind == CriterionKind::SolutionDistance {
            return Err(Error::MissingReference);
        }
        let bounds = self.problem.bounds();
        let c = self.linear_term(lambda);
        let threshold = crit.threshold(&self.consts);
        let step = 1.0 / self.consts.l_p;
        let strong = self.consts.sigma_p > 0.0;
        let beta_strong = {
            let (sl, ss) = (sqrt(self.consts.l_p), sqrt(self.consts.sigma_p));
            (sl - ss) / (sl + ss)
        };

        let mut z = z_warm.to_vec();
        bounds.project_in_place(&mut z);
        let mut gz = vec![0.0; n];
        self.gradient_into(&c, &z, &mut gz);
        let mut measured = self.measure(&crit, &z, &gz)?;
        let mut best = (measured, z.clone());

        let mut y = z.clone();
        let mut gy = gz.clone();
        let mut z_prev = z.clone();
        let mut t = 1.0;
        let mut iters = 0;
        while measured > threshold {
            if iters >= max_iters {
                return Err(Error::InnerNotConverged {
                    best: best.1,
                    measured: best.0,
                    iters,
                });
            }
            iters += 1;
            z_prev.copy_from_slice(&z);
            for i in 0..n {
                z[i] = y[i] - step * gy[i];
            }
            bounds.project_in_place(&mut z);
            let beta = if strong {
                beta_strong
            } else {
                let t_next = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t));
                let b = (t - 1.0) / t_next;
                t = t_next;
                b
            };
            for i in 0..n {
                y[i] = z[i] + beta * (z[i] - z_prev[i]);
            }
            self.gradient_into(&c, &z, &mut gz);
            measured = self.measure(&crit, &z, &gz)?;
            if measured < best.0 {
                best = (measured, z.clone());
            }
            self.gradient_into(&c, &y, &mut gy);
        }

        let variational_gap = bounds.variational_gap(&z, &gz);
        let par = AugmentedLagrangianParams {
            rho: self.rho,
            lambda: lambda.to_vec(),
        };
        let approx_dual_value = self.problem.eval_aug_lagrangian(&par, &z)?;
        let approx_dual_gradient = self.problem.residual_unchecked(&z);
        Ok(InnerSolution {
            z_bar: z,
            criterion: crit,
            certified_value: measured,
            iters,
            approx_dual_value,
            approx_dual_gradient,
            variational_gap,
        })
    }

    /// Evaluates `crit` at `z_bar`, returning `(holds, measured)`.
    ///
    /// `FunctionGap` and `SolutionDistance` need the true inner optimum.
    pub fn check_criterion(
        &self,
        lambda: &[f64],
        crit: StoppingCriterion,
        z_bar: &[f64],
        reference: Option<&InnerReference>,
    ) -> Result<(bool, f64)> {
        check_dim("z_bar", self.problem.n(), z_bar.len())?;
        check_dim("lambda", self.problem.m(), lambda.len())?;
        if !self.problem.bounds().contains(z_bar, DEFAULT_ACTIVE_TOL) {
            return Err(Error::InvalidParameter("z_bar outside the box"));
        }
        let c = self.linear_term(lambda);
        let mut g = vec![0.0; z_bar.len()];
        self.gradient_into(&c, z_bar, &mut g);
        let measured = match crit.kind {
            CriterionKind::FunctionGap => {
                let r = reference.ok_or(Error::MissingReference)?;
                let par = AugmentedLagrangianParams {
                    rho: self.rho,
                    lambda: lambda.to_vec(),
                };
                self.problem.eval_aug_lagrangian(&par, z_bar)? - r.value
            }
            CriterionKind::SolutionDistance => {
                let r = reference.ok_or(Error::MissingReference)?;
                crate::linalg::dist(z_bar, &r.z_star)
            }
            _ => self.measure(&crit, z_bar, &g)?,
        };
        Ok((measured <= crit.threshold(&self.consts), measured))
    }
}

pub(crate) fn constants_of(hessian: &Matrix, r_p: f64) -> Result<InnerConstants> {
    let ev = hessian.symmetric_eigenvalues()?;
    let l_p = *ev.last().unwrap_or(&0.0);
    let sigma_p = ev.first().copied().unwrap_or(0.0).max(0.0);
    if !(l_p > 0.0) {
        return Err(Error::InvalidParameter("H + rho AᵀA must not vanish"));
    }
    // relative noise floor of the eigensolver
    let sigma_p = if sigma_p <= 1e-14 * l_p { 0.0 } else { sigma_p };
    InnerConstants::new(l_p, sigma_p, r_p)
}
