//! Closed-form constants, outer/inner iteration budgets and flop counts.

use crate::error::{check_dim, Error, Result};
use crate::inner::{constants_of, CriterionKind, InnerConstants, StoppingCriterion};
use crate::linalg::{dot, floor, ln, sqrt};
use crate::problem::ProblemInstance;

/// Outer dual scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scheme {
    /// Inexact dual gradient method.
    Idgm,
    /// Inexact dual fast gradient method.
    Idfgm,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Idgm => "idgm",
            Scheme::Idfgm => "idfgm",
        }
    }
}

/// All a-priori constants and budgets of one certified run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub scheme: Scheme,
    pub rho: f64,
    /// `1/ρ`
    pub l_d: f64,
    /// Step-size constant `L̄ ≥ L_d` (equal to `L_d` for the fast scheme).
    pub l_bar: f64,
    pub l_p: f64,
    pub sigma_p: f64,
    pub r_p: f64,
    /// `1 + √(2L_p) R_p`
    pub c_z: f64,
    pub r_d: f64,
    pub eps_out: f64,
    pub eps_in: f64,
    /// Index of the final average; the run performs `k_out + 1` inner solves.
    pub k_out: u64,
    /// Inner fast-gradient budget per solve, absent without strong convexity.
    pub k_in: Option<u64>,
    pub flops_inner: Option<u64>,
    pub flops_outer: Option<u64>,
    /// Normal-cone distance level that implies the inexact-oracle hypothesis.
    pub normal_cone_eps: f64,
    /// Function-gap level (`gap ≤ ε²`) that implies the inexact-oracle hypothesis.
    pub function_gap_eps: f64,
}

impl Certificate {
    pub fn inner_constants(&self) -> InnerConstants {
        InnerConstants {
            l_p: self.l_p,
            sigma_p: self.sigma_p,
            r_p: self.r_p,
        }
    }

    /// Recomputes `ε_in` from the stored schedule.
    pub fn derive_eps_in(&self) -> f64 {
        match self.scheme {
            Scheme::Idgm => self.eps_out / (2.0 * self.c_z),
            Scheme::Idfgm => 3.0 * self.eps_out / (8.0 * self.c_z * (self.k_out as f64 + 3.0)),
        }
    }

    /// Inner stopping rule at the level that makes the inner point an admissible
    /// inexact-oracle answer.
    pub fn inner_criterion(&self, kind: CriterionKind) -> Result<StoppingCriterion> {
        let eps = match kind {
            CriterionKind::FunctionGap => self.function_gap_eps,
            CriterionKind::NormalConeDistance => self.normal_cone_eps,
            CriterionKind::VariationalInequality => self.eps_in,
            CriterionKind::SolutionDistance => return Err(Error::MissingReference),
        };
        StoppingCriterion::new(kind, eps)
    }

    /// Copy with a prescribed inner accuracy. The schedule's final guarantees no
    /// longer follow from it.
    pub fn with_eps_in(&self, eps_in: f64) -> Result<Self> {
        if !(eps_in > 0.0) || !eps_in.is_finite() {
            return Err(Error::InvalidParameter("eps_in must be positive"));
        }
        let (normal_cone_eps, function_gap_eps) = inner_levels(&self.inner_constants(), eps_in);
        Ok(Self {
            eps_in,
            normal_cone_eps,
            function_gap_eps,
            ..self.clone()
        })
    }

    /// Attaches the per-solve and per-outer-iteration flop counts of an MPC instance.
    pub fn with_flops(mut self, horizon: usize, n_x: usize, n_u: usize) -> Self {
        if let Some(k_in) = self.k_in {
            let (inner, outer) = flop_budget(self.scheme, horizon, n_x, n_u, k_in);
            self.flops_inner = Some(inner);
            self.flops_outer = Some(outer);
        }
        self
    }

    /// Guarantees at `ẑ_{k_out}` promised by the schedule.
    ///
    /// `lambda_star_norm` may be any upper bound on `‖λ*‖`, e.g. `‖λ₀‖ + R_d`.
    pub fn final_guarantees(&self, lambda0_norm: f64, lambda_star_norm: f64) -> FinalGuarantees {
        let e = self.eps_out;
        let rd = self.r_d;
        if rd == 0.0 {
            return FinalGuarantees {
                dual_gap: e,
                infeasibility: f64::INFINITY,
                primal_lower: f64::NEG_INFINITY,
                primal_upper: f64::INFINITY,
            };
        }
        FinalGuarantees {
            dual_gap: e,
            infeasibility: 3.0 * e / rd,
            primal_lower: -(3.0 * lambda_star_norm / rd + 9.0 * self.rho * e / (2.0 * rd * rd)) * e,
            primal_upper: (0.5 + lambda0_norm * lambda0_norm / (2.0 * rd * rd)) * e,
        }
    }
}

/// Final bounds of a certified schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FinalGuarantees {
    pub dual_gap: f64,
    pub infeasibility: f64,
    pub primal_lower: f64,
    pub primal_upper: f64,
}

/// Extremal eigenvalues of `H + ρAᵀA` and the diameter of the box.
pub fn inner_constants(p: &ProblemInstance, rho: f64) -> Result<InnerConstants> {
    inner_constants_with_diameter(p, rho, p.bounds().diameter())
}

/// As [`inner_constants`] with a caller-supplied diameter.
pub fn inner_constants_with_diameter(p: &ProblemInstance, rho: f64, r_p: f64) -> Result<InnerConstants> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter("rho must be positive"));
    }
    let m = p.hessian().add_scaled(rho, &p.coupling().gram())?;
    constants_of(&m, r_p)
}

fn to_count(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        floor(x) as u64
    }
}

fn check_outer_inputs(rho: f64, eps_out: f64, r_d: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter("rho must be positive"));
    }
    if !(eps_out > 0.0) || !eps_out.is_finite() {
        return Err(Error::InvalidParameter("eps_out must be positive"));
    }
    if !(r_d >= 0.0) || !r_d.is_finite() {
        return Err(Error::InvalidParameter("R_d must be nonnegative"));
    }
    Ok(())
}

/// `⌊L̄ R_d² / ε_out⌋`
pub fn k_out_idgm(l_bar: f64, r_d: f64, eps_out: f64) -> u64 {
    to_count(l_bar * r_d * r_d / eps_out)
}

/// `⌊2 R_d √(L_d / ε_out)⌋`
pub fn k_out_idfgm(l_d: f64, r_d: f64, eps_out: f64) -> u64 {
    to_count(2.0 * r_d * sqrt(l_d / eps_out))
}

/// Fast-gradient iterations sufficient for `gap ≤ ε_in²` on a strongly convex inner
/// problem: `⌊2√(L_p/σ_p)·ln(1.5√L_p R_p / ε_in)⌋`. Without strong convexity the
/// sublinear bound `⌈2√L_p R_p / ε_in⌉` is returned.
pub fn inner_iteration_bound(consts: &InnerConstants, eps_in: f64) -> u64 {
    let root_l = sqrt(consts.l_p);
    if consts.sigma_p > 0.0 {
        let arg = 1.5 * root_l * consts.r_p / eps_in;
        if arg <= 1.0 {
            return 0;
        }
        to_count(2.0 * sqrt(consts.l_p / consts.sigma_p) * ln(arg))
    } else {
        to_count(2.0 * root_l * consts.r_p / eps_in) + 1
    }
}

/// `⌊2√(L_p/σ_p)·ln(3√L_p R_p C_Z / ε_out)⌋`
pub fn k_in_idgm(consts: &InnerConstants, eps_out: f64) -> Option<u64> {
    if consts.sigma_p <= 0.0 {
        return None;
    }
    let arg = 3.0 * sqrt(consts.l_p) * consts.r_p * consts.c_z() / eps_out;
    Some(if arg <= 1.0 {
        0
    } else {
        to_count(2.0 * sqrt(consts.l_p / consts.sigma_p) * ln(arg))
    })
}

/// `⌊2√(L_p/σ_p)·ln(5√L_d R_d √L_p R_p C_Z / ε_out^{3/2})⌋`
pub fn k_in_idfgm(consts: &InnerConstants, l_d: f64, r_d: f64, eps_out: f64) -> Option<u64> {
    if consts.sigma_p <= 0.0 {
        return None;
    }
    let arg = 5.0 * sqrt(l_d) * r_d * sqrt(consts.l_p) * consts.r_p * consts.c_z() / (eps_out * sqrt(eps_out));
    Some(if arg <= 1.0 {
        0
    } else {
        to_count(2.0 * sqrt(consts.l_p / consts.sigma_p) * ln(arg))
    })
}

fn finish(
    scheme: Scheme,
    consts: &InnerConstants,
    rho: f64,
    l_bar: f64,
    eps_out: f64,
    r_d: f64,
    k_out: u64,
    eps_in: f64,
    k_in: Option<u64>,
) -> Certificate {
    let c_z = consts.c_z();
    let (normal_cone_eps, function_gap_eps) = inner_levels(consts, eps_in);
    Certificate {
        scheme,
        rho,
        l_d: 1.0 / rho,
        l_bar,
        l_p: consts.l_p,
        sigma_p: consts.sigma_p,
        r_p: consts.r_p,
        c_z,
        r_d,
        eps_out,
        eps_in,
        k_out,
        k_in,
        flops_inner: None,
        flops_outer: None,
        normal_cone_eps,
        function_gap_eps,
    }
}

/// Criterion levels under which an inner point satisfies the inexact-oracle hypothesis
/// `max_{z∈Z} ⟨∇L_ρ(z̄), z̄ − z⟩ ≤ C_Z ε_in`.
fn inner_levels(consts: &InnerConstants, eps_in: f64) -> (f64, f64) {
    let target = consts.c_z() * eps_in;
    let normal_cone = if consts.r_p > 0.0 {
        eps_in.min(target / consts.r_p)
    } else {
        eps_in
    };
    // gap ≤ e² ⇒ VI gap ≤ e² + √(2L_p) R_p e; solve e² + √(2L_p) R_p e = C_Z ε_in.
    let s = sqrt(2.0 * consts.l_p) * consts.r_p;
    let root = 2.0 * target / (s + sqrt(s * s + 4.0 * target));
    (normal_cone, eps_in.min(root))
}

/// Gradient-scheme schedule with `L̄ = L_d`.
pub fn certify_idgm(consts: &InnerConstants, rho: f64, eps_out: f64, r_d: f64) -> Result<Certificate> {
    certify_idgm_with_step(consts, rho, eps_out, r_d, 1.0 / rho)
}

/// Gradient-scheme schedule for a step constant `L̄ ≥ L_d` (steps `α ∈ [1/L̄, ρ]`).
pub fn certify_idgm_with_step(
    consts: &InnerConstants,
    rho: f64,
    eps_out: f64,
    r_d: f64,
    l_bar: f64,
) -> Result<Certificate> {
    check_outer_inputs(rho, eps_out, r_d)?;
    let l_d = 1.0 / rho;
    if !(l_bar >= l_d * (1.0 - 1e-15)) || !l_bar.is_finite() {
        return Err(Error::InvalidParameter("L_bar must be at least L_d = 1/rho"));
    }
    let k_out = k_out_idgm(l_bar, r_d, eps_out);
    let eps_in = eps_out / (2.0 * consts.c_z());
    let k_in = k_in_idgm(consts, eps_out);
    Ok(finish(Scheme::Idgm, consts, rho, l_bar, eps_out, r_d, k_out, eps_in, k_in))
}

/// Fast-gradient-scheme schedule.
pub fn certify_idfgm(consts: &InnerConstants, rho: f64, eps_out: f64, r_d: f64) -> Result<Certificate> {
    check_outer_inputs(rho, eps_out, r_d)?;
    let l_d = 1.0 / rho;
    let k_out = k_out_idfgm(l_d, r_d, eps_out);
    let eps_in = 3.0 * eps_out / (8.0 * consts.c_z() * (k_out as f64 + 3.0));
    let k_in = k_in_idfgm(consts, l_d, r_d, eps_out);
    Ok(finish(Scheme::Idfgm, consts, rho, l_d, eps_out, r_d, k_out, eps_in, k_in))
}

pub fn certify(scheme: Scheme, consts: &InnerConstants, rho: f64, eps_out: f64, r_d: f64) -> Result<Certificate> {
    match scheme {
        Scheme::Idgm => certify_idgm(consts, rho, eps_out, r_d),
        Scheme::Idfgm => certify_idfgm(consts, rho, eps_out, r_d),
    }
}

/// Flops of one inner iteration and of one outer iteration for an MPC problem.
pub fn flop_budget(scheme: Scheme, horizon: usize, n_x: usize, n_u: usize, k_in: u64) -> (u64, u64) {
    let (nn, nx, nu) = (horizon as u64, n_x as u64, n_u as u64);
    let inner = nn * (3 * nx * nx + 2 * nx * nu + 2 * nu * nu + 10 * nx + 8 * nu);
    let linear = match scheme {
        Scheme::Idgm => 5,
        Scheme::Idfgm => 10,
    };
    let base = nn * (2 * nx * nx + 2 * nx * nu + linear * nx);
    (inner, base.saturating_add(k_in.saturating_mul(inner)))
}

/// `max_{z∈Z} ⟨∇f(z*), z − z*⟩ / r̄`, an upper bound on `‖λ*‖` whenever the ball of
/// radius `r̄` around the origin lies in `{Az − b : z ∈ Z}`.
pub fn dual_radius_bound(p: &ProblemInstance, z_star_hint: &[f64], r_bar: f64) -> Result<f64> {
    check_dim("z_star_hint", p.n(), z_star_hint.len())?;
    if !(r_bar > 0.0) || !r_bar.is_finite() {
        return Err(Error::InvalidParameter("r_bar must be positive"));
    }
    let g = p.objective_gradient(z_star_hint)?;
    let numerator = p.bounds().support_unchecked(&g) - dot(&g, z_star_hint);
    Ok(numerator.max(0.0) / r_bar)
}
