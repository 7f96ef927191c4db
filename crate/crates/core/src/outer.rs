//! Inexact dual gradient (IDGM) and dual fast gradient (IDFGM) outer loops with
//! primal averaging and per-iteration bound evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::certify::{self, Certificate, Scheme};
use crate::error::{check_dim, Error, Result};
use crate::geometry::DEFAULT_ACTIVE_TOL;
use crate::inner::{CriterionKind, InnerProblem, InnerSolution, StoppingCriterion};
use crate::linalg::{ceil, norm, sqrt};
use crate::oracle;
use crate::problem::{BoundRow, ProblemInstance, SolveReport};

/// State of the inexact dual gradient method after `k` completed steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IdgmState {
    lambda0: Vec<f64>,
    lambda_k: Vec<f64>,
    /// `Σ α_j` over completed steps
    s_k: f64,
    z_hat: Vec<f64>,
    lambda_hat: Vec<f64>,
    k: usize,
    /// `(1/L̄, 1/L_d)`
    alpha_range: (f64, f64),
    z_warm: Vec<f64>,
}

impl IdgmState {
    pub fn new(lambda0: Vec<f64>, z_start: Vec<f64>, alpha_range: (f64, f64)) -> Result<Self> {
        if !(alpha_range.0 > 0.0) || alpha_range.0 > alpha_range.1 {
            return Err(Error::InvalidParameter("step range must satisfy 0 < 1/L_bar <= 1/L_d"));
        }
        Ok(Self {
            lambda_k: lambda0.clone(),
            lambda_hat: vec![0.0; lambda0.len()],
            z_hat: vec![0.0; z_start.len()],
            lambda0,
            s_k: 0.0,
            k: 0,
            alpha_range,
            z_warm: z_start,
        })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda_k
    }

    pub fn lambda0(&self) -> &[f64] {
        &self.lambda0
    }

    /// `S_k = Σ_{j≤k} α_j`
    pub fn step_sum(&self) -> f64 {
        self.s_k
    }

    /// `ẑ_k`, meaningful once a step was taken.
    pub fn z_hat(&self) -> &[f64] {
        &self.z_hat
    }

    /// `λ̂_k = S_k⁻¹ Σ α_j λ_{j+1}`
    pub fn lambda_hat(&self) -> &[f64] {
        &self.lambda_hat
    }

    /// Completed steps; the current averages carry index `steps() − 1`.
    pub fn steps(&self) -> usize {
        self.k
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        self.alpha_range
    }
}

/// One IDGM step: inner solve at `λ_k`, `λ_{k+1} = λ_k + α(Az̄_k − b)`, averaging with weight `α`.
pub fn idgm_step(
    inner: &InnerProblem<'_>,
    state: &mut IdgmState,
    crit: StoppingCriterion,
    alpha: f64,
    max_inner: usize,
) -> Result<InnerSolution> {
    let (lo, hi) = state.alpha_range;
    if !(alpha >= lo * (1.0 - 1e-15) && alpha <= hi * (1.0 + 1e-15)) {
        return Err(Error::InvalidParameter("step outside [1/L_bar, 1/L_d]"));
    }
    let sol = inner.solve(&state.lambda_k, crit, &state.z_warm, max_inner)?;
    apply_idgm(state, &sol, alpha);
    Ok(sol)
}

fn apply_idgm(state: &mut IdgmState, sol: &InnerSolution, alpha: f64) {
    for (l, g) in state.lambda_k.iter_mut().zip(&sol.approx_dual_gradient) {
        *l += alpha * g;
    }
    state.s_k += alpha;
    let w = alpha / state.s_k;
    average_into(&mut state.z_hat, &sol.z_bar, w);
    average_into(&mut state.lambda_hat, &state.lambda_k, w);
    state.z_warm.copy_from_slice(&sol.z_bar);
    state.k += 1;
}

fn average_into(avg: &mut [f64], x: &[f64], w: f64) {
    if w >= 1.0 {
        avg.copy_from_slice(x);
    } else {
        for (a, xi) in avg.iter_mut().zip(x) {
            *a += w * (xi - *a);
        }
    }
}

/// `θ₀ = 1`, `θ_{k+1} = ½(1 + √(1 + 4θ_k²))` together with `S_k = Σ_{j≤k} θ_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSequence {
    theta: f64,
    s: f64,
}

impl Default for ThetaSequence {
    fn default() -> Self {
        Self { theta: 1.0, s: 1.0 }
    }
}

impl ThetaSequence {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn partial_sum(&self) -> f64 {
        self.s
    }

    /// Advances to `k + 1`, returning `a_{k+1} = θ_{k+1}/S_{k+1}`.
    pub fn advance(&mut self) -> f64 {
        self.theta = 0.5 * (1.0 + sqrt(1.0 + 4.0 * self.theta * self.theta));
        self.s += self.theta;
        self.theta / self.s
    }
}

impl Iterator for ThetaSequence {
    /// `(θ_k, S_k)`, starting at `k = 0`.
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let out = (self.theta, self.s);
        self.advance();
        Some(out)
    }
}

/// State of the inexact dual fast gradient method after `k` completed steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfgmState {
    lambda0: Vec<f64>,
    lambda_k: Vec<f64>,
    mu_k: Vec<f64>,
    /// `Σ θ_j (Az̄_j − b)`
    grad_sum: Vec<f64>,
    theta: ThetaSequence,
    /// `S` of the current average
    s_hat: f64,
    z_hat: Vec<f64>,
    k: usize,
    step: f64,
    z_warm: Vec<f64>,
}

impl IdfgmState {
    /// `step` is `1/L_d = ρ`.
    pub fn new(lambda0: Vec<f64>, z_start: Vec<f64>, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter("step must be positive"));
        }
        let m = lambda0.len();
        Ok(Self {
            lambda_k: lambda0.clone(),
            mu_k: lambda0.clone(),
            lambda0,
            grad_sum: vec![0.0; m],
            theta: ThetaSequence::default(),
            s_hat: 0.0,
            z_hat: vec![0.0; z_start.len()],
            k: 0,
            step,
            z_warm: z_start,
        })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda_k
    }

    pub fn lambda0(&self) -> &[f64] {
        &self.lambda0
    }

    /// `μ_k` of the last completed step (the output dual point).
    pub fn mu(&self) -> &[f64] {
        &self.mu_k
    }

    pub fn z_hat(&self) -> &[f64] {
        &self.z_hat
    }

    /// `S_k` of the current average `ẑ_k`.
    pub fn weight_sum(&self) -> f64 {
        self.s_hat
    }

    /// `θ` for the next step.
    pub fn next_theta(&self) -> f64 {
        self.theta.theta()
    }

    pub fn steps(&self) -> usize {
        self.k
    }
}

/// One IDFGM step: inner solve at `λ_k`, `μ_k = λ_k + ρ∇d̄`,
/// `λ_{k+1} = (1 − a)μ_k + a(λ₀ + ρ Σ θ_j ∇d̄_j)`.
pub fn idfgm_step(
    inner: &InnerProblem<'_>,
    state: &mut IdfgmState,
    crit: StoppingCriterion,
    max_inner: usize,
) -> Result<InnerSolution> {
    let sol = inner.solve(&state.lambda_k, crit, &state.z_warm, max_inner)?;
    apply_idfgm(state, &sol);
    Ok(sol)
}

fn apply_idfgm(state: &mut IdfgmState, sol: &InnerSolution) {
    let g = &sol.approx_dual_gradient;
    let theta = state.theta.theta();
    let s = state.theta.partial_sum();
    for i in 0..g.len() {
        state.mu_k[i] = state.lambda_k[i] + state.step * g[i];
        state.grad_sum[i] += theta * g[i];
    }
    average_into(&mut state.z_hat, &sol.z_bar, theta / s);
    state.s_hat = s;
    let a = state.theta.advance();
    for i in 0..g.len() {
        let anchor = state.lambda0[i] + state.step * state.grad_sum[i];
        state.lambda_k[i] = (1.0 - a) * state.mu_k[i] + a * anchor;
    }
    state.z_warm.copy_from_slice(&sol.z_bar);
    state.k += 1;
}

/// Constants entering the per-iteration theorem bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundInputs {
    pub scheme: Scheme,
    pub l_d: f64,
    pub l_bar: f64,
    pub r_d: f64,
    pub c_z: f64,
    pub eps_in: f64,
    pub rho: f64,
    pub lambda0_norm: f64,
    /// `‖λ*‖` or an upper bound on it.
    pub lambda_star_norm: f64,
}

impl BoundInputs {
    pub fn from_certificate(cert: &Certificate, lambda0_norm: f64, lambda_star_norm: f64) -> Self {
        Self {
            scheme: cert.scheme,
            l_d: cert.l_d,
            l_bar: cert.l_bar,
            r_d: cert.r_d,
            c_z: cert.c_z,
            eps_in: cert.eps_in,
            rho: cert.rho,
            lambda0_norm,
            lambda_star_norm,
        }
    }
}

/// Theorem bounds at outer index `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundRecord {
    pub k: usize,
    /// Upper bound on `f* − d_ρ(dual output)`.
    pub dual_gap: f64,
    /// Upper bound on `‖Aẑ_k − b‖`.
    pub infeasibility: f64,
    /// Lower bound on `f(ẑ_k) − f*`.
    pub primal_lower: f64,
    /// Upper bound on `f(ẑ_k) − f*`.
    pub primal_upper: f64,
}

pub fn per_iteration_bounds(k: usize, c: &BoundInputs) -> BoundRecord {
    let kf = k as f64;
    let err = c.c_z * c.eps_in;
    let (dual_gap, infeasibility, primal_upper) = match c.scheme {
        Scheme::Idgm => {
            let dual = c.l_bar * c.r_d * c.r_d / (2.0 * (kf + 1.0)) + err;
            let nu = 2.0 * c.l_bar * c.r_d / (kf + 1.0) + sqrt(2.0 * c.l_bar * err / (kf + 1.0));
            let up = c.l_bar * c.lambda0_norm * c.lambda0_norm / (2.0 * (kf + 1.0)) + err;
            (dual, nu, up)
        }
        Scheme::Idfgm => {
            let prod = (kf + 1.0) * (kf + 2.0);
            let drift = 4.0 * (kf + 3.0) / 3.0 * err;
            let dual = 2.0 * c.l_d * c.r_d * c.r_d / prod + drift;
            let v = 8.0 * c.l_d * c.r_d / prod + 4.0 * sqrt(2.0 * c.l_d * (kf + 3.0) * err / (3.0 * prod));
            let up = 2.0 * c.l_d * c.lambda0_norm * c.lambda0_norm / prod + drift;
            (dual, v, up)
        }
    };
    BoundRecord {
        k,
        dual_gap,
        infeasibility,
        primal_lower: -(c.lambda_star_norm + 0.5 * c.rho * infeasibility) * infeasibility,
        primal_upper,
    }
}

/// Whether iteration `k` is logged: every iteration below 1000, then every ⌈k/1000⌉-th.
pub fn is_logged(k: usize) -> bool {
    k < 1000 || k.is_multiple_of(ceil(k as f64 / 1000.0) as usize)
}

/// How the outer loop decides when to stop.
#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    /// Exactly `k_out + 1` inner solves with the scheduled `ε_in` and fixed `ρ`.
    Certified,
    /// Stop once `|f(ẑ_k) − f*| ≤ ε_out` and `‖Aẑ_k − b‖ ≤ ε_out`, or after `max_outer` solves
    /// (default `10(k_out + 1)`).
    Measured { f_star: f64, max_outer: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterOptions {
    pub mode: RunMode,
    /// Inner stopping rule; its level is derived from the certificate.
    pub criterion: CriterionKind,
    /// Defaults to the zero vector.
    pub lambda0: Option<Vec<f64>>,
    /// Gradient-scheme step constant `L̄ ≥ 1/ρ`.
    pub l_bar: Option<f64>,
    /// Gradient-scheme step `α ∈ [1/L̄, ρ]`, default `ρ`.
    pub alpha: Option<f64>,
    /// Inner accuracy replacing the scheduled one; refused in certified mode.
    pub eps_in_override: Option<f64>,
    /// Double `ρ` when infeasibility stalls (measured mode only, uncertified).
    pub adaptive_rho: bool,
    /// Diameter replacing the box diameter (e.g. the MPC product form).
    pub r_p: Option<f64>,
    /// Optimal value, used only to report measured gaps.
    pub f_star: Option<f64>,
    /// `‖λ*‖` or an upper bound; defaults to `‖λ₀‖ + R_d`.
    pub lambda_star_norm: Option<f64>,
    /// Inner iteration cap per solve; defaults to ten times the a-priori bound.
    pub max_inner: Option<usize>,
}

impl Default for OuterOptions {
    fn default() -> Self {
        Self {
            mode: RunMode::Certified,
            criterion: CriterionKind::FunctionGap,
            lambda0: None,
            l_bar: None,
            alpha: None,
            eps_in_override: None,
            adaptive_rho: false,
            r_p: None,
            f_star: None,
            lambda_star_norm: None,
            max_inner: None,
        }
    }
}

impl OuterOptions {
    pub fn measured(f_star: f64) -> Self {
        Self {
            mode: RunMode::Measured {
                f_star,
                max_outer: None,
            },
            f_star: Some(f_star),
            ..Self::default()
        }
    }
}

/// View of the run at a logged outer index.
#[derive(Debug)]
pub struct Snapshot<'a> {
    pub scheme: Scheme,
    /// Index of the averages.
    pub k: usize,
    pub z_hat: &'a [f64],
    /// `λ̂_k` (gradient scheme) or `μ_k` (fast scheme).
    pub dual_point: &'a [f64],
    pub rho: f64,
    pub eps_in: f64,
    pub inner: &'a InnerSolution,
    /// Theorem bounds at `k`; absent once `ρ` was adapted.
    pub bounds: Option<BoundRecord>,
}

enum State {
    Gradient(IdgmState, f64),
    Fast(IdfgmState),
}

impl State {
    fn new(scheme: Scheme, lambda0: Vec<f64>, z: Vec<f64>, rho: f64, l_bar: f64, alpha: f64) -> Result<Self> {
        Ok(match scheme {
            Scheme::Idgm => State::Gradient(IdgmState::new(lambda0, z, (1.0 / l_bar, rho))?, alpha),
            Scheme::Idfgm => State::Fast(IdfgmState::new(lambda0, z, rho)?),
        })
    }

    fn lambda(&self) -> &[f64] {
        match self {
            State::Gradient(s, _) => s.lambda(),
            State::Fast(s) => s.lambda(),
        }
    }

    fn warm(&self) -> &[f64] {
        match self {
            State::Gradient(s, _) => &s.z_warm,
            State::Fast(s) => &s.z_warm,
        }
    }

    fn apply(&mut self, sol: &InnerSolution) {
        match self {
            State::Gradient(s, alpha) => apply_idgm(s, sol, *alpha),
            State::Fast(s) => apply_idfgm(s, sol),
        }
    }

    fn z_hat(&self) -> &[f64] {
        match self {
            State::Gradient(s, _) => s.z_hat(),
            State::Fast(s) => s.z_hat(),
        }
    }

    fn dual_point(&self) -> &[f64] {
        match self {
            State::Gradient(s, _) => s.lambda_hat(),
            State::Fast(s) => s.mu(),
        }
    }

    /// Point the method restarts from after a penalty change.
    fn restart_point(&self) -> Vec<f64> {
        match self {
            State::Gradient(s, _) => s.lambda().to_vec(),
            State::Fast(s) => s.mu().to_vec(),
        }
    }
}

/// Inexact dual gradient method.
pub fn run_idgm(p: &ProblemInstance, rho: f64, eps_out: f64, r_d: f64, opts: &OuterOptions) -> Result<SolveReport> {
    run(Scheme::Idgm, p, rho, eps_out, r_d, opts, &mut |_| {})
}

/// Inexact dual fast gradient method.
pub fn run_idfgm(p: &ProblemInstance, rho: f64, eps_out: f64, r_d: f64, opts: &OuterOptions) -> Result<SolveReport> {
    run(Scheme::Idfgm, p, rho, eps_out, r_d, opts, &mut |_| {})
}

/// Runs `scheme`, calling `observer` at every logged outer index and at the last one.
pub fn run(
    scheme: Scheme,
    p: &ProblemInstance,
    rho: f64,
    eps_out: f64,
    r_d: f64,
    opts: &OuterOptions,
    observer: &mut dyn FnMut(&Snapshot<'_>),
) -> Result<SolveReport> {
    let certified = opts.mode == RunMode::Certified;
    if certified && opts.eps_in_override.is_some() {
        return Err(Error::CertifiedOverride);
    }
    if certified && opts.adaptive_rho {
        return Err(Error::InvalidParameter("certified mode requires a fixed rho"));
    }
    if !(r_d >= 0.0) || !r_d.is_finite() {
        return Err(Error::InvalidParameter("R_d must be nonnegative"));
    }
    let lambda0 = match &opts.lambda0 {
        Some(l) => {
            check_dim("lambda0", p.m(), l.len())?;
            l.clone()
        }
        None => vec![0.0; p.m()],
    };
    let r_p = opts.r_p.unwrap_or_else(|| p.bounds().diameter());
    let consts = certify::inner_constants_with_diameter(p, rho, r_p)?;
    let mut cert = match scheme {
        Scheme::Idgm => certify::certify_idgm_with_step(&consts, rho, eps_out, r_d, opts.l_bar.unwrap_or(1.0 / rho))?,
        Scheme::Idfgm => certify::certify_idfgm(&consts, rho, eps_out, r_d)?,
    };
    if let Some(eps) = opts.eps_in_override {
        cert = cert.with_eps_in(eps)?;
    }
    let alpha = opts.alpha.unwrap_or(rho);
    let k_out = usize::try_from(cert.k_out).map_err(|_| Error::InvalidParameter("k_out exceeds the address range"))?;
    let max_solves = match &opts.mode {
        RunMode::Certified => k_out.checked_add(1).ok_or(Error::InvalidParameter("k_out too large"))?,
        RunMode::Measured { max_outer, .. } => max_outer.unwrap_or(k_out.saturating_add(1).saturating_mul(10)).max(1),
    };

    let lambda0_norm = norm(&lambda0);
    let lambda_star_norm = opts.lambda_star_norm.unwrap_or(lambda0_norm + r_d);
    let mut bound_inputs = Some(BoundInputs::from_certificate(&cert, lambda0_norm, lambda_star_norm));

    let mut rho_k = rho;
    let mut inner = InnerProblem::with_constants(p, rho, consts)?;
    let mut crit = cert.inner_criterion(opts.criterion)?;
    let vi_crit = StoppingCriterion::variational(cert.eps_in)?;
    let vi_limit = cert.c_z * cert.eps_in;
    let mut max_inner = opts.max_inner.unwrap_or_else(|| inner.default_max_iters(crit.eps_in));

    let mut state = State::new(scheme, lambda0, inner.default_start(), rho, cert.l_bar, alpha)?;
    let mut inner_total = 0usize;
    let mut inner_max = 0usize;
    let mut solves = 0usize;
    let mut local_k = 0usize;
    let mut converged = false;
    let mut infeas_history: Vec<f64> = Vec::new();

    while solves < max_solves {
        let mut sol = inner.solve(state.lambda(), crit, state.warm(), max_inner)?;
        let mut iters = sol.iters;
        if sol.variational_gap > vi_limit {
            let extra = inner.solve(state.lambda(), vi_crit, &sol.z_bar, max_inner)?;
            iters += extra.iters;
            sol = extra;
        }
        inner_total += iters;
        inner_max = inner_max.max(iters);
        state.apply(&sol);
        solves += 1;
        let k = local_k;
        local_k += 1;

        let z_hat = state.z_hat();
        let done = match &opts.mode {
            RunMode::Certified => solves == max_solves,
            RunMode::Measured { f_star, .. } => {
                let infeas = p.infeasibility(z_hat)?;
                let gap = p.eval_objective(z_hat)? - f_star;
                converged = gap.abs() <= eps_out && infeas <= eps_out;
                if opts.adaptive_rho {
                    infeas_history.push(infeas);
                }
                converged || solves == max_solves
            }
        };
        if done || is_logged(k) {
            let snap = Snapshot {
                scheme,
                k,
                z_hat,
                dual_point: state.dual_point(),
                rho: rho_k,
                eps_in: cert.eps_in,
                inner: &sol,
                bounds: bound_inputs.as_ref().map(|b| per_iteration_bounds(k, b)),
            };
            observer(&snap);
        }
        if done {
            break;
        }
        let len = infeas_history.len();
        if opts.adaptive_rho && len > 10 && infeas_history[len - 1] > 0.9 * infeas_history[len - 11] {
            rho_k *= 2.0;
            let c = certify::inner_constants_with_diameter(p, rho_k, r_p)?;
            inner = InnerProblem::with_constants(p, rho_k, c)?;
            let restart = state.restart_point();
            let warm = state.warm().to_vec();
            state = State::new(scheme, restart, warm, rho_k, 1.0 / rho_k, rho_k)?;
            let rescaled = match scheme {
                Scheme::Idgm => certify::certify_idgm(&c, rho_k, eps_out, r_d)?,
                Scheme::Idfgm => certify::certify_idfgm(&c, rho_k, eps_out, r_d)?,
            }
            .with_eps_in(cert.eps_in)?;
            crit = rescaled.inner_criterion(opts.criterion)?;
            if opts.max_inner.is_none() {
                max_inner = inner.default_max_iters(crit.eps_in);
            }
            bound_inputs = None;
            infeas_history.clear();
            local_k = 0;
        }
    }

    let z_hat = state.z_hat().to_vec();
    let lambda_out = state.dual_point().to_vec();
    let infeasibility = p.infeasibility(&z_hat)?;
    debug_assert!(p.bounds().contains(&z_hat, DEFAULT_ACTIVE_TOL));
    let primal_gap = match opts.f_star {
        Some(f) => Some(p.eval_objective(&z_hat)? - f),
        None => None,
    };
    let dual_gap = match opts.f_star {
        Some(f) => Some(f - oracle::exact_dual_value_and_gradient(p, rho_k, &lambda_out)?.0),
        None => None,
    };
    let final_k = local_k.saturating_sub(1);

    let mut table = Vec::new();
    if let Some(b) = &bound_inputs {
        if certified {
            let g = cert.final_guarantees(lambda0_norm, lambda_star_norm);
            table.push(BoundRow::upper("dual_gap_final", g.dual_gap, dual_gap));
            table.push(BoundRow::upper("infeasibility_final", g.infeasibility, Some(infeasibility)));
            table.push(BoundRow::lower("primal_gap_lower_final", g.primal_lower, primal_gap));
            table.push(BoundRow::upper("primal_gap_upper_final", g.primal_upper, primal_gap));
        }
        let r = per_iteration_bounds(final_k, b);
        table.push(BoundRow::upper("dual_gap_theorem", r.dual_gap, dual_gap));
        table.push(BoundRow::upper("infeasibility_theorem", r.infeasibility, Some(infeasibility)));
        table.push(BoundRow::lower("primal_gap_lower_theorem", r.primal_lower, primal_gap));
        table.push(BoundRow::upper("primal_gap_upper_theorem", r.primal_upper, primal_gap));
    }

    Ok(SolveReport {
        z_hat,
        lambda_out,
        infeasibility,
        primal_gap,
        dual_gap,
        outer_iters: solves,
        inner_iters_total: inner_total,
        inner_iters_max: inner_max,
        final_k,
        eps_in: cert.eps_in,
        rho: rho_k,
        certified: certified && solves == max_solves,
        converged,
        bound_table: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxSet;
    use crate::linalg::Matrix;

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
    fn theta_values() {
        let mut t = ThetaSequence::default();
        assert_eq!(t.next(), Some((1.0, 1.0)));
        let (t1, s1) = t.next().unwrap();
        assert!((t1 - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((t1 * t1 - s1).abs() < 1e-14);
        let (t2, _) = t.next().unwrap();
        assert!((t2 - 2.1935).abs() < 1e-4);
    }

    #[test]
    fn bound_examples() {
        let c = BoundInputs {
            scheme: Scheme::Idgm,
            l_d: 1.0,
            l_bar: 1.0,
            r_d: 1.0,
            c_z: 2.0,
            eps_in: 0.01,
            rho: 1.0,
            lambda0_norm: 0.0,
            lambda_star_norm: 1.0,
        };
        assert!((per_iteration_bounds(0, &c).dual_gap - 0.52).abs() < 1e-15);
        let f = BoundInputs {
            scheme: Scheme::Idfgm,
            eps_in: 1e-4,
            ..c
        };
        let v = per_iteration_bounds(1, &f).infeasibility;
        let independent = 8.0 / 6.0 + 4.0 * (2.0 * 4.0 * 2.0 * 1e-4 / 18.0f64).sqrt();
        assert!((v - independent).abs() < 1e-14);
        let exact = BoundInputs { eps_in: 0.0, ..f };
        let far = per_iteration_bounds(10_000_000, &exact);
        assert!(far.dual_gap < 1e-12 && far.infeasibility < 1e-12 && far.primal_lower > -1e-12);
    }

    #[test]
    fn logging_rule() {
        assert!(is_logged(0) && is_logged(999));
        assert!(is_logged(1000) && !is_logged(1001) && is_logged(1002));
        assert!(is_logged(3004) && !is_logged(3003));
    }

    #[test]
    fn idgm_averaging_identity() {
        let p = analytic();
        let inner = InnerProblem::new(&p, 1.0).unwrap();
        let crit = StoppingCriterion::function_gap(1e-8).unwrap();
        let mut st = IdgmState::new(vec![0.0], inner.default_start(), (1.0, 1.0)).unwrap();
        let mut prev = f64::INFINITY;
        for _ in 0..20 {
            idgm_step(&inner, &mut st, crit, 1.0, 10_000).unwrap();
            let r = p.residual(st.z_hat()).unwrap();
            let rebuilt = st.lambda0()[0] + st.step_sum() * r[0];
            assert!((st.lambda()[0] - rebuilt).abs() < 1e-10);
            let d = (st.lambda()[0] + 0.5).abs();
            assert!(d <= prev + 1e-12);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn stationary_dual_is_fixed() {
        // b = 0 and z* = 0 interior: ∇d̄(0) = 0
        let p = analytic().with_rhs(vec![0.0]).unwrap();
        let inner = InnerProblem::new(&p, 1.0).unwrap();
        let crit = StoppingCriterion::function_gap(1e-8).unwrap();
        let mut g = IdgmState::new(vec![0.0], vec![0.0, 0.0], (1.0, 1.0)).unwrap();
        let mut f = IdfgmState::new(vec![0.0], vec![0.0, 0.0], 1.0).unwrap();
        for _ in 0..5 {
            idgm_step(&inner, &mut g, crit, 1.0, 100).unwrap();
            idfgm_step(&inner, &mut f, crit, 100).unwrap();
            assert_eq!(g.lambda(), &[0.0]);
            assert_eq!(f.lambda(), &[0.0]);
            assert_eq!(f.mu(), &[0.0]);
        }
    }

    #[test]
    fn certified_override_refused() {
        let p = analytic();
        let opts = OuterOptions {
            eps_in_override: Some(1e-3),
            ..OuterOptions::default()
        };
        assert_eq!(run_idfgm(&p, 1.0, 1e-3, 1.0, &opts).unwrap_err(), Error::CertifiedOverride);
    }

    #[test]
    fn certified_run_meets_guarantees() {
        let p = analytic();
        let opts = OuterOptions {
            f_star: Some(0.25),
            lambda_star_norm: Some(0.5),
            ..OuterOptions::default()
        };
        for scheme in [Scheme::Idgm, Scheme::Idfgm] {
            let rep = run(scheme, &p, 1.0, 1e-3, 0.5, &opts, &mut |_| {}).unwrap();
            assert!(rep.certified);
            assert!(rep.infeasibility <= 3e-3 / 0.5, "{scheme:?}");
            assert!(rep.bounds_hold(1e-8), "{scheme:?} {:?}", rep.bound_table);
        }
    }

    #[test]
    fn zero_radius_runs_one_solve() {
        let p = analytic();
        let opts = OuterOptions {
            lambda0: Some(vec![-0.5]),
            ..OuterOptions::default()
        };
        let rep = run_idfgm(&p, 1.0, 1e-3, 0.0, &opts).unwrap();
        assert_eq!(rep.outer_iters, 1);
        assert_eq!(rep.final_k, 0);
        assert!(rep.certified);
    }
}
