//! Sparse linear MPC problem `P(x)`: stacked states and inputs with the dynamics
//! as equality coupling.
//!
//! Variable order is `z = [x₁ … x_N, u₀ … u_{N−1}]`, dynamics rows read
//! `x_{i+1} − A_x x_i − B_u u_i = 0` (with `x₀` moved to the right-hand side), and
//! the objective `½zᵀHz` with `H = 2·blkdiag(Q, …, Q, P, R, …, R)` equals
//! `Σ (xᵢᵀQxᵢ + uᵢᵀRuᵢ) + x_NᵀPx_N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::geometry::BoxSet;
use crate::linalg::{sqrt, Cholesky, Matrix};
use crate::problem::ProblemInstance;

/// `x⁺ = A_x x + B_u u`
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LtiModel {
    pub a_x: Matrix,
    pub b_u: Matrix,
}

impl LtiModel {
    pub fn new(a_x: Matrix, b_u: Matrix) -> Result<Self> {
        check_dim("A_x columns", a_x.rows(), a_x.cols())?;
        check_dim("B_u rows", a_x.rows(), b_u.rows())?;
        if !a_x.is_finite() || !b_u.is_finite() {
            return Err(Error::NonFinite("LTI model"));
        }
        Ok(Self { a_x, b_u })
    }

    pub fn n_x(&self) -> usize {
        self.a_x.rows()
    }

    pub fn n_u(&self) -> usize {
        self.b_u.cols()
    }

    pub fn step(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut next = self.a_x.mul_vec(x);
        let bu = self.b_u.mul_vec(u);
        next.iter_mut().zip(&bu).for_each(|(a, b)| *a += b);
        next
    }
}

/// Horizon, costs and constraint boxes of a linear MPC problem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MpcSpec {
    model: LtiModel,
    horizon: usize,
    q: Matrix,
    r: Matrix,
    p: Matrix,
    x_set: BoxSet,
    xf_set: BoxSet,
    u_set: BoxSet,
}

const PSD_TOL: f64 = 1e-12;

fn check_psd(what: &'static str, m: &Matrix) -> Result<()> {
    if m.max_asymmetry() > PSD_TOL * (1.0 + m.as_slice().iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
        return Err(Error::NotSymmetric {
            max_asymmetry: m.max_asymmetry(),
        });
    }
    let ev = m.symmetric_eigenvalues()?;
    let top = ev.last().copied().unwrap_or(0.0).abs();
    if ev.first().copied().unwrap_or(0.0) < -PSD_TOL * (1.0 + top) {
        return Err(Error::InvalidParameter(what));
    }
    Ok(())
}

impl MpcSpec {
    /// `xf_set = None` uses the state box as terminal set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: LtiModel,
        horizon: usize,
        q: Matrix,
        r: Matrix,
        p: Matrix,
        x_set: BoxSet,
        xf_set: Option<BoxSet>,
        u_set: BoxSet,
    ) -> Result<Self> {
        let (nx, nu) = (model.n_x(), model.n_u());
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1"));
        }
        for (what, m, d) in [("Q", &q, nx), ("P", &p, nx), ("R", &r, nu)] {
            check_dim(what, d, m.rows())?;
            check_dim(what, d, m.cols())?;
        }
        check_psd("Q must be positive semidefinite", &q)?;
        check_psd("P must be positive semidefinite", &p)?;
        check_psd("R must be positive definite", &r)?;
        Cholesky::factor(&r).map_err(|_| Error::InvalidParameter("R must be positive definite"))?;
        let xf_set = xf_set.unwrap_or_else(|| x_set.clone());
        check_dim("state box", nx, x_set.dim())?;
        check_dim("terminal box", nx, xf_set.dim())?;
        check_dim("input box", nu, u_set.dim())?;
        Ok(Self {
            model,
            horizon,
            q,
            r,
            p,
            x_set,
            xf_set,
            u_set,
        })
    }

    /// `A_x = [[1,1],[0,1]]`, `B_u = (0,1)ᵀ`, `Q = P = I`, `R = 0.1`,
    /// `X = X_f = [−5,5]²`, `U = [−1,1]`.
    pub fn double_integrator(horizon: usize) -> Result<Self> {
        let model = LtiModel::new(
            Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]])?,
            Matrix::from_rows(&[&[0.0], &[1.0]])?,
        )?;
        Self::new(
            model,
            horizon,
            Matrix::identity(2),
            Matrix::from_diagonal(&[0.1]),
            Matrix::identity(2),
            BoxSet::uniform(2, -5.0, 5.0)?,
            None,
            BoxSet::uniform(1, -1.0, 1.0)?,
        )
    }

    pub fn model(&self) -> &LtiModel {
        &self.model
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_x(&self) -> usize {
        self.model.n_x()
    }

    pub fn n_u(&self) -> usize {
        self.model.n_u()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn state_set(&self) -> &BoxSet {
        &self.x_set
    }

    pub fn terminal_set(&self) -> &BoxSet {
        &self.xf_set
    }

    pub fn input_set(&self) -> &BoxSet {
        &self.u_set
    }

    /// Product box `X^{N−1} × X_f × U^N` in variable order.
    pub fn product_box(&self) -> BoxSet {
        let mut parts: Vec<&BoxSet> = Vec::with_capacity(2 * self.horizon);
        parts.extend(core::iter::repeat_n(&self.x_set, self.horizon - 1));
        parts.push(&self.xf_set);
        parts.extend(core::iter::repeat_n(&self.u_set, self.horizon));
        BoxSet::product(parts)
    }

    /// Packs state and input trajectories into `z`.
    pub fn stack(&self, states: &[Vec<f64>], inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_dim("state trajectory", self.horizon, states.len())?;
        check_dim("input trajectory", self.horizon, inputs.len())?;
        let mut z = Vec::with_capacity(self.horizon * (self.n_x() + self.n_u()));
        for x in states {
            check_dim("state", self.n_x(), x.len())?;
            z.extend_from_slice(x);
        }
        for u in inputs {
            check_dim("input", self.n_u(), u.len())?;
            z.extend_from_slice(u);
        }
        Ok(z)
    }
}

/// Builds `P(x0)`.
pub fn build_problem(spec: &MpcSpec, x0: &[f64]) -> Result<ProblemInstance> {
    let (nx, nu, nn) = (spec.n_x(), spec.n_u(), spec.horizon);
    check_dim("initial state", nx, x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let n_states = nn * nx;
    let n = n_states + nn * nu;
    let m = nn * nx;

    let mut h = Matrix::zeros(n, n);
    for blk in 0..nn {
        let weight = if blk + 1 == nn { &spec.p } else { &spec.q };
        let off = blk * nx;
        for i in 0..nx {
            for j in 0..nx {
                h[(off + i, off + j)] = 2.0 * weight[(i, j)];
            }
        }
        let off = n_states + blk * nu;
        for i in 0..nu {
            for j in 0..nu {
                h[(off + i, off + j)] = 2.0 * spec.r[(i, j)];
            }
        }
    }

    let (ax, bu) = (&spec.model.a_x, &spec.model.b_u);
    let mut a = Matrix::zeros(m, n);
    for i in 0..nn {
        let row = i * nx;
        for r in 0..nx {
            // x_{i+1}
            a[(row + r, i * nx + r)] = 1.0;
            // −A_x x_i (x_0 is data)
            if i > 0 {
                for c in 0..nx {
                    a[(row + r, (i - 1) * nx + c)] = -ax[(r, c)];
                }
            }
            // −B_u u_i
            for c in 0..nu {
                a[(row + r, n_states + i * nu + c)] = -bu[(r, c)];
            }
        }
    }
    let mut b = vec![0.0; m];
    b[..nx].copy_from_slice(&ax.mul_vec(x0));

    ProblemInstance::new(h, vec![0.0; n], a, b, spec.product_box())
}

/// `√((N−1)D_x² + D_{x_f}² + N D_u²)`
pub fn mpc_diameter(spec: &MpcSpec) -> f64 {
    let nn = spec.horizon as f64;
    let (dx, dxf, du) = (spec.x_set.diameter(), spec.xf_set.diameter(), spec.u_set.diameter());
    sqrt((nn - 1.0) * dx * dx + dxf * dxf + nn * du * du)
}

/// `(λ_min(H + ρAᵀA), λ_min > 1e-10)`
pub fn verify_strong_convexity(spec: &MpcSpec, rho: f64) -> Result<(f64, bool)> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter("rho must be positive"));
    }
    let p = build_problem(spec, &vec![0.0; spec.n_x()])?;
    let m = p.hessian().add_scaled(rho, &p.coupling().gram())?;
    let sigma = m.symmetric_eigenvalues()?[0];
    Ok((sigma, sigma > 1e-10))
}
