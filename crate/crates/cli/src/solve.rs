//! Single-instance `solve` and `certify` commands.

use std::path::Path;

use auglag_core::certify::{self, Certificate};
use auglag_core::linalg::norm;
use auglag_core::outer::{self, OuterOptions, RunMode};
use auglag_core::{mpc, oracle, ProblemInstance, Scheme, SolveReport};
use serde::Serialize;

use crate::format::{read_json, MpcFile, ProblemFile};
use crate::{CliError, BOUND_SLACK, EXIT_OK, EXIT_VIOLATION};

/// Problem plus the MPC structure it was built from, if any.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ProblemInstance,
    /// Product-form diameter for MPC instances.
    pub r_p: Option<f64>,
    /// `(N, n_x, n_u)` for the flop counts.
    pub mpc_dims: Option<(usize, usize, usize)>,
}

impl Instance {
    pub fn plain(problem: ProblemInstance) -> Self {
        Self {
            problem,
            r_p: None,
            mpc_dims: None,
        }
    }

    pub fn from_spec(spec: &auglag_core::MpcSpec, x0: &[f64]) -> Result<Self, CliError> {
        Ok(Self {
            problem: mpc::build_problem(spec, x0)?,
            r_p: Some(mpc::mpc_diameter(spec)),
            mpc_dims: Some((spec.horizon(), spec.n_x(), spec.n_u())),
        })
    }
}

pub fn load_instance(problem: Option<&Path>, spec: Option<&Path>) -> Result<Instance, CliError> {
    match (problem, spec) {
        (Some(path), None) => Ok(Instance::plain(read_json::<ProblemFile>(path)?.to_problem()?)),
        (None, Some(path)) => {
            let file: MpcFile = read_json(path)?;
            let x0 = file
                .x0
                .clone()
                .ok_or_else(|| CliError::Usage(format!("{}: spec has no x0", path.display())))?;
            Instance::from_spec(&file.to_spec()?, &x0)
        }
        _ => Err(CliError::Usage("exactly one of --problem or --spec is required".into())),
    }
}

/// Schedule for `scheme` with the instance's diameter and flop counts.
pub fn certificate_for(inst: &Instance, scheme: Scheme, rho: f64, eps_out: f64, r_d: f64) -> Result<Certificate, CliError> {
    let r_p = inst.r_p.unwrap_or_else(|| inst.problem.bounds().diameter());
    let consts = certify::inner_constants_with_diameter(&inst.problem, rho, r_p)?;
    let cert = certify::certify(scheme, &consts, rho, eps_out, r_d)?;
    Ok(match inst.mpc_dims {
        Some((n, nx, nu)) => cert.with_flops(n, nx, nu),
        None => cert,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub scheme: Scheme,
    pub certificate: Certificate,
    pub f_star: f64,
    pub report: SolveReport,
}

/// Runs one scheme. `R_d` defaults to the oracle's `‖λ*‖` (with `λ₀ = 0`).
pub fn solve_instance(
    inst: &Instance,
    scheme: Scheme,
    rho: f64,
    eps_out: f64,
    certified: bool,
    r_d: Option<f64>,
) -> Result<SolveOutcome, CliError> {
    let reference = oracle::solve_reference(&inst.problem)?;
    let r_d = r_d.unwrap_or_else(|| norm(&reference.lambda_star));
    let certificate = certificate_for(inst, scheme, rho, eps_out, r_d)?;
    let opts = OuterOptions {
        mode: if certified {
            RunMode::Certified
        } else {
            RunMode::Measured {
                f_star: reference.f_star,
                max_outer: None,
            }
        },
        r_p: inst.r_p,
        f_star: Some(reference.f_star),
        lambda_star_norm: Some(norm(&reference.lambda_star)),
        ..OuterOptions::default()
    };
    let report = outer::run(scheme, &inst.problem, rho, eps_out, r_d, &opts, &mut |_| {})?;
    Ok(SolveOutcome {
        scheme,
        certificate,
        f_star: reference.f_star,
        report,
    })
}

pub fn exit_status(outcomes: &[SolveOutcome]) -> i32 {
    if outcomes.iter().all(|o| o.report.bounds_hold(BOUND_SLACK)) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}
