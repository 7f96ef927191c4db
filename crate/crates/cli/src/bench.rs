//! Fleet benchmarks over random QPs and sampled MPC initial states, written as CSV.

use std::fs;
use std::path::{Path, PathBuf};

use auglag_core::certify;
use auglag_core::linalg::norm;
use auglag_core::outer::{self, OuterOptions, RunMode};
use auglag_core::{oracle, Error, MpcSpec, Scheme, SolveReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::generate::{generate_random_qp, rng, sample_initial_state};
use crate::solve::{certificate_for, Instance};
use crate::{CliError, BOUND_SLACK};

/// One CSV line for a random-QP run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub scheme: &'static str,
    pub rho: f64,
    pub eps_out: f64,
    pub eps_in: f64,
    /// Certified outer index with `R_d = ‖λ*‖`.
    pub k_out_cert: u64,
    /// Dual updates until the measured stopping rule held.
    pub k_out_real: usize,
    pub inner_iters_total: usize,
    pub infeas_final: f64,
    /// Theorem bound on the infeasibility at the final index.
    pub infeas_bound: f64,
    pub primal_gap: f64,
    pub primal_gap_lower: f64,
    pub primal_gap_upper: f64,
    pub dual_gap: f64,
    pub dual_gap_bound: f64,
    /// Empty for instances without MPC structure.
    pub flops_cert: Option<u64>,
    /// Certified outer index with the a-priori `R_d` bound.
    pub k_out_theory: u64,
    /// `k_out_real / (k_out_cert + 1)`.
    pub tightness: f64,
    pub r_d: f64,
}

impl BenchRow {
    /// Every measured column sits within its bound column.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.infeas_final <= self.infeas_bound + slack
            && self.dual_gap <= self.dual_gap_bound + slack
            && self.primal_gap >= self.primal_gap_lower - slack
            && self.primal_gap <= self.primal_gap_upper + slack
    }
}

/// One CSV line for an MPC run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpcBenchRow {
    pub sample: usize,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
    pub scheme: &'static str,
    pub rho: f64,
    pub eps_out: f64,
    pub eps_in: f64,
    pub k_out_cert: u64,
    pub k_out_real: usize,
    pub k_in_cert: Option<u64>,
    pub inner_iters_total: usize,
    pub inner_iters_max: usize,
    pub infeas_final: f64,
    pub infeas_bound: f64,
    pub primal_gap: f64,
    pub primal_gap_lower: f64,
    pub primal_gap_upper: f64,
    pub dual_gap: f64,
    pub dual_gap_bound: f64,
    pub flops_cert: Option<u64>,
    pub tightness: f64,
    pub r_d: f64,
}

impl MpcBenchRow {
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.infeas_final <= self.infeas_bound + slack
            && self.dual_gap <= self.dual_gap_bound + slack
            && self.primal_gap >= self.primal_gap_lower - slack
            && self.primal_gap <= self.primal_gap_upper + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub schemes: Vec<Scheme>,
    pub eps_out: f64,
    pub rho: f64,
    /// Write certificates only, without solving.
    pub certify_only: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![10, 20, 50],
            seeds: (0..10).collect(),
            schemes: vec![Scheme::Idgm, Scheme::Idfgm],
            eps_out: 1e-3,
            rho: 1.0,
            certify_only: false,
        }
    }
}

/// Measured stopping run with the certified `ε_in` and `λ₀ = 0`.
fn measured_run(inst: &Instance, scheme: Scheme, rho: f64, eps_out: f64, r_d: f64, f_star: f64, lambda_star: f64) -> Result<SolveReport, Error> {
    let opts = OuterOptions {
        mode: RunMode::Measured { f_star, max_outer: None },
        r_p: inst.r_p,
        f_star: Some(f_star),
        lambda_star_norm: Some(lambda_star),
        ..OuterOptions::default()
    };
    outer::run(scheme, &inst.problem, rho, eps_out, r_d, &opts, &mut |_| {})
}

fn bound(report: &SolveReport, name: &str) -> f64 {
    report
        .bound_table
        .iter()
        .find(|r| r.name == name)
        .map_or(f64::NAN, |r| r.certified)
}

struct Measured {
    eps_in: f64,
    k_out_real: usize,
    inner_iters_total: usize,
    inner_iters_max: usize,
    infeas_final: f64,
    infeas_bound: f64,
    primal_gap: f64,
    primal_gap_lower: f64,
    primal_gap_upper: f64,
    dual_gap: f64,
    dual_gap_bound: f64,
}

impl Measured {
    fn from_report(r: &SolveReport) -> Self {
        Self {
            eps_in: r.eps_in,
            k_out_real: r.outer_iters,
            inner_iters_total: r.inner_iters_total,
            inner_iters_max: r.inner_iters_max,
            infeas_final: r.infeasibility,
            infeas_bound: bound(r, "infeasibility_theorem"),
            primal_gap: r.primal_gap.unwrap_or(f64::NAN),
            primal_gap_lower: bound(r, "primal_gap_lower_theorem"),
            primal_gap_upper: bound(r, "primal_gap_upper_theorem"),
            dual_gap: r.dual_gap.unwrap_or(f64::NAN),
            dual_gap_bound: bound(r, "dual_gap_theorem"),
        }
    }

    fn unsolved(eps_in: f64) -> Self {
        Self {
            eps_in,
            k_out_real: 0,
            inner_iters_total: 0,
            inner_iters_max: 0,
            infeas_final: f64::NAN,
            infeas_bound: f64::NAN,
            primal_gap: f64::NAN,
            primal_gap_lower: f64::NAN,
            primal_gap_upper: f64::NAN,
            dual_gap: f64::NAN,
            dual_gap_bound: f64::NAN,
        }
    }
}

/// All rows for one random instance.
pub fn bench_instance(n: usize, seed: u64, cfg: &BenchConfig) -> Result<Vec<BenchRow>, Error> {
    let generated = generate_random_qp(n, seed);
    let inst = Instance::plain(generated.problem);
    let p = &inst.problem;
    let reference = oracle::solve_reference(p)?;
    let r_d = norm(&reference.lambda_star);
    let r_bar = oracle::interior_ball_radius(p, &generated.z0)?;
    let r_d_theory = certify::dual_radius_bound(p, &reference.z_star, r_bar)?;
    let mut rows = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        let cert = certificate_for(&inst, scheme, cfg.rho, cfg.eps_out, r_d).map_err(core_error)?;
        let theory = certificate_for(&inst, scheme, cfg.rho, cfg.eps_out, r_d_theory).map_err(core_error)?;
        let m = if cfg.certify_only {
            Measured::unsolved(cert.eps_in)
        } else {
            let report = measured_run(&inst, scheme, cfg.rho, cfg.eps_out, r_d, reference.f_star, r_d)?;
            Measured::from_report(&report)
        };
        rows.push(BenchRow {
            seed,
            n,
            m: p.m(),
            scheme: scheme.name(),
            rho: cfg.rho,
            eps_out: cfg.eps_out,
            eps_in: m.eps_in,
            k_out_cert: cert.k_out,
            k_out_real: m.k_out_real,
            inner_iters_total: m.inner_iters_total,
            infeas_final: m.infeas_final,
            infeas_bound: m.infeas_bound,
            primal_gap: m.primal_gap,
            primal_gap_lower: m.primal_gap_lower,
            primal_gap_upper: m.primal_gap_upper,
            dual_gap: m.dual_gap,
            dual_gap_bound: m.dual_gap_bound,
            flops_cert: None,
            k_out_theory: theory.k_out,
            tightness: m.k_out_real as f64 / (cert.k_out as f64 + 1.0),
            r_d,
        });
    }
    Ok(rows)
}

fn core_error(e: CliError) -> Error {
    match e {
        CliError::Core(e) => e,
        _ => Error::InvalidParameter("unexpected front-end error"),
    }
}

/// Runs `f` on a pool capped by `AUGLAG_THREADS`.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("AUGLAG_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("AUGLAG_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(threads.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(f))
}

/// Rows in `(size, seed, scheme)` order regardless of scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let results: Vec<Result<Vec<BenchRow>, Error>> =
        with_pool(|| jobs.par_iter().map(|&(n, s)| bench_instance(n, s, cfg)).collect())?;
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcBenchConfig {
    pub horizons: Vec<usize>,
    pub samples: usize,
    pub schemes: Vec<Scheme>,
    pub eps_out: f64,
    pub rho: f64,
    pub seed: u64,
    /// Initial states are drawn from this fraction of the state box.
    pub state_scale: f64,
}

impl Default for MpcBenchConfig {
    fn default() -> Self {
        Self {
            horizons: vec![5, 10, 20],
            samples: 50,
            schemes: vec![Scheme::Idgm, Scheme::Idfgm],
            eps_out: 1e-3,
            rho: 1.0,
            seed: 0,
            state_scale: 0.5,
        }
    }
}

fn mpc_sample(spec: &MpcSpec, sample: usize, cfg: &MpcBenchConfig) -> Result<Vec<MpcBenchRow>, Error> {
    let mut r = rng(cfg.seed.wrapping_mul(1_000_003).wrapping_add(sample as u64));
    let x0 = sample_initial_state(spec, cfg.state_scale, &mut r);
    let inst = Instance::from_spec(spec, &x0).map_err(core_error)?;
    let reference = match oracle::solve_reference(&inst.problem) {
        Ok(r) => r,
        Err(Error::Infeasible) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let r_d = norm(&reference.lambda_star);
    let mut rows = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        let cert = certificate_for(&inst, scheme, cfg.rho, cfg.eps_out, r_d).map_err(core_error)?;
        let report = measured_run(&inst, scheme, cfg.rho, cfg.eps_out, r_d, reference.f_star, r_d)?;
        let m = Measured::from_report(&report);
        rows.push(MpcBenchRow {
            sample,
            horizon: spec.horizon(),
            n: inst.problem.n(),
            m: inst.problem.m(),
            scheme: scheme.name(),
            rho: cfg.rho,
            eps_out: cfg.eps_out,
            eps_in: m.eps_in,
            k_out_cert: cert.k_out,
            k_out_real: m.k_out_real,
            k_in_cert: cert.k_in,
            inner_iters_total: m.inner_iters_total,
            inner_iters_max: m.inner_iters_max,
            infeas_final: m.infeas_final,
            infeas_bound: m.infeas_bound,
            primal_gap: m.primal_gap,
            primal_gap_lower: m.primal_gap_lower,
            primal_gap_upper: m.primal_gap_upper,
            dual_gap: m.dual_gap,
            dual_gap_bound: m.dual_gap_bound,
            flops_cert: cert.flops_outer,
            tightness: m.k_out_real as f64 / (cert.k_out as f64 + 1.0),
            r_d,
        });
    }
    Ok(rows)
}

/// `spec_for(N)` yields the spec at each horizon; infeasible initial states are skipped.
pub fn run_mpc_bench(
    spec_for: impl Fn(usize) -> Result<MpcSpec, CliError> + Sync,
    cfg: &MpcBenchConfig,
) -> Result<Vec<MpcBenchRow>, CliError> {
    let specs: Vec<MpcSpec> = cfg.horizons.iter().map(|&n| spec_for(n)).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|h| (0..cfg.samples).map(move |s| (h, s)))
        .collect();
    let results: Vec<Result<Vec<MpcBenchRow>, Error>> =
        with_pool(|| jobs.par_iter().map(|&(h, s)| mpc_sample(&specs[h], s, cfg)).collect())?;
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        }
    }
    let name = path.display().to_string();
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Csv(name.clone(), e))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Csv(name.clone(), e))?;
    }
    w.flush().map_err(|e| CliError::Io(name, e))
}

pub fn bench_path(dir: &Path) -> PathBuf {
    dir.join("bench.csv")
}

pub fn mpc_bench_path(dir: &Path) -> PathBuf {
    dir.join("mpc_bench.csv")
}

pub fn rows_hold(rows: &[BenchRow]) -> bool {
    rows.iter().all(|r| r.bounds_hold(BOUND_SLACK))
}

pub fn mpc_rows_hold(rows: &[MpcBenchRow]) -> bool {
    rows.iter().all(|r| r.bounds_hold(BOUND_SLACK))
}
