use std::path::PathBuf;
use std::process::ExitCode;

use auglag_cli::bench::{self, BenchConfig, MpcBenchConfig};
use auglag_cli::format::{read_json, write_json, MpcFile, ProblemFile};
use auglag_cli::generate::generate_random_qp;
use auglag_cli::solve::{certificate_for, exit_status, load_instance, solve_instance};
use auglag_cli::{CliError, EXIT_ERROR, EXIT_OK, EXIT_VIOLATION};
use auglag_core::linalg::norm;
use auglag_core::{oracle, Scheme};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "auglag", version, about = "Certified inexact dual (fast) gradient augmented Lagrangian solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Idgm,
    Idfgm,
    Both,
}

impl SchemeArg {
    fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::Idgm => vec![Scheme::Idgm],
            SchemeArg::Idfgm => vec![Scheme::Idfgm],
            SchemeArg::Both => vec![Scheme::Idgm, Scheme::Idfgm],
        }
    }
}

#[derive(Args)]
struct Source {
    /// JSON problem file
    #[arg(long, conflicts_with = "spec")]
    problem: Option<PathBuf>,
    /// JSON MPC spec with an `x0` field
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "idfgm")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1e-3)]
    eps_out: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Dual radius; defaults to the reference ‖λ*‖
    #[arg(long)]
    rd: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print the report as JSON
    Solve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Run exactly the certified schedule (default)
        #[arg(long, conflicts_with = "measured")]
        certified: bool,
        /// Stop on the measured accuracy rule instead
        #[arg(long)]
        measured: bool,
    },
    /// Print the certificate without solving
    Certify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Random-QP fleet, written to DIR/bench.csv
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10,20,50")]
        sizes: Vec<usize>,
        /// Seeds 0..K
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "both")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1e-3)]
        eps_out: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long)]
        certify_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampled initial states of an MPC spec, written to DIR/mpc_bench.csv
    MpcBench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        horizons: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, value_enum, default_value = "both")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1e-3)]
        eps_out: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded random QP as a problem file
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive")))
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            source,
            common,
            certified: _,
            measured,
        } => {
            check_positive("eps-out", common.eps_out)?;
            check_positive("rho", common.rho)?;
            let inst = load_instance(source.problem.as_deref(), source.spec.as_deref())?;
            let outcomes = common
                .scheme
                .schemes()
                .into_iter()
                .map(|s| solve_instance(&inst, s, common.rho, common.eps_out, !measured, common.rd))
                .collect::<Result<Vec<_>, _>>()?;
            print_json(&outcomes);
            Ok(exit_status(&outcomes))
        }
        Command::Certify { source, common } => {
            check_positive("eps-out", common.eps_out)?;
            check_positive("rho", common.rho)?;
            let inst = load_instance(source.problem.as_deref(), source.spec.as_deref())?;
            let r_d = match common.rd {
                Some(r) => r,
                None => norm(&oracle::solve_reference(&inst.problem)?.lambda_star),
            };
            let certs = common
                .scheme
                .schemes()
                .into_iter()
                .map(|s| certificate_for(&inst, s, common.rho, common.eps_out, r_d))
                .collect::<Result<Vec<_>, _>>()?;
            print_json(&certs);
            Ok(EXIT_OK)
        }
        Command::Bench {
            sizes,
            seeds,
            scheme,
            eps_out,
            rho,
            certify_only,
            out,
        } => {
            check_positive("eps-out", eps_out)?;
            check_positive("rho", rho)?;
            if sizes.iter().any(|&n| n < 2) {
                return Err(CliError::Usage("--sizes entries must be at least 2".into()));
            }
            let cfg = BenchConfig {
                sizes,
                seeds: (0..seeds).collect(),
                schemes: scheme.schemes(),
                eps_out,
                rho,
                certify_only,
            };
            let rows = bench::run_bench(&cfg)?;
            bench::write_csv(&bench::bench_path(&out), &rows)?;
            Ok(if bench::rows_hold(&rows) { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::MpcBench {
            spec,
            horizons,
            samples,
            scheme,
            eps_out,
            rho,
            seed,
            out,
        } => {
            check_positive("eps-out", eps_out)?;
            check_positive("rho", rho)?;
            let file: MpcFile = read_json(&spec)?;
            let cfg = MpcBenchConfig {
                horizons,
                samples,
                schemes: scheme.schemes(),
                eps_out,
                rho,
                seed,
                ..MpcBenchConfig::default()
            };
            let rows = bench::run_mpc_bench(|n| file.to_spec_with_horizon(n), &cfg)?;
            bench::write_csv(&bench::mpc_bench_path(&out), &rows)?;
            Ok(if bench::mpc_rows_hold(&rows) { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Generate { n, seed, out } => {
            if n < 2 {
                return Err(CliError::Usage("--n must be at least 2".into()));
            }
            write_json(&out, &ProblemFile::from_problem(&generate_random_qp(n, seed).problem))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors must not collide with the bound-violation status
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
