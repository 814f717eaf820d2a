//! Command-line front end behind the `choquard` binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, RunConfig};
use crate::error::{Error, Result};
use crate::grid::{write_grd2, Domain, GridFunction};
use crate::mountain_pass::{continuation, mpa_solve_with, MpaOptions, SolveReport, Status};
use crate::riesz::{Backend, RieszKernel};
use crate::verify::{run_suite, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "choquard", version, about = "Mountain-pass solver for a regularized singular Choquard problem")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output_dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// direct | fft
    #[arg(long, global = true)]
    backend: Option<Backend>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One mountain-pass solve: report.json, solution.grd2, path.csv
    Solve,
    /// ε continuation: continuation.jsonl, step_<k>.grd2, continuation.csv
    Continue,
    /// Run the property suites: verify.jsonl
    Verify {
        /// Run only these suites
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Time both Riesz backends: bench.csv
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Tabulate the scalar terms: scalars.csv
    DumpScalars {
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
}

enum Failure {
    Usage(String),
    Solver(Error),
    Violations(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            EXIT_SOLVER
        }
        Err(Failure::Violations(n)) => {
            eprintln!("{n} invariant violation(s)");
            EXIT_VIOLATION
        }
    }
}

fn load(g: &Global) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = match &g.config {
        None => RunConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
    };
    if let Some(o) = &g.out {
        cfg.output_dir = o.clone();
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(b) = g.backend {
        cfg.problem.backend = b;
    }
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Failure::Usage(format!("output directory {}: {e}", cfg.output_dir.display())))?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> std::result::Result<(), Failure> {
    let cfg = load(&cli.global)?;
    match cli.command {
        Command::Solve => solve(&cfg),
        Command::Continue => cont(&cfg),
        Command::Verify { suites } => verify(&cfg, &suites),
        Command::Bench { sizes, repeats } => bench(&cfg, &sizes, repeats).map_err(Into::into),
        Command::DumpScalars { t_max, points } => dump_scalars(&cfg, t_max, points).map_err(Into::into),
    }
}

fn options(cfg: &RunConfig) -> MpaOptions {
    MpaOptions {
        max_polish_iterations: cfg.max_polish_iterations,
        ..MpaOptions::new(cfg.path_points, cfg.tol)
    }
}

fn write_grid(path: &Path, u: &GridFunction) -> Result<()> {
    write_grd2(BufWriter::new(fs::File::create(path)?), u)
}

fn solve(cfg: &RunConfig) -> std::result::Result<(), Failure> {
    let dir = &cfg.output_dir;
    let p = crate::functional::Problem::new(cfg.problem.clone())?;
    match mpa_solve_with(&p, options(cfg)) {
        Ok(sol) => {
            fs::write(dir.join("report.json"), sol.report.to_json_line() + "\n").map_err(Error::from)?;
            write_grid(&dir.join("solution.grd2"), &sol.u)?;
            let mut csv = String::from("phase,index,energy\n");
            for (i, e) in sol.path_energies.iter().enumerate() {
                let _ = writeln!(csv, "path,{i},{e:.16e}");
            }
            for (i, e) in sol.polish_energies.iter().enumerate() {
                let _ = writeln!(csv, "polish,{i},{e:.16e}");
            }
            fs::write(dir.join("path.csv"), csv).map_err(Error::from)?;
            println!("{}", sol.report.to_json_line());
            Ok(())
        }
        Err(e) => {
            let (status, grad) = match &e {
                Error::Saturated { .. } => (Status::Saturated, f64::NAN),
                Error::Stalled { grad_norm, .. } => (Status::Stalled, *grad_norm),
                _ => (Status::Stalled, f64::NAN),
            };
            let rep = SolveReport::failed(cfg.problem.eps, cfg.problem.lambda, status, 0, grad);
            fs::write(dir.join("report.json"), rep.to_json_line() + "\n").map_err(Error::from)?;
            Err(e.into())
        }
    }
}

fn cont(cfg: &RunConfig) -> std::result::Result<(), Failure> {
    let dir = &cfg.output_dir;
    let p = crate::functional::Problem::new(cfg.problem.clone())?;
    let run = continuation(&p, &cfg.eps_list, options(cfg))?;
    let mut jsonl = String::new();
    let mut csv = String::from("eps,h1,sup,energy,K_grad_emp\n");
    for (k, s) in run.steps.iter().enumerate() {
        let r = &s.report;
        jsonl.push_str(&r.to_json_line());
        jsonl.push('\n');
        if let Some(u) = &s.u {
            write_grid(&dir.join(format!("step_{k}.grd2")), u)?;
            let _ = writeln!(csv, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.eps, r.h1, r.sup, r.energy, r.k_grad_emp);
        }
    }
    fs::write(dir.join("continuation.jsonl"), &jsonl).map_err(Error::from)?;
    fs::write(dir.join("continuation.csv"), csv).map_err(Error::from)?;
    print!("{jsonl}");
    match run.steps.iter().find_map(|s| s.error.as_ref()) {
        Some(e) => Err(Failure::Solver(Error::Domain(format!("continuation step failed: {e}")))),
        None => Ok(()),
    }
}

fn verify(cfg: &RunConfig, only: &[String]) -> std::result::Result<(), Failure> {
    let names: Vec<&str> = if only.is_empty() {
        SUITES.to_vec()
    } else {
        only.iter().map(String::as_str).collect()
    };
    let mut out = String::new();
    let mut violations = 0;
    for name in names {
        let r = match run_suite(name, cfg.seed) {
            Ok(r) => r,
            Err(e @ Error::UnknownSuite(_)) => return Err(Failure::Usage(e.to_string())),
            Err(e) => return Err(e.into()),
        };
        eprintln!(
            "{:<24} {:>8} cases {:>3} violations {:>8.2?}",
            r.suite_name,
            r.cases_run,
            r.violations.len(),
            r.wall_time
        );
        violations += r.violations.len();
        out.push_str(&r.to_json());
        out.push('\n');
    }
    fs::write(cfg.output_dir.join("verify.jsonl"), &out).map_err(Error::from)?;
    print!("{out}");
    if violations > 0 {
        Err(Failure::Violations(violations))
    } else {
        Ok(())
    }
}

fn bench(cfg: &RunConfig, sizes: &[usize], repeats: usize) -> Result<()> {
    let mu = cfg.problem.mu;
    let mut csv = String::from("backend,nx,ny,mu,millis\n");
    for &n in sizes {
        let dom = Domain::new(cfg.problem.dom.lx(), cfg.problem.dom.ly(), n, n)?;
        let k = RieszKernel::build(dom, mu)?;
        let g = GridFunction::from_fn(dom, |x, y| (x * y).sin() + 1.0);
        for b in [Backend::Direct, Backend::Fft] {
            // The first call warms the cached spectrum.
            let _ = k.apply(&g, b);
            let t0 = Instant::now();
            for _ in 0..repeats.max(1) {
                std::hint::black_box(k.apply(&g, b));
            }
            let ms = t0.elapsed().as_secs_f64() * 1e3 / repeats.max(1) as f64;
            let _ = writeln!(csv, "{b},{n},{n},{mu},{ms:.4}");
        }
    }
    fs::write(cfg.output_dir.join("bench.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn dump_scalars(cfg: &RunConfig, t_max: f64, points: usize) -> Result<()> {
    if !(t_max > 0.0) || points < 2 {
        return Err(Error::Domain("need t_max > 0 and at least 2 points".into()));
    }
    let p = &cfg.problem;
    let mut csv = String::from("t,l_eps,L_eps,Z,f,F\n");
    for i in 0..points {
        let t = t_max * i as f64 / (points - 1) as f64;
        let _ = writeln!(
            csv,
            "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.singular.l_eps(t, p.eps)?,
            p.singular.big_l_eps(t, p.eps)?,
            p.singular.z(t),
            p.model.f(t)?,
            p.model.big_f(t)?
        );
    }
    fs::write(cfg.output_dir.join("scalars.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["choquard", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["choquard"]), EXIT_USAGE);
        assert_eq!(run(["choquard", "solve", "--backend", "gpu"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(["choquard", "--help"]), EXIT_OK);
    }
}
