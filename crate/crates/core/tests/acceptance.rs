//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Exits nonzero when a check fails that is not listed in `KNOWN_FAILURES`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use choquard::functional::{Problem, ProblemConfig};
use choquard::grid::{h1_inner, h1_norm, laplacian_apply, l2_inner, lp_norm, poisson_solve, sup_norm, Domain, GridFunction};
use choquard::mountain_pass::{
    build_phi, continuation, default_eps_list, find_k, is_converged, mpa_solve, residual_scale, MpaOptions, Status,
};
use choquard::riesz::RieszKernel;
use choquard::scalar::{check_scalar_estimates, SingularParams, ESTIMATE_SLACK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCALAR_PARAMS: [(f64, f64); 3] = [(0.5, 0.4), (0.3, 0.2), (0.7, 0.25)];
const SCALAR_SAMPLES: usize = 100_000;
const SCALAR_SLACK: f64 = 1e-12;

const FD_PAIRS: usize = 20;
const FD_STEPS: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
const FD_RTOL: f64 = 1e-6;

const RIESZ_GRIDS: [usize; 3] = [16, 32, 64];
const RIESZ_MUS: [f64; 3] = [0.25, 0.5, 0.75];
const BACKEND_RTOL: f64 = 1e-10;
const ADJOINT_RTOL: f64 = 1e-12;

const MMS_GRIDS: [usize; 3] = [32, 64, 128];
const MMS_ORDER: f64 = 2.0;
const MMS_ORDER_TOL: f64 = 0.1;

const SOLVE_TOL: f64 = 1e-8;
const PATH_POINTS: usize = 32;
const LEVEL_SLACK: f64 = 1e-10;
/// First run of the 64² reference solve: (energy, h1, sup).
const REFERENCE: (f64, f64, f64) = (5.3778928856708834, 3.5598213500509623, 2.2759354762244213);
const REGRESSION_RTOL: f64 = 1e-6;

const BOUND_FACTOR: f64 = 2.0;

const GEOMETRY_EPS: [f64; 3] = [0.1, 0.05, 0.01];
const GEOMETRY_T: [f64; 3] = [0.01, 0.05, 0.1];

/// `(criterion, check)` pairs that fail for documented reasons.
const KNOWN_FAILURES: [(&str, &str); 1] = [("continuation", "cauchy_nonincreasing")];

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        pass,
        detail: detail.into(),
    }
}

fn runtime(elapsed: Duration, limit_secs: u64) -> Check {
    check(
        "runtime",
        elapsed <= Duration::from_secs(limit_secs),
        format!("{:.1}s <= {limit_secs}s", elapsed.as_secs_f64()),
    )
}

fn reference(n: usize) -> Problem {
    Problem::new(ProblemConfig {
        dom: Domain::unit_square(n).unwrap(),
        ..ProblemConfig::reference()
    })
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn scalar_estimates() -> Vec<Check> {
    let t0 = Instant::now();
    let mut out = vec![check("slack", ESTIMATE_SLACK == SCALAR_SLACK, format!("library slack {ESTIMATE_SLACK:e}"))];
    // Independent parameter sets run concurrently.
    let reports: Vec<_> = std::thread::scope(|sc| {
        let hs: Vec<_> = SCALAR_PARAMS
            .iter()
            .enumerate()
            .map(|(k, &(beta, q))| {
                sc.spawn(move || check_scalar_estimates(&SingularParams::power_log(beta, q).unwrap(), SCALAR_SAMPLES, k as u64))
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap().unwrap()).collect()
    });
    for (&(beta, q), r) in SCALAR_PARAMS.iter().zip(reports) {
        let per = r.samples.iter().all(|s| s.1 >= SCALAR_SAMPLES);
        out.push(check(
            "zero_violations",
            r.passed() && per,
            format!("beta={beta} q={q}: {} violations over {:?}", r.violations.len(), r.samples),
        ));
    }
    out.push(runtime(t0.elapsed(), 10));
    out
}

fn random_mode_sum(dom: Domain, rng: &mut ChaCha8Rng, amp: f64, positive: bool) -> GridFunction {
    let pi = std::f64::consts::PI;
    let modes: Vec<(f64, f64, f64)> = (0..5)
        .map(|_| (rng.gen_range(1..5) as f64, rng.gen_range(1..5) as f64, rng.gen_range(-1.0..1.0)))
        .collect();
    let u = GridFunction::from_fn(dom, |x, y| modes.iter().map(|&(k, l, a)| a * (k * pi * x).sin() * (l * pi * y).sin()).sum());
    let u = if positive { u.map(f64::abs) } else { u };
    u.scaled(amp / sup_norm(&u))
}

fn gradient_consistency() -> Vec<Check> {
    let t0 = Instant::now();
    let p = reference(64);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..FD_PAIRS {
        let amp = rng.gen_range(0.1..2.0);
        let u = random_mode_sum(*p.domain(), &mut rng, amp, i % 2 == 0);
        let phi = random_mode_sum(*p.domain(), &mut rng, 1.0, false);
        let exact = h1_inner(&p.h1_gradient(&u).unwrap(), &phi);
        let best = FD_STEPS
            .iter()
            .map(|&h| {
                let jp = p.energy(&u.lin_comb(1.0, h, &phi)).unwrap();
                let jm = p.energy(&u.lin_comb(1.0, -h, &phi)).unwrap();
                let plain = (jp - jm) / (2.0 * h);
                let exact_diff = p.energy_difference(&u.lin_comb(1.0, -h, &phi), &u.lin_comb(1.0, h, &phi)).unwrap() / (2.0 * h);
                rel(plain, exact).min(rel(exact_diff, exact))
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    vec![
        check("fd_match", worst <= FD_RTOL, format!("worst best-h relative error {worst:.2e} over {FD_PAIRS} pairs")),
        runtime(t0.elapsed(), 60),
    ]
}

fn riesz_backends() -> Vec<Check> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_b, mut worst_a): (f64, f64) = (0.0, 0.0);
    for &n in &RIESZ_GRIDS {
        let dom = Domain::unit_square(n).unwrap();
        for &mu in &RIESZ_MUS {
            let k = RieszKernel::build(dom, mu).unwrap();
            let f = GridFunction::from_values(dom, (0..dom.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let g = GridFunction::from_values(dom, (0..dom.len()).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
            for x in [&f, &g] {
                let d = k.apply_direct(x);
                worst_b = worst_b.max(sup_norm(&k.apply_fft(x).sub(&d)) / sup_norm(&d));
            }
            for apply in [RieszKernel::apply_direct, RieszKernel::apply_fft] {
                let (kf, kg) = (apply(&k, &f), apply(&k, &g));
                let defect = (l2_inner(&kf, &g) - l2_inner(&f, &kg)).abs() / (lp_norm(&kf, 2.0) * lp_norm(&g, 2.0));
                worst_a = worst_a.max(defect);
            }
        }
    }
    vec![
        check("backend_equivalence", worst_b <= BACKEND_RTOL, format!("max relative sup difference {worst_b:.2e}")),
        check("self_adjoint", worst_a <= ADJOINT_RTOL, format!("max relative defect {worst_a:.2e}")),
        runtime(t0.elapsed(), 60),
    ]
}

fn poisson_order() -> Vec<Check> {
    let t0 = Instant::now();
    // u = p(x) q(y) with p = x(1-x)e^x, q = y(1-y)e^{2y}.
    let exact = |x: f64, y: f64| x * (1.0 - x) * x.exp() * y * (1.0 - y) * (2.0 * y).exp();
    let rhs = |x: f64, y: f64| {
        let p = x * (1.0 - x) * x.exp();
        let pxx = -(3.0 * x + x * x) * x.exp();
        let q = y * (1.0 - y) * (2.0 * y).exp();
        let qyy = (2.0 - 4.0 * y - 4.0 * y * y) * (2.0 * y).exp();
        -(pxx * q + p * qyy)
    };
    let errs: Vec<(f64, f64)> = MMS_GRIDS
        .iter()
        .map(|&n| {
            let dom = Domain::unit_square(n).unwrap();
            let u = poisson_solve(&GridFunction::from_fn(dom, rhs));
            (dom.hx(), sup_norm(&u.sub(&GridFunction::from_fn(dom, exact))))
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect();
    vec![
        check(
            "order",
            orders.iter().all(|o| (o - MMS_ORDER).abs() <= MMS_ORDER_TOL),
            format!("observed orders {orders:.4?}"),
        ),
        runtime(t0.elapsed(), 10),
    ]
}

fn reference_solve() -> Vec<Check> {
    let t0 = Instant::now();
    let p = reference(64);
    let sol = mpa_solve(&p, PATH_POINTS, SOLVE_TOL).unwrap();
    let r = &sol.report;
    let ev = p.evaluate(&sol.u).unwrap();
    let scale = r.h1.max(1.0);
    let res = p.residual(&sol.u).unwrap();
    let lap = laplacian_apply(&ev.gradient);
    let res_l2 = lp_norm(&res, 2.0);
    let res_scale = residual_scale(&p, &sol.u).unwrap();
    // Both sides are ~tol here, so measure the defect against the size of the terms.
    let identity = lp_norm(&res.sub(&lap), 2.0) / (1.0 + res_scale);
    let trace_monotone = sol.polish_energies.windows(2).all(|w| w[1] <= w[0]);
    let strict = sol.polish_decrements.iter().all(|&d| d < 0.0);
    vec![
        check("converged", r.status == Status::Converged, r.status.as_str()),
        check(
            "grad_norm",
            r.grad_norm <= SOLVE_TOL * scale && is_converged(&p, &sol.u, &ev, SOLVE_TOL).unwrap(),
            format!("{:.3e} <= {:.3e}", r.grad_norm, SOLVE_TOL * scale),
        ),
        check(
            "level_window",
            r.energy > 0.0 && r.energy <= r.m2 + LEVEL_SLACK,
            format!("0 < {:.10} <= m2 = {:.10}", r.energy, r.m2),
        ),
        check("nontrivial", r.sup > 0.0, format!("sup {:.6}", r.sup)),
        check(
            "polish_monotone",
            trace_monotone && strict,
            format!("{} accepted steps", sol.polish_decrements.len()),
        ),
        check(
            "residual_cross_check",
            identity <= 1e-10 && res_l2 <= SOLVE_TOL * (1.0 + res_scale),
            format!("identity defect {identity:.2e}, |residual| {res_l2:.2e} vs scale {res_scale:.3e}"),
        ),
        check(
            "regression",
            rel(r.energy, REFERENCE.0) <= REGRESSION_RTOL
                && rel(r.h1, REFERENCE.1) <= REGRESSION_RTOL
                && rel(r.sup, REFERENCE.2) <= REGRESSION_RTOL,
            format!("energy {:.16e}, h1 {:.16e}, sup {:.16e}", r.energy, r.h1, r.sup),
        ),
        runtime(t0.elapsed(), 300),
    ]
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

fn continuation_run() -> Vec<Check> {
    let t0 = Instant::now();
    let p = reference(64);
    let eps = default_eps_list();
    let run = continuation(&p, &eps, MpaOptions::new(PATH_POINTS, SOLVE_TOL)).unwrap();
    let all = run.all_converged() && run.steps.len() == eps.len();
    let col = |f: fn(&choquard::mountain_pass::SolveReport) -> f64| run.steps.iter().map(|s| f(&s.report)).collect::<Vec<_>>();
    let (h1, sup, kg, l1) = (col(|r| r.h1), col(|r| r.sup), col(|r| r.k_grad_emp), col(|r| r.l1_singular));
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // cauchy[j] = |u_{j+1} - u_j|, so k >= 2 starts at j = 1.
    let tail = &run.cauchy[1.min(run.cauchy.len())..];
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
    vec![
        check("all_converged", all, format!("{} steps", run.steps.len())),
        check("h1_bound", max(&h1) <= BOUND_FACTOR * h1[0], format!("max {:.6} vs h1(0) {:.6}", max(&h1), h1[0])),
        check("sup_bound", max(&sup) <= BOUND_FACTOR * sup[0], format!("max {:.6} vs sup(0) {:.6}", max(&sup), sup[0])),
        check(
            "gradient_estimate",
            max(&kg) <= BOUND_FACTOR * median(&kg),
            format!("max {:.4} vs median {:.4}", max(&kg), median(&kg)),
        ),
        check("cauchy_nonincreasing", nonincreasing, format!("differences {:.4?}", run.cauchy)),
        check(
            "l1_singular_bound",
            max(&l1) <= BOUND_FACTOR * median(&l1),
            format!("max {:.4} vs median {:.4}", max(&l1), median(&l1)),
        ),
        runtime(t0.elapsed(), 900),
    ]
}

fn mp_geometry() -> Vec<Check> {
    let t0 = Instant::now();
    let base = reference(64);
    let phi = build_phi(base.domain());
    let mut out = Vec::new();
    for &eps in &GEOMETRY_EPS {
        let p = base.with_eps(eps).unwrap();
        let j0 = p.energy(&GridFunction::zeros(*p.domain())).unwrap();
        let (k, _) = find_k(&p).unwrap();
        let jk = p.energy(&phi.scaled(k)).unwrap();
        let small: Vec<f64> = GEOMETRY_T.iter().map(|&t| p.energy(&phi.scaled(t)).unwrap()).collect();
        out.push(check(
            "geometry",
            j0 == 0.0 && jk < 0.0 && small.iter().all(|&j| j > 0.0) && (h1_norm(&phi) - 1.0).abs() < 1e-12,
            format!("eps={eps}: J(0)={j0}, J({k} phi)={jk:.4e}, J(t phi)={small:.3?}"),
        ));
    }
    out.push(runtime(t0.elapsed(), 60));
    out
}

fn cli(dir: &Path, cmd: &str, out: &str) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_choquard"))
        .args([cmd, "--config", dir.join("run.cfg").to_str().unwrap(), "--seed", "11", "--out"])
        .arg(dir.join(out))
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn determinism() -> Vec<Check> {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("run.cfg"), "# reference run\nlambda = 1.0\nnx = 64\nny = 64\n").unwrap();
    let mut out = Vec::new();
    for (cmd, file) in [("solve", "report.json"), ("verify", "verify.jsonl")] {
        let codes = (cli(dir, cmd, &format!("{cmd}_a")), cli(dir, cmd, &format!("{cmd}_b")));
        let a = std::fs::read(dir.join(format!("{cmd}_a")).join(file)).unwrap_or_default();
        let b = std::fs::read(dir.join(format!("{cmd}_b")).join(file)).unwrap_or_default();
        out.push(check(
            "byte_identical",
            !a.is_empty() && a == b && codes.0 == codes.1,
            format!("{cmd}: {} bytes, exit codes {codes:?}", a.len()),
        ));
    }
    out
}

fn main() {
    let criteria: [(&str, fn() -> Vec<Check>); 8] = [
        ("scalar_estimates", scalar_estimates),
        ("gradient_consistency", gradient_consistency),
        ("riesz_backends", riesz_backends),
        ("poisson_order", poisson_order),
        ("reference_solve", reference_solve),
        ("continuation", continuation_run),
        ("mp_geometry", mp_geometry),
        ("determinism", determinism),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let checks = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(c) => c,
            Err(_) => vec![check("completed", false, "panicked")],
        };
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        let ok = failed.is_empty();
        passed += ok as usize;
        println!("acceptance {name:<22} {} ({:.1}s)", if ok { "PASS" } else { "FAIL" }, t0.elapsed().as_secs_f64());
        for c in &checks {
            let known = KNOWN_FAILURES.contains(&(name, c.name));
            let tag = match (c.pass, known) {
                (true, _) => "ok",
                (false, true) => "FAIL (known)",
                (false, false) => "FAIL",
            };
            println!("    {:<22} {tag:<12} {}", c.name, c.detail);
            if !c.pass && !known {
                unexpected += 1;
            }
        }
    }
    println!("acceptance: {passed}/8 criteria pass, {unexpected} unexpected failing check(s)");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
