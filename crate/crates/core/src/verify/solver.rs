use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Recorder;
use crate::functional::{Problem, ProblemConfig};
use crate::grid::{h1_inner, h1_norm, laplacian_apply, sup_norm, Domain, GridFunction};
use crate::mountain_pass::{build_phi, continuation, default_eps_list, find_k, mpa_solve, MpaOptions};
use crate::scalar::SingularParams;

pub const FD_PAIRS: usize = 20;
pub const FD_STEPS: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
pub const FD_TOL: f64 = 1e-6;
pub const GEOMETRY_EPS: [f64; 3] = [0.1, 0.05, 0.01];
pub const GEOMETRY_T: [f64; 3] = [0.01, 0.05, 0.1];
pub const RAY_SAMPLES: usize = 1000;
pub const SOLVER_TOL: f64 = 1e-8;
pub const CONTINUATION_GRID: usize = 32;
/// Frozen `(eps, energy, h1, sup)` of the 32² continuation at tol 1e-8.
pub const CONTINUATION_BASELINE: [(f64, f64, f64, f64); 7] = [
    (0.1, 5.3612049891303553, 3.5523040984886705, 2.2622944884294949),
    (0.05, 5.5574771211880147, 3.5542688956112110, 2.2739065852446774),
    (0.025, 5.7891832567599444, 3.5573630545252719, 2.2855998667904021),
    (0.0125, 6.0383154803181487, 3.5617247051684853, 2.2966923660591267),
    (0.00625, 6.2883921696856708, 3.5675214091752445, 2.3070898108273550),
    (0.003125, 6.5266442474306121, 3.5749995153744698, 2.3171204431868131),
    (0.0015625, 6.7446808989650684, 3.5841294768646472, 2.3271368700504866),
];
pub const BASELINE_RTOL: f64 = 1e-6;

fn problem_at(n: usize) -> Problem {
    Problem::new(ProblemConfig {
        dom: Domain::unit_square(n).expect("valid grid"),
        ..ProblemConfig::reference()
    })
    .expect("reference config is valid")
}

/// A few low sine modes with random amplitudes, nonnegative with
/// probability one half.
fn smooth_random(dom: Domain, rng: &mut ChaCha8Rng, amp: f64) -> GridFunction {
    let modes: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(1..4) as f64, rng.gen_range(1..4) as f64, rng.gen_range(-1.0..1.0)))
        .collect();
    let pi = std::f64::consts::PI;
    let u = GridFunction::from_fn(dom, |x, y| {
        modes.iter().map(|&(k, l, a)| a * (k * pi * x).sin() * (l * pi * y).sin()).sum()
    });
    let u = if rng.gen_bool(0.5) { u.map(f64::abs) } else { u };
    u.scaled(amp / sup_norm(&u).max(1e-300))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Best relative error of central differences over `FD_STEPS`.
pub fn fd_gradient_error(p: &Problem, u: &GridFunction, phi: &GridFunction) -> crate::Result<f64> {
    let exact = h1_inner(&p.h1_gradient(u)?, phi);
    let mut best = f64::INFINITY;
    for &h in &FD_STEPS {
        let fd = p.energy_difference(&u.lin_comb(1.0, -h, phi), &u.lin_comb(1.0, h, phi))? / (2.0 * h);
        best = best.min((fd - exact).abs() / exact.abs().max(1e-300));
    }
    Ok(best)
}

pub(crate) fn gradient_fd(r: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = problem_at(64);
    let coarse = Problem::new(ProblemConfig {
        eps: 0.01,
        mu: 0.25,
        singular: SingularParams::power_log(0.3, 0.2).expect("valid"),
        dom: Domain::unit_square(32).expect("valid grid"),
        ..ProblemConfig::reference()
    })
    .expect("valid config");

    for (name, p) in [("reference", &reference), ("eps=0.01 mu=0.25 beta=0.3", &coarse)] {
        let dom = *p.domain();
        for k in 0..FD_PAIRS {
            let amp = rng.gen_range(0.2..2.0);
            let u = smooth_random(dom, &mut rng, amp);
            let phi = smooth_random(dom, &mut rng, 1.0);
            let tag = format!("{name} pair {k}");
            match fd_gradient_error(p, &u, &phi) {
                Ok(e) => r.check(
                    "functional.gradient_fd",
                    e <= FD_TOL,
                    || tag.clone(),
                    "best central difference within 1e-6 relative of <grad, phi>",
                    || format!("{e:e}"),
                ),
                Err(e) => r.error("functional.gradient_fd", tag.clone(), &e),
            }

            match (p.residual(&u), p.h1_gradient(&u)) {
                (Ok(res), Ok(g)) => {
                    let lap = laplacian_apply(&g);
                    let e = sup_norm(&res.sub(&lap)) / sup_norm(&lap).max(1e-300);
                    r.check(
                        "functional.residual_identity",
                        e <= 1e-10,
                        || tag.clone(),
                        "residual = -lap(gradient) within 1e-10",
                        || format!("{e:e}"),
                    );
                }
                (Err(e), _) | (_, Err(e)) => r.error("functional.residual_identity", tag.clone(), &e),
            }
        }

        let p0 = p.with_lambda(0.0).expect("lambda 0 is valid");
        let cap = 1.0 - p.config().eps;
        for k in 0..FD_PAIRS {
            let u = smooth_random(dom, &mut rng, 1.0).map(|t| t.abs() * cap * 0.999);
            let half = 0.5 * h1_norm(&u).powi(2);
            match p0.energy(&u) {
                Ok(e) => r.check(
                    "functional.absorption_lower_bound",
                    e >= half - 1e-12 * half.max(1.0),
                    || format!("{name} sample {k}"),
                    "energy >= |u|_H1^2 / 2 at lambda = 0, 0 <= u <= 1-eps",
                    || format!("{e:e} vs {half:e}"),
                ),
                Err(e) => r.error("functional.absorption_lower_bound", format!("{name} sample {k}"), &e),
            }
        }
    }
}

pub(crate) fn mp_geometry(r: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = problem_at(64);
    let phi = build_phi(base.domain());

    for &eps in &GEOMETRY_EPS {
        let p = base.with_eps(eps).expect("valid eps");
        let tag = format!("eps={eps}");
        let j0 = p.energy(&GridFunction::zeros(*p.domain())).unwrap_or(f64::NAN);
        r.check("functional.mp_geometry", j0 == 0.0, || tag.clone(), "J(0) = 0", || format!("{j0:e}"));
        for &t in &GEOMETRY_T {
            let j = p.energy(&phi.scaled(t)).unwrap_or(f64::NAN);
            r.check(
                "functional.mp_geometry",
                j > 0.0,
                || format!("{tag} t={t}"),
                "J(t phi) > 0 for small t",
                || format!("{j:e}"),
            );
        }
        match find_k(&p) {
            Ok((k, m2)) => {
                let jk = p.energy(&phi.scaled(k)).unwrap_or(f64::NAN);
                r.check("functional.mp_geometry", jk < 0.0, || format!("{tag} K={k}"), "J(K phi) < 0", || format!("{jk:e}"));
                for _ in 0..RAY_SAMPLES {
                    let t = rng.gen_range(0.0..=k);
                    let j = p.energy(&phi.scaled(t)).unwrap_or(f64::NAN);
                    r.check(
                        "mountain_pass.m2_dominates_ray",
                        j <= m2 + 1e-10,
                        || format!("{tag} t={t}"),
                        "J(t phi) <= m2 on [0, K]",
                        || format!("{j:e} vs m2 {m2:e}"),
                    );
                }
            }
            Err(e) => r.error("functional.mp_geometry", tag, &e),
        }
    }

    let mut prev = f64::INFINITY;
    for lambda in [0.5, 1.0, 2.0] {
        match base.with_lambda(lambda).and_then(|p| find_k(&p)) {
            Ok((k, _)) => {
                r.check(
                    "mountain_pass.k_monotone_in_lambda",
                    k <= prev,
                    || format!("lambda={lambda}"),
                    "K nonincreasing in lambda",
                    || format!("K={k} after {prev}"),
                );
                prev = k;
            }
            Err(e) => r.error("mountain_pass.k_monotone_in_lambda", format!("lambda={lambda}"), &e),
        }
    }

    let p = problem_at(32);
    match mpa_solve(&p, 32, SOLVER_TOL) {
        Ok(sol) => {
            let rep = &sol.report;
            r.check(
                "mountain_pass.level_sandwich",
                rep.energy > 0.0 && rep.energy <= rep.m2 + 1e-10,
                || "reference config at 32^2".into(),
                "0 < energy <= m2 + 1e-10",
                || format!("energy {:e}, m2 {:e}", rep.energy, rep.m2),
            );
            for (i, w) in sol.polish_energies.windows(2).enumerate() {
                r.check(
                    "mountain_pass.descent_monotone",
                    w[1] <= w[0],
                    || format!("polish step {}", i + 1),
                    "energy trace nonincreasing",
                    || format!("{:e} then {:e}", w[0], w[1]),
                );
            }
            for (i, &d) in sol.polish_decrements.iter().enumerate() {
                r.check(
                    "mountain_pass.descent_monotone",
                    d < 0.0,
                    || format!("polish step {}", i + 1),
                    "J(u_k+1) - J(u_k) < 0 on accepted steps",
                    || format!("{d:e}"),
                );
            }
        }
        Err(e) => r.error("mountain_pass.level_sandwich", "reference config at 32^2".into(), &e),
    }
}

pub(crate) fn continuation_regression(r: &mut Recorder, _seed: u64) {
    let p = problem_at(CONTINUATION_GRID);
    let run = match continuation(&p, &default_eps_list(), MpaOptions::new(32, SOLVER_TOL)) {
        Ok(run) => run,
        Err(e) => return r.error("mountain_pass.all_converged", "32^2 continuation".into(), &e),
    };
    for s in &run.steps {
        r.check(
            "mountain_pass.all_converged",
            s.u.is_some(),
            || format!("eps={}", s.report.eps),
            "step converged",
            || s.error.clone().unwrap_or_default(),
        );
    }
    if !run.all_converged() {
        return;
    }
    let reps: Vec<_> = run.steps.iter().map(|s| &s.report).collect();
    let col = |f: fn(&crate::mountain_pass::SolveReport) -> f64| reps.iter().map(|x| f(x)).collect::<Vec<f64>>();
    let (h1, sup, kg, l1) = (col(|x| x.h1), col(|x| x.sup), col(|x| x.k_grad_emp), col(|x| x.l1_singular));
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    r.check(
        "mountain_pass.uniform_bound",
        max(&h1) <= 2.0 * h1[0],
        || "h1".into(),
        "max_k h1 <= 2 h1(k=0)",
        || format!("{:e} vs {:e}", max(&h1), h1[0]),
    );
    r.check(
        "mountain_pass.uniform_bound",
        max(&sup) <= 2.0 * sup[0],
        || "sup".into(),
        "max_k sup <= 2 sup(k=0)",
        || format!("{:e} vs {:e}", max(&sup), sup[0]),
    );
    r.check(
        "mountain_pass.gradient_estimate",
        max(&kg) <= 2.0 * median(&kg),
        || "K_grad_emp".into(),
        "max_k K_grad_emp <= 2 median",
        || format!("{:e} vs median {:e}", max(&kg), median(&kg)),
    );
    r.check(
        "mountain_pass.l1_singular_bounded",
        max(&l1) <= 2.0 * median(&l1),
        || "l1_singular".into(),
        "max_k l1_singular <= 2 median",
        || format!("{:e} vs median {:e}", max(&l1), median(&l1)),
    );
    for s in &run.steps {
        let m = s.u.as_ref().map_or(f64::NAN, |u| u.min());
        r.check(
            "mountain_pass.nonnegativity",
            m >= -10.0 * SOLVER_TOL,
            || format!("eps={}", s.report.eps),
            "min u >= -10 tol",
            || format!("{m:e}"),
        );
    }
    for w in run.steps.windows(2) {
        r.check(
            "mountain_pass.limit_residual_decreasing",
            w[1].limit_residual < w[0].limit_residual,
            || format!("eps={} -> {}", w[0].report.eps, w[1].report.eps),
            "residual against the singular limit decreases",
            || format!("{:e} then {:e}", w[0].limit_residual, w[1].limit_residual),
        );
    }
    for (rep, &(eps, e, h, s)) in reps.iter().zip(CONTINUATION_BASELINE.iter()) {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        let d = rel(rep.energy, e).max(rel(rep.h1, h)).max(rel(rep.sup, s));
        r.check(
            "mountain_pass.regression_baseline",
            rep.eps == eps && d <= BASELINE_RTOL,
            || format!("eps={}", rep.eps),
            "(energy, h1, sup) within 1e-6 of the frozen baseline",
            || format!("({:.16e}, {:.16e}, {:.16e}), max rel dev {d:e}", rep.energy, rep.h1, rep.sup),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn baseline_eps_follow_the_default_list() {
        for (b, e) in CONTINUATION_BASELINE.iter().zip(default_eps_list()) {
            assert_eq!(b.0, e);
        }
    }
}
