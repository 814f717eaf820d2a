//! Saddle search for the regularized problem.
//!
//! Two phases: a discrete path from `0` to `Kφ` whose highest node is
//! pushed downhill (the classical mountain-pass algorithm), then a
//! ray-constrained polish where every iterate sits at the energy peak of
//! its own ray, so the polish is a plain descent with monotone energy.

mod bounds;
mod continuation;
mod report;

pub use bounds::{bounds_report, BoundsReport, DIAGNOSTIC_MARGIN};
pub use continuation::{continuation, default_eps_list, lambda_probe, ContinuationRun, ContinuationStep, LambdaProbe};
pub use report::{SolveReport, Status};

use crate::error::{Error, Result};
use crate::functional::{Evaluation, Problem};
use crate::grid::{h1_inner, h1_norm, laplacian_apply, lp_norm, weight_psi, Domain, GridFunction};
use crate::quadrature::{brent_root, golden_max};

/// Armijo sufficient-decrease constant.
pub const ARMIJO: f64 = 1e-4;
/// Consecutive step-halvings before a line search is declared failed.
pub const MAX_HALVINGS: usize = 50;
/// Points in the coarse scan for the path maximum.
pub const M2_SCAN: usize = 256;
/// The path phase hands over once the peak gradient drops below this
/// fraction of the scale, or `10·tol·scale`, whichever is larger.
pub const PATH_HANDOFF: f64 = 1e-3;
/// Relative drop of the path maximum over 20 iterations below which the
/// path phase hands over.
pub const PATH_STAGNATION: f64 = 1e-6;
/// The path may grow by midpoint insertion to this multiple of its initial size.
pub const MAX_PATH_FACTOR: usize = 8;

/// First Dirichlet eigenfunction `sin(πx/Lx) sin(πy/Ly)`, unit H¹ norm.
pub fn build_phi(dom: &Domain) -> GridFunction {
    let s = weight_psi(dom).map(f64::sqrt);
    let n = h1_norm(&s);
    s.scaled(1.0 / n)
}

/// Doubles `t` from 1 until `J(tφ) < 0`, then maximizes `J(tφ)` on `[0, K]`.
pub fn find_k(problem: &Problem) -> Result<(f64, f64)> {
    if problem.config().lambda <= 0.0 {
        return Err(Error::Domain("find_k needs lambda > 0".into()));
    }
    let phi = build_phi(problem.domain());
    let t_cap = problem.config().model.t_saturation() / phi.max();
    let ray = |t: f64| problem.energy(&phi.scaled(t));
    let mut t = 1.0;
    loop {
        if t > t_cap {
            return Err(Error::NoNegativeEnergy { t_cap });
        }
        if ray(t)? < 0.0 {
            break;
        }
        t *= 2.0;
    }
    let k = t;
    let mut best = (0.0, 0.0);
    for i in 1..=M2_SCAN {
        let s = k * i as f64 / M2_SCAN as f64;
        let e = ray(s)?;
        if e > best.1 {
            best = (s, e);
        }
    }
    let h = k / M2_SCAN as f64;
    let (lo, hi) = ((best.0 - h).max(0.0), (best.0 + h).min(k));
    let (_, m2) = golden_max(|s| ray(s).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-10);
    Ok((k, m2.max(best.1)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpaOptions {
    pub path_points: usize,
    pub tol: f64,
    pub max_path_iterations: usize,
    pub max_polish_iterations: usize,
}

impl MpaOptions {
    pub fn new(path_points: usize, tol: f64) -> Self {
        Self {
            path_points,
            tol,
            max_path_iterations: 400,
            max_polish_iterations: 20_000,
        }
    }
}

/// Solver output: the critical point, its report and the traces used by
/// the acceptance checks.
#[derive(Debug, Clone)]
pub struct MpaSolution {
    pub u: GridFunction,
    pub report: SolveReport,
    /// Energies of the final path nodes.
    pub path_energies: Vec<f64>,
    /// Energy after every accepted polish step, starting from the first
    /// ray peak and accumulated from cancellation-free step differences.
    pub polish_energies: Vec<f64>,
    /// `J(u_{k+1}) - J(u_k)` of every accepted polish step, evaluated
    /// without cancellation; it resolves drops below one ulp of the level.
    pub polish_decrements: Vec<f64>,
}

/// `‖−Δ_h u‖ + ‖l_ε(u)‖ + ‖λ K[F(u)] f(u)‖` in L², the scale for the
/// strong residual.
pub fn residual_scale(problem: &Problem, u: &GridFunction) -> Result<f64> {
    let lap = lp_norm(&laplacian_apply(u), 2.0);
    let cfg = problem.config();
    let l = u.map(|t| cfg.singular.l_eps(t, cfg.eps).unwrap_or(0.0));
    let r = problem.residual(u)?;
    // The nonlocal part is whatever remains after the two local terms.
    let nonlocal = r.sub(&laplacian_apply(u)).sub(&l);
    Ok(lap + lp_norm(&l, 2.0) + lp_norm(&nonlocal, 2.0))
}

/// Convergence test shared by the polish and the warm-started steps:
/// `|∇J|_{H¹} <= tol·max(1, |u|_{H¹})` and
/// `|residual|_{L²} <= tol·(1 + residual_scale)`.
pub fn is_converged(problem: &Problem, u: &GridFunction, ev: &Evaluation, tol: f64) -> Result<bool> {
    if ev.grad_norm > tol * h1_norm(u).max(1.0) {
        return Ok(false);
    }
    let r = lp_norm(&laplacian_apply(&ev.gradient), 2.0);
    Ok(r <= tol * (1.0 + residual_scale(problem, u)?))
}

/// `t ↦ J(t v)` peak nearest to `t0`, as the root of the ray slope.
fn ray_peak(problem: &Problem, v: &GridFunction, t0: f64) -> Result<f64> {
    let slope = |t: f64| problem.slope(&v.scaled(t), v);
    let t_cap = problem.config().model.t_saturation() / v.max().max(f64::MIN_POSITIVE);
    let d0 = slope(t0)?;
    if d0 == 0.0 {
        return Ok(t0);
    }
    let (mut lo, mut hi) = (t0, t0);
    if d0 > 0.0 {
        loop {
            hi *= 1.25;
            if hi > t_cap {
                return Err(Error::NoNegativeEnergy { t_cap });
            }
            if slope(hi)? < 0.0 {
                break;
            }
            lo = hi;
        }
    } else {
        loop {
            lo *= 0.8;
            if lo < 1e-12 * t0 {
                return Err(Error::RootFinding("ray slope never turns positive".into()));
            }
            if slope(lo)? > 0.0 {
                break;
            }
            hi = lo;
        }
    }
    brent_root(|t| slope(t).unwrap_or(f64::NAN), lo, hi, 1e-15 * hi)
}

/// Moves `u` onto the peak of its own ray.
fn project(problem: &Problem, u: &GridFunction) -> Result<GridFunction> {
    let n = h1_norm(u);
    if n == 0.0 {
        return Err(Error::Domain("cannot project the zero function".into()));
    }
    let v = u.scaled(1.0 / n);
    let t = ray_peak(problem, &v, n)?;
    Ok(v.scaled(t))
}

/// Result of the ray-constrained descent.
pub(crate) struct Polished {
    pub u: GridFunction,
    pub eval: Evaluation,
    pub energies: Vec<f64>,
    pub decrements: Vec<f64>,
    pub iterations: usize,
}

/// Ray-constrained steepest descent from `start`; the step length starts
/// at the Barzilai-Borwein value and is halved until the energy drops.
pub(crate) fn polish(problem: &Problem, start: &GridFunction, tol: f64, max_iterations: usize) -> Result<Polished> {
    let mut u = project(problem, start)?;
    let mut ev = problem.evaluate(&u)?;
    let mut energies = vec![ev.energy];
    let mut decrements = Vec::new();
    let mut alpha = 1.0;
    let mut iterations = 0;
    while !is_converged(problem, &u, &ev, tol)? {
        if iterations >= max_iterations {
            return Err(Error::Stalled {
                iterations,
                grad_norm: ev.grad_norm,
            });
        }
        let g2 = ev.grad_norm * ev.grad_norm;
        let mut accepted = None;
        let mut a = alpha;
        for _ in 0..MAX_HALVINGS {
            let trial = project(problem, &u.lin_comb(1.0, -a, &ev.gradient)).and_then(|w| {
                let de = problem.energy_difference(&u, &w)?;
                Ok((w, de))
            });
            if let Ok((w, de)) = trial {
                if de <= -ARMIJO * a * g2 {
                    let e = problem.evaluate(&w)?;
                    accepted = Some((w, e, a, de));
                    break;
                }
            }
            a *= 0.5;
        }
        let Some((w, e, a, de)) = accepted else {
            return Err(Error::Stalled {
                iterations,
                grad_norm: ev.grad_norm,
            });
        };
        let s = w.sub(&u);
        let y = e.gradient.sub(&ev.gradient);
        let sy = h1_inner(&s, &y);
        alpha = if sy > 0.0 {
            (h1_inner(&s, &s) / sy).clamp(1e-3, 1e2)
        } else {
            (2.0 * a).min(1.0)
        };
        u = w;
        ev = e;
        let last = energies[energies.len() - 1];
        energies.push(last + de);
        decrements.push(de);
        iterations += 1;
    }
    Ok(Polished {
        u,
        eval: ev,
        energies,
        decrements,
        iterations,
    })
}

struct PathNode {
    u: GridFunction,
    energy: f64,
}

/// Lowest-index interior node of maximal energy.
fn path_max(path: &[PathNode]) -> usize {
    let mut best = 1;
    for i in 2..path.len() - 1 {
        if path[i].energy > path[best].energy {
            best = i;
        }
    }
    best
}

/// Full two-phase solve with default iteration budgets.
pub fn mpa_solve(problem: &Problem, path_points: usize, tol: f64) -> Result<MpaSolution> {
    mpa_solve_with(problem, MpaOptions::new(path_points, tol))
}

pub fn mpa_solve_with(problem: &Problem, opts: MpaOptions) -> Result<MpaSolution> {
    if opts.path_points < 16 {
        return Err(Error::Domain(format!("path_points must be >= 16, got {}", opts.path_points)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {}", opts.tol)));
    }
    let (k, m2) = find_k(problem)?;
    let phi = build_phi(problem.domain());
    let p = opts.path_points;
    let mut path = Vec::with_capacity(4 * p);
    for i in 0..=p {
        let u = phi.scaled(k * i as f64 / p as f64);
        let energy = problem.energy(&u)?;
        path.push(PathNode { u, energy });
    }

    let spacing = k / p as f64;
    let mut iterations = 0;
    let mut alpha: f64 = 1.0;
    let mut halvings = 0;
    let mut peak_history: Vec<f64> = Vec::new();
    while iterations < opts.max_path_iterations {
        let i = path_max(&path);
        peak_history.push(path[i].energy);
        if let [.., old, _, _, _, _, _, _, _, _, _, _, _, _, _, _, _, _, _, _, _, new] = peak_history[..] {
            if old - new <= PATH_STAGNATION * old.abs().max(1.0) {
                break;
            }
        }
        let ev = problem.evaluate(&path[i].u)?;
        let scale = h1_norm(&path[i].u).max(1.0);
        if ev.grad_norm <= (10.0 * opts.tol).max(PATH_HANDOFF) * scale {
            break;
        }
        let g2 = ev.grad_norm * ev.grad_norm;
        // Moves shorter than half the initial node spacing cannot hop over
        // the ridge between two refinements.
        let mut a = (2.0 * alpha).min(1.0).min(0.5 * spacing / ev.grad_norm);
        let mut moved = None;
        while halvings < MAX_HALVINGS {
            let w = path[i].u.lin_comb(1.0, -a, &ev.gradient);
            match problem.energy(&w) {
                Ok(e) if e <= ev.energy - ARMIJO * a * g2 => {
                    moved = Some((w, e));
                    break;
                }
                Ok(_) | Err(Error::Saturated { .. }) => {}
                Err(other) => return Err(other),
            }
            a *= 0.5;
            halvings += 1;
        }
        let Some((w, e)) = moved else {
            // The path phase only seeds the polish; a failed line search
            // there hands over instead of aborting.
            break;
        };
        halvings = 0;
        alpha = a;
        path[i] = PathNode { u: w, energy: e };
        iterations += 1;

        if path.len() >= MAX_PATH_FACTOR * p {
            // Without further refinement the path can no longer be trusted to
            // cross the ridge.
            break;
        }
        {
            // Upper segment first so the lower index stays valid.
            for (a, b) in [(i, i + 1), (i - 1, i)] {
                let mid = path[a].u.lin_comb(0.5, 0.5, &path[b].u);
                let em = problem.energy(&mid)?;
                if em > e {
                    path.insert(b, PathNode { u: mid, energy: em });
                }
            }
        }
    }

    let start = path[path_max(&path)].u.clone();
    let pol = polish(problem, &start, opts.tol, opts.max_polish_iterations)?;
    iterations += pol.iterations;

    let energy = pol.eval.energy;
    if !(energy > 0.0 && energy <= m2 + 1e-10) {
        return Err(Error::Domain(format!(
            "critical level {energy} outside the mountain-pass window (0, {m2}]"
        )));
    }
    if !(pol.u.max() > 0.0) {
        return Err(Error::Domain("solver returned the trivial solution".into()));
    }
    let b = bounds_report(&pol.u, problem);
    let report = SolveReport {
        eps: problem.config().eps,
        lambda: problem.config().lambda,
        energy,
        grad_norm: pol.eval.grad_norm,
        h1: b.h1,
        sup: b.sup,
        k_path: k,
        m2,
        k_grad_emp: b.k_grad_emp,
        l1_singular: b.l1_singular,
        iterations,
        status: Status::Converged,
    };
    Ok(MpaSolution {
        u: pol.u,
        report,
        path_energies: path.iter().map(|n| n.energy).collect(),
        polish_energies: pol.energies,
        polish_decrements: pol.decrements,
    })
}
