use super::{bounds_report, find_k, mpa_solve_with, polish, MpaOptions, SolveReport, Status};
use crate::error::{Error, Result};
use crate::functional::{Problem, EPS_MAX};
use crate::grid::{h1_norm, GridFunction};
use crate::scalar::estimate_constants;

/// `0.1·2^{-k}` for `k = 0..=6`.
pub fn default_eps_list() -> Vec<f64> {
    (0..=6).map(|k| 0.1 * 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone)]
pub struct ContinuationStep {
    pub report: SolveReport,
    /// `None` when the step failed.
    pub u: Option<GridFunction>,
    /// The step fell back to the full path algorithm.
    pub cold_start: bool,
    /// Dual norm of the residual against the singular limit on `{u > δ0}`.
    pub limit_residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ContinuationRun {
    pub steps: Vec<ContinuationStep>,
    /// `|u_{k+1} - u_k|_{H¹}` between consecutive converged steps.
    pub cauchy: Vec<f64>,
    /// Threshold of the positivity set used by the final residuals.
    pub delta0: f64,
    /// Dual norm of the final residual against the singular limit, on `{u > δ0}`.
    pub limit_residual: f64,
    /// Dual norm of the final regularized residual on the same set.
    pub eps_residual: f64,
}

impl ContinuationRun {
    pub fn all_converged(&self) -> bool {
        self.steps.iter().all(|s| s.report.status == Status::Converged)
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Saturated { .. } => Status::Saturated,
        _ => Status::Stalled,
    }
}

/// Solves along a decreasing ε sequence, warm-starting each step from the
/// previous solution.
pub fn continuation(problem: &Problem, eps_list: &[f64], opts: MpaOptions) -> Result<ContinuationRun> {
    if eps_list.is_empty() {
        return Err(Error::Domain("empty eps list".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps list must be strictly decreasing".into()));
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0 && e < EPS_MAX)) {
        return Err(Error::Domain(format!("eps {e} outside (0, 1/3)")));
    }
    let lambda = problem.config().lambda;
    let delta0 = estimate_constants(&problem.config().singular).map(|c| c.delta0).unwrap_or(0.0);
    let mut steps: Vec<ContinuationStep> = Vec::with_capacity(eps_list.len());
    let mut prev: Option<GridFunction> = None;
    let mut last_problem = problem.with_eps(eps_list[0])?;
    for &eps in eps_list {
        let p = problem.with_eps(eps)?;
        let warm = prev.as_ref().map(|u0| -> Result<(GridFunction, SolveReport)> {
            let pol = polish(&p, u0, opts.tol, opts.max_polish_iterations)?;
            let (k, m2) = find_k(&p)?;
            let b = bounds_report(&pol.u, &p);
            let report = SolveReport {
                eps,
                lambda,
                energy: pol.eval.energy,
                grad_norm: pol.eval.grad_norm,
                h1: b.h1,
                sup: b.sup,
                k_path: k,
                m2,
                k_grad_emp: b.k_grad_emp,
                l1_singular: b.l1_singular,
                iterations: pol.iterations,
                status: Status::Converged,
            };
            Ok((pol.u, report))
        });
        let (outcome, cold_start) = match warm {
            Some(Ok(r)) => (Ok(r), false),
            _ => (mpa_solve_with(&p, opts).map(|s| (s.u, s.report)), prev.is_some()),
        };
        match outcome {
            Ok((u, report)) => {
                let limit_residual = p.dual_norm(&p.limit_residual(&u, delta0)?);
                prev = Some(u.clone());
                last_problem = p;
                steps.push(ContinuationStep {
                    report,
                    u: Some(u),
                    cold_start,
                    limit_residual,
                    error: None,
                });
            }
            Err(e) => {
                let grad = match &e {
                    Error::Stalled { grad_norm, .. } => *grad_norm,
                    _ => f64::NAN,
                };
                steps.push(ContinuationStep {
                    report: SolveReport::failed(eps, lambda, status_of(&e), 0, grad),
                    u: None,
                    cold_start,
                    limit_residual: f64::NAN,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    let converged: Vec<&GridFunction> = steps.iter().filter_map(|s| s.u.as_ref()).collect();
    let cauchy = converged.windows(2).map(|w| h1_norm(&w[1].sub(w[0]))).collect();
    let (limit_residual, eps_residual) = match converged.last() {
        Some(u) => (
            last_problem.dual_norm(&last_problem.limit_residual(u, delta0)?),
            last_problem.dual_norm(&last_problem.masked_residual(u, delta0)?),
        ),
        None => (f64::NAN, f64::NAN),
    };
    Ok(ContinuationRun {
        steps,
        cauchy,
        delta0,
        limit_residual,
        eps_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaProbe {
    /// Smallest coupling in the final bracket at which the solver succeeded.
    pub lambda_bar: f64,
    /// `(λ, solver succeeded)` in evaluation order.
    pub trials: Vec<(f64, bool)>,
}

/// Bisects `λ ∈ [lo, hi]` for the onset of solver success. The solver must
/// succeed at `hi`.
pub fn lambda_probe(problem: &Problem, lo: f64, hi: f64, bisections: usize, opts: MpaOptions) -> Result<LambdaProbe> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Domain(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let mut trials = Vec::new();
    let mut ok = |l: f64| -> Result<bool> {
        let s = mpa_solve_with(&problem.with_lambda(l)?, opts).is_ok();
        trials.push((l, s));
        Ok(s)
    };
    if !ok(hi)? {
        return Err(Error::Domain(format!("solver fails at the upper coupling {hi}")));
    }
    let (mut a, mut b) = (lo, hi);
    if ok(a)? {
        b = a;
    } else {
        for _ in 0..bisections {
            let m = 0.5 * (a + b);
            if ok(m)? {
                b = m;
            } else {
                a = m;
            }
        }
    }
    Ok(LambdaProbe { lambda_bar: b, trials })
}
