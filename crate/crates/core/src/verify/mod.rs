//! Seeded property suites over every module, plus the coverage manifest
//! that ties each invariant to exactly one suite.

mod numerics;
mod scalar;
mod solver;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::EXP_GUARD;

pub use solver::{CONTINUATION_BASELINE, CONTINUATION_GRID};

pub const SUITES: [&str; 7] = [
    "scalar_estimates",
    "gradient_fd",
    "riesz_equiv",
    "poisson_mms",
    "hls_tm",
    "mp_geometry",
    "continuation_regression",
];

/// `(invariant, suite)`: each invariant is owned by exactly one suite.
pub const COVERAGE: &[(&str, &str)] = &[
    ("scalar.estimates", "scalar_estimates"),
    ("scalar.l_eps_sign", "scalar_estimates"),
    ("scalar.limit_monotone", "scalar_estimates"),
    ("scalar.z_branch_smooth", "scalar_estimates"),
    ("scalar.z_prime_closed_form", "scalar_estimates"),
    ("scalar.z_concave", "scalar_estimates"),
    ("scalar.f_ratio_monotone", "scalar_estimates"),
    ("scalar.f_growth_bound", "scalar_estimates"),
    ("scalar.big_f_derivative", "scalar_estimates"),
    ("grid.poisson_inverse", "poisson_mms"),
    ("grid.norm_axioms", "poisson_mms"),
    ("grid.summation_by_parts", "poisson_mms"),
    ("grid.mms_order", "poisson_mms"),
    ("grid.mms_polynomial_exact", "poisson_mms"),
    ("riesz.linearity", "riesz_equiv"),
    ("riesz.positivity", "riesz_equiv"),
    ("riesz.sup_bound", "riesz_equiv"),
    ("riesz.backend_equivalence", "riesz_equiv"),
    ("riesz.self_adjoint", "riesz_equiv"),
    ("riesz.semidefinite", "riesz_equiv"),
    ("riesz.hls_scale_invariance", "hls_tm"),
    ("riesz.hls_refinement", "hls_tm"),
    ("verify.moser_monotone", "hls_tm"),
    ("verify.moser_refinement", "hls_tm"),
    ("functional.gradient_fd", "gradient_fd"),
    ("functional.absorption_lower_bound", "gradient_fd"),
    ("functional.residual_identity", "gradient_fd"),
    ("functional.mp_geometry", "mp_geometry"),
    ("mountain_pass.m2_dominates_ray", "mp_geometry"),
    ("mountain_pass.k_monotone_in_lambda", "mp_geometry"),
    ("mountain_pass.level_sandwich", "mp_geometry"),
    ("mountain_pass.descent_monotone", "mp_geometry"),
    ("mountain_pass.all_converged", "continuation_regression"),
    ("mountain_pass.uniform_bound", "continuation_regression"),
    ("mountain_pass.gradient_estimate", "continuation_regression"),
    ("mountain_pass.l1_singular_bounded", "continuation_regression"),
    ("mountain_pass.nonnegativity", "continuation_regression"),
    ("mountain_pass.limit_residual_decreasing", "continuation_regression"),
    ("mountain_pass.regression_baseline", "continuation_regression"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteViolation {
    pub invariant: &'static str,
    pub input: String,
    pub relation: String,
    pub observed: String,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite_name: String,
    pub seed: u64,
    pub cases_run: usize,
    /// Invariant ids exercised, in first-seen order.
    pub invariants: Vec<&'static str>,
    pub violations: Vec<SuiteViolation>,
    pub wall_time: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// JSON without the wall time, so reruns serialize byte-identically.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{{\"suite\":{},\"seed\":{},\"cases_run\":{},\"passed\":{},\"invariants\":[",
            json_str(&self.suite_name),
            self.seed,
            self.cases_run,
            self.passed()
        );
        for (i, inv) in self.invariants.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&json_str(inv));
        }
        s.push_str("],\"violations\":[");
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(
                s,
                "{{\"invariant\":{},\"input\":{},\"relation\":{},\"observed\":{}}}",
                json_str(v.invariant),
                json_str(&v.input),
                json_str(&v.relation),
                json_str(&v.observed)
            );
        }
        s.push_str("]}");
        s
    }
}

pub(crate) fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Collects cases and violations for one suite.
pub(crate) struct Recorder {
    cases: usize,
    invariants: Vec<&'static str>,
    violations: Vec<SuiteViolation>,
}

impl Recorder {
    fn new() -> Self {
        Self {
            cases: 0,
            invariants: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        invariant: &'static str,
        ok: bool,
        input: impl FnOnce() -> String,
        relation: &str,
        observed: impl FnOnce() -> String,
    ) {
        self.cases += 1;
        if !self.invariants.contains(&invariant) {
            self.invariants.push(invariant);
        }
        if !ok {
            self.violations.push(SuiteViolation {
                invariant,
                input: input(),
                relation: relation.to_string(),
                observed: observed(),
            });
        }
    }

    /// Counts `n` cases of `invariant` at once; `failures` become violations.
    pub(crate) fn bulk(&mut self, invariant: &'static str, n: usize, failures: Vec<(String, String, String)>) {
        self.cases += n;
        if !self.invariants.contains(&invariant) {
            self.invariants.push(invariant);
        }
        for (input, relation, observed) in failures {
            self.violations.push(SuiteViolation {
                invariant,
                input,
                relation,
                observed,
            });
        }
    }

    /// Records an evaluation error as a violation of `invariant`.
    pub(crate) fn error(&mut self, invariant: &'static str, input: String, e: &Error) {
        self.check(invariant, false, || input, "evaluates without error", || e.to_string());
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let t0 = Instant::now();
    let mut r = Recorder::new();
    match name {
        "scalar_estimates" => scalar::scalar_estimates(&mut r, seed),
        "gradient_fd" => solver::gradient_fd(&mut r, seed),
        "riesz_equiv" => numerics::riesz_equiv(&mut r, seed),
        "poisson_mms" => numerics::poisson_mms(&mut r, seed),
        "hls_tm" => numerics::hls_tm(&mut r, seed),
        "mp_geometry" => solver::mp_geometry(&mut r, seed),
        "continuation_regression" => solver::continuation_regression(&mut r, seed),
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(SuiteResult {
        suite_name: name.to_string(),
        seed,
        cases_run: r.cases,
        invariants: r.invariants,
        violations: r.violations,
        wall_time: t0.elapsed(),
    })
}

/// `∫ exp(α u²)`, the discrete Trudinger-Moser functional. Trapezoidal in
/// each direction, so the zero boundary contributes its share of area.
pub fn moser_integral(u: &GridFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let mut s = 0.0;
    for &v in u.values() {
        let x = alpha * v * v;
        if x > EXP_GUARD {
            return Err(Error::Saturated {
                t: v,
                ts: x,
                limit: EXP_GUARD,
            });
        }
        s += x.exp();
    }
    let d = u.domain();
    let boundary = d.lx() * d.ly() - d.len() as f64 * d.cell_area();
    Ok(s * d.cell_area() + boundary)
}
