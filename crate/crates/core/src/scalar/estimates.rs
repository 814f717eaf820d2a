//! Sampling falsification of the closed-form estimates on `l_ε` and `L_ε`.
//!
//! Every inequality is evaluated at seeded samples drawn over its validity
//! range. Constants that are only known to exist (`m̃`, `k0`, `C`, `δ0`) are
//! estimated once as extrema over a dense reference grid, widened by a 1%
//! safety factor, and frozen into the report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::singular::{log_shift, SingularFamily, SingularParams};
use crate::error::{Error, Result};
use crate::quadrature::brent_root;

/// Absolute slack allowed on every sampled inequality.
pub const ESTIMATE_SLACK: f64 = 1e-12;
/// Safety factor applied to grid-estimated constants.
pub const SAFETY: f64 = 1.01;
/// Upper end of sampled `t`.
pub const T_MAX: f64 = 20.0;
/// Lower end of sampled `t` and `ε`.
pub const T_MIN: f64 = 1e-8;
pub const EPS_MIN: f64 = 1e-6;
/// The ε bound under which the logarithm dominates the identity near 0.
pub const EPS0: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConstants {
    pub m_tilde: f64,
    /// `k0` for `p0 = 2.5` and `p0 = 3`.
    pub k0: [(f64, f64); 2],
    pub c_growth: f64,
    pub delta0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub inequality: &'static str,
    pub t: f64,
    pub eps: f64,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub beta: f64,
    pub q: f64,
    pub constants: EstimateConstants,
    /// Samples evaluated per inequality label.
    pub samples: Vec<(&'static str, usize)>,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return hi;
    }
    let u: f64 = rng.gen();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
}

/// Estimates `m̃`, `k0`, `C`, `δ0` on dense reference grids.
pub fn estimate_constants(p: &SingularParams) -> Result<EstimateConstants> {
    let beta = p.beta();
    // L_ε increases on [0, 1-ε] (positive integrand), so its sup there is L_ε(1-ε).
    let mut m_tilde: f64 = 0.0;
    for eps in log_grid(EPS_MIN, 0.999, 200) {
        m_tilde = m_tilde.max(p.big_l_eps(1.0 - eps, eps)?);
    }
    let m_tilde = m_tilde * SAFETY;

    let mut k0 = [(2.5, 0.0f64), (3.0, 0.0f64)];
    for eps in log_grid(EPS_MIN, 0.5, 30) {
        for t in log_grid(1.0 - eps, T_MAX, 240) {
            let l = p.big_l_eps(t, eps)?;
            for (p0, k) in k0.iter_mut() {
                *k = k.max(-l / t.powf(*p0));
            }
        }
    }
    for (_, k) in k0.iter_mut() {
        *k *= SAFETY;
    }

    let mut c: f64 = 0.0;
    for eps in log_grid(EPS_MIN, 0.999_999, 120) {
        for t in log_grid(T_MIN, T_MAX, 600) {
            let v = (t * p.l_eps_raw(t, eps)).abs() / (1.0 + t.powf(2.0 - beta));
            c = c.max(v);
        }
    }
    let c_growth = c * SAFETY;

    let mut delta: f64 = f64::INFINITY;
    for eps in log_grid(EPS_MIN, EPS0, 200) {
        let g = |t: f64| -log_shift(t, eps) - t;
        let root = brent_root(g, 1e-6 * eps, 1.0 - eps, 1e-14)?;
        delta = delta.min(root);
    }
    Ok(EstimateConstants {
        m_tilde,
        k0,
        c_growth,
        delta0: delta / SAFETY,
    })
}

/// Falsification run over `sample_count` samples per inequality.
pub fn check_scalar_estimates(p: &SingularParams, sample_count: usize, seed: u64) -> Result<ViolationReport> {
    if p.family() != SingularFamily::PowerLog {
        return Err(Error::Domain("scalar estimates are stated for the power-log family".into()));
    }
    let beta = p.beta();
    let constants = estimate_constants(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut push = |name, t, eps, observed, bound| {
        violations.push(Violation {
            inequality: name,
            t,
            eps,
            observed,
            bound,
        })
    };
    let growth = |t: f64| t.powf(2.0 - beta) / (2.0 - beta) + t.powf(1.0 - beta) / (1.0 - beta) + constants.m_tilde;
    let n = sample_count;

    // 0 <= -l_ε(t) <= t for t >= 1-ε, ε < 1/2
    for _ in 0..n {
        let eps = log_uniform(&mut rng, EPS_MIN, 0.5);
        let t = log_uniform(&mut rng, 1.0 - eps, T_MAX);
        let m = -p.l_eps(t, eps)?;
        if m < -ESTIMATE_SLACK {
            push("neg_l_eps_nonneg", t, eps, m, 0.0);
        }
        if m > t + ESTIMATE_SLACK {
            push("neg_l_eps_below_t", t, eps, m, t);
        }
    }

    // 0 < L_ε(t) < m̃ on (0, 1-ε], together with the growth bound
    for _ in 0..n {
        let eps = log_uniform(&mut rng, EPS_MIN, 1.0);
        let t = log_uniform(&mut rng, T_MIN, 1.0 - eps);
        let l = p.big_l_eps(t, eps)?;
        if l <= -ESTIMATE_SLACK {
            push("big_l_positive", t, eps, l, 0.0);
        }
        if l >= constants.m_tilde + ESTIMATE_SLACK {
            push("big_l_bounded", t, eps, l, constants.m_tilde);
        }
        if l.abs() > growth(t) + ESTIMATE_SLACK {
            push("big_l_growth", t, eps, l.abs(), growth(t));
        }
    }

    // L_ε(t) >= -k0 t^{p0} for t >= 1-ε, ε <= 1/2, together with the growth bound
    for _ in 0..n {
        let eps = log_uniform(&mut rng, EPS_MIN, 0.5);
        let t = log_uniform(&mut rng, 1.0 - eps, T_MAX);
        let l = p.big_l_eps(t, eps)?;
        for &(p0, k0) in &constants.k0 {
            let b = -k0 * t.powf(p0);
            if l < b - ESTIMATE_SLACK {
                push(if p0 == 2.5 { "big_l_below_p2.5" } else { "big_l_below_p3" }, t, eps, l, b);
            }
        }
        if l.abs() > growth(t) + ESTIMATE_SLACK {
            push("big_l_growth", t, eps, l.abs(), growth(t));
        }
    }

    // |t l_ε(t)| <= C (1 + t^{2-β})
    for _ in 0..n {
        let eps = log_uniform(&mut rng, EPS_MIN, 1.0);
        let t = log_uniform(&mut rng, T_MIN, T_MAX);
        let v = (t * p.l_eps(t, eps)?).abs();
        let b = constants.c_growth * (1.0 + t.powf(2.0 - beta));
        if v > b + ESTIMATE_SLACK {
            push("t_l_eps_growth", t, eps, v, b);
        }
    }

    // -log(t + ε/(t+ε)) >= t on [0, δ0), ε < 1/3
    for i in 0..n {
        let eps = log_uniform(&mut rng, EPS_MIN, EPS0);
        let t = if i == 0 {
            0.0
        } else {
            log_uniform(&mut rng, T_MIN, constants.delta0)
        };
        let v = -log_shift(t, eps);
        if v < t - ESTIMATE_SLACK {
            push("log_dominates_t", t, eps, v, t);
        }
    }

    Ok(ViolationReport {
        beta,
        q: p.q(),
        constants,
        samples: vec![
            ("neg_l_eps_bounds", n),
            ("big_l_small_t", n),
            ("big_l_growth", 2 * n),
            ("big_l_below", n),
            ("t_l_eps_growth", n),
            ("log_dominates_t", n),
        ],
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_cases_hold() {
        let p = SingularParams::power_log(0.5, 0.4).unwrap();
        for &eps in &[0.3, 0.01] {
            assert_eq!(-log_shift(0.0, eps), 0.0);
            assert_eq!(p.l_eps(1.0 - eps, eps).unwrap(), 0.0);
        }
    }

    #[test]
    fn constants_are_sane() {
        let p = SingularParams::power_log(0.5, 0.4).unwrap();
        let c = estimate_constants(&p).unwrap();
        // ∫_0^1 -s^{-β} log s = 1/(1-β)² bounds every L_ε(1-ε).
        assert!(c.m_tilde > 0.0 && c.m_tilde <= 4.0 * SAFETY);
        assert!(c.k0[0].1 > 0.0 && c.k0[1].1 > 0.0);
        assert!(c.delta0 > 0.0 && c.delta0 < 1.0);
        assert!(c.c_growth > 0.0);
    }

    #[test]
    fn small_run_has_no_violations() {
        let p = SingularParams::power_log(0.3, 0.2).unwrap();
        let r = check_scalar_estimates(&p, 2000, 7).unwrap();
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(5)]);
    }

    #[test]
    fn pure_log_is_rejected() {
        let p = SingularParams::pure_log(2).unwrap();
        assert!(check_scalar_estimates(&p, 10, 0).is_err());
    }
}
