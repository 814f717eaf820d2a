//! The regularized absorption `l_ε`, its antiderivative, the singular limit
//! and the gradient-estimate majorant `Z`.

use crate::chebyshev::{geometric_knots, AntiderivativeTable};
use crate::error::{Error, Result};
use crate::quadrature::{brent_root, integrate_breaks};

/// Absolute tolerance for every `L_ε` quadrature.
pub const L_EPS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularFamily {
    /// `t^{-β} log t`, regularized with the extra `t^q/(t+ε)^q` factor.
    PowerLog,
    /// `|log t|^{k-2} log t`.
    PureLog,
}

/// Selects the singular absorption and its majorant `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularParams {
    family: SingularFamily,
    beta: f64,
    q: f64,
    k: u32,
    /// Branch point of `Z` for the pure-log family.
    t_star: f64,
}

impl SingularParams {
    pub fn power_log(beta: f64, q: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0,1), got {beta}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q must lie in (0,1), got {q}")));
        }
        Ok(Self {
            family: SingularFamily::PowerLog,
            beta,
            q,
            k: 0,
            t_star: 1.0,
        })
    }

    pub fn pure_log(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        Ok(Self {
            family: SingularFamily::PureLog,
            beta: 0.0,
            q: 0.0,
            k,
            t_star: pure_log_branch_point(k)?,
        })
    }

    pub fn family(&self) -> SingularFamily {
        self.family
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Branch point of `Z`: 1 for power-log, `t*` for pure-log.
    pub fn z_branch_point(&self) -> f64 {
        self.t_star
    }

    /// `l_ε(t)`, rejecting non-finite input and `ε ∉ (0,1)`.
    pub fn l_eps(&self, t: f64, eps: f64) -> Result<f64> {
        check_args(t, eps)?;
        Ok(self.l_eps_raw(t, eps))
    }

    #[inline]
    pub(crate) fn l_eps_raw(&self, t: f64, eps: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let lg = log_shift(t, eps);
        match self.family {
            SingularFamily::PowerLog => {
                let pre = (self.q * t.ln() - (self.beta + self.q) * (t + eps).ln()).exp();
                -pre * lg
            }
            SingularFamily::PureLog => -signed_pow(lg, self.k),
        }
    }

    /// `L_ε(t) = ∫_0^t l_ε`, by adaptive GK21 quadrature in the variable `ln s`.
    pub fn big_l_eps(&self, t: f64, eps: f64) -> Result<f64> {
        check_args(t, eps)?;
        if t < 0.0 {
            return Err(Error::Domain(format!("L_eps needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let x_hi = t.ln();
        // Below min(t, ε)·e^{-16} the integrand is O(s^{q+1}) and contributes < 1e-13.
        let x_lo = t.min(eps).ln() - 16.0;
        let segments = ((x_hi - x_lo) / 2.0).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=segments)
            .map(|i| x_lo + (x_hi - x_lo) * i as f64 / segments as f64)
            .collect();
        let r = integrate_breaks(
            |x: f64| {
                let s = x.exp();
                self.l_eps_raw(s, eps) * s
            },
            &breaks,
            0.1 * L_EPS_TOL,
            0.0,
            4000,
        )?;
        Ok(r.value)
    }

    /// The ε → 0 limit of `-l_ε`, zero for `t <= 0`.
    pub fn l_limit(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            SingularFamily::PowerLog => t.powf(-self.beta) * t.ln(),
            SingularFamily::PureLog => signed_pow(t.ln(), self.k),
        }
    }

    /// Majorant `Z` of the pointwise gradient estimate (`t < 0` is clamped to 0).
    pub fn z(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self.family {
            SingularFamily::PowerLog => {
                let b1 = 1.0 - self.beta;
                if t >= 1.0 {
                    t - 0.5 + 1.0 / (b1 * b1)
                } else if t == 0.0 {
                    0.0
                } else {
                    let p = t.powf(b1);
                    0.5 * t * t + p / (b1 * b1) - p * t.ln() / b1
                }
            }
            SingularFamily::PureLog => {
                let ts = self.t_star;
                if t <= ts {
                    pure_log_z_lower(t, self.k)
                } else {
                    pure_log_z_lower(ts, self.k) + (t - ts) * self.z_prime(ts)
                }
            }
        }
    }

    /// Closed-form `Z'`.
    pub fn z_prime(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self.family {
            SingularFamily::PowerLog => {
                if t >= 1.0 {
                    1.0
                } else if t == 0.0 {
                    f64::INFINITY
                } else {
                    t - t.powf(-self.beta) * t.ln()
                }
            }
            SingularFamily::PureLog => {
                let ts = self.t_star.min(t);
                if ts == 0.0 {
                    return f64::INFINITY;
                }
                2.0 * ts - signed_pow(ts.ln(), self.k)
            }
        }
    }

    /// Tabulated `L_ε` on `[0, upper]` for repeated evaluation inside solvers.
    pub fn l_eps_table(&self, eps: f64, upper: f64) -> Result<AntiderivativeTable> {
        check_args(upper, eps)?;
        let lo = eps.min(1.0) * 2f64.powi(-24);
        let me = *self;
        AntiderivativeTable::build(
            move |s| me.l_eps_raw(s, eps),
            geometric_knots(lo, upper.max(2.0)),
            24,
            1e-14,
            1e-15,
        )
    }
}

fn check_args(t: f64, eps: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {t}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

/// `log(t + ε/(t+ε))`, evaluated as `ln_1p(t(t+ε-1)/(t+ε))` so both zeros
/// (t = 0 and t = 1-ε) are exact.
#[inline]
pub(crate) fn log_shift(t: f64, eps: f64) -> f64 {
    (t * (t + eps - 1.0) / (t + eps)).ln_1p()
}

/// `|x|^{k-2} x`.
#[inline]
fn signed_pow(x: f64, k: u32) -> f64 {
    x.abs().powi(k as i32 - 2) * x
}

/// `t² - ∫_0^t |log s|^{k-2} log s ds` on `[0, 1]`, via the upper incomplete
/// gamma function `Γ(k, -ln t)` for integer `k`.
fn pure_log_z_lower(t: f64, k: u32) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = -t.ln();
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= x / j as f64;
        sum += term;
    }
    let fact: f64 = (1..k).map(|j| j as f64).product();
    t * t + t * fact * sum
}

fn pure_log_branch_point(k: u32) -> Result<f64> {
    let target = (2.0 / (k as f64 - 1.0)).ln();
    let h = |t: f64| (k as f64 - 2.0) * (-t.ln()).ln() - t.ln() - target;
    let h = move |t: f64| if k == 2 { -t.ln() - target } else { h(t) };
    brent_root(h, 1e-200, 1.0 - 1e-15, 1e-15)
        .map_err(|e| Error::RootFinding(format!("Z branch point for k = {k}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn pl() -> SingularParams {
        SingularParams::power_log(0.5, 0.5).unwrap()
    }

    #[test]
    fn l_eps_zeros() {
        assert_eq!(pl().l_eps(0.0, 0.25).unwrap(), 0.0);
        assert_eq!(pl().l_eps(0.75, 0.25).unwrap(), 0.0);
        assert_eq!(pl().l_eps(-3.0, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn l_eps_value_at_one() {
        // -(1/1.1)·log(1 + 0.1/1.1), evaluated in 50-digit arithmetic.
        let v = pl().l_eps(1.0, 0.1).unwrap();
        assert!((v - (-0.079_101_251_808_754_33)).abs() < 1e-15, "{v}");
    }

    #[test]
    fn l_eps_rejects_bad_input() {
        assert!(pl().l_eps(f64::NAN, 0.1).is_err());
        assert!(pl().l_eps(f64::INFINITY, 0.1).is_err());
        assert!(pl().l_eps(0.5, 1.0).is_err());
        assert!(pl().l_eps(0.5, 0.0).is_err());
    }

    #[test]
    fn big_l_matches_linear_variable_quadrature() {
        let p = SingularParams::power_log(0.5, 0.4).unwrap();
        for &(t, eps) in &[(0.5, 0.25), (2.0, 0.1), (1e-3, 1e-5), (17.0, 3e-6), (0.9, 0.1)] {
            let v = p.big_l_eps(t, eps).unwrap();
            let mut br = vec![0.0];
            let mut x = eps * 1e-6;
            while x < t {
                br.push(x);
                x *= 2.0;
            }
            br.push(t);
            let o = integrate_breaks(|s| p.l_eps_raw(s, eps), &br, 1e-14, 0.0, 5000).unwrap();
            assert!((v - o.value).abs() < 1e-12, "t={t} eps={eps}: {v} vs {}", o.value);
        }
        assert_eq!(p.big_l_eps(0.0, 0.3).unwrap(), 0.0);
        assert!(p.big_l_eps(-1.0, 0.3).is_err());
    }

    #[test]
    fn big_l_bound_at_two() {
        let p = pl();
        let v = p.big_l_eps(2.0, 0.1).unwrap();
        // m̃ ≤ 1/(1-β)² = 4 for β = 1/2.
        let bound = 2f64.powf(1.5) / 1.5 + 2f64.powf(0.5) / 0.5 + 4.0;
        assert!(v.abs() <= bound);
        let half = p.big_l_eps(0.5, 0.25).unwrap();
        assert!(half > 0.0 && half < 4.0);
    }

    #[test]
    fn l_limit_values() {
        let p = pl();
        assert_eq!(p.l_limit(1.0), 0.0);
        assert_eq!(p.l_limit(0.0), 0.0);
        assert!((p.l_limit(0.25) - (-2.772_588_722_239_781)).abs() < 1e-14);
        let k3 = SingularParams::pure_log(3).unwrap();
        assert!((k3.l_limit(0.5) - (-(2f64.ln().powi(2)))).abs() < 1e-15);
    }

    #[test]
    fn z_branches_meet() {
        let p = pl();
        assert!((p.z(1.0) - 4.5).abs() < 1e-15);
        assert!((p.z(1.0 - 1e-13) - 4.5).abs() < 1e-12);
        assert!((p.z(4.0) - 7.5).abs() < 1e-15);
        assert_eq!(p.z(0.0), 0.0);
    }

    #[test]
    fn pure_log_k2_branch_point() {
        let p = SingularParams::pure_log(2).unwrap();
        assert!((p.z_branch_point() - 0.5).abs() < 1e-14);
        // 1/4 - (1/2)log(1/2) + 1/2
        assert!((p.z(0.5) - 1.096_573_590_279_972_6).abs() < 1e-14);
    }

    #[test]
    fn pure_log_z_matches_quadrature() {
        for k in 2..=5 {
            let p = SingularParams::pure_log(k).unwrap();
            let ts = p.z_branch_point();
            let g = (-ts.ln()).powi(k as i32 - 2) / ts;
            assert!((g - 2.0 / (k as f64 - 1.0)).abs() < 1e-10, "k={k}");
            for &t in &[0.01, 0.3 * ts, ts] {
                let i = integrate(|s: f64| signed_pow(s.ln(), k), 0.0, t, 1e-14).unwrap();
                assert!((p.z(t) - (t * t - i.value)).abs() < 1e-11, "k={k} t={t}");
            }
        }
        assert!(SingularParams::pure_log(1).is_err());
    }

    #[test]
    fn pure_log_regularization_converges_to_limit() {
        let p = SingularParams::pure_log(3).unwrap();
        for &t in &[0.2, 0.7, 2.5] {
            let e = (-p.l_eps(t, 1e-7).unwrap() - p.l_limit(t)).abs();
            assert!(e < 1e-5, "t={t}: {e}");
        }
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let p = SingularParams::power_log(0.5, 0.4).unwrap();
        for &eps in &[0.1, 0.1 / 64.0] {
            let tab = p.l_eps_table(eps, 80.0).unwrap();
            for &t in &[1e-7, 1e-3, 0.05, 0.5, 1.0 - eps, 1.3, 7.0, 60.0] {
                let d = p.big_l_eps(t, eps).unwrap();
                assert!((tab.eval(t).unwrap() - d).abs() < 2e-12 * (1.0 + d.abs()), "eps={eps} t={t}");
            }
        }
    }
}
