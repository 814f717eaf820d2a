//! The exponential-subcritical nonlinearity `f(t) = t^{r0} exp(t^s)` and its
//! primitive `F`.

use std::sync::Arc;

use crate::chebyshev::AntiderivativeTable;
use crate::error::{Error, Result};
use crate::quadrature::integrate_breaks;

/// Largest admissible `t^s` before `exp` is considered saturated.
pub const EXP_GUARD: f64 = 700.0;

/// Upper end of the tabulated range of `F`; quadrature takes over beyond it.
const F_TABLE_MAX: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct NonlinearityModel {
    r0: f64,
    s: f64,
    table: Arc<AntiderivativeTable>,
}

impl PartialEq for NonlinearityModel {
    fn eq(&self, other: &Self) -> bool {
        self.r0 == other.r0 && self.s == other.s
    }
}

impl NonlinearityModel {
    pub fn new(r0: f64, s: f64) -> Result<Self> {
        if !(r0 > 1.0 && r0 < 2.0) {
            return Err(Error::Domain(format!("r0 must lie in (1,2), got {r0}")));
        }
        if !(s > 1.0 && s < 2.0) {
            return Err(Error::Domain(format!("s must lie in (1,2), got {s}")));
        }
        let mut knots = vec![0.0];
        let mut x = 2f64.powi(-30);
        while x < 1.0 {
            knots.push(x);
            x *= 2.0;
        }
        let mut k = 1.0;
        while k <= F_TABLE_MAX {
            knots.push(k);
            k += 0.25;
        }
        let table = AntiderivativeTable::build(move |t| f_raw(t, r0, s), knots, 24, 1e-15, 1e-15)?;
        Ok(Self {
            r0,
            s,
            table: Arc::new(table),
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    /// Exponent `γ0 = s - 1` of the super-polynomial growth hypothesis.
    pub fn gamma0(&self) -> f64 {
        self.s - 1.0
    }
    /// Exponent of the monotonicity hypothesis: `f(t)/t^{r0}` is increasing.
    pub fn l_mono(&self) -> f64 {
        self.r0
    }

    /// Largest `t` accepted by the exponential guard.
    pub fn t_saturation(&self) -> f64 {
        EXP_GUARD.powf(1.0 / self.s)
    }

    fn guard(&self, t: f64) -> Result<()> {
        if t.is_nan() {
            return Err(Error::Domain("NaN argument".into()));
        }
        if t > 0.0 {
            let ts = t.powf(self.s);
            if ts > EXP_GUARD {
                return Err(Error::Saturated {
                    t,
                    ts,
                    limit: EXP_GUARD,
                });
            }
        }
        Ok(())
    }

    pub fn f(&self, t: f64) -> Result<f64> {
        self.guard(t)?;
        Ok(f_raw(t, self.r0, self.s))
    }

    pub fn f_prime(&self, t: f64) -> Result<f64> {
        self.guard(t)?;
        if t <= 0.0 {
            return Ok(0.0);
        }
        let ts = t.powf(self.s);
        Ok(t.powf(self.r0 - 1.0) * ts.exp() * (self.r0 + self.s * ts))
    }

    /// `F(t) = ∫_0^t f`, zero for `t <= 0`.
    pub fn big_f(&self, t: f64) -> Result<f64> {
        self.guard(t)?;
        Ok(self.big_f_unguarded(t))
    }

    /// `F` for arguments already known to pass the guard.
    pub(crate) fn big_f_unguarded(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let Some(v) = self.table.eval(t) {
            return v;
        }
        let (r0, s) = (self.r0, self.s);
        let a = self.table.upper();
        let n = ((t - a) / 0.25).ceil().max(1.0) as usize;
        let br: Vec<f64> = (0..=n).map(|i| a + (t - a) * i as f64 / n as f64).collect();
        let tail = integrate_breaks(|x| f_raw(x, r0, s), &br, 0.0, 1e-14, 4000)
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY);
        self.table.value_at_upper() + tail
    }

    #[inline]
    pub(crate) fn f_unguarded(&self, t: f64) -> f64 {
        f_raw(t, self.r0, self.s)
    }

    /// Empirical constants of the growth hypotheses on a reference grid.
    pub fn hypothesis_report(&self) -> HypothesisReport {
        let t_big = 1.0;
        let grid: Vec<f64> = (0..=2000).map(|i| t_big + (20.0 - t_big) * i as f64 / 2000.0).collect();
        let g0 = self.gamma0();
        let mut t0_const: f64 = 0.0;
        let mut a_const = f64::INFINITY;
        let gamma = 2.0;
        for &t in &grid {
            let ff = self.big_f_unguarded(t);
            t0_const = t0_const.max(t.powf(g0) * ff / self.f_unguarded(t));
            a_const = a_const.min(ff / t.powf(gamma));
        }
        let mut monotone = true;
        let mut prev = 0.0;
        for i in 1..=4000 {
            let t = 20.0 * i as f64 / 4000.0;
            let v = self.f_unguarded(t) / t.powf(self.r0);
            monotone &= v >= prev;
            prev = v;
        }
        HypothesisReport {
            gamma0: g0,
            t_big,
            t0_const: t0_const * 1.01,
            growth_a: a_const / 1.01,
            growth_t0: t_big,
            growth_gamma: gamma,
            f4_monotone: monotone,
            f0: self.f_unguarded(0.0),
            fprime0: self.f_prime(0.0).unwrap_or(f64::NAN),
        }
    }
}

#[inline]
fn f_raw(t: f64, r0: f64, s: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.powf(r0) * t.powf(s).exp()
    }
}

/// Constants of the growth hypotheses, estimated on `[T, 20]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub gamma0: f64,
    /// `T`: threshold above which `t^{γ0} F(t) <= T0 f(t)` is checked.
    pub t_big: f64,
    /// `T0`, sup ratio times 1.01.
    pub t0_const: f64,
    /// `A, t0, γ` with `F(t) >= A t^γ` for `t >= t0`.
    pub growth_a: f64,
    pub growth_t0: f64,
    pub growth_gamma: f64,
    pub f4_monotone: bool,
    pub f0: f64,
    pub fprime0: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> NonlinearityModel {
        NonlinearityModel::new(1.5, 1.5).unwrap()
    }

    /// Positive power series `F(t) = Σ t^{r0+1+ks} / (k! (r0+1+ks))`.
    fn series_f(t: f64, r0: f64, s: f64) -> f64 {
        let ts = t.powf(s);
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..2000 {
            if k > 0 {
                term *= ts / k as f64;
            }
            let add = term / (r0 + 1.0 + k as f64 * s);
            sum += add;
            if k as f64 > 2.0 * ts && add < 1e-18 * sum {
                break;
            }
        }
        sum * t.powf(r0 + 1.0)
    }

    #[test]
    fn vanishes_with_derivative_at_origin() {
        let m = model();
        assert_eq!(m.f(0.0).unwrap(), 0.0);
        assert_eq!(m.f_prime(0.0).unwrap(), 0.0);
        assert_eq!(m.big_f(0.0).unwrap(), 0.0);
        assert_eq!(m.f(-2.0).unwrap(), 0.0);
        assert_eq!(m.big_f(-2.0).unwrap(), 0.0);
    }

    #[test]
    fn f_at_one_is_e() {
        assert!((model().f(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn big_f_at_one() {
        // 50-digit quadrature; also the positive series below.
        let v = model().big_f(1.0).unwrap();
        assert!((v - 0.770_591_844_161_155_6).abs() < 1e-13, "{v}");
        assert!((series_f(1.0, 1.5, 1.5) - 0.770_591_844_161_155_6).abs() < 1e-14);
    }

    #[test]
    fn big_f_matches_series_over_range() {
        for &(r0, s) in &[(1.5, 1.5), (1.2, 1.9), (1.9, 1.1)] {
            let m = NonlinearityModel::new(r0, s).unwrap();
            for &t in &[1e-6, 0.01, 0.3, 1.0, 2.7, 9.9, 15.9, 18.0, 25.0] {
                let exact = series_f(t, r0, s);
                let v = m.big_f(t).unwrap();
                assert!((v - exact).abs() <= 1e-12 * exact.max(1.0), "r0={r0} s={s} t={t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn saturation_guard() {
        let m = model();
        let t = m.t_saturation() * 1.0001;
        assert!(matches!(m.f(t), Err(Error::Saturated { .. })));
        assert!(matches!(m.big_f(t), Err(Error::Saturated { .. })));
        assert!(m.f(m.t_saturation() * 0.999).unwrap().is_finite());
    }

    #[test]
    fn rejects_out_of_range_exponents() {
        assert!(NonlinearityModel::new(2.0, 1.5).is_err());
        assert!(NonlinearityModel::new(1.5, 1.0).is_err());
    }

    #[test]
    fn derivative_of_big_f_is_f() {
        let m = model();
        for i in 1..200 {
            let t = 10.0 * i as f64 / 200.0;
            let h = 2e-6 * t.max(1.0);
            let d = (m.big_f(t + h).unwrap() - m.big_f(t - h).unwrap()) / (2.0 * h);
            let f = m.f(t).unwrap();
            assert!((d - f).abs() <= 1e-8 * f.max(1.0), "t={t} d={d} f={f} rel={}", (d - f).abs() / f);
        }
    }

    #[test]
    fn hypotheses_hold_on_reference_grid() {
        let r = model().hypothesis_report();
        assert!(r.f4_monotone);
        assert!(r.t0_const.is_finite() && r.t0_const > 0.0);
        assert!(r.growth_a > 0.0 && r.growth_gamma > 1.0);
        assert_eq!(r.f0, 0.0);
        assert_eq!(r.fprime0, 0.0);
    }
}
