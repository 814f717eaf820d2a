//! Piecewise Chebyshev interpolants of antiderivatives.

use crate::error::Result;
use crate::quadrature::integrate_breaks;

/// Immutable piecewise Chebyshev table of `G(t) = ∫_0^t g`.
#[derive(Debug, Clone)]
pub struct AntiderivativeTable {
    knots: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    /// `G` at each knot.
    knot_values: Vec<f64>,
}

impl AntiderivativeTable {
    /// Tabulates the antiderivative of `g` on the given increasing knots
    /// (the first knot must be 0). Every node value is an adaptive GK21
    /// integral with tolerance `max(abs_tol, rel_tol * |value|)`.
    pub fn build<G: Fn(f64) -> f64>(
        g: G,
        knots: Vec<f64>,
        nodes_per_piece: usize,
        abs_tol: f64,
        rel_tol: f64,
    ) -> Result<Self> {
        let n = nodes_per_piece;
        let mut coeffs = Vec::with_capacity(knots.len() - 1);
        let mut knot_values = Vec::with_capacity(knots.len());
        let mut offset = 0.0;
        knot_values.push(0.0);
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            // cos is decreasing in j, so reverse to get ascending nodes.
            let mut xs: Vec<f64> = (0..n)
                .map(|j| c + h * (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos())
                .collect();
            xs.reverse();
            let mut vals = vec![0.0; n];
            let mut acc = offset;
            let mut prev = a;
            for (j, &x) in xs.iter().enumerate() {
                let part = integrate_breaks(&g, &[prev, x], abs_tol * 1e-2, rel_tol, 200)?;
                acc += part.value;
                vals[n - 1 - j] = acc;
                prev = x;
            }
            let tail = integrate_breaks(&g, &[prev, b], abs_tol * 1e-2, rel_tol, 200)?;
            offset = acc + tail.value;
            knot_values.push(offset);

            let mut cs = vec![0.0; n];
            for (k, ck) in cs.iter_mut().enumerate() {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos()
                    })
                    .sum();
                *ck = 2.0 * s / n as f64;
            }
            cs[0] *= 0.5;
            coeffs.push(cs);
        }
        Ok(Self {
            knots,
            coeffs,
            knot_values,
        })
    }

    pub fn upper(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn value_at_upper(&self) -> f64 {
        *self.knot_values.last().unwrap()
    }

    /// Interpolated value, or `None` outside `[0, upper]`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !(t >= 0.0 && t <= self.upper()) {
            return None;
        }
        let idx = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            i => (i - 1).min(self.coeffs.len() - 1),
        };
        let (a, b) = (self.knots[idx], self.knots[idx + 1]);
        let y = (2.0 * t - a - b) / (b - a);
        let cs = &self.coeffs[idx];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in cs.iter().skip(1).rev() {
            let b0 = 2.0 * y * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        Some(y * b1 - b2 + cs[0])
    }
}

/// Knots `0, lo, 2lo, 4lo, ...` doubling until `hi` is covered.
pub fn geometric_knots(lo: f64, hi: f64) -> Vec<f64> {
    let mut k = vec![0.0, lo];
    let mut x = lo;
    while x < hi {
        x *= 2.0;
        k.push(x);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_cosine_antiderivative_matches_sine() {
        let tab = AntiderivativeTable::build(f64::cos, geometric_knots(1.0 / 64.0, 8.0), 20, 1e-14, 0.0)
            .unwrap();
        for i in 0..=400 {
            let t = 8.0 * i as f64 / 400.0;
            assert!((tab.eval(t).unwrap() - t.sin()).abs() < 1e-13, "t = {t}");
        }
        assert!(tab.eval(-1.0).is_none());
        assert!(tab.eval(tab.upper() * 1.001).is_none());
    }

    #[test]
    fn power_singularity_at_origin_is_resolved_by_grading() {
        let tab = AntiderivativeTable::build(|s: f64| s.powf(0.4), geometric_knots(1e-9, 2.0), 20, 1e-15, 0.0)
            .unwrap();
        for &t in &[1e-8f64, 1e-4, 0.3, 1.0, 1.7] {
            let exact = t.powf(1.4) / 1.4;
            assert!((tab.eval(t).unwrap() - exact).abs() < 1e-13, "t = {t}");
        }
    }
}
