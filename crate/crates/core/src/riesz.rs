//! The nonlocal operator `(K g)(x) = ∫ g(y) |x-y|^{-μ} dy` on a grid.
//!
//! Off-diagonal weights are midpoint values times the cell area; the
//! singular self-cell carries the exact cell integral of `|ζ|^{-μ}`,
//! computed in polar coordinates.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, Domain, GridFunction};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    Direct,
    #[default]
    Fft,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Backend::Direct),
            "fft" => Ok(Backend::Fft),
            other => Err(Error::Domain(format!("unknown backend `{other}` (expected direct|fft)"))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Direct => "direct",
            Backend::Fft => "fft",
        })
    }
}

/// Precomputed kernel weights and their padded spectrum.
#[derive(Clone)]
pub struct RieszKernel {
    mu: f64,
    dom: Domain,
    /// `(2nx-1) × (2ny-1)` weights, offset `(di, dj)` at `(dj+ny-1)(2nx-1) + di+nx-1`.
    table: Vec<f64>,
    px: usize,
    py: usize,
    spectrum: Vec<Complex64>,
    plans: Arc<FftPlans>,
}

struct FftPlans {
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RieszKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RieszKernel")
            .field("mu", &self.mu)
            .field("dom", &self.dom)
            .field("padded", &(self.px, self.py))
            .finish()
    }
}

/// `∫∫ |ζ|^{-μ}` over the rectangle `[-hx/2, hx/2] × [-hy/2, hy/2]`, by
/// integrating the radial part exactly over the four quadrants' two
/// triangles and the angular part adaptively.
pub fn singular_cell_weight(hx: f64, hy: f64, mu: f64) -> Result<f64> {
    let (a, b) = (0.5 * hx, 0.5 * hy);
    let p = 2.0 - mu;
    let tri = |side: f64, opening: f64| -> Result<f64> {
        let r = integrate(|th: f64| (side / th.cos()).powf(p) / p, 0.0, opening, 0.0)
            .or_else(|_| integrate(|th: f64| (side / th.cos()).powf(p) / p, 0.0, opening, 1e-16))?;
        Ok(r.value)
    };
    let t1 = tri(a, (b / a).atan())?;
    let t2 = tri(b, (a / b).atan())?;
    Ok(4.0 * (t1 + t2))
}

impl RieszKernel {
    pub fn build(dom: Domain, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::Domain(format!("mu must lie in (0,1), got {mu}")));
        }
        let (nx, ny) = (dom.nx(), dom.ny());
        let (hx, hy) = (dom.hx(), dom.hy());
        let area = dom.cell_area();
        let (wx, wy) = (2 * nx - 1, 2 * ny - 1);
        let mut table = vec![0.0; wx * wy];
        for dj in 0..wy {
            let y = (dj as f64 - (ny - 1) as f64) * hy;
            for di in 0..wx {
                let x = (di as f64 - (nx - 1) as f64) * hx;
                let r2 = x * x + y * y;
                table[dj * wx + di] = if r2 == 0.0 {
                    0.0
                } else {
                    r2.powf(-0.5 * mu) * area
                };
            }
        }
        table[(ny - 1) * wx + nx - 1] = singular_cell_weight(hx, hy, mu)?;

        let (px, py) = (2 * nx, 2 * ny);
        let mut planner = FftPlanner::new();
        let plans = Arc::new(FftPlans {
            fx: planner.plan_fft_forward(px),
            fy: planner.plan_fft_forward(py),
            ix: planner.plan_fft_inverse(px),
            iy: planner.plan_fft_inverse(py),
        });
        let mut spectrum = vec![Complex64::new(0.0, 0.0); px * py];
        for dj in 0..wy {
            let oy = dj as isize - (ny - 1) as isize;
            let row = oy.rem_euclid(py as isize) as usize;
            for di in 0..wx {
                let ox = di as isize - (nx - 1) as isize;
                let col = ox.rem_euclid(px as isize) as usize;
                spectrum[row * px + col] = Complex64::new(table[dj * wx + di], 0.0);
            }
        }
        fft2(&mut spectrum, px, py, &plans.fx, &plans.fy);
        Ok(Self {
            mu,
            dom,
            table,
            px,
            py,
            spectrum,
            plans,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn domain(&self) -> &Domain {
        &self.dom
    }

    /// Weight for node offset `(di, dj)`.
    pub fn weight(&self, di: isize, dj: isize) -> f64 {
        let (nx, ny) = (self.dom.nx() as isize, self.dom.ny() as isize);
        assert!(di.abs() < nx && dj.abs() < ny);
        let wx = 2 * nx - 1;
        self.table[((dj + ny - 1) * wx + di + nx - 1) as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.table
    }

    pub fn apply(&self, g: &GridFunction, backend: Backend) -> GridFunction {
        match backend {
            Backend::Direct => self.apply_direct(g),
            Backend::Fft => self.apply_fft(g),
        }
    }

    /// Reference `O(N²)` double loop.
    pub fn apply_direct(&self, g: &GridFunction) -> GridFunction {
        assert_eq!(g.domain(), &self.dom);
        let (nx, ny) = (self.dom.nx(), self.dom.ny());
        let wx = 2 * nx - 1;
        let gv = g.values();
        let mut out = vec![0.0; gv.len()];
        for j in 0..ny {
            for i in 0..nx {
                let mut acc = 0.0;
                for l in 0..ny {
                    let row = &self.table[(j + ny - 1 - l) * wx..];
                    let gl = &gv[l * nx..(l + 1) * nx];
                    for (k, gk) in gl.iter().enumerate() {
                        acc += row[i + nx - 1 - k] * gk;
                    }
                }
                out[j * nx + i] = acc;
            }
        }
        GridFunction::from_values(self.dom, out).expect("finite input gives finite output")
    }

    /// Zero-padded linear convolution through a `2nx × 2ny` FFT.
    pub fn apply_fft(&self, g: &GridFunction) -> GridFunction {
        assert_eq!(g.domain(), &self.dom);
        let (nx, ny, px, py) = (self.dom.nx(), self.dom.ny(), self.px, self.py);
        let mut buf = vec![Complex64::new(0.0, 0.0); px * py];
        for j in 0..ny {
            for i in 0..nx {
                buf[j * px + i] = Complex64::new(g.values()[j * nx + i], 0.0);
            }
        }
        fft2(&mut buf, px, py, &self.plans.fx, &self.plans.fy);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        fft2(&mut buf, px, py, &self.plans.ix, &self.plans.iy);
        let scale = 1.0 / (px * py) as f64;
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(buf[j * px + i].re * scale);
            }
        }
        GridFunction::from_values(self.dom, out).expect("finite input gives finite output")
    }

    /// `max_i (Σ_j (w_ij / A)^r A)^{1/r}`: the discrete Hölder constant with
    /// `sup|K g| <= C · |g|_{r'}`.
    pub fn holder_sup_constant(&self, r: f64) -> f64 {
        let (nx, ny) = (self.dom.nx(), self.dom.ny());
        let area = self.dom.cell_area();
        let wx = 2 * nx - 1;
        let mut best: f64 = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let mut s = 0.0;
                for l in 0..ny {
                    for k in 0..nx {
                        let w = self.table[(j + ny - 1 - l) * wx + i + nx - 1 - k];
                        s += (w / area).powf(r) * area;
                    }
                }
                best = best.max(s.powf(1.0 / r));
            }
        }
        best
    }

    /// `∬ f(x) g(y) |x-y|^{-μ} / (|f|_r |g|_r)` with `r = 4/(4-μ)`, direct backend.
    pub fn hls_quotient(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        let r = 4.0 / (4.0 - self.mu);
        let den = lp_norm(f, r) * lp_norm(g, r);
        if den == 0.0 {
            return Err(Error::Domain("HLS quotient of a zero function".into()));
        }
        let kg = self.apply_direct(g);
        let num = crate::grid::l2_inner(f, &kg);
        Ok(num / den)
    }
}

/// Builds the kernel and evaluates the HLS quotient.
pub fn hls_quotient(f: &GridFunction, g: &GridFunction, mu: f64) -> Result<f64> {
    RieszKernel::build(*f.domain(), mu)?.hls_quotient(f, g)
}

fn fft2(buf: &mut [Complex64], px: usize, py: usize, fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
    for row in buf.chunks_mut(px) {
        fx.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            col[j] = buf[j * px + i];
        }
        fy.process(&mut col);
        for j in 0..py {
            buf[j * px + i] = col[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{l2_inner, sup_norm};
    use crate::quadrature::gauss_legendre;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(d: Domain, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::from_fn(d, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Duffy-type substitution `y = x v b/a` on each triangle, radial part
    /// exact, `v` integral by 60-point Gauss-Legendre.
    fn duffy_cell(hx: f64, hy: f64, mu: f64) -> f64 {
        let (xg, wg) = gauss_legendre(60);
        let tri = |a: f64, b: f64| {
            let radial = a.powf(2.0 - mu) / (2.0 - mu) * (b / a);
            let ang: f64 = xg
                .iter()
                .zip(&wg)
                .map(|(x, w)| {
                    let v = 0.5 * (x + 1.0);
                    0.5 * w * (1.0 + (v * b / a).powi(2)).powf(-0.5 * mu)
                })
                .sum();
            radial * ang
        };
        let (a, b) = (0.5 * hx, 0.5 * hy);
        4.0 * (tri(a, b) + tri(b, a))
    }

    #[test]
    fn singular_cell_two_schemes_agree() {
        for &(hx, hy, mu) in &[(1.0, 1.0, 0.5), (0.1, 0.03, 0.25), (1.0 / 65.0, 1.0 / 65.0, 0.75)] {
            let a = singular_cell_weight(hx, hy, mu).unwrap();
            let b = duffy_cell(hx, hy, mu);
            assert!((a - b).abs() <= 1e-9 * b, "{a} {b}");
        }
        // μ → 0 recovers the cell area.
        let a = singular_cell_weight(0.2, 0.5, 1e-12).unwrap();
        assert!((a - 0.1).abs() < 1e-12);
    }

    #[test]
    fn singular_cell_scales_like_h_to_two_minus_mu() {
        let a = singular_cell_weight(1.0, 1.0, 0.5).unwrap();
        let b = singular_cell_weight(0.01, 0.01, 0.5).unwrap();
        assert!((b / a - 0.01f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn weights_positive_and_even() {
        let d = Domain::new(1.0, 2.0, 7, 5).unwrap();
        let k = RieszKernel::build(d, 0.4).unwrap();
        assert!(k.weights().iter().all(|w| *w > 0.0 && w.is_finite()));
        for dj in -4..=4 {
            for di in -6..=6 {
                assert_eq!(k.weight(di, dj), k.weight(-di, -dj));
            }
        }
        assert!(RieszKernel::build(d, 1.0).is_err());
        assert!(RieszKernel::build(d, 0.0).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let d = Domain::unit_square(6).unwrap();
        let k = RieszKernel::build(d, 0.5).unwrap();
        let z = GridFunction::zeros(d);
        assert_eq!(sup_norm(&k.apply_direct(&z)), 0.0);
        assert_eq!(sup_norm(&k.apply_fft(&z)), 0.0);
    }

    #[test]
    fn fft_matches_direct() {
        let d = Domain::new(1.0, 1.5, 20, 27).unwrap();
        let k = RieszKernel::build(d, 0.6).unwrap();
        let g = random(d, 5);
        let a = k.apply_direct(&g);
        let b = k.apply_fft(&g);
        assert!(sup_norm(&a.sub(&b)) <= 1e-10 * sup_norm(&a));
    }

    #[test]
    fn self_adjoint_and_positive_semidefinite() {
        let d = Domain::unit_square(16).unwrap();
        let k = RieszKernel::build(d, 0.5).unwrap();
        for s in 0..5 {
            let (f, g) = (random(d, 2 * s), random(d, 2 * s + 1));
            let a = l2_inner(&k.apply_direct(&f), &g);
            let b = l2_inner(&f, &k.apply_direct(&g));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            assert!(l2_inner(&k.apply_fft(&f), &f) >= 0.0);
        }
    }

    #[test]
    fn constant_density_peaks_at_center() {
        let d = Domain::unit_square(32).unwrap();
        let k = RieszKernel::build(d, 0.5).unwrap();
        let one = GridFunction::from_fn(d, |_, _| 1.0);
        let v = k.apply_fft(&one);
        assert!(v.at(16, 16) > v.at(0, 0) && v.at(0, 0) > 0.0);
    }

    #[test]
    fn hls_quotient_is_scale_invariant() {
        let d = Domain::unit_square(12).unwrap();
        let f = GridFunction::from_fn(d, |x, y| (-(x - 0.4).powi(2) * 20.0 - (y - 0.5).powi(2) * 30.0).exp());
        let g = GridFunction::from_fn(d, |x, y| x * y);
        let q = hls_quotient(&f, &g, 0.5).unwrap();
        assert!(q > 0.0);
        let q2 = hls_quotient(&f.scaled(7.5), &g, 0.5).unwrap();
        assert!((q - q2).abs() <= 1e-12 * q);
        assert!(hls_quotient(&GridFunction::zeros(d), &g, 0.5).is_err());
    }

    #[test]
    fn holder_bound_dominates_sup() {
        let d = Domain::unit_square(10).unwrap();
        let k = RieszKernel::build(d, 0.5).unwrap();
        let r = 1.5;
        let c = k.holder_sup_constant(r);
        let conj = r / (r - 1.0);
        for s in 0..10 {
            let g = random(d, 100 + s);
            assert!(sup_norm(&k.apply_direct(&g)) <= c * lp_norm(&g, conj) * (1.0 + 1e-12));
        }
    }
}
