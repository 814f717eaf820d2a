//! Fast diagonalization of the five-point Dirichlet Laplacian in the
//! discrete sine basis.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Domain, GridFunction};

/// DST-I of length `n` through a complex FFT of length `2(n+1)`.
struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    fn new(n: usize, planner: &mut FftPlanner<f64>) -> Self {
        Self {
            n,
            fft: planner.plan_fft_forward(2 * (n + 1)),
        }
    }

    /// Unnormalized `X_m = Σ_k x_k sin(π k m / (n+1))`, `k, m = 1..n`.
    fn apply(&self, data: &mut [f64], buf: &mut [Complex64]) {
        let n = self.n;
        let m = 2 * (n + 1);
        buf[0] = Complex64::new(0.0, 0.0);
        buf[n + 1] = Complex64::new(0.0, 0.0);
        for k in 0..n {
            buf[k + 1] = Complex64::new(data[k], 0.0);
            buf[m - 1 - k] = Complex64::new(-data[k], 0.0);
        }
        self.fft.process(buf);
        for k in 0..n {
            data[k] = -0.5 * buf[k + 1].im;
        }
    }
}

/// Reusable solver for `-Δ_h u = rhs` on a fixed domain.
pub struct PoissonSolver {
    dom: Domain,
    dst_x: Dst1,
    dst_y: Dst1,
    eig: Vec<f64>,
}

impl std::fmt::Debug for PoissonSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonSolver").field("dom", &self.dom).finish()
    }
}

impl PoissonSolver {
    pub fn new(dom: Domain) -> Self {
        let mut planner = FftPlanner::new();
        let (nx, ny) = (dom.nx(), dom.ny());
        let (hx, hy) = (dom.hx(), dom.hy());
        let mut eig = Vec::with_capacity(nx * ny);
        for l in 1..=ny {
            let ey = 4.0 / (hy * hy) * (l as f64 * PI / (2.0 * (ny + 1) as f64)).sin().powi(2);
            for m in 1..=nx {
                let ex = 4.0 / (hx * hx) * (m as f64 * PI / (2.0 * (nx + 1) as f64)).sin().powi(2);
                eig.push(ex + ey);
            }
        }
        Self {
            dom,
            dst_x: Dst1::new(nx, &mut planner),
            dst_y: Dst1::new(ny, &mut planner),
            eig,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.dom
    }

    fn transform(&self, v: &mut [f64]) {
        let (nx, ny) = (self.dom.nx(), self.dom.ny());
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * (nx.max(ny) + 1)];
        for row in v.chunks_mut(nx) {
            self.dst_x.apply(row, &mut buf[..2 * (nx + 1)]);
        }
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = v[j * nx + i];
            }
            self.dst_y.apply(&mut col, &mut buf[..2 * (ny + 1)]);
            for j in 0..ny {
                v[j * nx + i] = col[j];
            }
        }
    }

    pub fn solve(&self, rhs: &GridFunction) -> GridFunction {
        assert_eq!(rhs.domain(), &self.dom, "domain mismatch in Poisson solve");
        let mut v = rhs.values().to_vec();
        self.transform(&mut v);
        let scale = 4.0 / (((self.dom.nx() + 1) * (self.dom.ny() + 1)) as f64);
        for (x, e) in v.iter_mut().zip(&self.eig) {
            *x *= scale / e;
        }
        self.transform(&mut v);
        GridFunction {
            dom: self.dom,
            values: v,
        }
    }
}

/// One-shot `(-Δ_h)^{-1} rhs`.
pub fn poisson_solve(rhs: &GridFunction) -> GridFunction {
    PoissonSolver::new(*rhs.domain()).solve(rhs)
}
