//! Uniform rectangular grids with homogeneous Dirichlet data.
//!
//! Values live on the `nx × ny` interior nodes, row-major (`y` outer,
//! `x` inner); the boundary trace is identically zero and never stored.

mod io;
mod ops;
mod poisson;

pub use io::{read_grd2, write_grd2, GRD2_MAGIC, GRD2_VERSION};
pub use ops::{h1_inner, h1_norm, l2_inner, laplacian_apply, lp_norm, node_grad_sq, psi_ratio_sup, sup_norm, weight_psi};
pub use poisson::{poisson_solve, PoissonSolver};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
}

impl Domain {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::Domain(format!("side lengths must be positive, got {lx} x {ly}")));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::Domain(format!("need at least 3 interior nodes per axis, got {nx} x {ny}")));
        }
        Ok(Self { lx, ly, nx, ny })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(1.0, 1.0, n, n)
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.lx / (self.nx + 1) as f64
    }
    pub fn hy(&self) -> f64 {
        self.ly / (self.ny + 1) as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical coordinates of interior node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        ((i + 1) as f64 * self.hx(), (j + 1) as f64 * self.hy())
    }
}

/// Values on interior nodes with an implicit zero boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dom: Domain,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(dom: Domain) -> Self {
        Self {
            dom,
            values: vec![0.0; dom.len()],
        }
    }

    pub fn from_values(dom: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != dom.len() {
            return Err(Error::Domain(format!(
                "expected {} values, got {}",
                dom.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite grid value {v}")));
        }
        Ok(Self { dom, values })
    }

    /// Samples `f(x, y)` at every interior node.
    pub fn from_fn(dom: Domain, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(dom.len());
        for j in 0..dom.ny {
            for i in 0..dom.nx {
                let (x, y) = dom.node(i, j);
                values.push(f(x, y));
            }
        }
        Self { dom, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.dom
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.dom.nx + i]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dom: self.dom,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &GridFunction) {
        debug_assert_eq!(self.dom, other.dom);
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, b: f64, other: &GridFunction) -> Self {
        debug_assert_eq!(self.dom, other.dom);
        Self {
            dom: self.dom,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.lin_comb(1.0, -1.0, other)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
