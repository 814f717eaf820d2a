//! Discrete energy, its H¹₀ gradient and the strong-form residual.
//!
//! ```text
//! J(u) = ½|u|²_{H¹} + Σ L_ε(u) A − (λ/2) ⟨K[F(u)], F(u)⟩
//! ```
//!
//! Nonlinear terms are collocated at the nodes.

use std::sync::Arc;

use crate::chebyshev::AntiderivativeTable;
use crate::error::{Error, Result};
use crate::grid::{h1_inner, h1_norm, l2_inner, laplacian_apply, Domain, GridFunction, PoissonSolver};
use crate::quadrature::gauss_legendre;
use crate::riesz::{Backend, RieszKernel};
use crate::scalar::{NonlinearityModel, SingularParams};

/// Upper bound (exclusive) on the regularization parameter.
pub const EPS_MAX: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub lambda: f64,
    pub mu: f64,
    pub eps: f64,
    pub singular: SingularParams,
    pub model: NonlinearityModel,
    pub dom: Domain,
    pub backend: Backend,
}

impl ProblemConfig {
    /// Unit square, 64×64, β=0.5, q=0.4, r0=s=1.5, μ=0.5, λ=1, ε=0.1.
    pub fn reference() -> Self {
        Self {
            lambda: 1.0,
            mu: 0.5,
            eps: 0.1,
            singular: SingularParams::power_log(0.5, 0.4).expect("valid reference parameters"),
            model: NonlinearityModel::new(1.5, 1.5).expect("valid reference parameters"),
            dom: Domain::unit_square(64).expect("valid reference grid"),
            backend: Backend::Fft,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::Domain(format!("mu must lie in (0,1), got {}", self.mu)));
        }
        if !(self.eps > 0.0 && self.eps < EPS_MAX) {
            return Err(Error::Domain(format!("eps must satisfy 0 < eps < 1/3, got {}", self.eps)));
        }
        Ok(())
    }
}

/// Energy and gradient at one point, sharing the nonlocal potential.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub energy: f64,
    pub gradient: GridFunction,
    pub grad_norm: f64,
}

/// A configured problem with its precomputed operators.
#[derive(Clone)]
pub struct Problem {
    cfg: ProblemConfig,
    kernel: Arc<RieszKernel>,
    l_table: Arc<AntiderivativeTable>,
    poisson: Arc<PoissonSolver>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem").field("cfg", &self.cfg).finish()
    }
}

impl Problem {
    pub fn new(cfg: ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let kernel = Arc::new(RieszKernel::build(cfg.dom, cfg.mu)?);
        let l_table = Arc::new(cfg.singular.l_eps_table(cfg.eps, cfg.model.t_saturation())?);
        let poisson = Arc::new(PoissonSolver::new(cfg.dom));
        Ok(Self {
            cfg,
            kernel,
            l_table,
            poisson,
        })
    }

    /// Same grid, kernel and Poisson solver at a different ε.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let cfg = ProblemConfig { eps, ..self.cfg.clone() };
        cfg.validate()?;
        let l_table = Arc::new(cfg.singular.l_eps_table(eps, cfg.model.t_saturation())?);
        Ok(Self {
            cfg,
            kernel: Arc::clone(&self.kernel),
            l_table,
            poisson: Arc::clone(&self.poisson),
        })
    }

    /// Same operators with a different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let cfg = ProblemConfig { lambda, ..self.cfg.clone() };
        cfg.validate()?;
        Ok(Self { cfg, ..self.clone() })
    }

    pub fn with_backend(&self, backend: Backend) -> Self {
        Self {
            cfg: ProblemConfig { backend, ..self.cfg.clone() },
            ..self.clone()
        }
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }
    pub fn domain(&self) -> &Domain {
        &self.cfg.dom
    }
    pub fn kernel(&self) -> &RieszKernel {
        &self.kernel
    }
    pub fn poisson(&self) -> &PoissonSolver {
        &self.poisson
    }

    fn check_range(&self, u: &GridFunction) -> Result<()> {
        assert_eq!(u.domain(), &self.cfg.dom, "grid function lives on another domain");
        let t = u.max();
        if t.is_nan() || !u.is_finite() {
            return Err(Error::Domain("non-finite iterate".into()));
        }
        if t > 0.0 {
            // Single guard check on the largest value covers the whole grid.
            self.cfg.model.f(t)?;
        }
        Ok(())
    }

    /// `L_ε(t)`, zero for `t <= 0`.
    pub fn big_l(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self.l_table.eval(t) {
            Some(v) => Ok(v),
            None => self.cfg.singular.big_l_eps(t, self.cfg.eps),
        }
    }

    fn big_f(&self, u: &GridFunction) -> GridFunction {
        u.map(|t| self.cfg.model.big_f_unguarded(t))
    }

    fn potential(&self, fu: &GridFunction) -> GridFunction {
        self.kernel.apply(fu, self.cfg.backend)
    }

    /// `⟨K[F(u)], F(u)⟩`.
    pub fn choquard_double(&self, u: &GridFunction) -> Result<f64> {
        self.check_range(u)?;
        let fu = self.big_f(u);
        Ok(l2_inner(&self.potential(&fu), &fu).max(0.0))
    }

    fn absorption(&self, u: &GridFunction) -> Result<f64> {
        let mut s = 0.0;
        for &t in u.values() {
            s += self.big_l(t)?;
        }
        Ok(s * self.cfg.dom.cell_area())
    }

    pub fn energy(&self, u: &GridFunction) -> Result<f64> {
        self.check_range(u)?;
        let fu = self.big_f(u);
        let dbl = l2_inner(&self.potential(&fu), &fu);
        Ok(0.5 * h1_inner(u, u) + self.absorption(u)? - 0.5 * self.cfg.lambda * dbl)
    }

    /// Nodal `l_ε(u) − λ K[F(u)] f(u)`, plus the Choquard double integral.
    fn lower_order(&self, u: &GridFunction) -> (GridFunction, f64) {
        let (eps, lambda) = (self.cfg.eps, self.cfg.lambda);
        let fu = self.big_f(u);
        let pot = self.potential(&fu);
        let dbl = l2_inner(&pot, &fu);
        let vals = u
            .values()
            .iter()
            .zip(pot.values())
            .map(|(&t, &p)| self.cfg.singular.l_eps_raw(t, eps) - lambda * p * self.cfg.model.f_unguarded(t))
            .collect();
        (GridFunction::from_values(*u.domain(), vals).expect("finite within the guard"), dbl)
    }

    pub fn h1_gradient(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_range(u)?;
        let (rhs, _) = self.lower_order(u);
        let mut g = self.poisson.solve(&rhs);
        g.axpy(1.0, u);
        Ok(g)
    }

    /// `J(w) − J(u)` without cancellation against the size of `J`: each
    /// term is differenced before summation, and short nodal increments
    /// of `L_ε` and `F` are integrated directly.
    pub fn energy_difference(&self, u: &GridFunction, w: &GridFunction) -> Result<f64> {
        self.check_range(u)?;
        self.check_range(w)?;
        let (xg, wg) = gauss_legendre(4);
        let eps = self.cfg.eps;
        let sp = self.cfg.singular;
        let model = &self.cfg.model;
        let short = |a: f64, b: f64| a > 0.0 && b > 0.0 && (b - a).abs() <= 1e-3 * a.max(b);
        let gl = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            h * xg.iter().zip(&wg).map(|(x, w)| w * g(c + h * x)).sum::<f64>()
        };

        let mut dl = 0.0;
        let mut df = Vec::with_capacity(u.values().len());
        let mut fsum = Vec::with_capacity(u.values().len());
        for (&a, &b) in u.values().iter().zip(w.values()) {
            if short(a, b) {
                dl += gl(&|t| sp.l_eps_raw(t, eps), a, b);
                df.push(gl(&|t| model.f_unguarded(t), a, b));
            } else {
                dl += self.big_l(b)? - self.big_l(a)?;
                df.push(model.big_f_unguarded(b) - model.big_f_unguarded(a));
            }
            fsum.push(model.big_f_unguarded(a) + model.big_f_unguarded(b));
        }
        let d = *u.domain();
        let df = GridFunction::from_values(d, df)?;
        let fsum = GridFunction::from_values(d, fsum)?;
        let dd = l2_inner(&self.potential(&df), &fsum);
        let dq = 0.5 * h1_inner(&w.sub(u), &w.lin_comb(1.0, 1.0, u));
        Ok(dq + dl * d.cell_area() - 0.5 * self.cfg.lambda * dd)
    }

    /// `d/ds J(u + s v)` at `s = 0`, without a Poisson solve.
    pub fn slope(&self, u: &GridFunction, v: &GridFunction) -> Result<f64> {
        self.check_range(u)?;
        let (rhs, _) = self.lower_order(u);
        Ok(h1_inner(u, v) + l2_inner(&rhs, v))
    }

    /// Energy and H¹ gradient in one pass.
    pub fn evaluate(&self, u: &GridFunction) -> Result<Evaluation> {
        self.check_range(u)?;
        let (rhs, dbl) = self.lower_order(u);
        let mut g = self.poisson.solve(&rhs);
        g.axpy(1.0, u);
        let energy = 0.5 * h1_inner(u, u) + self.absorption(u)? - 0.5 * self.cfg.lambda * dbl;
        let grad_norm = h1_norm(&g);
        Ok(Evaluation {
            energy,
            gradient: g,
            grad_norm,
        })
    }

    /// Strong form `−Δ_h u + l_ε(u) − λ K[F(u)] f(u)`.
    pub fn residual(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_range(u)?;
        let (mut r, _) = self.lower_order(u);
        r.axpy(1.0, &laplacian_apply(u));
        Ok(r)
    }

    /// Strong residual with `l_ε` replaced by its singular limit,
    /// `−Δ_h u − l_0(u) − λ K[F(u)] f(u)`, zeroed on `{u <= delta}`.
    pub fn limit_residual(&self, u: &GridFunction, delta: f64) -> Result<GridFunction> {
        self.check_range(u)?;
        let lambda = self.cfg.lambda;
        let pot = self.potential(&self.big_f(u));
        let lap = laplacian_apply(u);
        let vals = u
            .values()
            .iter()
            .zip(pot.values())
            .zip(lap.values())
            .map(|((&t, &p), &d)| {
                if t > delta {
                    d - self.cfg.singular.l_limit(t) - lambda * p * self.cfg.model.f_unguarded(t)
                } else {
                    0.0
                }
            })
            .collect();
        GridFunction::from_values(*u.domain(), vals)
    }

    /// The ε-residual zeroed on `{u <= delta}`, for side-by-side comparison
    /// with [`Problem::limit_residual`].
    pub fn masked_residual(&self, u: &GridFunction, delta: f64) -> Result<GridFunction> {
        let r = self.residual(u)?;
        let vals = r
            .values()
            .iter()
            .zip(u.values())
            .map(|(&r, &t)| if t > delta { r } else { 0.0 })
            .collect();
        GridFunction::from_values(*u.domain(), vals)
    }

    /// Dual (H⁻¹) norm `sup_φ ⟨r, φ⟩ / |φ|_{H¹}` of a nodal residual.
    pub fn dual_norm(&self, r: &GridFunction) -> f64 {
        l2_inner(r, &self.poisson.solve(r)).max(0.0).sqrt()
    }

    /// `∫ |l_0(u)|` over `{u > 0}` on the rectangle inset by `margin`.
    pub fn singular_l1_diagnostic(&self, u: &GridFunction, margin: f64) -> f64 {
        let d = self.cfg.dom;
        assert!(
            margin > 0.0 && 2.0 * margin < d.lx().min(d.ly()),
            "margin must lie in (0, half the domain width)"
        );
        let mut s = 0.0;
        for j in 0..d.ny() {
            for i in 0..d.nx() {
                let (x, y) = d.node(i, j);
                if x < margin || y < margin || x > d.lx() - margin || y > d.ly() - margin {
                    continue;
                }
                let t = u.at(i, j);
                if t > 0.0 {
                    s += self.cfg.singular.l_limit(t).abs();
                }
            }
        }
        s * d.cell_area()
    }
}
