use crate::functional::Problem;
use crate::grid::{h1_norm, node_grad_sq, sup_norm, weight_psi, GridFunction};

/// Inset of the L¹ diagnostic, as a fraction of the shorter side.
pub const DIAGNOSTIC_MARGIN: f64 = 0.125;

/// Regularization of `Z` at nodes where `u <= 0`.
const Z_SHIFT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub h1: f64,
    pub sup: f64,
    /// `max ψ |∇u|² / Z(u)` over interior nodes.
    pub k_grad_emp: f64,
    pub l1_singular: f64,
}

pub fn bounds_report(u: &GridFunction, problem: &Problem) -> BoundsReport {
    let d = *u.domain();
    let sp = problem.config().singular;
    let psi = weight_psi(&d);
    let grad = node_grad_sq(u);
    let mut k: f64 = 0.0;
    for ((&t, &g), &w) in u.values().iter().zip(&grad).zip(psi.values()) {
        let ratio = if t > 0.0 {
            w * g / sp.z(t)
        } else if g > 0.0 {
            w * g / (sp.z(0.0) + Z_SHIFT)
        } else {
            0.0
        };
        k = k.max(ratio);
    }
    BoundsReport {
        h1: h1_norm(u),
        sup: sup_norm(u),
        k_grad_emp: k,
        l1_singular: problem.singular_l1_diagnostic(u, DIAGNOSTIC_MARGIN * d.lx().min(d.ly())),
    }
}
