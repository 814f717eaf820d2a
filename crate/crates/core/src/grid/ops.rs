use std::f64::consts::PI;

use super::{Domain, GridFunction};

/// Five-point negative Laplacian `-Δ_h u` with zero Dirichlet padding.
pub fn laplacian_apply(u: &GridFunction) -> GridFunction {
    let d = *u.domain();
    let (nx, ny) = (d.nx(), d.ny());
    let (cx, cy) = (1.0 / (d.hx() * d.hx()), 1.0 / (d.hy() * d.hy()));
    let v = u.values();
    let mut out = vec![0.0; v.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let c = v[k];
            let w = if i > 0 { v[k - 1] } else { 0.0 };
            let e = if i + 1 < nx { v[k + 1] } else { 0.0 };
            let s = if j > 0 { v[k - nx] } else { 0.0 };
            let n = if j + 1 < ny { v[k + nx] } else { 0.0 };
            out[k] = cx * (2.0 * c - w - e) + cy * (2.0 * c - s - n);
        }
    }
    GridFunction { dom: d, values: out }
}

/// `Σ u v hx hy`.
pub fn l2_inner(u: &GridFunction, v: &GridFunction) -> f64 {
    debug_assert_eq!(u.domain(), v.domain());
    u.domain().cell_area() * u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum::<f64>()
}

/// Discrete Dirichlet form: sum over all edges (boundary edges included) of
/// products of forward differences, times the cell area.
pub fn h1_inner(u: &GridFunction, v: &GridFunction) -> f64 {
    debug_assert_eq!(u.domain(), v.domain());
    let d = *u.domain();
    let (nx, ny) = (d.nx(), d.ny());
    let (a, b) = (u.values(), v.values());
    let at = |w: &[f64], i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
            0.0
        } else {
            w[j as usize * nx + i as usize]
        }
    };
    let mut sx = 0.0;
    for j in 0..ny as isize {
        for i in -1..nx as isize {
            sx += (at(a, i + 1, j) - at(a, i, j)) * (at(b, i + 1, j) - at(b, i, j));
        }
    }
    let mut sy = 0.0;
    for j in -1..ny as isize {
        for i in 0..nx as isize {
            sy += (at(a, i, j + 1) - at(a, i, j)) * (at(b, i, j + 1) - at(b, i, j));
        }
    }
    d.cell_area() * (sx / (d.hx() * d.hx()) + sy / (d.hy() * d.hy()))
}

pub fn h1_norm(u: &GridFunction) -> f64 {
    h1_inner(u, u).max(0.0).sqrt()
}

/// `(Σ |u|^p hx hy)^{1/p}` for `p >= 1`.
pub fn lp_norm(u: &GridFunction, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm needs p >= 1, got {p}");
    let a = u.domain().cell_area();
    let m = sup_norm(u);
    if m == 0.0 {
        return 0.0;
    }
    // Scale by the max to keep large p from overflowing.
    let s: f64 = u.values().iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * (s * a).powf(1.0 / p)
}

pub fn sup_norm(u: &GridFunction) -> f64 {
    u.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `ψ(x, y) = sin²(πx/Lx) sin²(πy/Ly)`.
pub fn weight_psi(dom: &Domain) -> GridFunction {
    let (lx, ly) = (dom.lx(), dom.ly());
    GridFunction::from_fn(*dom, |x, y| ((PI * x / lx).sin() * (PI * y / ly).sin()).powi(2))
}

/// Squared central-difference gradient at every interior node.
pub fn node_grad_sq(u: &GridFunction) -> Vec<f64> {
    let d = *u.domain();
    let (nx, ny) = (d.nx(), d.ny());
    let v = u.values();
    let mut out = Vec::with_capacity(v.len());
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let w = if i > 0 { v[k - 1] } else { 0.0 };
            let e = if i + 1 < nx { v[k + 1] } else { 0.0 };
            let s = if j > 0 { v[k - nx] } else { 0.0 };
            let n = if j + 1 < ny { v[k + nx] } else { 0.0 };
            let gx = (e - w) / (2.0 * d.hx());
            let gy = (n - s) / (2.0 * d.hy());
            out.push(gx * gx + gy * gy);
        }
    }
    out
}

/// Discrete `sup |∇ψ|²/ψ` over interior nodes.
pub fn psi_ratio_sup(dom: &Domain) -> f64 {
    let psi = weight_psi(dom);
    node_grad_sq(&psi)
        .iter()
        .zip(psi.values())
        .map(|(g, p)| g / p)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eigen(d: Domain) -> GridFunction {
        GridFunction::from_fn(d, |x, y| (PI * x).sin() * (PI * y).sin())
    }

    fn random(d: Domain, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::from_fn(d, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn zero_maps_to_zero() {
        let d = Domain::unit_square(8).unwrap();
        let z = GridFunction::zeros(d);
        assert_eq!(laplacian_apply(&z), z);
        assert_eq!(h1_norm(&z), 0.0);
        assert_eq!(lp_norm(&z, 2.0), 0.0);
    }

    #[test]
    fn sine_mode_is_an_eigenvector_with_second_order_eigenvalue() {
        let mut errs = vec![];
        for n in [15, 31, 63] {
            let d = Domain::unit_square(n).unwrap();
            let u = eigen(d);
            let lu = laplacian_apply(&u);
            let mut rel: f64 = 0.0;
            for (a, b) in lu.values().iter().zip(u.values()) {
                rel = rel.max((a - 2.0 * PI * PI * b).abs() / (2.0 * PI * PI * b.abs()));
            }
            errs.push(rel);
        }
        assert!(errs[0] < 1e-2);
        assert!((errs[0] / errs[1]).log2() > 1.9 && (errs[1] / errs[2]).log2() > 1.9);
    }

    #[test]
    fn stencil_is_symmetric() {
        let d = Domain::new(1.3, 0.7, 20, 13).unwrap();
        let (u, v) = (random(d, 1), random(d, 2));
        let a = l2_inner(&laplacian_apply(&u), &v);
        let b = l2_inner(&u, &laplacian_apply(&v));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn dirichlet_form_matches_summation_by_parts() {
        let d = Domain::new(2.0, 1.0, 17, 9).unwrap();
        let u = random(d, 3);
        let a = h1_norm(&u).powi(2);
        let b = l2_inner(&laplacian_apply(&u), &u);
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn h1_norm_of_first_mode() {
        let d = Domain::unit_square(127).unwrap();
        let n = h1_norm(&eigen(d));
        assert!((n - (PI * PI / 2.0).sqrt()).abs() < 2e-4, "{n}");
    }

    #[test]
    fn lp_norm_of_interior_constant() {
        let d = Domain::new(2.0, 0.5, 99, 99).unwrap();
        let one = GridFunction::from_fn(d, |_, _| 1.0);
        assert!((lp_norm(&one, 2.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn psi_weight_properties() {
        let d = Domain::unit_square(63).unwrap();
        let psi = weight_psi(&d);
        assert!((psi.at(31, 31) - 1.0).abs() < 1e-15);
        assert!(psi.min() > 0.0);
        let r64 = psi_ratio_sup(&d);
        let r128 = psi_ratio_sup(&Domain::unit_square(127).unwrap());
        assert!((r64 / r128 - 1.0).abs() < 0.01, "{r64} {r128}");
        assert!((r128 - 4.0 * PI * PI).abs() / (4.0 * PI * PI) < 0.01);
    }
}
