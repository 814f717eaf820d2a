use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{moser_integral, Recorder};
use crate::grid::{h1_norm, l2_inner, laplacian_apply, lp_norm, poisson_solve, sup_norm, Domain, GridFunction};
use crate::riesz::{Backend, RieszKernel};

pub const RIESZ_GRIDS: [usize; 3] = [16, 32, 64];
pub const RIESZ_MUS: [f64; 3] = [0.25, 0.5, 0.75];
pub const BACKEND_TOL: f64 = 1e-10;
pub const ADJOINT_TOL: f64 = 1e-12;
pub const LINEARITY_TOL: f64 = 1e-12;
pub const MMS_GRIDS: [usize; 3] = [32, 64, 128];
/// Accepted band for the observed order.
pub const MMS_ORDER: (f64, f64) = (1.9, 2.1);
pub const HLS_PAIRS: usize = 100;
pub const HLS_REFINE_TOL: f64 = 0.05;
pub const MOSER_REFINE_TOL: f64 = 0.10;

fn random(dom: Domain, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> GridFunction {
    let v = (0..dom.len()).map(|_| rng.gen_range(lo..hi)).collect();
    GridFunction::from_values(dom, v).expect("finite")
}

fn linf_rel(a: &GridFunction, b: &GridFunction) -> f64 {
    sup_norm(&a.sub(b)) / sup_norm(b).max(f64::MIN_POSITIVE)
}

/// Gaussian bump with parameters `(cx, cy, width)` on the unit square.
fn bump(dom: Domain, (cx, cy, w): (f64, f64, f64)) -> GridFunction {
    GridFunction::from_fn(dom, |x, y| (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * w * w)).exp())
}

fn bump_params(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    (rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), rng.gen_range(0.08..0.2))
}

pub(crate) fn riesz_equiv(r: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in &RIESZ_GRIDS {
        let dom = Domain::unit_square(n).expect("valid grid");
        for &mu in &RIESZ_MUS {
            let k = match RieszKernel::build(dom, mu) {
                Ok(k) => k,
                Err(e) => {
                    r.error("riesz.backend_equivalence", format!("n={n} mu={mu}"), &e);
                    continue;
                }
            };
            let tag = format!("n={n} mu={mu}");
            let f = random(dom, &mut rng, -1.0, 1.0);
            let g = random(dom, &mut rng, 0.0, 1.0);

            for x in [&f, &g] {
                let d = k.apply_direct(x);
                let e = linf_rel(&k.apply_fft(x), &d);
                r.check(
                    "riesz.backend_equivalence",
                    e <= BACKEND_TOL,
                    || tag.clone(),
                    "fft vs direct relative sup <= 1e-10",
                    || format!("{e:e}"),
                );
            }

            for b in [Backend::Direct, Backend::Fft] {
                let (kf, kg) = (k.apply(&f, b), k.apply(&g, b));
                let (a1, a2) = (l2_inner(&kf, &g), l2_inner(&f, &kg));
                let scale = lp_norm(&kf, 2.0) * lp_norm(&g, 2.0);
                let defect = (a1 - a2).abs() / scale;
                r.check(
                    "riesz.self_adjoint",
                    defect <= ADJOINT_TOL,
                    || format!("{tag} backend={b}"),
                    "|<Kf,g> - <f,Kg>| <= 1e-12 |Kf| |g|",
                    || format!("{defect:e}"),
                );

                let (a, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let lhs = k.apply(&f.lin_comb(a, c, &g), b);
                let rhs = kf.lin_comb(a, c, &kg);
                let scale = a.abs() * sup_norm(&kf) + c.abs() * sup_norm(&kg);
                let e = sup_norm(&lhs.sub(&rhs)) / scale;
                r.check(
                    "riesz.linearity",
                    e <= LINEARITY_TOL,
                    || format!("{tag} backend={b} a={a} b={c}"),
                    "K(af+bg) = aKf+bKg within 1e-12",
                    || format!("{e:e}"),
                );

                let kff = l2_inner(&kf, &f);
                r.check(
                    "riesz.semidefinite",
                    kff >= -ADJOINT_TOL * lp_norm(&kf, 2.0) * lp_norm(&f, 2.0),
                    || format!("{tag} backend={b}"),
                    "<Kf,f> >= 0",
                    || format!("{kff:e}"),
                );

                // Sparse nonnegative data: Kg must still be strictly positive everywhere.
                let mut sparse = GridFunction::zeros(dom);
                for _ in 0..3 {
                    let i = rng.gen_range(0..dom.len());
                    sparse.values_mut()[i] = rng.gen_range(0.1..1.0);
                }
                for x in [&g, &sparse] {
                    let m = k.apply(x, b).min();
                    r.check(
                        "riesz.positivity",
                        m > 0.0,
                        || format!("{tag} backend={b}"),
                        "g >= 0, g != 0 implies Kg > 0",
                        || format!("min Kg = {m:e}"),
                    );
                }
            }
        }
    }

    // Hölder bound sup|Kg| <= M̂ |g|_{s0}, one M̂ per (μ, r) on a 32² grid.
    let dom = Domain::unit_square(32).expect("valid grid");
    for &mu in &RIESZ_MUS {
        let k = RieszKernel::build(dom, mu).expect("valid mu");
        for frac in [0.25, 0.5, 0.9] {
            let r0 = 1.0 + frac * (1.0 / mu - 1.0);
            let s0 = r0 / (r0 - 1.0);
            let m_hat = k.holder_sup_constant(r0);
            for _ in 0..10 {
                let mut g = random(dom, &mut rng, -1.0, 1.0);
                if rng.gen_bool(0.5) {
                    g = bump(dom, bump_params(&mut rng));
                }
                let m_prime = rng.gen_range(0.1..1.0);
                g = g.scaled(m_prime / lp_norm(&g, s0));
                let s = sup_norm(&k.apply_fft(&g));
                let bound = m_hat * m_prime;
                r.check(
                    "riesz.sup_bound",
                    s <= bound * (1.0 + 1e-12),
                    || format!("mu={mu} r0={r0} M'={m_prime}"),
                    "sup|Kg| <= M^ M'",
                    || format!("{s:e} vs {bound:e}"),
                );
            }
        }
    }
}

/// `u* = x(1-x) y(1-y) e^{x+2y}` and `-Δu*`.
pub fn mms_exact(x: f64, y: f64) -> f64 {
    x * (1.0 - x) * y * (1.0 - y) * (x + 2.0 * y).exp()
}

pub fn mms_rhs(x: f64, y: f64) -> f64 {
    let p = x * (1.0 - x) * x.exp();
    let pxx = -(3.0 * x + x * x) * x.exp();
    let q = y * (1.0 - y) * (2.0 * y).exp();
    let qyy = (2.0 - 4.0 * y - 4.0 * y * y) * (2.0 * y).exp();
    -(pxx * q + p * qyy)
}

/// Max-norm errors of the manufactured solution on `MMS_GRIDS`.
pub fn mms_errors() -> Vec<(f64, f64)> {
    MMS_GRIDS
        .iter()
        .map(|&n| {
            let dom = Domain::unit_square(n).expect("valid grid");
            let u = poisson_solve(&GridFunction::from_fn(dom, mms_rhs));
            let e = sup_norm(&u.sub(&GridFunction::from_fn(dom, mms_exact)));
            (dom.hx(), e)
        })
        .collect()
}

pub(crate) fn poisson_mms(r: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let errs = mms_errors();
    for w in errs.windows(2) {
        let order = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        r.check(
            "grid.mms_order",
            order >= MMS_ORDER.0 && order <= MMS_ORDER.1,
            || format!("h={:e} -> {:e}", w[0].0, w[1].0),
            "observed order in [1.9, 2.1]",
            || format!("order {order:.4}, errors {:e} {:e}", w[0].1, w[1].1),
        );
    }

    // The 5-point stencil is exact on biquadratics.
    for &n in &[8, 33] {
        let dom = Domain::new(1.0, 1.0, n, n).expect("valid grid");
        let exact = GridFunction::from_fn(dom, |x, y| x * (1.0 - x) * y * (1.0 - y));
        let rhs = GridFunction::from_fn(dom, |x, y| 2.0 * (x * (1.0 - x) + y * (1.0 - y)));
        let e = linf_rel(&poisson_solve(&rhs), &exact);
        r.check(
            "grid.mms_polynomial_exact",
            e <= 1e-12,
            || format!("n={n}"),
            "biquadratic reproduced to 1e-12",
            || format!("{e:e}"),
        );
    }

    for _ in 0..20 {
        let nx = rng.gen_range(4..40);
        let ny = rng.gen_range(4..40);
        let dom = Domain::new(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), nx, ny).expect("valid grid");
        let tag = format!("{nx}x{ny} lx={} ly={}", dom.lx(), dom.ly());
        let u = random(dom, &mut rng, -1.0, 1.0);
        let v = random(dom, &mut rng, -1.0, 1.0);
        let w = random(dom, &mut rng, -1.0, 1.0);

        let e = linf_rel(&poisson_solve(&laplacian_apply(&u)), &u);
        r.check("grid.poisson_inverse", e <= 1e-10, || tag.clone(), "poisson(lap u) = u within 1e-10", || format!("{e:e}"));

        let h = h1_norm(&u).powi(2);
        let ibp = l2_inner(&laplacian_apply(&u), &u);
        let e = (h - ibp).abs() / h;
        r.check(
            "grid.summation_by_parts",
            e <= 1e-10,
            || tag.clone(),
            "|u|_H1^2 = <lap u, u> within 1e-10",
            || format!("{e:e}"),
        );

        let a = rng.gen_range(-3.0..3.0);
        let norms: [(&str, &dyn Fn(&GridFunction) -> f64); 5] = [
            ("l1", &|x| lp_norm(x, 1.0)),
            ("l2", &|x| lp_norm(x, 2.0)),
            ("l3.5", &|x| lp_norm(x, 3.5)),
            ("sup", &|x| sup_norm(x)),
            ("h1", &|x| h1_norm(x)),
        ];
        for (name, nf) in norms {
            let (nu, nv, nw) = (nf(&u), nf(&v), nf(&w));
            let hom = (nf(&u.scaled(a)) - a.abs() * nu).abs();
            r.check(
                "grid.norm_axioms",
                hom <= 1e-12 * a.abs() * nu,
                || format!("{tag} {name} a={a}"),
                "|a u| = |a| |u|",
                || format!("defect {hom:e}"),
            );
            let uv = u.lin_comb(1.0, 1.0, &v);
            let vw = v.lin_comb(1.0, 1.0, &w);
            for (s, x, y) in [(nf(&uv), nu, nv), (nf(&vw), nv, nw)] {
                r.check(
                    "grid.norm_axioms",
                    s <= (x + y) * (1.0 + 1e-12),
                    || format!("{tag} {name}"),
                    "|u + v| <= |u| + |v|",
                    || format!("{s:e} vs {:e}", x + y),
                );
            }
        }
    }
}

pub(crate) fn hls_tm(r: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = 0.5;
    let coarse = Domain::unit_square(32).expect("valid grid");
    let fine = Domain::unit_square(64).expect("valid grid");
    let kc = RieszKernel::build(coarse, mu).expect("valid mu");
    let kf = RieszKernel::build(fine, mu).expect("valid mu");

    for _ in 0..HLS_PAIRS {
        let (pf, pg) = (bump_params(&mut rng), bump_params(&mut rng));
        let tag = format!("f={pf:?} g={pg:?}");
        let qc = kc.hls_quotient(&bump(coarse, pf), &bump(coarse, pg));
        let (f, g) = (bump(fine, pf), bump(fine, pg));
        let qf = kf.hls_quotient(&f, &g);
        match (qc, qf) {
            (Ok(qc), Ok(qf)) => {
                let d = (qc - qf).abs() / qf;
                r.check(
                    "riesz.hls_refinement",
                    d <= HLS_REFINE_TOL,
                    || tag.clone(),
                    "HLS quotient stable within 5% from 32^2 to 64^2",
                    || format!("{qc:.6} vs {qf:.6}"),
                );
                let (a, b) = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
                match kf.hls_quotient(&f.scaled(a), &g.scaled(b)) {
                    Ok(qs) => {
                        let d = (qs - qf).abs() / qf;
                        r.check(
                            "riesz.hls_scale_invariance",
                            d <= 1e-12,
                            || format!("{tag} a={a} b={b}"),
                            "quotient invariant under amplitude scaling",
                            || format!("{d:e}"),
                        );
                    }
                    Err(e) => r.error("riesz.hls_scale_invariance", tag, &e),
                }
            }
            (Err(e), _) | (_, Err(e)) => r.error("riesz.hls_refinement", tag, &e),
        }
    }

    let four_pi = 4.0 * std::f64::consts::PI;
    let eigen = |d: Domain| {
        let s = GridFunction::from_fn(d, |x, y| (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin());
        s.scaled(1.0 / h1_norm(&s))
    };
    let m: Vec<_> = [64, 128]
        .iter()
        .map(|&n| moser_integral(&eigen(Domain::unit_square(n).expect("valid grid")), four_pi))
        .collect();
    match (&m[0], &m[1]) {
        (Ok(a), Ok(b)) => r.check(
            "verify.moser_refinement",
            (a - b).abs() <= MOSER_REFINE_TOL * b,
            || "phi_1, alpha = 4 pi".into(),
            "stable within 10% from 64^2 to 128^2",
            || format!("{a:.8} vs {b:.8}"),
        ),
        (Err(e), _) | (_, Err(e)) => r.error("verify.moser_refinement", "phi_1".into(), e),
    }

    let dom = Domain::unit_square(32).expect("valid grid");
    for _ in 0..20 {
        let p = bump_params(&mut rng);
        let u = bump(dom, p);
        let u = u.scaled(1.0 / h1_norm(&u));
        let mut prev = 0.0;
        for alpha in [0.5, 1.0, 2.0, 4.0, 8.0, four_pi] {
            match moser_integral(&u, alpha) {
                Ok(v) => {
                    r.check(
                        "verify.moser_monotone",
                        v >= prev,
                        || format!("bump={p:?} alpha={alpha}"),
                        "nondecreasing in alpha",
                        || format!("{v:e} after {prev:e}"),
                    );
                    prev = v;
                }
                Err(e) => r.error("verify.moser_monotone", format!("bump={p:?} alpha={alpha}"), &e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mms_rhs_matches_finite_differences() {
        let h = 1e-4;
        for &(x, y) in &[(0.3, 0.6), (0.71, 0.2), (0.5, 0.5)] {
            let lap = (mms_exact(x + h, y) + mms_exact(x - h, y) + mms_exact(x, y + h) + mms_exact(x, y - h)
                - 4.0 * mms_exact(x, y))
                / (h * h);
            assert!((mms_rhs(x, y) + lap).abs() < 1e-5, "{x} {y}");
        }
    }

    #[test]
    fn mms_vanishes_on_the_boundary() {
        for s in [0.0, 0.3, 1.0] {
            assert_eq!(mms_exact(0.0, s), 0.0);
            assert_eq!(mms_exact(1.0, s), 0.0);
            assert_eq!(mms_exact(s, 0.0), 0.0);
            assert_eq!(mms_exact(s, 1.0), 0.0);
        }
    }
}
