use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Recorder;
use crate::scalar::{check_scalar_estimates, NonlinearityModel, SingularParams};

/// `(β, q)` triples sampled by the scalar suite.
pub const SCALAR_PARAMS: [(f64, f64); 3] = [(0.5, 0.4), (0.3, 0.2), (0.7, 0.25)];
/// Samples per inequality.
pub const ESTIMATE_SAMPLES: usize = 100_000;
const POINT_SAMPLES: usize = 2000;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub(crate) fn scalar_estimates(r: &mut Recorder, seed: u64) {
    // The sampled estimates dominate the cost; each parameter set runs on its own thread.
    let reports: Vec<_> = std::thread::scope(|sc| {
        let hs: Vec<_> = SCALAR_PARAMS
            .iter()
            .enumerate()
            .map(|(k, &(beta, q))| {
                sc.spawn(move || {
                    SingularParams::power_log(beta, q)
                        .and_then(|p| check_scalar_estimates(&p, ESTIMATE_SAMPLES, seed.wrapping_add(k as u64)))
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("estimate thread")).collect()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (&(beta, q), rep) in SCALAR_PARAMS.iter().zip(reports) {
        match rep {
            Ok(rep) => {
                let n = rep.samples.iter().map(|s| s.1).sum();
                let fails = rep
                    .violations
                    .iter()
                    .map(|v| {
                        (
                            format!("beta={beta} q={q} t={:e} eps={:e}", v.t, v.eps),
                            format!("inequality {} within 1e-12", v.inequality),
                            format!("{:e} vs bound {:e}", v.observed, v.bound),
                        )
                    })
                    .collect();
                r.bulk("scalar.estimates", n, fails);
            }
            Err(e) => r.error("scalar.estimates", format!("beta={beta} q={q}"), &e),
        }
        if let Ok(p) = SingularParams::power_log(beta, q) {
            pointwise(r, &p, &mut rng);
        }
    }
    nonlinearity(r, &mut rng);
}

fn pointwise(r: &mut Recorder, p: &SingularParams, rng: &mut ChaCha8Rng) {
    let tag = format!("beta={} q={}", p.beta(), p.q());

    for _ in 0..POINT_SAMPLES {
        let t = log_uniform(rng, 1e-8, 20.0);
        let eps = log_uniform(rng, 1e-6, 0.5);
        match p.l_eps(t, eps) {
            Ok(l) => r.check(
                "scalar.l_eps_sign",
                sign(l) == sign(1.0 - eps - t),
                || format!("{tag} t={t:e} eps={eps:e}"),
                "sign(l_eps) = sign(1-eps-t)",
                || format!("l_eps={l:e}"),
            ),
            Err(e) => r.error("scalar.l_eps_sign", format!("{tag} t={t:e} eps={eps:e}"), &e),
        }
    }

    for _ in 0..POINT_SAMPLES / 10 {
        let t = log_uniform(rng, 1e-8, 20.0);
        let lim = p.l_limit(t);
        let mut eps = 0.1;
        let mut prev = f64::INFINITY;
        while eps >= 1e-6 {
            let err = (-p.l_eps(t, eps).unwrap_or(f64::NAN) - lim).abs();
            r.check(
                "scalar.limit_monotone",
                err <= prev + 1e-12,
                || format!("{tag} t={t:e} eps={eps:e}"),
                "error at eps/2 <= error at eps + 1e-12",
                || format!("{err:e} after {prev:e}"),
            );
            prev = err;
            eps *= 0.5;
        }
    }

    // Both sides of the branch point t = 1.
    let below = 1f64.next_down();
    let dz = (p.z(1.0) - p.z(below)).abs();
    r.check("scalar.z_branch_smooth", dz <= 1e-12, || tag.clone(), "|Z(1+) - Z(1-)| <= 1e-12", || format!("{dz:e}"));
    let (h, d) = (1e-5, 1e-6);
    let cd = |t: f64| (p.z(t + d) - p.z(t - d)) / (2.0 * d);
    let dzp = (cd(1.0 + h) - cd(1.0 - h)).abs();
    r.check("scalar.z_branch_smooth", dzp <= 1e-8, || tag.clone(), "|Z'(1+) - Z'(1-)| <= 1e-8", || format!("{dzp:e}"));

    let beta = p.beta();
    for _ in 0..POINT_SAMPLES {
        let t = log_uniform(rng, 1e-8, 1.0 - 1e-6);
        let closed = t - t.powf(-beta) * t.ln();
        let scale = closed.abs().max(1.0);
        let d = 1e-5 * t.min(1.0 - t);
        let fd = (p.z(t + d) - p.z(t - d)) / (2.0 * d);
        let e = (fd - closed).abs().max((p.z_prime(t) - closed).abs());
        r.check(
            "scalar.z_prime_closed_form",
            e <= 1e-8 * scale,
            || format!("{tag} t={t:e}"),
            "Z'(t) = t - t^-beta log t within 1e-8 relative",
            || format!("deviation {e:e}, closed form {closed:e}"),
        );

        let d = (0.5 * t.min(1.0 - t)).min(1e-3);
        let second = p.z(t + d) - 2.0 * p.z(t) + p.z(t - d);
        r.check(
            "scalar.z_concave",
            second <= 1e-8,
            || format!("{tag} t={t:e} d={d:e}"),
            "second difference of Z <= 1e-8",
            || format!("{second:e}"),
        );
    }
}

fn nonlinearity(r: &mut Recorder, rng: &mut ChaCha8Rng) {
    let m = match NonlinearityModel::new(1.5, 1.5) {
        Ok(m) => m,
        Err(e) => return r.error("scalar.f_ratio_monotone", "r0=1.5 s=1.5".into(), &e),
    };
    let r0 = m.r0();

    let mut ts: Vec<f64> = (0..POINT_SAMPLES).map(|_| rng.gen_range(0.0..20.0f64).max(1e-12)).collect();
    ts.push(20.0);
    ts.sort_by(f64::total_cmp);
    let ratio = |t: f64| m.f(t).map(|f| f / t.powf(r0)).unwrap_or(f64::NAN);
    for w in ts.windows(2) {
        let (a, b) = (ratio(w[0]), ratio(w[1]));
        r.check(
            "scalar.f_ratio_monotone",
            b >= a * (1.0 - 1e-14),
            || format!("t1={:e} t2={:e}", w[0], w[1]),
            "f(t)/t^r0 nondecreasing",
            || format!("{a:e} then {b:e}"),
        );
    }

    let h = m.hypothesis_report();
    let g0 = h.gamma0;
    for _ in 0..POINT_SAMPLES {
        let t = rng.gen_range(h.t_big..=20.0);
        match (m.big_f(t), m.f(t)) {
            (Ok(big), Ok(f)) => {
                let lhs = t.powf(g0) * big;
                r.check(
                    "scalar.f_growth_bound",
                    lhs <= h.t0_const * f,
                    || format!("t={t:e} T={} T0={:e}", h.t_big, h.t0_const),
                    "t^gamma0 F(t) <= T0 f(t)",
                    || format!("{lhs:e} vs {:e}", h.t0_const * f),
                );
            }
            (Err(e), _) | (_, Err(e)) => r.error("scalar.f_growth_bound", format!("t={t:e}"), &e),
        }
    }

    for _ in 0..POINT_SAMPLES {
        let t = log_uniform(rng, 1e-4, 20.0);
        let d = 1e-5 * t.min(1.0);
        let fd = (m.big_f(t + d).unwrap_or(f64::NAN) - m.big_f(t - d).unwrap_or(f64::NAN)) / (2.0 * d);
        let f = m.f(t).unwrap_or(f64::NAN);
        let rel = (fd - f).abs() / f;
        r.check(
            "scalar.big_f_derivative",
            rel <= 1e-8,
            || format!("t={t:e}"),
            "F' = f within 1e-8 relative",
            || format!("{rel:e}"),
        );
    }
}
