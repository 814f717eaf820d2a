//! Scalar terms at a few points and the sampled estimate check.
//!
//! cargo run --release --example scalars
use choquard::scalar::{check_scalar_estimates, NonlinearityModel, SingularParams};

fn main() -> choquard::Result<()> {
    let p = SingularParams::power_log(0.5, 0.4)?;
    let m = NonlinearityModel::new(1.5, 1.5)?;
    let eps = 0.1;

    println!("{:>6} {:>12} {:>12} {:>12} {:>10} {:>12} {:>12}", "t", "l_eps", "L_eps", "l_limit", "Z", "f", "F");
    for t in [0.0, 0.05, 0.25, 0.5, 0.9, 1.0, 2.0, 4.0] {
        println!(
            "{t:6.2} {:12.6} {:12.6} {:12.6} {:10.6} {:12.6} {:12.6}",
            p.l_eps(t, eps)?,
            p.big_l_eps(t, eps)?,
            p.l_limit(t),
            p.z(t),
            m.f(t)?,
            m.big_f(t)?
        );
    }

    let h = m.hypothesis_report();
    println!("\ngrowth hypothesis: T = {}, T0 = {:.6}, f(t)/t^r0 monotone: {}", h.t_big, h.t0_const, h.f4_monotone);

    let rep = check_scalar_estimates(&p, 20_000, 0)?;
    let c = &rep.constants;
    println!(
        "m~ = {:.6}, k0 = {:?}, C = {:.6}, delta0 = {:.6}",
        c.m_tilde, c.k0, c.c_growth, c.delta0
    );
    println!("samples {:?}: {} violations", rep.samples, rep.violations.len());
    Ok(())
}
