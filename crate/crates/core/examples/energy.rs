//! Energy along the ray through the first eigenfunction, and a gradient check.
//!
//! cargo run --release --example energy
use choquard::functional::{Problem, ProblemConfig};
use choquard::grid::h1_inner;
use choquard::mountain_pass::{build_phi, find_k};

fn main() -> choquard::Result<()> {
    let p = Problem::new(ProblemConfig::reference())?;
    let phi = build_phi(p.domain());
    let (k, m2) = find_k(&p)?;
    println!("K = {k}, m2 = {m2:.10}");
    for i in 0..=16 {
        let t = k * i as f64 / 16.0;
        println!("t = {t:6.3}  J(t phi) = {:12.6}", p.energy(&phi.scaled(t))?);
    }

    let u = phi.scaled(1.5);
    let v = build_phi(p.domain()).map(|x| x * x);
    let exact = h1_inner(&p.h1_gradient(&u)?, &v);
    for h in [1e-2, 1e-3, 1e-4, 1e-5] {
        let fd = p.energy_difference(&u.lin_comb(1.0, -h, &v), &u.lin_comb(1.0, h, &v))? / (2.0 * h);
        println!("h = {h:.0e}  central difference {fd:.12}  <grad, v> {exact:.12}  rel {:.2e}", (fd - exact).abs() / exact.abs());
    }
    Ok(())
}
