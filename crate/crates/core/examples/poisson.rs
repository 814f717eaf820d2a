//! Fast sine-transform Poisson solve and its observed convergence order.
//!
//! cargo run --release --example poisson
use choquard::grid::{poisson_solve, sup_norm, Domain, GridFunction};

fn exact(x: f64, y: f64) -> f64 {
    x * (1.0 - x) * y * (1.0 - y) * (x + 2.0 * y).exp()
}

fn minus_laplacian(x: f64, y: f64) -> f64 {
    let (ex, e2y) = (x.exp(), (2.0 * y).exp());
    let p = x * (1.0 - x) * ex;
    let q = y * (1.0 - y) * e2y;
    -(-(3.0 * x + x * x) * ex * q + p * (2.0 - 4.0 * y - 4.0 * y * y) * e2y)
}

fn main() -> choquard::Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    println!("{:>5} {:>12} {:>7}", "n", "max error", "order");
    for n in [16, 32, 64, 128, 256] {
        let dom = Domain::unit_square(n)?;
        let u = poisson_solve(&GridFunction::from_fn(dom, minus_laplacian));
        let e = sup_norm(&u.sub(&GridFunction::from_fn(dom, exact)));
        let order = prev.map(|(h, e0)| (e0 / e).ln() / (h / dom.hx()).ln());
        println!("{n:5} {e:12.4e} {:>7}", order.map_or("-".into(), |o| format!("{o:.3}")));
        prev = Some((dom.hx(), e));
    }
    Ok(())
}
