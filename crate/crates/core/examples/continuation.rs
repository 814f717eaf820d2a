//! ε → 0 continuation at the reference configuration.
//!
//! cargo run --release --example continuation [-- n]
use std::time::Instant;

use choquard::functional::{Problem, ProblemConfig};
use choquard::grid::Domain;
use choquard::mountain_pass::{continuation, default_eps_list, MpaOptions};

fn main() -> choquard::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(64);
    let cfg = ProblemConfig {
        dom: Domain::unit_square(n)?,
        ..ProblemConfig::reference()
    };
    let problem = Problem::new(cfg)?;

    let t0 = Instant::now();
    let run = continuation(&problem, &default_eps_list(), MpaOptions::new(32, 1e-8))?;

    println!("{:>10} {:>12} {:>10} {:>10} {:>12} {:>12} {:>6} {:>5} {:>10}", "eps", "energy", "h1", "sup", "K_grad", "l1_sing", "iters", "cold", "lim_res");
    for s in &run.steps {
        let r = &s.report;
        println!(
            "{:10.3e} {:12.6e} {:10.6} {:10.6} {:12.5e} {:12.5e} {:6} {:>5} {:10.3e}",
            r.eps, r.energy, r.h1, r.sup, r.k_grad_emp, r.l1_singular, r.iterations, s.cold_start, s.limit_residual
        );
        if let Some(e) = &s.error {
            println!("  failed: {e}");
        }
    }
    println!("cauchy differences: {:?}", run.cauchy);
    println!(
        "final residual on {{u > {:.4}}}: limit {:.4e}, regularized {:.4e}",
        run.delta0, run.limit_residual, run.eps_residual
    );
    println!("elapsed {:.1?}", t0.elapsed());
    Ok(())
}
