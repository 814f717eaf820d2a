//! Mountain-pass solve at the reference configuration.
//!
//! cargo run --release --example mountain_pass
use std::time::Instant;

use choquard::functional::{Problem, ProblemConfig};
use choquard::mountain_pass::{find_k, mpa_solve};

fn main() -> choquard::Result<()> {
    let problem = Problem::new(ProblemConfig::reference())?;

    let (k, m2) = find_k(&problem)?;
    println!("J(Kφ) < 0 at K = {k}, max along the ray m2 = {m2:.10}");

    let t0 = Instant::now();
    let sol = mpa_solve(&problem, 32, 1e-8)?;
    let r = &sol.report;
    println!("status      {}", r.status.as_str());
    println!("energy      {:.16e}", r.energy);
    println!("h1          {:.16e}", r.h1);
    println!("sup         {:.16e}", r.sup);
    println!("grad_norm   {:.3e}", r.grad_norm);
    println!("K_grad_emp  {:.6}", r.k_grad_emp);
    println!("iterations  {} ({} polish)", r.iterations, sol.polish_energies.len() - 1);
    println!("path nodes  {}", sol.path_energies.len());
    println!("elapsed     {:.2?}", t0.elapsed());

    println!("\n{}", r.to_json_line());
    Ok(())
}
