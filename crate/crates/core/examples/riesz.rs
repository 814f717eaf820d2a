//! Riesz potential: backend agreement, timing and the HLS quotient.
//!
//! cargo run --release --example riesz
use std::time::Instant;

use choquard::grid::{sup_norm, Domain, GridFunction};
use choquard::riesz::RieszKernel;

fn main() -> choquard::Result<()> {
    let mu = 0.5;
    for n in [16, 32, 64, 128] {
        let dom = Domain::unit_square(n)?;
        let k = RieszKernel::build(dom, mu)?;
        let g = GridFunction::from_fn(dom, |x, y| (-(x - 0.4).powi(2) * 20.0 - (y - 0.6).powi(2) * 30.0).exp());

        let t0 = Instant::now();
        let d = k.apply_direct(&g);
        let td = t0.elapsed();
        let t0 = Instant::now();
        let f = k.apply_fft(&g);
        let tf = t0.elapsed();
        let diff = sup_norm(&f.sub(&d)) / sup_norm(&d);
        println!("{n:4}²  direct {td:>10.2?}  fft {tf:>10.2?}  rel diff {diff:.2e}  HLS {:.6}", k.hls_quotient(&g, &g)?);
    }
    Ok(())
}
