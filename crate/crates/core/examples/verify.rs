//! Runs the property suites and prints one JSON line each.
//!
//! cargo run --release --example verify [-- suite ...]
use choquard::verify::{run_suite, SUITES};

fn main() -> choquard::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if args.is_empty() { SUITES.to_vec() } else { args.iter().map(String::as_str).collect() };
    for name in names {
        let r = run_suite(name, 0)?;
        eprintln!("{name}: {} cases, {} violations, {:.2?}", r.cases_run, r.violations.len(), r.wall_time);
        println!("{}", r.to_json());
    }
    Ok(())
}
