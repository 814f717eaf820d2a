//! Parse, override and render a run configuration.
//!
//! cargo run --example config
use choquard::config::{parse_config, render};

fn main() -> choquard::Result<()> {
    let cfg = parse_config("# coarse run\nnx = 32\nny = 32\nlambda = 1.5\nbackend = direct\n")?;
    print!("{}", render(&cfg));
    match parse_config("eps = 0.4") {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
