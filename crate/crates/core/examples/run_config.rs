//! Runs a JSON run configuration in-process and prints the table, e.g.
//! `cargo run --example run_config -- crates/core/fixtures/spectrum_two_center.json`.

use zerorange::cli::{parse_config, render_table, run_command};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/verify.json").to_string());
    let cfg = parse_config(&std::fs::read_to_string(&path)?)?;
    let table = run_command(&cfg)?;
    print!("{}", render_table(&table, cfg.output.format)?);
    Ok(())
}
