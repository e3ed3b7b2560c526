use std::str::FromStr;

use clap::Parser;
use tracing::Level;

fn main() {
    let level = std::env::var("SWLW_LOG")
        .ok()
        .and_then(|s| Level::from_str(&s).ok())
        .unwrap_or(Level::WARN);
    tracing_subscriber::fmt()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .init();
    let code = swlw::cli::main_with(swlw::cli::Cli::parse());
    std::process::exit(code);
}
