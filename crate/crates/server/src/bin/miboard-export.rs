use std::path::PathBuf;

use clap::Parser;
use miboard_core::persistence::export::export_file;

/// Converts a game log to CSV, one row per logged command.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    csv: PathBuf,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let rows = export_file(&cli.log, &cli.csv)?;
    eprintln!("wrote {rows} rows to {}", cli.csv.display());
    Ok(())
}
