use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use miboard_bots::{run, write_transcripts, HarnessError, Script};

/// Plays a scripted game against a running server.
#[derive(Parser)]
#[command(name = "miboard-bots", version)]
struct Args {
    /// Server address, e.g. ws://127.0.0.1:8080
    #[arg(long, default_value = "ws://127.0.0.1:8080")]
    server: String,
    #[arg(long)]
    script: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for transcripts and the run summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let script = match Script::load(&args.script) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(&script, &args.server, args.seed).await {
        Ok(outcome) => {
            if let Some(dir) = &args.out {
                if let Err(e) = write_transcripts(&outcome, dir) {
                    eprintln!("cannot write transcripts: {e}");
                    return ExitCode::from(2);
                }
            }
            println!(
                "{}: {:?} after {} steps, scores {:?}",
                outcome.script, outcome.result, outcome.steps, outcome.final_scores
            );
            ExitCode::SUCCESS
        }
        Err(e @ HarnessError::AssertionFailed { .. }) => {
            eprintln!("{}: FAILED {e}", script.name);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}: {e}", script.name);
            ExitCode::from(2)
        }
    }
}
