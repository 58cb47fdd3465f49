use std::path::PathBuf;

use clap::Parser;
use miboard_server::{Overrides, Server, ServerConfig};

/// MiBoard game server.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(long, env = "MIBOARD_PORT")]
    port: Option<u16>,
    /// Directory of corpus text files.
    #[arg(long, env = "MIBOARD_CORPUS")]
    corpus: Option<PathBuf>,
    /// Where game logs are written.
    #[arg(long, env = "MIBOARD_LOG_DIR")]
    log_dir: Option<PathBuf>,
    /// Server configuration file.
    #[arg(long, env = "MIBOARD_CONFIG")]
    config: Option<PathBuf>,
    /// Base seed for every game's random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Run discussion timers on a clock advanced through POST /control/advance.
    #[arg(long)]
    virtual_clock: bool,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let cli = Cli::parse();
    let config = ServerConfig::load(
        cli.config.as_deref(),
        Overrides {
            port: cli.port,
            corpus: cli.corpus,
            log_dir: cli.log_dir,
            seed: cli.seed,
            virtual_clock: cli.virtual_clock,
        },
    )?;
    let server = Server::start(config).await?;
    tokio::signal::ctrl_c().await?;
    tracing::info!("shutting down");
    server.shutdown().await;
    Ok(())
}
