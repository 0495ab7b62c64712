use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lexbridge_core::pipeline::{
    cmd_all, cmd_convert, cmd_corpus, cmd_embed, cmd_graph, cmd_link, PipelineConfig, PipelineError, StageOutcome,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Convert,
    Corpus,
    Embed,
    Link,
    Graph,
    All,
}

/// Convert JLS laws to Akoma Ntoso and link provisions across countries.
#[derive(Debug, Parser)]
#[command(name = "lexbridge", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Pipeline configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run_id` from the configuration.
    #[arg(long)]
    run_id: Option<String>,
}

fn run(args: &Args) -> Result<StageOutcome, PipelineError> {
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(id) = &args.run_id {
        cfg.run_id = id.clone();
        cfg.validate()?;
    }
    match args.command {
        Command::Convert => cmd_convert(&cfg),
        Command::Corpus => cmd_corpus(&cfg),
        Command::Embed => cmd_embed(&cfg),
        Command::Link => cmd_link(&cfg),
        Command::Graph => cmd_graph(&cfg),
        Command::All => cmd_all(&cfg),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{w}");
            }
            for p in &outcome.outputs {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("ERROR {} {message}", e.code());
            ExitCode::from(match e {
                PipelineError::ConfigInvalid(_) => 2,
                PipelineError::StageInputMissing { .. } => 3,
                _ => 1,
            })
        }
    }
}
